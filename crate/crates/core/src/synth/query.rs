use std::collections::HashSet;

use rand::Rng;

use super::{Difficulty, SynthError, Template, TemplateBank};
use crate::graph::{Concept, ExplanationGraph, Triple};

pub const ANSWER: &str = "[ANSWER]";
pub const HIDDEN: &str = "[I_E]";

/// Roles of the nodes of a single-sink graph, with triples in canonical order.
struct Roles<'g> {
    order: Vec<Triple>,
    sink: &'g Concept,
    sources: HashSet<&'g Concept>,
}

impl<'g> Roles<'g> {
    fn of(gold: &'g ExplanationGraph) -> Result<Self, SynthError> {
        let sinks = gold.sinks();
        if sinks.len() != 1 {
            return Err(SynthError::InvalidGold(format!(
                "expected one sink, found {}",
                sinks.len()
            )));
        }
        let order = gold.linearize_dfs()?;
        Ok(Roles {
            order,
            sink: sinks.into_iter().next().expect("one sink"),
            sources: gold.sources().into_iter().collect(),
        })
    }

    fn is_source(&self, c: &Concept) -> bool {
        self.sources.contains(c)
    }

    /// Surface shown in the query: sources verbatim, the sink as `[ANSWER]`,
    /// everything else as `[I_E]`.
    fn surface<'a>(&self, c: &'a Concept) -> &'a str {
        if c == self.sink {
            ANSWER
        } else if self.is_source(c) {
            c.as_str()
        } else {
            HIDDEN
        }
    }

    fn connective(&self, t: &Triple) -> &'static str {
        if self.is_source(&t.head) {
            " and "
        } else {
            " then "
        }
    }
}

/// Sources in order of first appearance along the canonical linearization.
pub fn source_concepts(gold: &ExplanationGraph) -> Result<Vec<Concept>, SynthError> {
    let order = gold.linearize_dfs()?;
    let sources = gold.sources();
    let mut out: Vec<Concept> = Vec::new();
    for t in &order {
        if sources.contains(&t.head) && !out.contains(&t.head) {
            out.push(t.head.clone());
        }
    }
    Ok(out)
}

/// Builds the query text for `gold` at the given difficulty. The answer is
/// the graph's sink.
///
/// * Easy: one clause per triple in canonical order, each the relation
///   template filled with the source text, `[ANSWER]` or `[I_E]`; clauses
///   whose head is a source are joined with "and", continuations with "then".
/// * Normal: the same clauses with hidden nodes dropped, recast as a single
///   "What ... ?" question.
/// * Hard: only the first source and its first relation, plus the remaining
///   sources as "with" constraints.
pub fn make_query<R: Rng + ?Sized>(
    gold: &ExplanationGraph,
    difficulty: Difficulty,
    templates: &TemplateBank,
    rng: &mut R,
) -> Result<(String, Concept), SynthError> {
    let roles = Roles::of(gold)?;
    let text = match difficulty {
        Difficulty::Easy => easy(&roles, templates, rng)?,
        Difficulty::Normal => normal(&roles, templates, rng)?,
        Difficulty::Hard => hard(gold, &roles, templates, rng)?,
    };
    Ok((text, roles.sink.clone()))
}

fn easy<R: Rng + ?Sized>(
    roles: &Roles<'_>,
    templates: &TemplateBank,
    rng: &mut R,
) -> Result<String, SynthError> {
    let mut out = String::new();
    for (i, t) in roles.order.iter().enumerate() {
        let template = templates.choose(&t.relation, rng)?;
        if i > 0 {
            out.push_str(roles.connective(t));
        }
        out.push_str(&template.render(roles.surface(&t.head), roles.surface(&t.tail)));
    }
    out.push_str(" ?");
    Ok(out)
}

fn normal<R: Rng + ?Sized>(
    roles: &Roles<'_>,
    templates: &TemplateBank,
    rng: &mut R,
) -> Result<String, SynthError> {
    let mut out = String::from("What ");
    for (i, t) in roles.order.iter().enumerate() {
        let template = templates.choose(&t.relation, rng)?;
        if i > 0 {
            out.push_str(roles.connective(t));
        }
        let retained = roles.is_source(&t.head).then(|| t.head.as_str());
        out.push_str(&clause(retained, template));
    }
    out.push_str(" ?");
    Ok(out)
}

fn hard<R: Rng + ?Sized>(
    gold: &ExplanationGraph,
    roles: &Roles<'_>,
    templates: &TemplateBank,
    rng: &mut R,
) -> Result<String, SynthError> {
    let first = roles.order.first().ok_or(SynthError::InvalidGold("empty graph".into()))?;
    let template = templates.choose(&first.relation, rng)?;
    let mut out = String::from("What ");
    out.push_str(&clause(Some(first.head.as_str()), template));
    for s in source_concepts(gold)?.iter().filter(|s| **s != first.head) {
        out.push_str(" with ");
        out.push_str(s.as_str());
    }
    out.push_str(" ?");
    Ok(out)
}

fn clause(head: Option<&str>, template: &Template) -> String {
    let phrase = template.phrase();
    match head {
        None => phrase.trim_start_matches([',', ' ']).to_string(),
        Some(h) if phrase.starts_with([',', '\'']) => format!("{h}{phrase}"),
        Some(h) => format!("{h} {phrase}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_graph, GraphFormat};
    use rand::rngs::mock::StepRng;

    fn eating() -> ExplanationGraph {
        parse_graph(
            "eating_quickly : causes : eating_too_much | confetti : usedfor : celebrating | celebrating : hassubevent : eating_too_much",
            GraphFormat::Pipe,
        )
        .unwrap()
    }

    /// Bank with one template per relation so the output is fixed.
    fn bank(causes: &str, used_for: &str, subevent: &str) -> TemplateBank {
        TemplateBank::parse(&format!(
            "causes\t{causes}\nusedfor\t{used_for}\nhassubevent\t{subevent}\n"
        ))
        .unwrap()
    }

    #[test]
    fn easy_sample() {
        let b = bank("Y is a result of X", "X is used for Y", "Y is a subevent of X");
        let (q, a) = make_query(&eating(), Difficulty::Easy, &b, &mut StepRng::new(0, 0)).unwrap();
        assert_eq!(
            q,
            "[ANSWER] is a result of eating_quickly and confetti is used for [I_E] then [ANSWER] is a subevent of [I_E] ?"
        );
        assert_eq!(a.as_str(), "eating_too_much");
    }

    #[test]
    fn normal_sample() {
        let b = bank("X causes Y", "X is used for Y", "Y is a subevent of X");
        let (q, _) = make_query(&eating(), Difficulty::Normal, &b, &mut StepRng::new(0, 0)).unwrap();
        assert_eq!(q, "What eating_quickly causes and confetti is used for then is a subevent of ?");
    }

    #[test]
    fn hard_sample() {
        let b = bank("Y is a result of X", "X is used for Y", "Y is a subevent of X");
        let (q, _) = make_query(&eating(), Difficulty::Hard, &b, &mut StepRng::new(0, 0)).unwrap();
        assert_eq!(q, "What eating_quickly is a result of with confetti ?");
    }

    #[test]
    fn sources_in_linearized_order() {
        let names: Vec<String> = source_concepts(&eating())
            .unwrap()
            .into_iter()
            .map(String::from)
            .collect();
        assert_eq!(names, ["eating_quickly", "confetti"]);
    }

    #[test]
    fn missing_template_is_reported() {
        let b = TemplateBank::parse("causes\tX causes Y\n").unwrap();
        let err = make_query(&eating(), Difficulty::Easy, &b, &mut StepRng::new(0, 0)).unwrap_err();
        assert!(matches!(err, SynthError::MissingTemplate(r) if r == "used_for"));
    }

    #[test]
    fn multi_sink_gold_rejected() {
        let g = parse_graph("a : causes : b | a : causes : c", GraphFormat::Pipe).unwrap();
        let b = TemplateBank::default();
        assert!(matches!(
            make_query(&g, Difficulty::Easy, &b, &mut StepRng::new(0, 0)),
            Err(SynthError::InvalidGold(_))
        ));
    }

    #[test]
    fn punctuation_phrases_attach() {
        let t = Template::parse("X's material is Y").unwrap();
        assert_eq!(clause(Some("cake"), &t), "cake's material is");
        let t = Template::parse("X, which is part of Y").unwrap();
        assert_eq!(clause(Some("wheel"), &t), "wheel, which is part of");
        assert_eq!(clause(None, &t), "which is part of");
    }
}
