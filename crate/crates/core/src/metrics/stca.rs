use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{Concept, ExplanationGraph, RelationSet};

/// How a node is matched against belief or argument text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Anchoring {
    /// The node's words appear as a contiguous run of whole tokens.
    #[default]
    Token,
    /// The node's text appears anywhere in the normalized source string.
    Substring,
}

impl FromStr for Anchoring {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "token" => Ok(Anchoring::Token),
            "substring" => Ok(Anchoring::Substring),
            _ => Err(format!("unknown anchoring mode '{s}'")),
        }
    }
}

impl fmt::Display for Anchoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Anchoring::Token => "token",
            Anchoring::Substring => "substring",
        })
    }
}

#[derive(Debug, Clone)]
pub struct StcaConfig {
    pub relations: RelationSet,
    pub min_triples: usize,
    pub max_triples: usize,
    pub word_limit: usize,
    /// Nodes required from each of belief and argument.
    pub min_anchored: usize,
    pub anchoring: Anchoring,
}

impl StcaConfig {
    pub fn new(relations: RelationSet) -> Self {
        StcaConfig {
            relations,
            min_triples: 3,
            max_triples: 8,
            word_limit: 3,
            min_anchored: 2,
            anchoring: Anchoring::Token,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StcaChecks {
    pub node_word_limit: bool,
    pub relation_vocabulary: bool,
    pub connected_dag: bool,
    pub size_window: bool,
    pub belief_anchoring: bool,
    pub argument_anchoring: bool,
}

impl StcaChecks {
    pub const FAILED: StcaChecks = StcaChecks {
        node_word_limit: false,
        relation_vocabulary: false,
        connected_dag: false,
        size_window: false,
        belief_anchoring: false,
        argument_anchoring: false,
    };

    pub fn all(&self) -> bool {
        self.node_word_limit
            && self.relation_vocabulary
            && self.connected_dag
            && self.size_window
            && self.belief_anchoring
            && self.argument_anchoring
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StcaReport {
    pub is_valid: bool,
    pub checks: StcaChecks,
    pub diagnostics: Vec<String>,
}

impl StcaReport {
    /// Report for a prediction that could not be parsed at all.
    pub fn unparseable(reason: &str) -> Self {
        StcaReport {
            is_valid: false,
            checks: StcaChecks::FAILED,
            diagnostics: vec![format!("unparseable graph: {reason}")],
        }
    }
}

/// Lowercased words with punctuation turned into spaces.
fn normalize(text: &str) -> Vec<String> {
    text.chars()
        .map(|c| {
            if c.is_alphanumeric() || c.is_whitespace() {
                c.to_lowercase().next().unwrap_or(c)
            } else {
                ' '
            }
        })
        .collect::<String>()
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn anchored(node: &Concept, source: &[String], joined: &str, mode: Anchoring) -> bool {
    let words = normalize(&node.spaced());
    if words.is_empty() {
        return false;
    }
    match mode {
        Anchoring::Token => source.windows(words.len()).any(|w| w == words.as_slice()),
        Anchoring::Substring => joined.contains(&words.join(" ")),
    }
}

/// Nodes of `g` found in `text` under the configured anchoring mode.
pub fn anchored_nodes<'g>(g: &'g ExplanationGraph, text: &str, mode: Anchoring) -> Vec<&'g Concept> {
    let source = normalize(text);
    let joined = source.join(" ");
    g.nodes()
        .into_iter()
        .filter(|c| anchored(c, &source, &joined, mode))
        .collect()
}

/// Checks every structural constraint independently; a graph is valid when
/// all of them hold.
pub fn validate_structure(
    g: &ExplanationGraph,
    belief: &str,
    argument: &str,
    config: &StcaConfig,
) -> StcaReport {
    let mut diagnostics = Vec::new();

    let long: Vec<&Concept> = g
        .nodes()
        .into_iter()
        .filter(|c| c.word_count() > config.word_limit)
        .collect();
    for c in &long {
        diagnostics.push(format!(
            "node '{}' has {} words (limit {})",
            c.spaced(),
            c.word_count(),
            config.word_limit
        ));
    }

    let mut bad_relations: Vec<&str> = g
        .triples()
        .iter()
        .filter(|t| !config.relations.contains(&t.relation))
        .map(|t| t.relation.as_str())
        .collect();
    bad_relations.sort_unstable();
    bad_relations.dedup();
    for r in &bad_relations {
        diagnostics.push(format!("relation '{r}' is not in the relation list"));
    }

    let connected = !g.is_empty() && g.is_connected();
    let dag = g.is_dag();
    if !connected {
        diagnostics.push("graph is not connected".into());
    }
    if !dag {
        diagnostics.push("graph has a cycle".into());
    }

    let size_ok = (config.min_triples..=config.max_triples).contains(&g.len());
    if !size_ok {
        diagnostics.push(format!(
            "graph has {} triples, expected {}..={}",
            g.len(),
            config.min_triples,
            config.max_triples
        ));
    }

    let in_belief = anchored_nodes(g, belief, config.anchoring).len();
    let in_argument = anchored_nodes(g, argument, config.anchoring).len();
    if in_belief < config.min_anchored {
        diagnostics.push(format!(
            "{in_belief} nodes anchored in the belief, need {}",
            config.min_anchored
        ));
    }
    if in_argument < config.min_anchored {
        diagnostics.push(format!(
            "{in_argument} nodes anchored in the argument, need {}",
            config.min_anchored
        ));
    }

    let checks = StcaChecks {
        node_word_limit: long.is_empty(),
        relation_vocabulary: bad_relations.is_empty(),
        connected_dag: connected && dag,
        size_window: size_ok,
        belief_anchoring: in_belief >= config.min_anchored,
        argument_anchoring: in_argument >= config.min_anchored,
    };
    StcaReport {
        is_valid: checks.all(),
        checks,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_graph, GraphFormat, RelationSet};

    fn g(s: &str) -> ExplanationGraph {
        parse_graph(s, GraphFormat::Paren).unwrap()
    }

    fn cfg() -> StcaConfig {
        StcaConfig::new(RelationSet::synthetic16())
    }

    #[test]
    fn token_anchoring_needs_whole_words() {
        let graph = g("(cat; is a; animal)");
        let names: Vec<&str> = anchored_nodes(&graph, "Cats are animals, cat!", Anchoring::Token)
            .into_iter()
            .map(|c| c.as_str())
            .collect();
        assert_eq!(names, ["cat"]);
        let sub = anchored_nodes(&graph, "Cats are animals", Anchoring::Substring);
        assert_eq!(sub.len(), 2);
    }

    #[test]
    fn two_triples_fail_size_only() {
        let graph = g("(dogs; capable of; barking)(barking; causes; noise)");
        let r = validate_structure(&graph, "dogs make noise", "barking dogs noise", &cfg());
        assert!(!r.is_valid);
        assert!(!r.checks.size_window);
        assert!(r.checks.connected_dag && r.checks.relation_vocabulary);
    }

    #[test]
    fn cycle_fails_dag() {
        let graph = g("(a; causes; b)(b; causes; c)(c; causes; a)");
        let r = validate_structure(&graph, "a b", "b c", &cfg());
        assert!(!r.checks.connected_dag);
        assert!(r.checks.size_window);
    }
}
