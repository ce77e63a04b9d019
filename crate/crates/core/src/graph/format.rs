use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Concept, ExplanationGraph, GraphError, Relation, RelationSet, Triple};

/// The two line-oriented graph syntaxes.
///
/// * `Pipe`: `head : relation : tail | head : relation : tail`, concepts with
///   underscores and relations in compact form (`usedfor`).
/// * `Paren`: `(head; relation; tail)(head; relation; tail)`, concepts and
///   relations with spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphFormat {
    Pipe,
    Paren,
}

impl GraphFormat {
    /// Guesses the format of a serialized graph from its first character.
    pub fn detect(text: &str) -> GraphFormat {
        if text.trim_start().starts_with('(') {
            GraphFormat::Paren
        } else {
            GraphFormat::Pipe
        }
    }
}

impl FromStr for GraphFormat {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pipe" => Ok(GraphFormat::Pipe),
            "paren" => Ok(GraphFormat::Paren),
            other => Err(GraphError::Io(format!("unknown graph format '{other}'"))),
        }
    }
}

impl fmt::Display for GraphFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphFormat::Pipe => "pipe",
            GraphFormat::Paren => "paren",
        })
    }
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<ExplanationGraph, GraphError> {
    parse_graph_checked(text, format, None)
}

/// Parses a graph and, when `relations` is given, rejects labels outside it.
pub fn parse_graph_checked(
    text: &str,
    format: GraphFormat,
    relations: Option<&RelationSet>,
) -> Result<ExplanationGraph, GraphError> {
    if text.trim().is_empty() {
        return Err(GraphError::EmptyGraph);
    }
    let fields = match format {
        GraphFormat::Pipe => pipe_fields(text)?,
        GraphFormat::Paren => paren_fields(text)?,
    };
    let mut triples = Vec::with_capacity(fields.len());
    for [h, r, t] in fields {
        let triple = Triple::parse(h, r, t)?;
        if let Some(set) = relations {
            if !set.contains(&triple.relation) {
                return Err(GraphError::UnknownRelation(triple.relation.to_string()));
            }
        }
        triples.push(triple);
    }
    ExplanationGraph::new(triples)
}

fn pipe_fields(text: &str) -> Result<Vec<[&str; 3]>, GraphError> {
    text.split('|')
        .map(|segment| {
            let parts: Vec<&str> = segment.trim().split(" : ").collect();
            match parts.as_slice() {
                [h, r, t] => Ok([*h, *r, *t]),
                _ => Err(GraphError::MalformedTriple(format!(
                    "expected 'head : relation : tail', got '{}'",
                    segment.trim()
                ))),
            }
        })
        .collect()
}

fn paren_fields(text: &str) -> Result<Vec<[&str; 3]>, GraphError> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let Some(body) = rest.strip_prefix('(') else {
            return Err(GraphError::MalformedTriple(format!(
                "expected '(' at '{}'",
                truncate(rest)
            )));
        };
        let close = body
            .find(')')
            .ok_or_else(|| GraphError::MalformedTriple("unbalanced '('".into()))?;
        let inner = &body[..close];
        if inner.contains('(') {
            return Err(GraphError::MalformedTriple("nested '('".into()));
        }
        let parts: Vec<&str> = inner.split(';').collect();
        match parts.as_slice() {
            [h, r, t] => out.push([*h, *r, *t]),
            _ => {
                return Err(GraphError::MalformedTriple(format!(
                    "expected '(head; relation; tail)', got '({inner})'"
                )))
            }
        }
        rest = body[close + 1..].trim_start();
    }
    Ok(out)
}

fn truncate(s: &str) -> &str {
    match s.char_indices().nth(24) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

pub fn serialize_graph(g: &ExplanationGraph, format: GraphFormat) -> Result<String, GraphError> {
    if g.is_empty() {
        return Err(GraphError::EmptyGraph);
    }
    Ok(serialize_triples(g.triples(), format))
}

/// Serializes any triple list (knowledge sources are not graphs).
pub fn serialize_triples(triples: &[Triple], format: GraphFormat) -> String {
    let mut out = String::new();
    for (i, t) in triples.iter().enumerate() {
        match format {
            GraphFormat::Pipe => {
                if i > 0 {
                    out.push_str(" | ");
                }
                push_pipe(&mut out, &t.head, &t.relation, &t.tail);
            }
            GraphFormat::Paren => {
                out.push('(');
                out.push_str(&t.head.spaced());
                out.push_str("; ");
                out.push_str(&t.relation.spaced());
                out.push_str("; ");
                out.push_str(&t.tail.spaced());
                out.push(')');
            }
        }
    }
    out
}

fn push_pipe(out: &mut String, h: &Concept, r: &Relation, t: &Concept) {
    out.push_str(h.as_str());
    out.push_str(" : ");
    out.push_str(&r.compact());
    out.push_str(" : ");
    out.push_str(t.as_str());
}
