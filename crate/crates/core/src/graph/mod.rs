//! Triples, explanation graphs, their text formats and structural predicates.

mod concept;
mod explanation;
mod format;
mod relation;

use thiserror::Error;

pub use concept::Concept;
pub use explanation::{ExplanationGraph, Triple};
pub use format::{parse_graph, parse_graph_checked, serialize_graph, serialize_triples, GraphFormat};
pub use relation::{Relation, RelationOrigin, RelationSet, SYNTHETIC16};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid concept '{0}'")]
    InvalidConcept(String),
    #[error("invalid relation '{0}'")]
    InvalidRelation(String),
    #[error("duplicate relation '{0}' in relation set")]
    DuplicateRelation(String),
    #[error("malformed triple: {0}")]
    MalformedTriple(String),
    #[error("relation '{0}' is not in the active relation set")]
    UnknownRelation(String),
    #[error("graph is empty")]
    EmptyGraph,
    #[error("graph contains a directed cycle")]
    CyclicGraph,
    #[error("graph is not weakly connected")]
    DisconnectedGraph,
    #[error("{0}")]
    Io(String),
}
