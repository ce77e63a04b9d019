//! Synthetic explanation-graph corpora and structural graph evaluation.
//!
//! The pipeline runs in four stages, one module each:
//!
//! - [`graph`]: triples, explanation graphs, the pipe and parenthesized text
//!   formats, and structural predicates (DAG, connectivity, sinks).
//! - [`kb`]: streaming ingestion of a ConceptNet assertion dump into an
//!   immutable, persistable index with incoming/outgoing adjacency.
//! - [`synth`]: back-to-front graph synthesis, three-difficulty query
//!   construction, simulated knowledge sources and corpus emission.
//! - [`metrics`]: structural validation (StCA), exact graph edit distance,
//!   assignment-based edge matching (G-BS) and relation statistics.

pub mod graph;
pub mod kb;
pub mod metrics;
pub mod seed;
pub mod synth;

pub use graph::{Concept, ExplanationGraph, GraphError, GraphFormat, Relation, RelationSet, Triple};
