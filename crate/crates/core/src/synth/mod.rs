//! Synthetic text-to-graph pre-training data.
//!
//! An explanation graph is grown backwards from a KB concept, turned into a
//! natural-language query at one of three difficulty levels, and paired with
//! a knowledge source of gold triples plus nearby distractors.

use thiserror::Error;

use crate::graph::GraphError;
use crate::kb::KbError;

mod baseline;
mod corpus;
mod grow;
mod knowledge;
mod params;
mod query;
mod templates;

pub use baseline::{baseline_record, emit_baseline, BaselineTask};
pub use corpus::{
    build_instance, emit_corpus, CorpusConfig, EmitStats, OutputFormat, QueryInstance, Record,
};
pub use grow::synthesize_graph;
pub use knowledge::{build_knowledge_source, size_bounds};
pub use params::{Difficulty, Mix, SynthParams};
pub use query::{make_query, source_concepts, ANSWER, HIDDEN};
pub use templates::{Template, TemplateBank};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no graph within size bounds after {attempts} attempts")]
    SynthesisExhausted { attempts: usize },
    #[error("no template for relation '{0}'")]
    MissingTemplate(String),
    #[error("bad template: {0}")]
    Template(String),
    #[error("gold graph unusable: {0}")]
    InvalidGold(String),
    #[error("knowledge source needs {needed} distractors, found {found}")]
    InsufficientDistractors { needed: usize, found: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io: {0}")]
    Io(String),
}
