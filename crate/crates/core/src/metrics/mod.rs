//! Structural evaluation of predicted explanation graphs.

use thiserror::Error;

mod assignment;
mod eval;
mod gbs;
mod ged;
mod stats;
mod stca;

pub use assignment::max_weight_assignment;
pub use eval::{
    corpus_eval, EvalConfig, EvalSummary, ExternalScores, GoldInstance, InstanceScore, Prediction,
};
pub use gbs::{graph_bertscore, EdgeSimilarity, ExactMatch, GbsScore, TokenF1};
pub use ged::{graph_edit_distance, EditOp, GedConfig, GedError, GedResult};
pub use stats::{distribution_from_corpus, DistributionRow, ReferenceTable, RelationDistribution};
pub use stca::{anchored_nodes, validate_structure, Anchoring, StcaChecks, StcaConfig, StcaReport};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("alignment error: {0}")]
    Alignment(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("io: {0}")]
    Io(String),
}
