mod corpus;
mod ingest;
mod score;
mod stats;

use std::fmt::Display;

pub use corpus::{baseline, corpus, BaselineArgs, CorpusArgs};
pub use ingest::{ingest, IngestArgs};
pub use score::{eval, validate, EvalArgs, ValidateArgs};
pub use stats::{stats, StatsArgs};

/// Bad input, unreadable files or parse errors.
pub const EXIT_INPUT: u8 = 2;
/// Synthesis could not meet its budget.
pub const EXIT_BUDGET: u8 = 3;

pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

pub type CmdResult = Result<(), Failure>;

/// Tags any error as an input failure.
pub fn input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure {
        code: EXIT_INPUT,
        error: e.into(),
    }
}

pub fn input_msg(msg: impl Display) -> Failure {
    input(anyhow::anyhow!("{msg}"))
}

pub trait OrInput<T> {
    fn or_input(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> OrInput<T> for Result<T, E> {
    fn or_input(self) -> Result<T, Failure> {
        self.map_err(input)
    }
}
