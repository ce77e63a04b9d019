//! ConceptNet ingestion into an immutable adjacency index.

pub mod dumpgen;
mod index;
mod ingest;
mod merge;
mod persist;

use thiserror::Error;

pub use index::{IndexBuilder, IndexMeta, KbIndex, KbTriple};
pub use ingest::{ingest, ingest_path, IngestConfig, SkipReport};
pub use merge::{MergeMap, MergeTarget};
pub use persist::{decode_index, encode_index, load_index, save_index, FORMAT_VERSION, MAGIC};

#[derive(Debug, Error)]
pub enum KbError {
    #[error("{0}")]
    Io(String),
    #[error("malformed dump line {line}: {reason}")]
    MalformedDumpLine { line: u64, reason: String },
    #[error("no triples survived ingest")]
    EmptyIndex,
    #[error("index format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u16, expected: u16 },
    #[error("index checksum mismatch (truncated or corrupted file)")]
    ChecksumMismatch,
    #[error("not an index file (bad magic bytes)")]
    BadMagic,
    #[error("corrupt index payload: {0}")]
    Corrupt(String),
    #[error("concept '{0}' is not in the index")]
    UnknownConcept(String),
    #[error("relation '{0}' is not one of the sixteen canonical relations")]
    UnknownRelation(String),
    #[error("no concept has at least {min_incoming} incoming triples")]
    NoQualifyingConcept { min_incoming: usize },
    #[error("merge map: {0}")]
    MergeMap(String),
}
