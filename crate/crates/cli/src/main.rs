mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Failure;

#[derive(Parser)]
#[command(name = "expgraph", version, about = "Synthesize explanation-graph corpora and score predicted graphs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Run seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for corpus synthesis; output does not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// TOML run configuration for `corpus`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Corpus line format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Build a knowledge-base index from a ConceptNet assertions dump.
    Ingest(commands::IngestArgs),
    /// Emit a text-to-graph pre-training corpus.
    Corpus(commands::CorpusArgs),
    /// Emit a link- or tail-prediction baseline corpus.
    BaselineCorpus(commands::BaselineArgs),
    /// Check predicted graphs against the structural constraints.
    Validate(commands::ValidateArgs),
    /// Score predicted graphs against gold graphs.
    Eval(commands::EvalArgs),
    /// Relation distribution of a corpus's target graphs.
    Stats(commands::StatsArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .parse_filters(&cli.global.log_level)
        .target(env_logger::Target::Stderr)
        .init();
    let result = match &cli.command {
        Command::Ingest(a) => commands::ingest(a),
        Command::Corpus(a) => commands::corpus(a, &cli.global),
        Command::BaselineCorpus(a) => commands::baseline(a, &cli.global),
        Command::Validate(a) => commands::validate(a),
        Command::Eval(a) => commands::eval(a),
        Command::Stats(a) => commands::stats(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
