use std::path::PathBuf;

use clap::Args;
use expgraph::metrics::{distribution_from_corpus, ReferenceTable};

use super::{CmdResult, OrInput};
use crate::io::open;

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// Corpus written by `corpus` (either line format).
    corpus: PathBuf,
    /// Reference table (`relation<TAB>percent`) to print deltas against.
    #[arg(long, conflicts_with = "builtin_reference")]
    reference: Option<PathBuf>,
    /// Compare against the bundled reference distribution.
    #[arg(long)]
    builtin_reference: bool,
}

pub fn stats(args: &StatsArgs) -> CmdResult {
    let reference = match (&args.reference, args.builtin_reference) {
        (Some(p), _) => Some(ReferenceTable::load(p).or_input()?),
        (None, true) => Some(ReferenceTable::default()),
        (None, false) => None,
    };
    let dist = distribution_from_corpus(open(&args.corpus).or_input()?)
        .map_err(|e| anyhow::anyhow!("{}: {e}", args.corpus.display()))
        .or_input()?;
    print!("{}", dist.table(reference.as_ref()));
    if let Some(r) = &reference {
        let worst = dist
            .rows(Some(r))
            .iter()
            .filter_map(|row| row.delta.map(f64::abs))
            .fold(0.0, f64::max);
        println!("max |delta| {worst:.2}");
    }
    Ok(())
}
