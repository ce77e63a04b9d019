use std::path::PathBuf;

use clap::Args;
use expgraph::graph::SYNTHETIC16;
use expgraph::kb::{encode_index, ingest_path, IngestConfig, MergeMap};

use super::{CmdResult, OrInput};
use crate::io::write_atomic;

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// ConceptNet assertions dump, plain or gzip.
    dump: PathBuf,
    /// Index file to write.
    #[arg(short, long)]
    out: PathBuf,
    /// Relation merge map; the bundled default is used when omitted.
    #[arg(long)]
    merge_map: Option<PathBuf>,
    /// Malformed lines tolerated before giving up.
    #[arg(long, default_value_t = 1000)]
    bad_line_budget: usize,
    /// Keep single-character and purely numeric concepts.
    #[arg(long)]
    keep_degenerate: bool,
    /// Build timestamp recorded in the index header (seconds since epoch).
    #[arg(long, default_value_t = 0)]
    timestamp: u64,
}

pub fn ingest(args: &IngestArgs) -> CmdResult {
    let merge = match &args.merge_map {
        Some(p) => MergeMap::load(p).or_input()?,
        None => MergeMap::default(),
    };
    let config = IngestConfig {
        bad_line_budget: args.bad_line_budget,
        drop_degenerate: !args.keep_degenerate,
        build_timestamp: args.timestamp,
    };
    let started = std::time::Instant::now();
    let (index, report) = ingest_path(&args.dump, &merge, &config).or_input()?;
    let bytes = encode_index(&index);
    write_atomic(&args.out, |w| Ok(w.write_all(&bytes)?)).or_input()?;
    log::info!("ingest finished in {:.1?}", started.elapsed());

    println!("lines read          {}", report.lines);
    println!("triples kept        {}", report.kept);
    println!("relatedTo dropped   {}", report.related_to_dropped);
    println!("other dropped       {}", report.other_dropped);
    println!("merged              {}", report.merged);
    println!("unknown relation    {}", report.unknown_relation);
    println!("non-English         {}", report.non_english);
    println!("degenerate concept  {}", report.degenerate);
    println!("invalid concept     {}", report.invalid_concept);
    println!("self loops          {}", report.self_loops);
    println!("malformed           {}", report.malformed);
    println!("duplicates          {}", report.duplicates);
    println!();
    println!("concepts            {}", index.concept_count());
    println!("relation histogram:");
    let hist = index.relation_histogram();
    let total: u64 = hist.iter().sum();
    for (name, &n) in SYNTHETIC16.iter().zip(hist.iter()) {
        if n > 0 {
            println!("  {name:<18}{n:>10}{:>9.2}%", n as f64 / total as f64 * 100.0);
        }
    }
    println!("checksum {}", index.content_checksum());
    Ok(())
}
