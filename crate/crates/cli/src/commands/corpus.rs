use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use serde::Deserialize;

use expgraph::graph::SYNTHETIC16;
use expgraph::kb::{load_index, KbError};
use expgraph::synth::{
    emit_baseline, emit_corpus, BaselineTask, CorpusConfig, Mix, OutputFormat, SynthError, SynthParams,
    TemplateBank,
};

use super::{input, input_msg, CmdResult, Failure, OrInput, EXIT_BUDGET};
use crate::io::write_atomic;
use crate::{Format, Global};

#[derive(Args, Debug)]
pub struct CorpusArgs {
    /// Index built by `ingest`.
    #[arg(long)]
    index: PathBuf,
    /// Corpus file to write.
    #[arg(short, long)]
    out: PathBuf,
    /// Number of records; overrides the config file.
    #[arg(long)]
    total: Option<usize>,
    /// Template bank (relation<TAB>template); overrides the config file.
    #[arg(long)]
    templates: Option<PathBuf>,
}

/// Run configuration file for `corpus`.
#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunConfig {
    total: usize,
    seed: u64,
    workers: usize,
    format: OutputFormat,
    template_bank: Option<PathBuf>,
    /// Fresh seeds tried per record before the run fails.
    max_redraws: usize,
    /// Largest tolerated share of abandoned seeds before exiting with 3.
    max_redraw_rate: f64,
    mix: Mix,
    synth: SynthParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        let c = CorpusConfig::default();
        RunConfig {
            total: c.total,
            seed: c.seed,
            workers: c.workers,
            format: OutputFormat::Text,
            template_bank: None,
            max_redraws: c.max_redraws,
            max_redraw_rate: 0.5,
            mix: c.mix,
            synth: c.synth,
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, Failure> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_msg(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| input_msg(format!("{}: {e}", path.display())))
}

fn output_format(global: &Global, fallback: OutputFormat) -> OutputFormat {
    match global.format {
        Some(Format::Text) => OutputFormat::Text,
        Some(Format::Jsonl) => OutputFormat::Jsonl,
        None => fallback,
    }
}

#[derive(Debug)]
struct RedrawRateExceeded(String);

impl std::fmt::Display for RedrawRateExceeded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for RedrawRateExceeded {}

fn budget(e: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: EXIT_BUDGET,
        error: e.into(),
    }
}

fn synth_failure(e: SynthError) -> Failure {
    match e {
        SynthError::SynthesisExhausted { .. }
        | SynthError::InsufficientDistractors { .. }
        | SynthError::Kb(KbError::NoQualifyingConcept { .. }) => budget(e),
        other => input(other),
    }
}

pub fn corpus(args: &CorpusArgs, global: &Global) -> CmdResult {
    let run = load_config(global.config.as_deref())?;
    let cfg = CorpusConfig {
        total: args.total.unwrap_or(run.total),
        seed: global.seed.unwrap_or(run.seed),
        workers: global.workers.unwrap_or(run.workers),
        mix: run.mix,
        synth: run.synth.clone(),
        max_redraws: run.max_redraws,
    };
    let format = output_format(global, run.format);
    let bank = match args.templates.as_ref().or(run.template_bank.as_ref()) {
        Some(p) => TemplateBank::load(p).or_input()?,
        None => TemplateBank::default(),
    };
    bank.check_covers_synthetic16().or_input()?;
    let index = load_index(&args.index).or_input()?;
    log::info!(
        "index: {} concepts, {} triples",
        index.concept_count(),
        index.triple_count()
    );

    let started = Instant::now();
    let stats = write_atomic(&args.out, |w| {
        let stats = emit_corpus(&index, &bank, &cfg, |record| {
            writeln!(w, "{}", record.to_line(format))
        })?;
        let attempts = stats.records + stats.redraws;
        let rate = stats.redraws as f64 / attempts as f64;
        if rate > run.max_redraw_rate {
            return Err(RedrawRateExceeded(format!(
                "{} of {attempts} seeds failed ({:.1}%), above the {:.1}% limit",
                stats.redraws,
                rate * 100.0,
                run.max_redraw_rate * 100.0
            ))
            .into());
        }
        Ok(stats)
    })
    .map_err(|e| {
        if e.is::<RedrawRateExceeded>() {
            return budget(e);
        }
        match e.downcast::<SynthError>() {
            Ok(s) => synth_failure(s),
            Err(e) => input(e),
        }
    })?;
    let secs = started.elapsed().as_secs_f64();

    println!("records   {}", stats.records);
    println!("easy      {}", stats.easy);
    println!("normal    {}", stats.normal);
    println!("hard      {}", stats.hard);
    println!("redraws   {}", stats.redraws);
    println!(
        "elapsed   {secs:.2}s ({:.0} records/s)",
        stats.records as f64 / secs.max(1e-9)
    );
    println!("gold relation distribution ({} triples):", stats.gold_triples);
    for (name, &n) in SYNTHETIC16.iter().zip(stats.relation_counts.iter()) {
        println!(
            "  {name:<18}{n:>10}{:>9.2}%",
            n as f64 / stats.gold_triples.max(1) as f64 * 100.0
        );
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct BaselineArgs {
    /// Index built by `ingest`.
    #[arg(long)]
    index: PathBuf,
    /// Corpus file to write.
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long, default_value_t = 300_000)]
    total: usize,
    /// Comma-separated tasks, cycled by record id: link, tail.
    #[arg(long, default_value = "link,tail", value_delimiter = ',')]
    tasks: Vec<String>,
}

pub fn baseline(args: &BaselineArgs, global: &Global) -> CmdResult {
    let tasks: Vec<BaselineTask> = args
        .tasks
        .iter()
        .map(|t| t.trim().parse())
        .collect::<Result<_, _>>()
        .or_input()?;
    let format = output_format(global, OutputFormat::Text);
    let index = load_index(&args.index).or_input()?;
    let seed = global.seed.unwrap_or(0);
    let n = write_atomic(&args.out, |w| {
        Ok(emit_baseline(&index, &tasks, args.total, seed, |r| {
            writeln!(w, "{}", r.to_line(format))
        })?)
    })
    .or_input()?;
    println!("records   {n}");
    Ok(())
}
