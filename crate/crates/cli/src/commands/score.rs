use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use expgraph::graph::{parse_graph, ExplanationGraph, GraphFormat, RelationSet};
use expgraph::metrics::{
    corpus_eval, validate_structure, Anchoring, EdgeSimilarity, EvalConfig, ExactMatch, ExternalScores,
    GedConfig, GoldInstance, Prediction, StcaConfig, TokenF1,
};

use super::{input_msg, CmdResult, Failure, OrInput};
use crate::io::{open, read_columns, write_atomic};

#[derive(Args, Debug)]
pub struct StructureArgs {
    /// Allowed relations, one per line; the sixteen synthetic relations when
    /// omitted.
    #[arg(long)]
    relations: Option<PathBuf>,
    /// How nodes are matched against belief and argument text.
    #[arg(long, default_value = "token")]
    anchoring: Anchoring,
}

impl StructureArgs {
    fn config(&self) -> Result<StcaConfig, Failure> {
        let relations = match &self.relations {
            Some(p) => RelationSet::load(p).or_input()?,
            None => RelationSet::synthetic16(),
        };
        let mut cfg = StcaConfig::new(relations);
        cfg.anchoring = self.anchoring;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Graphs, one `id<TAB>graph` per line (pipe or parenthesized format).
    graphs: PathBuf,
    /// Sources, one `id<TAB>belief<TAB>argument` per line.
    #[arg(long)]
    sources: PathBuf,
    #[command(flatten)]
    structure: StructureArgs,
}

struct Source {
    belief: String,
    argument: String,
}

fn read_sources(path: &Path) -> Result<Vec<(String, Source)>, Failure> {
    Ok(read_columns(path, 3)
        .or_input()?
        .into_iter()
        .map(|(_, mut f)| {
            let argument = f.pop().expect("three fields");
            let belief = f.pop().expect("three fields");
            (f.pop().expect("three fields"), Source { belief, argument })
        })
        .collect())
}

fn parse_line_graph(text: &str) -> Result<ExplanationGraph, String> {
    parse_graph(text, GraphFormat::detect(text)).map_err(|e| e.to_string())
}

/// `id<TAB>graph` rows; with `strict`, a graph that does not parse is an
/// input error naming its line.
type GraphRows = Vec<(String, Result<ExplanationGraph, String>)>;

fn read_graphs(path: &Path, strict: bool) -> Result<GraphRows, Failure> {
    let mut out = Vec::new();
    for (line, mut fields) in read_columns(path, 2).or_input()? {
        let text = fields.pop().expect("two fields");
        let id = fields.pop().expect("two fields");
        let graph = parse_line_graph(&text);
        if strict {
            if let Err(e) = &graph {
                return Err(input_msg(format!("{}:{line}: {e}", path.display())));
            }
        }
        out.push((id, graph));
    }
    Ok(out)
}

fn check_aligned<'a>(
    what: &str,
    left: impl Iterator<Item = &'a String>,
    right: impl Iterator<Item = &'a String>,
) -> Result<(), Failure> {
    let left: Vec<&String> = left.collect();
    let right: Vec<&String> = right.collect();
    if left.len() != right.len() {
        return Err(input_msg(format!(
            "{what}: {} rows against {} rows",
            left.len(),
            right.len()
        )));
    }
    for (i, (a, b)) in left.iter().zip(&right).enumerate() {
        if a != b {
            return Err(input_msg(format!("{what}: row {} has id '{a}' but expected '{b}'", i + 1)));
        }
    }
    Ok(())
}

pub fn validate(args: &ValidateArgs) -> CmdResult {
    let cfg = args.structure.config()?;
    let graphs = read_graphs(&args.graphs, true)?;
    let sources = read_sources(&args.sources)?;
    check_aligned(
        "graphs vs sources",
        graphs.iter().map(|(id, _)| id),
        sources.iter().map(|(id, _)| id),
    )?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut valid = 0usize;
    for ((id, graph), (_, src)) in graphs.iter().zip(&sources) {
        let graph = graph.as_ref().expect("strict parse");
        let report = validate_structure(graph, &src.belief, &src.argument, &cfg);
        valid += report.is_valid as usize;
        let line = serde_json::json!({
            "id": id,
            "stca": report.is_valid,
            "checks": report.checks,
            "diagnostics": report.diagnostics,
        });
        writeln!(out, "{line}").or_input()?;
    }
    writeln!(out, "StCA {:.2}", valid as f64 / graphs.len() as f64 * 100.0).or_input()?;
    Ok(())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Similarity {
    /// Token-overlap F1 of "head relation tail".
    TokenF1,
    /// 1 for identical edges, else 0.
    Exact,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Predicted graphs, `id<TAB>graph` per line.
    #[arg(long)]
    pred: PathBuf,
    /// Gold graphs, `id<TAB>graph` per line.
    #[arg(long)]
    gold: PathBuf,
    /// Stance flags, `id<TAB>true|false` per line.
    #[arg(long)]
    stance: PathBuf,
    /// Beliefs and arguments, `id<TAB>belief<TAB>argument` per line.
    #[arg(long)]
    sources: PathBuf,
    /// Per-instance JSON lines are written here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON lines `{"id", "seca", "ea"}` from external model-based scorers.
    #[arg(long)]
    external: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "token-f1")]
    similarity: Similarity,
    /// Largest graph, in triples, scored by exact edit distance.
    #[arg(long, default_value_t = 10)]
    ged_max_triples: usize,
    #[command(flatten)]
    structure: StructureArgs,
}

fn read_stance(path: &Path) -> Result<Vec<(String, bool)>, Failure> {
    let mut out = Vec::new();
    for (i, line) in open(path).or_input()?.lines().enumerate() {
        let line = line.or_input()?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let flag = match fields.as_slice() {
            [_, f] => match f.to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" => Some(true),
                "false" | "0" | "no" => Some(false),
                _ => None,
            },
            _ => None,
        };
        let Some(flag) = flag else {
            return Err(input_msg(format!(
                "{}:{}: expected 'id<TAB>true|false'",
                path.display(),
                i + 1
            )));
        };
        out.push((fields[0].to_string(), flag));
    }
    if out.is_empty() {
        return Err(input_msg(format!("{}: no input lines", path.display())));
    }
    Ok(out)
}

fn read_external(path: &Path) -> Result<Vec<ExternalScores>, Failure> {
    let mut out = Vec::new();
    for (i, line) in open(path).or_input()?.lines().enumerate() {
        let line = line.or_input()?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| input_msg(format!("{}:{}: {e}", path.display(), i + 1)))?,
        );
    }
    Ok(out)
}

pub fn eval(args: &EvalArgs) -> CmdResult {
    let stca = args.structure.config()?;
    let preds = read_graphs(&args.pred, false)?;
    let golds = read_graphs(&args.gold, true)?;
    let sources = read_sources(&args.sources)?;
    let stance = read_stance(&args.stance)?;
    let external = match &args.external {
        Some(p) => read_external(p)?,
        None => Vec::new(),
    };
    check_aligned(
        "gold vs sources",
        golds.iter().map(|(id, _)| id),
        sources.iter().map(|(id, _)| id),
    )?;
    let sources: HashMap<String, Source> = sources.into_iter().collect();

    let golds: Vec<GoldInstance> = golds
        .into_iter()
        .map(|(id, g)| {
            let src = &sources[&id];
            GoldInstance {
                belief: src.belief.clone(),
                argument: src.argument.clone(),
                graph: g.expect("strict parse"),
                id,
            }
        })
        .collect();
    let preds: Vec<Prediction> = preds
        .into_iter()
        .map(|(id, graph)| Prediction { id, graph })
        .collect();

    let similarity: &dyn EdgeSimilarity = match args.similarity {
        Similarity::TokenF1 => &TokenF1,
        Similarity::Exact => &ExactMatch,
    };
    let cfg = EvalConfig {
        stca,
        ged: GedConfig {
            max_triples: args.ged_max_triples,
        },
        similarity,
    };
    let (scores, summary) = corpus_eval(&preds, &golds, &stance, &external, &cfg).or_input()?;
    if let Some(out) = &args.out {
        write_atomic(out, |w| {
            for s in &scores {
                writeln!(w, "{}", serde_json::to_string(s)?)?;
            }
            Ok(())
        })
        .or_input()?;
    }
    print!("{}", summary.table());
    Ok(())
}
