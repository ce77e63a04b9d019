use std::fmt;
use std::io;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::knowledge::build_knowledge_source;
use super::query::{make_query, source_concepts};
use super::{synthesize_graph, Difficulty, Mix, SynthError, SynthParams, TemplateBank};
use crate::graph::{serialize_graph, serialize_triples, Concept, ExplanationGraph, GraphFormat, Triple};
use crate::kb::KbIndex;
use crate::seed;

const CHUNK: usize = 4096;

/// One text-to-graph pre-training instance.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryInstance {
    pub id: u64,
    pub difficulty: Difficulty,
    pub query_text: String,
    pub knowledge_source: Vec<Triple>,
    pub gold_graph: ExplanationGraph,
    pub answer: Concept,
    /// Seed this instance was generated from; regenerates it on its own.
    pub seed: u64,
}

impl QueryInstance {
    /// `sources [SEP] query [SEP] knowledge source`.
    pub fn model_input(&self) -> Result<String, SynthError> {
        let sources: Vec<String> = source_concepts(&self.gold_graph)?
            .into_iter()
            .map(String::from)
            .collect();
        Ok(format!(
            "{} [SEP] {} [SEP] {}",
            sources.join(" | "),
            self.query_text,
            serialize_triples(&self.knowledge_source, GraphFormat::Pipe)
        ))
    }

    pub fn model_target(&self) -> Result<String, SynthError> {
        Ok(serialize_graph(&self.gold_graph, GraphFormat::Pipe)?)
    }

    pub fn to_record(&self) -> Result<Record, SynthError> {
        Ok(Record {
            id: self.id,
            difficulty: self.difficulty.as_str().to_string(),
            input: self.model_input()?,
            target: self.model_target()?,
            seed: self.seed,
        })
    }
}

/// Generates one instance from a single seed: graph, then query, then
/// knowledge source, all from the same RNG stream.
pub fn build_instance(
    index: &KbIndex,
    params: &SynthParams,
    templates: &TemplateBank,
    difficulty: Difficulty,
    id: u64,
    seed_value: u64,
) -> Result<QueryInstance, SynthError> {
    let mut rng = seed::rng(seed_value);
    let gold_graph = synthesize_graph(index, params, &mut rng)?;
    let (query_text, answer) = make_query(&gold_graph, difficulty, templates, &mut rng)?;
    let knowledge_source = build_knowledge_source(&gold_graph, index, &mut rng)?;
    Ok(QueryInstance {
        id,
        difficulty,
        query_text,
        knowledge_source,
        gold_graph,
        answer,
        seed: seed_value,
    })
}

/// A serialized corpus line. `difficulty` holds the task name for baseline
/// corpora.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub id: u64,
    pub difficulty: String,
    pub input: String,
    pub target: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// `input<TAB>target`
    Text,
    /// One JSON object per line.
    Jsonl,
}

impl FromStr for OutputFormat {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "jsonl" => Ok(OutputFormat::Jsonl),
            _ => Err(SynthError::InvalidParams(format!("unknown output format '{s}'"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Text => "text",
            OutputFormat::Jsonl => "jsonl",
        })
    }
}

impl Record {
    /// Serialized line without the trailing newline.
    pub fn to_line(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => format!("{}\t{}", self.input, self.target),
            OutputFormat::Jsonl => serde_json::to_string(self).expect("record serializes"),
        }
    }

    /// Parses a line in either format, auto-detected.
    pub fn from_line(line: &str) -> Result<Record, SynthError> {
        if line.trim_start().starts_with('{') {
            serde_json::from_str(line).map_err(|e| SynthError::Parse(e.to_string()))
        } else {
            let (input, target) = line
                .split_once('\t')
                .ok_or_else(|| SynthError::Parse("expected 'input<TAB>target'".into()))?;
            Ok(Record {
                id: 0,
                difficulty: String::new(),
                input: input.to_string(),
                target: target.to_string(),
                seed: 0,
            })
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub total: usize,
    pub seed: u64,
    pub workers: usize,
    pub mix: Mix,
    pub synth: SynthParams,
    /// Fresh seeds tried for one record id before the run fails.
    pub max_redraws: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            total: 300_000,
            seed: 0,
            workers: 1,
            mix: Mix::default(),
            synth: SynthParams::default(),
            max_redraws: 16,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EmitStats {
    pub records: usize,
    pub easy: usize,
    pub normal: usize,
    pub hard: usize,
    /// Seeds abandoned because synthesis or distractor sampling failed.
    pub redraws: usize,
    pub gold_triples: u64,
    /// Gold-graph triples per relation, indexed like `SYNTHETIC16`.
    pub relation_counts: [u64; 16],
}

struct Built {
    record: Record,
    redraws: usize,
    relations: Vec<u8>,
}

fn attempt_seed(run_seed: u64, attempt: usize, id: u64) -> u64 {
    seed::derive(run_seed, attempt as u64, id)
}

fn build_one(
    index: &KbIndex,
    templates: &TemplateBank,
    cfg: &CorpusConfig,
    difficulty: Difficulty,
    id: u64,
) -> Result<Built, SynthError> {
    let mut last = None;
    for attempt in 0..=cfg.max_redraws {
        let s = attempt_seed(cfg.seed, attempt, id);
        match build_instance(index, &cfg.synth, templates, difficulty, id, s) {
            Ok(inst) => {
                let relations = inst
                    .gold_graph
                    .triples()
                    .iter()
                    .filter_map(|t| t.relation.synthetic_index().map(|i| i as u8))
                    .collect();
                return Ok(Built {
                    record: inst.to_record()?,
                    redraws: attempt,
                    relations,
                });
            }
            Err(e @ (SynthError::SynthesisExhausted { .. } | SynthError::InsufficientDistractors { .. })) => {
                log::debug!("record {id} attempt {attempt}: {e}");
                last = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt ran"))
}

/// Generates `cfg.total` records and hands them to `sink` in id order.
///
/// Every record is seeded from `(cfg.seed, attempt, id)`, so the output is
/// byte-identical for any worker count.
pub fn emit_corpus<F>(
    index: &KbIndex,
    templates: &TemplateBank,
    cfg: &CorpusConfig,
    mut sink: F,
) -> Result<EmitStats, SynthError>
where
    F: FnMut(&Record) -> io::Result<()>,
{
    cfg.synth.validate()?;
    cfg.mix.validate()?;
    if cfg.total == 0 {
        return Err(SynthError::InvalidParams("total must be at least 1".into()));
    }
    let schedule = cfg.mix.schedule(cfg.total);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| SynthError::Io(e.to_string()))?;
    let mut stats = EmitStats::default();
    for start in (0..cfg.total).step_by(CHUNK) {
        let end = (start + CHUNK).min(cfg.total);
        let build = |id: usize| build_one(index, templates, cfg, schedule[id], id as u64);
        let chunk: Vec<Result<Built, SynthError>> = if cfg.workers > 1 {
            pool.install(|| (start..end).into_par_iter().map(build).collect())
        } else {
            (start..end).map(build).collect()
        };
        for built in chunk {
            let built = built?;
            stats.records += 1;
            match schedule[built.record.id as usize] {
                Difficulty::Easy => stats.easy += 1,
                Difficulty::Normal => stats.normal += 1,
                Difficulty::Hard => stats.hard += 1,
            }
            stats.redraws += built.redraws;
            stats.gold_triples += built.relations.len() as u64;
            for r in built.relations {
                stats.relation_counts[r as usize] += 1;
            }
            sink(&built.record).map_err(|e| SynthError::Io(e.to_string()))?;
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_graph, GraphFormat};

    fn kb() -> KbIndex {
        let g = parse_graph(
            "a : causes : b | b : causes : c | d : is_a : c | e : used_for : d | f : part_of : b | g : desires : a | h : is_a : e | c : causes : i | j : antonym : f | k : has_context : g | l : made_of : h",
            GraphFormat::Pipe,
        )
        .unwrap();
        KbIndex::from_triples(g.triples()).unwrap()
    }

    fn collect(cfg: &CorpusConfig) -> (Vec<Record>, EmitStats) {
        let mut out = Vec::new();
        let stats = emit_corpus(&kb(), &TemplateBank::default(), cfg, |r| {
            out.push(r.clone());
            Ok(())
        })
        .unwrap();
        (out, stats)
    }

    #[test]
    fn three_records_one_per_difficulty() {
        let cfg = CorpusConfig {
            total: 3,
            ..CorpusConfig::default()
        };
        let (records, stats) = collect(&cfg);
        assert_eq!((stats.easy, stats.normal, stats.hard), (1, 1, 1));
        let diffs: Vec<&str> = records.iter().map(|r| r.difficulty.as_str()).collect();
        assert_eq!(diffs, ["easy", "normal", "hard"]);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let one = CorpusConfig {
            total: 200,
            seed: 5,
            ..CorpusConfig::default()
        };
        let four = CorpusConfig {
            workers: 4,
            ..one.clone()
        };
        assert_eq!(collect(&one).0, collect(&four).0);
    }

    #[test]
    fn record_seed_regenerates_instance() {
        let cfg = CorpusConfig {
            total: 5,
            seed: 11,
            ..CorpusConfig::default()
        };
        let (records, _) = collect(&cfg);
        for r in &records {
            let d: Difficulty = r.difficulty.parse().unwrap();
            let inst = build_instance(&kb(), &cfg.synth, &TemplateBank::default(), d, r.id, r.seed)
                .unwrap();
            assert_eq!(&inst.to_record().unwrap(), r);
        }
    }

    #[test]
    fn line_formats_round_trip() {
        let r = Record {
            id: 7,
            difficulty: "hard".into(),
            input: "a [SEP] What ?".into(),
            target: "a : causes : b".into(),
            seed: 99,
        };
        assert_eq!(Record::from_line(&r.to_line(OutputFormat::Jsonl)).unwrap(), r);
        let text = Record::from_line(&r.to_line(OutputFormat::Text)).unwrap();
        assert_eq!((text.input, text.target), (r.input, r.target));
        assert!(Record::from_line("no tab here").is_err());
    }

    #[test]
    fn zero_total_rejected() {
        let cfg = CorpusConfig {
            total: 0,
            ..CorpusConfig::default()
        };
        assert!(emit_corpus(&kb(), &TemplateBank::default(), &cfg, |_| Ok(())).is_err());
    }
}
