use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use serde::Serialize;

use super::MetricsError;
use crate::graph::{parse_graph, ExplanationGraph, GraphFormat, Relation, SYNTHETIC16};
use crate::synth::Record;

/// Relation counts over the gold graphs of a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelationDistribution {
    counts: BTreeMap<Relation, u64>,
    total: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionRow {
    pub relation: String,
    pub count: u64,
    pub percent: f64,
    pub reference: Option<f64>,
    pub delta: Option<f64>,
}

impl RelationDistribution {
    pub fn add_graph(&mut self, g: &ExplanationGraph) {
        for t in g.triples() {
            self.add(&t.relation, 1);
        }
    }

    pub fn add(&mut self, relation: &Relation, count: u64) {
        *self.counts.entry(relation.clone()).or_insert(0) += count;
        self.total += count;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, relation: &Relation) -> u64 {
        self.counts.get(relation).copied().unwrap_or(0)
    }

    pub fn percent(&self, relation: &Relation) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(relation) as f64 / self.total as f64 * 100.0
        }
    }

    /// The sixteen synthetic relations in their usual order, then any other
    /// relation seen, alphabetically. Reference values and deltas are filled
    /// in when a reference is given.
    pub fn rows(&self, reference: Option<&ReferenceTable>) -> Vec<DistributionRow> {
        let mut relations: Vec<Relation> = SYNTHETIC16
            .iter()
            .map(|r| Relation::parse(r).expect("canonical relation"))
            .collect();
        relations.extend(self.counts.keys().filter(|r| r.synthetic_index().is_none()).cloned());
        relations
            .into_iter()
            .map(|r| {
                let percent = self.percent(&r);
                let reference = reference.and_then(|t| t.get(&r));
                DistributionRow {
                    relation: r.as_str().to_string(),
                    count: self.count(&r),
                    percent,
                    reference,
                    delta: reference.map(|x| percent - x),
                }
            })
            .collect()
    }

    /// Largest absolute per-relation difference, in percentage points.
    pub fn max_abs_delta(&self, other: &RelationDistribution) -> f64 {
        self.counts
            .keys()
            .chain(other.counts.keys())
            .map(|r| (self.percent(r) - other.percent(r)).abs())
            .fold(0.0, f64::max)
    }

    pub fn table(&self, reference: Option<&ReferenceTable>) -> String {
        let mut out = String::new();
        let header = if reference.is_some() {
            format!("{:<18}{:>10}{:>10}{:>10}{:>10}", "relation", "count", "percent", "reference", "delta")
        } else {
            format!("{:<18}{:>10}{:>10}", "relation", "count", "percent")
        };
        let _ = writeln!(out, "{header}");
        for row in self.rows(reference) {
            let _ = write!(out, "{:<18}{:>10}{:>9.2}%", row.relation, row.count, row.percent);
            if reference.is_some() {
                let r = row.reference.map_or("-".into(), |x| format!("{x:.2}%"));
                let d = row.delta.map_or("-".into(), |x| format!("{x:+.2}"));
                let _ = write!(out, "{r:>10}{d:>10}");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "{:<18}{:>10}", "total", self.total);
        out
    }
}

/// Reads a corpus in either output format and tallies the relations of its
/// target graphs.
pub fn distribution_from_corpus<R: BufRead>(reader: R) -> Result<RelationDistribution, MetricsError> {
    let mut dist = RelationDistribution::default();
    let mut lines = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| MetricsError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        lines += 1;
        let parse_err = |reason: String| MetricsError::Parse { line: i + 1, reason };
        let record = Record::from_line(&line).map_err(|e| parse_err(e.to_string()))?;
        let graph = parse_graph(&record.target, GraphFormat::Pipe).map_err(|e| parse_err(e.to_string()))?;
        dist.add_graph(&graph);
    }
    if lines == 0 {
        return Err(MetricsError::Parse {
            line: 0,
            reason: "corpus is empty".into(),
        });
    }
    Ok(dist)
}

/// Expected relation percentages, one `relation<TAB>percent` row per line.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTable {
    rows: Vec<(Relation, f64)>,
}

impl ReferenceTable {
    pub fn parse(text: &str) -> Result<Self, MetricsError> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| MetricsError::Parse { line: i + 1, reason };
            let (rel, pct) = line
                .split_once('\t')
                .ok_or_else(|| err("expected 'relation<TAB>percent'".into()))?;
            let rel = Relation::parse(rel).map_err(|e| err(e.to_string()))?;
            let pct: f64 = pct
                .trim()
                .trim_end_matches('%')
                .parse()
                .map_err(|_| err(format!("bad percentage '{pct}'")))?;
            rows.push((rel, pct));
        }
        Ok(ReferenceTable { rows })
    }

    pub fn load(path: &Path) -> Result<Self, MetricsError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MetricsError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, relation: &Relation) -> Option<f64> {
        self.rows.iter().find(|(r, _)| r == relation).map(|(_, p)| *p)
    }

    pub fn rows(&self) -> &[(Relation, f64)] {
        &self.rows
    }
}

impl Default for ReferenceTable {
    /// Overall relation shares of the original 73M-triple synthetic corpus.
    fn default() -> Self {
        Self::parse(include_str!("../../data/relation_distribution_reference.tsv"))
            .expect("bundled reference table parses")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_graph_thirds() {
        let g = parse_graph(
            "eating_quickly : causes : eating_too_much | confetti : usedfor : celebrating | celebrating : hassubevent : eating_too_much",
            GraphFormat::Pipe,
        )
        .unwrap();
        let mut d = RelationDistribution::default();
        d.add_graph(&g);
        let table = d.table(None);
        assert_eq!(table.matches("33.33%").count(), 3);
        let sum: f64 = d.rows(None).iter().map(|r| r.percent).sum();
        assert!((sum - 100.0).abs() < 1e-9);
    }

    #[test]
    fn bundled_reference() {
        let t = ReferenceTable::default();
        assert_eq!(t.rows().len(), 16);
        assert_eq!(t.get(&Relation::parse("is_a").unwrap()), Some(19.70));
        let sum: f64 = t.rows().iter().map(|(_, p)| p).sum();
        assert!((sum - 100.0).abs() < 0.05, "{sum}");
    }

    #[test]
    fn delta_column() {
        let mut d = RelationDistribution::default();
        d.add(&Relation::parse("is_a").unwrap(), 1);
        let table = d.table(Some(&ReferenceTable::default()));
        assert!(table.contains("+80.30"));
        assert!(table.contains("delta"));
    }

    #[test]
    fn corpus_reader_names_bad_line() {
        let text = "a [SEP] q\ta : causes : b\nnot a record\n";
        let err = distribution_from_corpus(text.as_bytes()).unwrap_err();
        assert!(matches!(err, MetricsError::Parse { line: 2, .. }));
        assert!(distribution_from_corpus("".as_bytes()).is_err());
    }
}
