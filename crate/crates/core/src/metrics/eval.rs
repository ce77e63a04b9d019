use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ged::{graph_edit_distance, GedConfig};
use super::gbs::{graph_bertscore, EdgeSimilarity};
use super::stca::{validate_structure, StcaChecks, StcaConfig};
use super::MetricsError;
use crate::graph::ExplanationGraph;

/// A gold instance: belief, argument and reference graph.
#[derive(Debug, Clone)]
pub struct GoldInstance {
    pub id: String,
    pub belief: String,
    pub argument: String,
    pub graph: ExplanationGraph,
}

/// A predicted graph, or the reason it could not be parsed.
#[derive(Debug, Clone)]
pub struct Prediction {
    pub id: String,
    pub graph: Result<ExplanationGraph, String>,
}

/// Per-instance verdicts from model-based scorers run outside this crate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExternalScores {
    pub id: String,
    #[serde(default)]
    pub seca: Option<bool>,
    #[serde(default)]
    pub ea: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceScore {
    pub id: String,
    pub stance_correct: bool,
    pub stca: bool,
    pub checks: StcaChecks,
    /// `None` when the instance was gated out, unparseable or too large.
    pub ged_raw: Option<u32>,
    pub ged_norm: f64,
    pub gbs: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl InstanceScore {
    fn failed(id: &str, stance_correct: bool, diagnostics: Vec<String>) -> Self {
        InstanceScore {
            id: id.to_string(),
            stance_correct,
            stca: false,
            checks: StcaChecks::FAILED,
            ged_raw: None,
            ged_norm: 1.0,
            gbs: 0.0,
            diagnostics,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalSummary {
    pub instances: usize,
    pub stance_correct: usize,
    /// Percentage of instances with a structurally valid graph.
    pub stca: f64,
    /// Mean G-BS F1 in `[0, 1]`.
    pub gbs: f64,
    /// Mean normalized GED in `[0, 1]`.
    pub ged: f64,
    pub seca: Option<f64>,
    pub ea: Option<f64>,
}

impl EvalSummary {
    /// Plain-text table; model-based columns read "external" unless scores
    /// were supplied.
    pub fn table(&self) -> String {
        let ext = |v: Option<f64>| v.map_or("external".to_string(), |x| format!("{x:.2}"));
        let mut out = String::new();
        let _ = writeln!(out, "{:<10}{:<10}{:<10}{:<10}{:<10}", "StCA", "SeCA", "G-BS", "GED", "EA");
        let _ = writeln!(
            out,
            "{:<10}{:<10}{:<10}{:<10}{:<10}",
            format!("{:.2}", self.stca),
            ext(self.seca),
            format!("{:.2}", self.gbs * 100.0),
            format!("{:.4}", self.ged),
            ext(self.ea)
        );
        let _ = writeln!(
            out,
            "instances: {}  stance correct: {}",
            self.instances, self.stance_correct
        );
        out
    }
}

pub struct EvalConfig<'a> {
    pub stca: StcaConfig,
    pub ged: GedConfig,
    pub similarity: &'a dyn EdgeSimilarity,
}

fn score_one(
    pred: &Prediction,
    gold: &GoldInstance,
    stance_correct: bool,
    cfg: &EvalConfig<'_>,
) -> InstanceScore {
    if !stance_correct {
        return InstanceScore::failed(&gold.id, false, vec!["stance prediction incorrect".into()]);
    }
    let graph = match &pred.graph {
        Ok(g) => g,
        Err(reason) => {
            return InstanceScore::failed(&gold.id, true, vec![format!("unparseable graph: {reason}")])
        }
    };
    let report = validate_structure(graph, &gold.belief, &gold.argument, &cfg.stca);
    let mut diagnostics = report.diagnostics;
    let (ged_raw, ged_norm) = match graph_edit_distance(graph, &gold.graph, &cfg.ged) {
        Ok(r) => (Some(r.raw_ops), r.normalized),
        Err(e) => {
            diagnostics.push(e.to_string());
            (None, 1.0)
        }
    };
    InstanceScore {
        id: gold.id.clone(),
        stance_correct: true,
        stca: report.is_valid,
        checks: report.checks,
        ged_raw,
        ged_norm,
        gbs: graph_bertscore(graph, &gold.graph, cfg.similarity).f1,
        diagnostics,
    }
}

/// Scores predictions against gold graphs. Instances whose stance was
/// predicted wrongly, or whose prediction does not parse, count as failures
/// for every graph metric: not valid, G-BS 0 and normalized GED 1.
pub fn corpus_eval(
    preds: &[Prediction],
    golds: &[GoldInstance],
    stance: &[(String, bool)],
    external: &[ExternalScores],
    cfg: &EvalConfig<'_>,
) -> Result<(Vec<InstanceScore>, EvalSummary), MetricsError> {
    if preds.len() != golds.len() {
        return Err(MetricsError::Alignment(format!(
            "{} predictions for {} gold instances",
            preds.len(),
            golds.len()
        )));
    }
    if golds.is_empty() {
        return Err(MetricsError::Alignment("no instances to score".into()));
    }
    for (i, (p, g)) in preds.iter().zip(golds).enumerate() {
        if p.id != g.id {
            return Err(MetricsError::Alignment(format!(
                "line {}: prediction id '{}' does not match gold id '{}'",
                i + 1,
                p.id,
                g.id
            )));
        }
    }
    let flags: HashMap<&str, bool> = stance.iter().map(|(id, f)| (id.as_str(), *f)).collect();
    let flag_of = |id: &str| {
        flags
            .get(id)
            .copied()
            .ok_or_else(|| MetricsError::Alignment(format!("no stance flag for id '{id}'")))
    };
    let gate: Vec<bool> = golds.iter().map(|g| flag_of(&g.id)).collect::<Result<_, _>>()?;

    let scores: Vec<InstanceScore> = preds
        .par_iter()
        .zip(golds.par_iter())
        .zip(gate.par_iter())
        .map(|((p, g), &ok)| score_one(p, g, ok, cfg))
        .collect();

    let n = scores.len() as f64;
    let valid = scores.iter().filter(|s| s.stca).count();
    let ext: HashMap<&str, &ExternalScores> = external.iter().map(|e| (e.id.as_str(), e)).collect();
    let gated_mean = |field: &dyn Fn(&ExternalScores) -> Option<f64>| -> Option<f64> {
        if external.is_empty() {
            return None;
        }
        let sum: f64 = golds
            .iter()
            .zip(&gate)
            .filter(|(_, ok)| **ok)
            .filter_map(|(g, _)| ext.get(g.id.as_str()).and_then(|e| field(e)))
            .sum();
        Some(sum / n * 100.0)
    };
    let summary = EvalSummary {
        instances: scores.len(),
        stance_correct: gate.iter().filter(|f| **f).count(),
        stca: valid as f64 / n * 100.0,
        gbs: scores.iter().map(|s| s.gbs).sum::<f64>() / n,
        ged: scores.iter().map(|s| s.ged_norm).sum::<f64>() / n,
        seca: gated_mean(&|e| e.seca.map(|b| b as u8 as f64)),
        ea: gated_mean(&|e| e.ea),
    };
    Ok((scores, summary))
}
