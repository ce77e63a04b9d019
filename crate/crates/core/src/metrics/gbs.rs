use std::collections::HashMap;

use serde::Serialize;

use super::assignment::max_weight_assignment;
use crate::graph::{ExplanationGraph, Triple};

/// Scores how alike two edges are, in `[0, 1]`.
pub trait EdgeSimilarity: Sync {
    fn name(&self) -> &str;
    fn similarity(&self, pred: &Triple, gold: &Triple) -> f64;
}

/// 1 for identical triples, 0 otherwise. G-BS then reduces to edge-set F1.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactMatch;

impl EdgeSimilarity for ExactMatch {
    fn name(&self) -> &str {
        "exact"
    }

    fn similarity(&self, pred: &Triple, gold: &Triple) -> f64 {
        if pred == gold {
            1.0
        } else {
            0.0
        }
    }
}

/// Token-multiset F1 between the edges verbalized as "head relation tail".
#[derive(Debug, Clone, Copy, Default)]
pub struct TokenF1;

fn tokens(t: &Triple) -> HashMap<String, usize> {
    let mut bag = HashMap::new();
    let text = format!("{} {} {}", t.head.spaced(), t.relation.spaced(), t.tail.spaced());
    for tok in text.split_whitespace() {
        *bag.entry(tok.to_lowercase()).or_insert(0) += 1;
    }
    bag
}

impl EdgeSimilarity for TokenF1 {
    fn name(&self) -> &str {
        "token-f1"
    }

    fn similarity(&self, pred: &Triple, gold: &Triple) -> f64 {
        let (p, g) = (tokens(pred), tokens(gold));
        let common: usize = p
            .iter()
            .map(|(tok, n)| (*n).min(g.get(tok).copied().unwrap_or(0)))
            .sum();
        if common == 0 {
            return 0.0;
        }
        let np: usize = p.values().sum();
        let ng: usize = g.values().sum();
        2.0 * common as f64 / (np + ng) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GbsScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl GbsScore {
    pub const ZERO: GbsScore = GbsScore {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };
}

/// Edge-matching F1: best one-to-one assignment of predicted to gold edges
/// under `sim`, precision over predicted edges and recall over gold edges.
pub fn graph_bertscore(
    pred: &ExplanationGraph,
    gold: &ExplanationGraph,
    sim: &dyn EdgeSimilarity,
) -> GbsScore {
    let (p, g) = (pred.triples(), gold.triples());
    if p.is_empty() || g.is_empty() {
        return GbsScore::ZERO;
    }
    let weights: Vec<Vec<f64>> = p
        .iter()
        .map(|a| g.iter().map(|b| sim.similarity(a, b).clamp(0.0, 1.0)).collect())
        .collect();
    let matched: f64 = max_weight_assignment(&weights)
        .iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| weights[i][j]))
        .sum();
    if matched <= 0.0 {
        return GbsScore::ZERO;
    }
    let precision = matched / p.len() as f64;
    let recall = matched / g.len() as f64;
    GbsScore {
        precision,
        recall,
        f1: 2.0 * precision * recall / (precision + recall),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_graph, GraphFormat};

    fn g(s: &str) -> ExplanationGraph {
        parse_graph(s, GraphFormat::Pipe).unwrap()
    }

    #[test]
    fn self_match_is_one() {
        let a = g("a : causes : b | b : is_a : c | d : used_for : c");
        assert_eq!(graph_bertscore(&a, &a, &TokenF1).f1, 1.0);
        assert_eq!(graph_bertscore(&a, &a, &ExactMatch).f1, 1.0);
    }

    #[test]
    fn spurious_edge() {
        let gold = g("a : causes : b | b : is_a : c | d : used_for : c");
        let pred = g("a : causes : b | b : is_a : c | d : used_for : c | e : part_of : a");
        let s = graph_bertscore(&pred, &gold, &ExactMatch);
        assert_eq!((s.precision, s.recall), (0.75, 1.0));
        assert_eq!(s.f1, 6.0 / 7.0);
    }

    #[test]
    fn token_overlap() {
        let a = Triple::parse("red_apple", "is_a", "fruit").unwrap();
        let b = Triple::parse("apple", "is_a", "food").unwrap();
        // {red, apple, is, a, fruit} vs {apple, is, a, food}: 3 shared.
        assert!((TokenF1.similarity(&a, &b) - 6.0 / 9.0).abs() < 1e-12);
        let c = Triple::parse("dog", "causes", "bark").unwrap();
        assert_eq!(TokenF1.similarity(&a, &c), 0.0);
    }
}
