use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Concept, ExplanationGraph, Relation, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GedError {
    #[error("graph with {triples} triples exceeds the exact-search cap of {cap}")]
    SizeLimitExceeded { triples: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GedConfig {
    /// Largest graph (in triples) searched exactly.
    pub max_triples: usize,
}

impl Default for GedConfig {
    fn default() -> Self {
        GedConfig { max_triples: 10 }
    }
}

/// One unit-cost edit turning the predicted graph into the gold graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditOp {
    SubstituteNode { from: Concept, to: Concept },
    DeleteNode { node: Concept },
    InsertNode { node: Concept },
    /// Relation change on an edge between two mapped nodes; `edge` is the
    /// predicted edge.
    SubstituteEdge { edge: Triple, to: Relation },
    DeleteEdge { edge: Triple },
    InsertEdge { edge: Triple },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GedResult {
    pub raw_ops: u32,
    /// `raw_ops / (|V_pred| + |E_pred| + |V_gold| + |E_gold|)`, in `[0, 1]`.
    pub normalized: f64,
    pub op_trace: Vec<EditOp>,
}

/// Nodes and edges with labels interned to small integers.
struct Labeled<'g> {
    nodes: Vec<&'g Concept>,
    node_label: Vec<u32>,
    /// Relation labels of the edges `u -> v`, sorted.
    edges: HashMap<(usize, usize), Vec<u32>>,
    triples: &'g [Triple],
}

impl<'g> Labeled<'g> {
    fn new(
        g: &'g ExplanationGraph,
        concepts: &mut HashMap<&'g str, u32>,
        relations: &mut HashMap<&'g str, u32>,
    ) -> Self {
        let nodes: Vec<&Concept> = g.nodes().into_iter().collect();
        let pos: HashMap<&Concept, usize> = nodes.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let intern = |map: &mut HashMap<&'g str, u32>, s: &'g str| {
            let next = map.len() as u32;
            *map.entry(s).or_insert(next)
        };
        let node_label = nodes.iter().map(|c| intern(concepts, c.as_str())).collect();
        let mut edges: HashMap<(usize, usize), Vec<u32>> = HashMap::new();
        for t in g.triples() {
            let r = intern(relations, t.relation.as_str());
            edges.entry((pos[&t.head], pos[&t.tail])).or_default().push(r);
        }
        for labels in edges.values_mut() {
            labels.sort_unstable();
        }
        Labeled {
            nodes,
            node_label,
            edges,
            triples: g.triples(),
        }
    }

    fn between(&self, u: usize, v: usize) -> &[u32] {
        self.edges.get(&(u, v)).map_or(&[], Vec::as_slice)
    }
}

/// Size of the multiset intersection of two sorted label lists.
fn common(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Cheapest way to turn one bundle of parallel edges into another:
/// matching labels are free, the rest are substituted, then inserted or
/// deleted.
fn bundle_cost(a: &[u32], b: &[u32]) -> u32 {
    (a.len().max(b.len()) - common(a, b)) as u32
}

fn label_overlap(a: &mut [u32], b: &mut [u32]) -> usize {
    a.sort_unstable();
    b.sort_unstable();
    common(a, b)
}

struct Search<'a, 'g> {
    p: &'a Labeled<'g>,
    g: &'a Labeled<'g>,
    order: Vec<usize>,
    map: Vec<Option<usize>>,
    used: Vec<bool>,
    best: u32,
    best_map: Vec<Option<usize>>,
}

impl Search<'_, '_> {
    /// Cost of placing pred node `x` at gold node `y` (or deleting it),
    /// counting only edges to nodes placed earlier.
    fn step_cost(&self, depth: usize, x: usize, y: Option<usize>) -> u32 {
        let mut cost = match y {
            Some(y) => (self.p.node_label[x] != self.g.node_label[y]) as u32,
            None => 1,
        };
        for &k in &self.order[..depth] {
            let fk = self.map[k];
            let (gout, gin): (&[u32], &[u32]) = match (y, fk) {
                (Some(y), Some(fk)) => (self.g.between(y, fk), self.g.between(fk, y)),
                _ => (&[], &[]),
            };
            cost += bundle_cost(self.p.between(x, k), gout);
            cost += bundle_cost(self.p.between(k, x), gin);
        }
        cost
    }

    /// Admissible estimate for everything not yet paid for.
    fn lower_bound(&self, depth: usize) -> u32 {
        let placed = |u: usize| self.map[u].is_some() || self.order[..depth].contains(&u);
        let mut p_nodes: Vec<u32> = self.order[depth..].iter().map(|&u| self.p.node_label[u]).collect();
        let mut g_nodes: Vec<u32> = (0..self.g.nodes.len())
            .filter(|&v| !self.used[v])
            .map(|v| self.g.node_label[v])
            .collect();
        let node_lb = p_nodes.len().max(g_nodes.len()) - label_overlap(&mut p_nodes, &mut g_nodes);

        let mut p_edges: Vec<u32> = self
            .p
            .edges
            .iter()
            .filter(|((u, v), _)| !placed(*u) || !placed(*v))
            .flat_map(|(_, ls)| ls.iter().copied())
            .collect();
        let mut g_edges: Vec<u32> = self
            .g
            .edges
            .iter()
            .filter(|((u, v), _)| !self.used[*u] || !self.used[*v])
            .flat_map(|(_, ls)| ls.iter().copied())
            .collect();
        let edge_lb = p_edges.len().max(g_edges.len()) - label_overlap(&mut p_edges, &mut g_edges);
        (node_lb + edge_lb) as u32
    }

    /// Gold nodes and edges left without a pre-image are inserted.
    fn completion_cost(&self) -> u32 {
        let nodes = self.used.iter().filter(|u| !**u).count();
        let edges: usize = self
            .g
            .edges
            .iter()
            .filter(|((u, v), _)| !self.used[*u] || !self.used[*v])
            .map(|(_, ls)| ls.len())
            .sum();
        (nodes + edges) as u32
    }

    fn run(&mut self, depth: usize, cost: u32) {
        if depth == self.order.len() {
            let total = cost + self.completion_cost();
            if total < self.best {
                self.best = total;
                self.best_map = self.map.clone();
            }
            return;
        }
        if cost + self.lower_bound(depth) >= self.best {
            return;
        }
        let x = self.order[depth];
        let mut options: Vec<(u32, Option<usize>)> = (0..self.g.nodes.len())
            .filter(|&y| !self.used[y])
            .map(Some)
            .chain(std::iter::once(None))
            .map(|y| (self.step_cost(depth, x, y), y))
            .collect();
        options.sort_by_key(|&(c, y)| (c, y.is_none(), y));
        for (step, y) in options {
            if cost + step >= self.best {
                continue;
            }
            self.map[x] = y;
            if let Some(y) = y {
                self.used[y] = true;
            }
            self.run(depth + 1, cost + step);
            if let Some(y) = y {
                self.used[y] = false;
            }
            self.map[x] = None;
        }
    }
}

/// Exact unit-cost graph edit distance from `pred` to `gold`.
///
/// Nodes may be substituted (relabelled), inserted or deleted; edges may
/// have their relation substituted, or be inserted or deleted. The search
/// runs branch-and-bound over partial node mappings, pruning with
/// label-multiset lower bounds on the unmapped nodes and edges.
pub fn graph_edit_distance(
    pred: &ExplanationGraph,
    gold: &ExplanationGraph,
    config: &GedConfig,
) -> Result<GedResult, GedError> {
    for g in [pred, gold] {
        if g.len() > config.max_triples {
            return Err(GedError::SizeLimitExceeded {
                triples: g.len(),
                cap: config.max_triples,
            });
        }
    }
    let mut concepts = HashMap::new();
    let mut relations = HashMap::new();
    let p = Labeled::new(pred, &mut concepts, &mut relations);
    let g = Labeled::new(gold, &mut concepts, &mut relations);

    let degree = |u: usize| {
        p.edges
            .iter()
            .filter(|((a, b), _)| *a == u || *b == u)
            .map(|(_, ls)| ls.len())
            .sum::<usize>()
    };
    let mut order: Vec<usize> = (0..p.nodes.len()).collect();
    order.sort_by_key(|&u| (std::cmp::Reverse(degree(u)), u));

    let size = p.nodes.len() + pred.len() + g.nodes.len() + gold.len();
    let mut search = Search {
        p: &p,
        g: &g,
        order,
        map: vec![None; p.nodes.len()],
        used: vec![false; g.nodes.len()],
        best: size as u32 + 1,
        best_map: vec![None; p.nodes.len()],
    };
    search.run(0, 0);
    let raw_ops = search.best;
    let op_trace = trace(&p, &g, &search.best_map);
    debug_assert_eq!(op_trace.len() as u32, raw_ops);
    Ok(GedResult {
        raw_ops,
        normalized: if size == 0 { 0.0 } else { raw_ops as f64 / size as f64 },
        op_trace,
    })
}

fn trace(p: &Labeled<'_>, g: &Labeled<'_>, map: &[Option<usize>]) -> Vec<EditOp> {
    let mut ops = Vec::new();
    let mut image = vec![None; g.nodes.len()];
    for (x, y) in map.iter().enumerate() {
        match y {
            Some(y) => {
                image[*y] = Some(x);
                if p.nodes[x] != g.nodes[*y] {
                    ops.push(EditOp::SubstituteNode {
                        from: p.nodes[x].clone(),
                        to: g.nodes[*y].clone(),
                    });
                }
            }
            None => ops.push(EditOp::DeleteNode {
                node: p.nodes[x].clone(),
            }),
        }
    }
    for (y, pre) in image.iter().enumerate() {
        if pre.is_none() {
            ops.push(EditOp::InsertNode {
                node: g.nodes[y].clone(),
            });
        }
    }

    let p_index: HashMap<&Concept, usize> = p.nodes.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let g_index: HashMap<&Concept, usize> = g.nodes.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    // Group edges by mapped endpoint pair; unmapped ones get a private key.
    type Bundle<'t> = (Vec<&'t Triple>, Vec<&'t Triple>);
    let mut bundles: HashMap<(usize, usize), Bundle> = HashMap::new();
    let mut loose_p = Vec::new();
    for t in p.triples {
        let (u, v) = (p_index[&t.head], p_index[&t.tail]);
        match (map[u], map[v]) {
            (Some(a), Some(b)) => bundles.entry((a, b)).or_default().0.push(t),
            _ => loose_p.push(t),
        }
    }
    let mut loose_g = Vec::new();
    for t in g.triples {
        let (a, b) = (g_index[&t.head], g_index[&t.tail]);
        if image[a].is_some() && image[b].is_some() {
            bundles.entry((a, b)).or_default().1.push(t);
        } else {
            loose_g.push(t);
        }
    }
    let mut keys: Vec<(usize, usize)> = bundles.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let (mut ps, mut gs) = bundles.remove(&key).expect("key present");
        ps.sort_by(|a, b| a.relation.cmp(&b.relation));
        gs.sort_by(|a, b| a.relation.cmp(&b.relation));
        let shared: Vec<Relation> = ps
            .iter()
            .filter(|t| gs.iter().any(|u| u.relation == t.relation))
            .map(|t| t.relation.clone())
            .collect();
        ps.retain(|t| !shared.contains(&t.relation));
        gs.retain(|t| !shared.contains(&t.relation));
        let n = ps.len().min(gs.len());
        for (a, b) in ps.iter().zip(&gs) {
            ops.push(EditOp::SubstituteEdge {
                edge: (*a).clone(),
                to: b.relation.clone(),
            });
        }
        ops.extend(ps[n..].iter().map(|t| EditOp::DeleteEdge { edge: (*t).clone() }));
        ops.extend(gs[n..].iter().map(|t| EditOp::InsertEdge { edge: (*t).clone() }));
    }
    ops.extend(loose_p.into_iter().map(|t| EditOp::DeleteEdge { edge: t.clone() }));
    ops.extend(loose_g.into_iter().map(|t| EditOp::InsertEdge { edge: t.clone() }));
    ops
}
