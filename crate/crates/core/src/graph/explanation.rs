use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Concept, GraphError, Relation};

/// A directed, labeled edge `head --relation--> tail`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub head: Concept,
    pub relation: Relation,
    pub tail: Concept,
}

impl Triple {
    pub fn new(head: Concept, relation: Relation, tail: Concept) -> Result<Self, GraphError> {
        if head == tail {
            return Err(GraphError::MalformedTriple(format!(
                "self-loop on '{head}'"
            )));
        }
        Ok(Triple {
            head,
            relation,
            tail,
        })
    }

    /// Convenience constructor from raw surface strings.
    pub fn parse(head: &str, relation: &str, tail: &str) -> Result<Self, GraphError> {
        Triple::new(
            Concept::new(head)?,
            Relation::parse(relation)?,
            Concept::new(tail)?,
        )
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.head, self.relation, self.tail)
    }
}

/// An ordered list of distinct triples with derived adjacency.
///
/// Structural properties (acyclicity, connectivity, a single sink) are not
/// type invariants: predicted graphs are often malformed and still need to be
/// scored. Use [`ExplanationGraph::is_dag`] and friends to check them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplanationGraph {
    triples: Vec<Triple>,
    out_adj: BTreeMap<Concept, Vec<usize>>,
    in_adj: BTreeMap<Concept, Vec<usize>>,
}

impl ExplanationGraph {
    pub fn new(triples: Vec<Triple>) -> Result<Self, GraphError> {
        let mut seen = HashSet::with_capacity(triples.len());
        for t in &triples {
            if !seen.insert(t) {
                return Err(GraphError::MalformedTriple(format!("duplicate triple {t}")));
            }
        }
        let mut out_adj: BTreeMap<Concept, Vec<usize>> = BTreeMap::new();
        let mut in_adj: BTreeMap<Concept, Vec<usize>> = BTreeMap::new();
        for (i, t) in triples.iter().enumerate() {
            out_adj.entry(t.head.clone()).or_default().push(i);
            in_adj.entry(t.tail.clone()).or_default().push(i);
        }
        Ok(ExplanationGraph {
            triples,
            out_adj,
            in_adj,
        })
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn nodes(&self) -> BTreeSet<&Concept> {
        self.out_adj.keys().chain(self.in_adj.keys()).collect()
    }

    pub fn node_count(&self) -> usize {
        self.nodes().len()
    }

    pub fn outgoing(&self, c: &Concept) -> impl Iterator<Item = &Triple> {
        self.out_adj
            .get(c)
            .into_iter()
            .flatten()
            .map(|&i| &self.triples[i])
    }

    pub fn incoming(&self, c: &Concept) -> impl Iterator<Item = &Triple> {
        self.in_adj
            .get(c)
            .into_iter()
            .flatten()
            .map(|&i| &self.triples[i])
    }

    pub fn in_degree(&self, c: &Concept) -> usize {
        self.in_adj.get(c).map_or(0, Vec::len)
    }

    pub fn out_degree(&self, c: &Concept) -> usize {
        self.out_adj.get(c).map_or(0, Vec::len)
    }

    /// Nodes with out-degree zero.
    pub fn sinks(&self) -> BTreeSet<&Concept> {
        self.in_adj
            .keys()
            .filter(|c| !self.out_adj.contains_key(*c))
            .collect()
    }

    /// Nodes with in-degree zero, in lexicographic order.
    pub fn sources(&self) -> BTreeSet<&Concept> {
        self.out_adj
            .keys()
            .filter(|c| !self.in_adj.contains_key(*c))
            .collect()
    }

    /// Kahn's algorithm; the empty graph is acyclic.
    pub fn is_dag(&self) -> bool {
        let mut indeg: BTreeMap<&Concept, usize> =
            self.nodes().into_iter().map(|c| (c, self.in_degree(c))).collect();
        let mut ready: Vec<&Concept> = indeg
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(c, _)| *c)
            .collect();
        let mut removed = 0;
        while let Some(c) = ready.pop() {
            removed += 1;
            for t in self.outgoing(c) {
                let d = indeg.get_mut(&t.tail).expect("tail is a node");
                *d -= 1;
                if *d == 0 {
                    ready.push(&t.tail);
                }
            }
        }
        removed == indeg.len()
    }

    /// True iff the underlying undirected graph has at most one component.
    pub fn is_connected(&self) -> bool {
        let nodes = self.nodes();
        let Some(start) = nodes.first() else {
            return true;
        };
        let mut seen: HashSet<&Concept> = HashSet::from([*start]);
        let mut stack = vec![*start];
        while let Some(c) = stack.pop() {
            let neighbours = self
                .outgoing(c)
                .map(|t| &t.tail)
                .chain(self.incoming(c).map(|t| &t.head));
            for n in neighbours {
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen.len() == nodes.len()
    }

    /// Canonical depth-first ordering of the triples.
    ///
    /// The walk runs backwards from each sink (sinks in lexicographic order).
    /// At every node the incoming triples are taken in `(relation, head)`
    /// order; a triple is emitted after the walk below its head has finished.
    /// The result therefore lists every premise before the triple that
    /// consumes it, reading each branch front to back towards the sink.
    pub fn linearize_dfs(&self) -> Result<Vec<Triple>, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::DisconnectedGraph);
        }
        if !self.is_dag() {
            return Err(GraphError::CyclicGraph);
        }
        let mut order = Vec::with_capacity(self.triples.len());
        let mut visited: HashSet<&Concept> = HashSet::new();
        for sink in self.sinks() {
            self.emit_below(sink, &mut visited, &mut order);
        }
        debug_assert_eq!(order.len(), self.triples.len());
        Ok(order.into_iter().map(|i| self.triples[i].clone()).collect())
    }

    fn emit_below<'a>(
        &'a self,
        node: &'a Concept,
        visited: &mut HashSet<&'a Concept>,
        order: &mut Vec<usize>,
    ) {
        if !visited.insert(node) {
            return;
        }
        let mut incoming: Vec<usize> = self.in_adj.get(node).cloned().unwrap_or_default();
        incoming.sort_by(|&a, &b| {
            let (ta, tb) = (&self.triples[a], &self.triples[b]);
            (&ta.relation, &ta.head).cmp(&(&tb.relation, &tb.head))
        });
        for i in incoming {
            self.emit_below(&self.triples[i].head, visited, order);
            order.push(i);
        }
    }

    /// The same graph with its triples stored in [`Self::linearize_dfs`] order.
    pub fn canonicalized(&self) -> Result<ExplanationGraph, GraphError> {
        ExplanationGraph::new(self.linearize_dfs()?)
    }

    /// Order-insensitive equality over the triple sets.
    pub fn same_triples(&self, other: &ExplanationGraph) -> bool {
        let a: BTreeSet<&Triple> = self.triples.iter().collect();
        let b: BTreeSet<&Triple> = other.triples.iter().collect();
        a == b
    }
}
