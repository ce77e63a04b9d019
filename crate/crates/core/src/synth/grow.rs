use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;

use super::{SynthError, SynthParams};
use crate::graph::ExplanationGraph;
use crate::kb::{KbIndex, KbTriple};

/// Incoming lists up to this length are sampled by shuffling; longer ones by
/// random probing.
const SHUFFLE_LIMIT: usize = 64;
const PROBES: usize = 32;

/// Grows an explanation graph backwards from a randomly drawn sink.
///
/// Each expanded node draws a branching factor from
/// `params.branch_choices` and attaches that many distinct incoming KB
/// triples. Candidates are rejected when their head is the sink, when the
/// same `(head, tail)` pair is already present, or when the head is a
/// descendant of the node (which would close a cycle). New heads join a FIFO
/// frontier. Growth stops when the frontier empties or `max_triples` is
/// reached; graphs below `min_triples` are discarded and redrawn.
///
/// The returned graph stores its triples in canonical depth-first order.
pub fn synthesize_graph<R: Rng + ?Sized>(
    index: &KbIndex,
    params: &SynthParams,
    rng: &mut R,
) -> Result<ExplanationGraph, SynthError> {
    params.validate()?;
    for _ in 0..=params.max_retries {
        let edges = grow_once(index, params, rng)?;
        if edges.len() >= params.min_triples {
            let triples = edges.iter().map(|&(id, _)| index.triple(id)).collect();
            return Ok(ExplanationGraph::new(triples)?.canonicalized()?);
        }
    }
    Err(SynthError::SynthesisExhausted {
        attempts: params.max_retries + 1,
    })
}

fn grow_once<R: Rng + ?Sized>(
    index: &KbIndex,
    params: &SynthParams,
    rng: &mut R,
) -> Result<Vec<(u32, KbTriple)>, SynthError> {
    let sink = index.sample_concept_id(rng, 1)?;
    let mut edges: Vec<(u32, KbTriple)> = Vec::with_capacity(params.max_triples);
    let mut pairs: HashSet<(u32, u32)> = HashSet::new();
    let mut in_graph: HashSet<u32> = HashSet::from([sink]);
    let mut frontier = VecDeque::from([sink]);

    while let Some(node) = frontier.pop_front() {
        if edges.len() >= params.max_triples {
            break;
        }
        let k = *params.branch_choices.choose(rng).expect("validated non-empty") as usize;
        let want = k.min(params.max_triples - edges.len());
        if want == 0 {
            continue;
        }
        let candidates = index.incoming_ids(node);
        let mut accept = |id: u32, edges: &mut Vec<(u32, KbTriple)>| -> bool {
            let t = index.raw_triple(id);
            if t.head == sink
                || pairs.contains(&(t.head, t.tail))
                || reaches(edges, node, t.head)
            {
                return false;
            }
            pairs.insert((t.head, t.tail));
            edges.push((id, t));
            if in_graph.insert(t.head) {
                frontier.push_back(t.head);
            }
            true
        };
        let mut added = 0;
        if candidates.len() <= SHUFFLE_LIMIT {
            let mut order: Vec<u32> = candidates.to_vec();
            for i in 0..order.len() {
                if added == want {
                    break;
                }
                let j = rng.gen_range(i..order.len());
                order.swap(i, j);
                if accept(order[i], &mut edges) {
                    added += 1;
                }
            }
        } else {
            let mut tried = HashSet::new();
            for _ in 0..PROBES {
                if added == want {
                    break;
                }
                let id = candidates[rng.gen_range(0..candidates.len())];
                if tried.insert(id) && accept(id, &mut edges) {
                    added += 1;
                }
            }
        }
    }
    Ok(edges)
}

/// Whether `target` is reachable from `from` along the current edges.
fn reaches(edges: &[(u32, KbTriple)], from: u32, target: u32) -> bool {
    let mut stack = vec![from];
    let mut seen = HashSet::from([from]);
    while let Some(n) = stack.pop() {
        if n == target {
            return true;
        }
        for (_, t) in edges.iter().filter(|(_, t)| t.head == n) {
            if seen.insert(t.tail) {
                stack.push(t.tail);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Concept, Triple};
    use crate::seed;

    fn kb(edges: &[(&str, &str, &str)]) -> KbIndex {
        let ts: Vec<Triple> = edges
            .iter()
            .map(|(h, r, t)| Triple::parse(h, r, t).unwrap())
            .collect();
        KbIndex::from_triples(&ts).unwrap()
    }

    #[test]
    fn single_triple_boundary() {
        let idx = kb(&[
            ("a", "causes", "b"),
            ("c", "is_a", "b"),
            ("b", "used_for", "d"),
            ("d", "part_of", "e"),
        ]);
        let params = SynthParams {
            min_triples: 1,
            max_triples: 1,
            ..SynthParams::default()
        };
        for s in 0..200 {
            let mut rng = seed::rng(s);
            let g = synthesize_graph(&idx, &params, &mut rng).unwrap();
            assert_eq!(g.len(), 1);
            let sink: Vec<&Concept> = g.sinks().into_iter().collect();
            assert_eq!(sink.len(), 1);
            assert_eq!(&g.triples()[0].tail, sink[0]);
        }
    }

    #[test]
    fn cycles_in_kb_never_leak_into_graphs() {
        let idx = kb(&[
            ("a", "causes", "b"),
            ("b", "causes", "c"),
            ("c", "causes", "a"),
            ("d", "causes", "a"),
            ("d", "is_a", "b"),
            ("e", "causes", "d"),
            ("e", "used_for", "c"),
        ]);
        let params = SynthParams {
            min_triples: 2,
            max_triples: 6,
            ..SynthParams::default()
        };
        for s in 0..500 {
            let g = synthesize_graph(&idx, &params, &mut seed::rng(s)).unwrap();
            assert!(g.is_dag() && g.is_connected(), "seed {s}");
            assert_eq!(g.sinks().len(), 1, "seed {s}");
            assert!((2..=6).contains(&g.len()));
        }
    }

    #[test]
    fn sparse_kb_exhausts() {
        let idx = kb(&[("a", "causes", "b")]);
        let params = SynthParams {
            max_retries: 5,
            ..SynthParams::default()
        };
        assert!(matches!(
            synthesize_graph(&idx, &params, &mut seed::rng(1)),
            Err(SynthError::SynthesisExhausted { attempts: 6 })
        ));
    }

    #[test]
    fn reachability() {
        let e = |h, t| (0, KbTriple { head: h, relation: 0, tail: t });
        let edges = [e(1, 2), e(2, 3)];
        assert!(reaches(&edges, 1, 3));
        assert!(!reaches(&edges, 3, 1));
    }
}
