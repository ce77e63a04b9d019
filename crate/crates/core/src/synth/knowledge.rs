use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::SynthError;
use crate::graph::{ExplanationGraph, Triple};
use crate::kb::KbIndex;

/// Probes per missing distractor before moving to the next sampling stage.
const PROBES_PER_SLOT: usize = 50;

/// `[ceil(1.5 n), floor(2 n)]` for a gold graph of `n` triples.
pub fn size_bounds(gold_len: usize) -> (usize, usize) {
    ((3 * gold_len).div_ceil(2), 2 * gold_len)
}

/// Gold triples plus distractors, shuffled.
///
/// The target size is drawn uniformly from [`size_bounds`]. Distractors are
/// taken first from the KB neighbourhood (incoming and outgoing triples) of
/// the gold nodes, then uniformly from the whole KB, and finally by a full
/// scan. Gold triples and any triple pointing at the answer are never used
/// as distractors, so the answer stays uniquely derivable.
pub fn build_knowledge_source<R: Rng + ?Sized>(
    gold: &ExplanationGraph,
    index: &KbIndex,
    rng: &mut R,
) -> Result<Vec<Triple>, SynthError> {
    let sinks = gold.sinks();
    let [answer] = sinks.into_iter().collect::<Vec<_>>()[..] else {
        return Err(SynthError::InvalidGold("expected exactly one sink".into()));
    };
    let (lo, hi) = size_bounds(gold.len());
    let target = rng.gen_range(lo..=hi);
    let need = target - gold.len();

    let answer_id = index.concept_id(answer.as_str());
    let gold_ids: HashSet<u32> = gold
        .triples()
        .iter()
        .filter_map(|t| {
            let h = index.concept_id(t.head.as_str())?;
            let tl = index.concept_id(t.tail.as_str())?;
            let r = t.relation.synthetic_index()? as u8;
            index.find(h, r, tl)
        })
        .collect();
    let gold_nodes: Vec<u32> = gold
        .nodes()
        .into_iter()
        .filter_map(|c| index.concept_id(c.as_str()))
        .collect();

    let mut chosen: Vec<u32> = Vec::with_capacity(need);
    let mut taken: HashSet<u32> = HashSet::new();
    let eligible = |id: u32| !gold_ids.contains(&id) && Some(index.raw_triple(id).tail) != answer_id;
    let mut offer = |id: u32, chosen: &mut Vec<u32>| {
        if chosen.len() < need && eligible(id) && taken.insert(id) {
            chosen.push(id);
        }
    };

    if !gold_nodes.is_empty() {
        for _ in 0..need * PROBES_PER_SLOT {
            if chosen.len() == need {
                break;
            }
            let node = gold_nodes[rng.gen_range(0..gold_nodes.len())];
            let out = index.outgoing_ids(node);
            let incoming = index.incoming_ids(node);
            let degree = out.len() + incoming.len();
            if degree == 0 {
                continue;
            }
            let pick = rng.gen_range(0..degree);
            let id = if pick < out.len() {
                out.start + pick as u32
            } else {
                incoming[pick - out.len()]
            };
            offer(id, &mut chosen);
        }
    }
    let total = index.triple_count() as u32;
    for _ in 0..need * PROBES_PER_SLOT {
        if chosen.len() == need {
            break;
        }
        offer(rng.gen_range(0..total), &mut chosen);
    }
    if chosen.len() < need {
        let start = rng.gen_range(0..total);
        for k in 0..total {
            if chosen.len() == need {
                break;
            }
            offer((start + k) % total, &mut chosen);
        }
    }
    if chosen.len() < need {
        return Err(SynthError::InsufficientDistractors {
            needed: need,
            found: chosen.len(),
        });
    }

    let mut source: Vec<Triple> = gold.triples().to_vec();
    source.extend(chosen.into_iter().map(|id| index.triple(id)));
    source.shuffle(rng);
    Ok(source)
}
