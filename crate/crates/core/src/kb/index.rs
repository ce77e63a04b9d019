use std::collections::HashMap;
use std::ops::Range;

use rand::Rng;
use sha2::{Digest, Sha256};

use super::KbError;
use crate::graph::{Concept, Relation, Triple, SYNTHETIC16};

/// Triple stored by concept id and relation index into [`SYNTHETIC16`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KbTriple {
    pub head: u32,
    pub relation: u8,
    pub tail: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndexMeta {
    /// SHA-256 (hex) of the dump bytes the index was built from.
    pub source_checksum: String,
    pub merge_map_version: String,
    /// Seconds since the Unix epoch.
    pub build_timestamp: u64,
}

/// Immutable indexed knowledge base.
///
/// Concepts are sorted lexicographically so ids are stable for a given
/// content. Triples are sorted by `(head, relation, tail)`, which makes the
/// outgoing list of a concept a contiguous run; incoming lists are kept in a
/// separate CSR table ordered by `(tail, head, relation)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KbIndex {
    concepts: Vec<String>,
    triples: Vec<KbTriple>,
    out_offsets: Vec<u32>,
    in_offsets: Vec<u32>,
    in_ids: Vec<u32>,
    by_in_degree: Vec<u32>,
    histogram: [u64; 16],
    meta: IndexMeta,
}

/// Accumulates interned triples before the index is frozen.
#[derive(Debug, Default)]
pub struct IndexBuilder {
    ids: HashMap<String, u32>,
    names: Vec<String>,
    triples: Vec<KbTriple>,
}

impl IndexBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, text: &str) -> u32 {
        if let Some(&id) = self.ids.get(text) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(text.to_string());
        self.ids.insert(text.to_string(), id);
        id
    }

    /// `head` and `tail` must already be canonical concept text.
    pub fn push(&mut self, head: &str, relation: u8, tail: &str) {
        debug_assert!((relation as usize) < SYNTHETIC16.len());
        let head = self.intern(head);
        let tail = self.intern(tail);
        self.triples.push(KbTriple {
            head,
            relation,
            tail,
        });
    }

    pub fn push_triple(&mut self, t: &Triple) -> Result<(), KbError> {
        let relation = t
            .relation
            .synthetic_index()
            .ok_or_else(|| KbError::UnknownRelation(t.relation.to_string()))?;
        self.push(t.head.as_str(), relation as u8, t.tail.as_str());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Sorts, deduplicates and builds adjacency. Returns the index and the
    /// number of duplicate triples removed.
    pub fn finish(self, meta: IndexMeta) -> Result<(KbIndex, usize), KbError> {
        let mut order: Vec<u32> = (0..self.names.len() as u32).collect();
        order.sort_by(|&a, &b| self.names[a as usize].cmp(&self.names[b as usize]));
        let mut remap = vec![0u32; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old as usize] = new as u32;
        }
        let mut names = self.names;
        let concepts: Vec<String> = order
            .iter()
            .map(|&old| std::mem::take(&mut names[old as usize]))
            .collect();
        let mut triples: Vec<KbTriple> = self
            .triples
            .into_iter()
            .map(|t| KbTriple {
                head: remap[t.head as usize],
                relation: t.relation,
                tail: remap[t.tail as usize],
            })
            .collect();
        triples.sort_unstable();
        let before = triples.len();
        triples.dedup();
        let duplicates = before - triples.len();
        let index = KbIndex::from_parts(concepts, triples, meta)?;
        Ok((index, duplicates))
    }
}

impl KbIndex {
    /// `concepts` sorted and unique, `triples` sorted and unique.
    pub(crate) fn from_parts(
        concepts: Vec<String>,
        triples: Vec<KbTriple>,
        meta: IndexMeta,
    ) -> Result<Self, KbError> {
        if triples.is_empty() {
            return Err(KbError::EmptyIndex);
        }
        let n = concepts.len();
        let mut out_offsets = vec![0u32; n + 1];
        let mut in_offsets = vec![0u32; n + 1];
        let mut histogram = [0u64; 16];
        for t in &triples {
            out_offsets[t.head as usize + 1] += 1;
            in_offsets[t.tail as usize + 1] += 1;
            histogram[t.relation as usize] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let mut in_ids: Vec<u32> = (0..triples.len() as u32).collect();
        in_ids.sort_by_key(|&i| {
            let t = triples[i as usize];
            (t.tail, t.head, t.relation)
        });
        let in_degree = |c: u32| in_offsets[c as usize + 1] - in_offsets[c as usize];
        let mut by_in_degree: Vec<u32> = (0..n as u32).collect();
        by_in_degree.sort_by(|&a, &b| in_degree(b).cmp(&in_degree(a)).then(a.cmp(&b)));
        Ok(KbIndex {
            concepts,
            triples,
            out_offsets,
            in_offsets,
            in_ids,
            by_in_degree,
            histogram,
            meta,
        })
    }

    /// Builds an index directly from graph triples (fixtures, tests).
    pub fn from_triples<'a>(
        triples: impl IntoIterator<Item = &'a Triple>,
    ) -> Result<Self, KbError> {
        let mut b = IndexBuilder::new();
        for t in triples {
            b.push_triple(t)?;
        }
        Ok(b.finish(IndexMeta::default())?.0)
    }

    pub fn concept_count(&self) -> usize {
        self.concepts.len()
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    pub fn concept_id(&self, text: &str) -> Option<u32> {
        self.concepts
            .binary_search_by(|c| c.as_str().cmp(text))
            .ok()
            .map(|i| i as u32)
    }

    pub fn concept_text(&self, id: u32) -> &str {
        &self.concepts[id as usize]
    }

    pub fn concept(&self, id: u32) -> Concept {
        Concept::new(&self.concepts[id as usize]).expect("index holds canonical concepts")
    }

    pub fn raw_triple(&self, id: u32) -> KbTriple {
        self.triples[id as usize]
    }

    pub fn raw_triples(&self) -> &[KbTriple] {
        &self.triples
    }

    pub fn concepts(&self) -> &[String] {
        &self.concepts
    }

    pub fn triple(&self, id: u32) -> Triple {
        let t = self.triples[id as usize];
        Triple {
            head: self.concept(t.head),
            relation: Relation::from_static(SYNTHETIC16[t.relation as usize]),
            tail: self.concept(t.tail),
        }
    }

    /// Ids of triples whose head is `concept`.
    pub fn outgoing_ids(&self, concept: u32) -> Range<u32> {
        self.out_offsets[concept as usize]..self.out_offsets[concept as usize + 1]
    }

    /// Ids of triples whose tail is `concept`.
    pub fn incoming_ids(&self, concept: u32) -> &[u32] {
        let r = self.in_offsets[concept as usize] as usize
            ..self.in_offsets[concept as usize + 1] as usize;
        &self.in_ids[r]
    }

    pub fn in_degree(&self, concept: u32) -> usize {
        self.incoming_ids(concept).len()
    }

    pub fn out_degree(&self, concept: u32) -> usize {
        self.outgoing_ids(concept).len()
    }

    pub fn incoming(&self, concept: &Concept) -> Result<Vec<Triple>, KbError> {
        let id = self.require(concept)?;
        Ok(self.incoming_ids(id).iter().map(|&t| self.triple(t)).collect())
    }

    pub fn outgoing(&self, concept: &Concept) -> Result<Vec<Triple>, KbError> {
        let id = self.require(concept)?;
        Ok(self.outgoing_ids(id).map(|t| self.triple(t)).collect())
    }

    fn require(&self, concept: &Concept) -> Result<u32, KbError> {
        self.concept_id(concept.as_str())
            .ok_or_else(|| KbError::UnknownConcept(concept.to_string()))
    }

    /// Id of the stored triple equal to `(head, relation, tail)`, if any.
    pub fn find(&self, head: u32, relation: u8, tail: u32) -> Option<u32> {
        let range = self.outgoing_ids(head);
        let slice = &self.triples[range.start as usize..range.end as usize];
        slice
            .binary_search(&KbTriple {
                head,
                relation,
                tail,
            })
            .ok()
            .map(|i| range.start + i as u32)
    }

    /// Uniform draw over concepts with at least `min_incoming` incoming triples.
    pub fn sample_concept_id<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        min_incoming: usize,
    ) -> Result<u32, KbError> {
        let qualifying = self
            .by_in_degree
            .partition_point(|&c| self.in_degree(c) >= min_incoming);
        if qualifying == 0 {
            return Err(KbError::NoQualifyingConcept { min_incoming });
        }
        Ok(self.by_in_degree[rng.gen_range(0..qualifying)])
    }

    pub fn sample_concept<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        min_incoming: usize,
    ) -> Result<Concept, KbError> {
        self.sample_concept_id(rng, min_incoming)
            .map(|id| self.concept(id))
    }

    /// Triple counts per relation, indexed like [`SYNTHETIC16`].
    pub fn relation_histogram(&self) -> &[u64; 16] {
        &self.histogram
    }

    pub fn meta(&self) -> &IndexMeta {
        &self.meta
    }

    /// Hash of the indexed content (concepts, triples, merge-map version).
    /// Independent of build time, so identical inputs give identical values.
    pub fn content_checksum(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.meta.merge_map_version.as_bytes());
        h.update((self.concepts.len() as u64).to_le_bytes());
        for c in &self.concepts {
            h.update((c.len() as u32).to_le_bytes());
            h.update(c.as_bytes());
        }
        h.update((self.triples.len() as u64).to_le_bytes());
        for t in &self.triples {
            h.update(t.head.to_le_bytes());
            h.update([t.relation]);
            h.update(t.tail.to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    fn fixture() -> KbIndex {
        let ts = [
            Triple::parse("cat", "is_a", "animal").unwrap(),
            Triple::parse("dog", "is_a", "animal").unwrap(),
            Triple::parse("cat", "desires", "food").unwrap(),
        ];
        KbIndex::from_triples(&ts).unwrap()
    }

    #[test]
    fn adjacency_lookups() {
        let idx = fixture();
        let animal = Concept::new("animal").unwrap();
        let cat = Concept::new("cat").unwrap();
        assert_eq!(idx.incoming(&animal).unwrap().len(), 2);
        assert_eq!(idx.outgoing(&cat).unwrap().len(), 2);
        assert!(idx.incoming(&cat).unwrap().is_empty());
        assert!(matches!(
            idx.outgoing(&Concept::new("zebra").unwrap()),
            Err(KbError::UnknownConcept(_))
        ));
    }

    #[test]
    fn conservation() {
        let idx = fixture();
        let n = idx.concept_count() as u32;
        let ins: usize = (0..n).map(|c| idx.in_degree(c)).sum();
        let outs: usize = (0..n).map(|c| idx.out_degree(c)).sum();
        assert_eq!(ins, idx.triple_count());
        assert_eq!(outs, idx.triple_count());
        assert_eq!(idx.relation_histogram().iter().sum::<u64>(), 3);
    }

    #[test]
    fn sampling() {
        let idx = fixture();
        let mut seen = std::collections::BTreeSet::new();
        for s in 0..64 {
            let c = idx.sample_concept(&mut seed::rng(s), 1).unwrap();
            seen.insert(c.as_str().to_string());
        }
        assert_eq!(
            seen.into_iter().collect::<Vec<_>>(),
            ["animal".to_string(), "food".to_string()]
        );
        assert!(matches!(
            idx.sample_concept(&mut seed::rng(0), 1_000_000_000),
            Err(KbError::NoQualifyingConcept { .. })
        ));
        let a = idx.sample_concept(&mut seed::rng(9), 1).unwrap();
        let b = idx.sample_concept(&mut seed::rng(9), 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn find_and_dedupe() {
        let t = Triple::parse("cat", "is_a", "animal").unwrap();
        let mut b = IndexBuilder::new();
        b.push_triple(&t).unwrap();
        b.push_triple(&t).unwrap();
        let (idx, dups) = b.finish(IndexMeta::default()).unwrap();
        assert_eq!(dups, 1);
        assert_eq!(idx.triple_count(), 1);
        let (cat, animal) = (idx.concept_id("cat").unwrap(), idx.concept_id("animal").unwrap());
        assert_eq!(idx.find(cat, 0, animal), Some(0));
        assert_eq!(idx.find(cat, 1, animal), None);
        assert_eq!(idx.triple(0), t);
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(
            IndexBuilder::new().finish(IndexMeta::default()),
            Err(KbError::EmptyIndex)
        ));
    }

    #[test]
    fn checksum_ignores_insertion_order() {
        let ts = [
            Triple::parse("cat", "is_a", "animal").unwrap(),
            Triple::parse("dog", "is_a", "animal").unwrap(),
        ];
        let a = KbIndex::from_triples(&ts).unwrap();
        let b = KbIndex::from_triples(ts.iter().rev()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.content_checksum(), b.content_checksum());
    }
}
