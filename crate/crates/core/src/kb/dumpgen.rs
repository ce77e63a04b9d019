//! Seeded generator for ConceptNet-shaped assertion dumps.
//!
//! Used by tests and benchmarks when no real dump is at hand. The raw relation
//! mix follows the rough proportions of the English part of ConceptNet 5.7
//! (RelatedTo dominant, lexical relations next, commonsense relations in the
//! long tail). Heads and tails are drawn from skewed rank distributions so a
//! few hub concepts collect most edges, and `HasContext` tails come from a
//! small pool of domain concepts. It is a structural stand-in only; relation
//! shares measured on it say nothing about the real resource.

use std::io::{self, Write};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::seed;

/// `(raw relation, weight, tail skew exponent)`.
const RELATIONS: &[(&str, f64, f64)] = &[
    ("RelatedTo", 1700.0, 2.0),
    ("FormOf", 380.0, 2.0),
    ("DerivedFrom", 325.0, 2.0),
    ("HasContext", 230.0, 0.0),
    ("IsA", 230.0, 3.0),
    ("Synonym", 220.0, 1.5),
    ("UsedFor", 40.0, 2.5),
    ("EtymologicallyRelatedTo", 30.0, 1.5),
    ("SimilarTo", 30.0, 1.5),
    ("AtLocation", 27.0, 3.0),
    ("HasSubevent", 25.0, 2.0),
    ("HasPrerequisite", 22.0, 2.0),
    ("CapableOf", 22.0, 2.0),
    ("Antonym", 19.0, 1.2),
    ("Causes", 16.0, 2.0),
    ("PartOf", 13.0, 2.5),
    ("MannerOf", 12.0, 2.5),
    ("MotivatedByGoal", 9.0, 2.0),
    ("HasProperty", 7.5, 2.5),
    ("ReceivesAction", 6.0, 2.0),
    ("HasA", 5.5, 2.0),
    ("CausesDesire", 4.7, 2.0),
    ("DistinctFrom", 3.3, 1.2),
    ("HasFirstSubevent", 3.3, 2.0),
    ("Desires", 3.2, 2.5),
    ("NotDesires", 2.9, 2.5),
    ("HasLastSubevent", 2.9, 2.0),
    ("dbpedia/genre", 1.0, 3.0),
    ("MadeOf", 0.5, 2.5),
    ("LocatedNear", 0.5, 2.0),
    ("NotCapableOf", 0.3, 2.0),
    ("CreatedBy", 0.26, 2.0),
];

const DOMAIN_POOL: usize = 300;
const ONSETS: &[&str] = &["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "tr", "st", "pl"];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u", "ai", "ou"];

#[derive(Debug, Clone)]
pub struct DumpSpec {
    pub concepts: usize,
    pub assertions: usize,
    /// Fraction of assertions with a non-English endpoint.
    pub non_english: f64,
    pub seed: u64,
}

impl Default for DumpSpec {
    fn default() -> Self {
        DumpSpec {
            concepts: 50_000,
            assertions: 400_000,
            non_english: 0.03,
            seed: 0,
        }
    }
}

/// Unique pseudo-word concept names, one to three words each.
pub fn concept_names(count: usize, seed_value: u64) -> Vec<String> {
    let mut rng = seed::rng(seed::derive(seed_value, 0xC0, 0));
    let mut seen = std::collections::HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let words = match rng.gen_range(0..10) {
            0..=5 => 1,
            6..=8 => 2,
            _ => 3,
        };
        let name: Vec<String> = (0..words)
            .map(|_| {
                let syllables = rng.gen_range(2..=3);
                (0..syllables)
                    .map(|_| {
                        format!(
                            "{}{}",
                            ONSETS.choose(&mut rng).unwrap(),
                            VOWELS.choose(&mut rng).unwrap()
                        )
                    })
                    .collect::<String>()
            })
            .collect();
        let name = name.join("_");
        if seen.insert(name.clone()) {
            out.push(name);
        }
    }
    out
}

/// Writes `spec.assertions` dump lines to `out`.
pub fn write_dump<W: Write>(spec: &DumpSpec, out: &mut W) -> io::Result<()> {
    let names = concept_names(spec.concepts, spec.seed);
    let mut rng = seed::rng(seed::derive(spec.seed, 0xD0, 0));
    let mut head_rank: Vec<usize> = (0..names.len()).collect();
    let mut tail_rank = head_rank.clone();
    head_rank.shuffle(&mut rng);
    tail_rank.shuffle(&mut rng);
    let total: f64 = RELATIONS.iter().map(|r| r.1).sum();
    let n = names.len();
    let skewed = |rng: &mut seed::Rng, exponent: f64| -> usize {
        let u: f64 = rng.gen();
        ((n as f64 * u.powf(exponent)) as usize).min(n - 1)
    };
    for _ in 0..spec.assertions {
        let mut pick = rng.gen::<f64>() * total;
        let &(rel, _, tail_skew) = RELATIONS
            .iter()
            .find(|r| {
                pick -= r.1;
                pick <= 0.0
            })
            .unwrap_or(&RELATIONS[0]);
        let head = &names[head_rank[skewed(&mut rng, 1.6)]];
        let tail = if tail_skew == 0.0 {
            &names[tail_rank[rng.gen_range(0..DOMAIN_POOL.min(n))]]
        } else {
            &names[tail_rank[skewed(&mut rng, tail_skew)]]
        };
        let (head_lang, tail_lang) = if rng.gen::<f64>() < spec.non_english {
            if rng.gen() {
                ("fr", "en")
            } else {
                ("en", "de")
            }
        } else {
            ("en", "en")
        };
        let pos = if rng.gen_range(0..4) == 0 { "/n" } else { "" };
        writeln!(
            out,
            "/a/[/r/{rel}/,/c/{head_lang}/{head}{pos}/,/c/{tail_lang}/{tail}/]\t/r/{rel}\t/c/{head_lang}/{head}{pos}\t/c/{tail_lang}/{tail}\t{{\"dataset\": \"/d/synthetic\", \"weight\": 1.0}}"
        )?;
    }
    Ok(())
}

pub fn dump_string(spec: &DumpSpec) -> String {
    let mut buf = Vec::new();
    write_dump(spec, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("generator emits ASCII")
}
