use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SynthError;

/// Knobs for back-to-front graph growth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthParams {
    pub min_triples: usize,
    pub max_triples: usize,
    /// Multiset the per-node branching factor is drawn from.
    pub branch_choices: Vec<u8>,
    /// Whole-graph redraws before giving up on a seed.
    pub max_retries: usize,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            min_triples: 3,
            max_triples: 8,
            branch_choices: vec![0, 1, 2],
            max_retries: 200,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.min_triples < 1 || self.min_triples > self.max_triples {
            return Err(SynthError::InvalidParams(format!(
                "need 1 <= min_triples <= max_triples, got {}..{}",
                self.min_triples, self.max_triples
            )));
        }
        if self.branch_choices.is_empty() || self.branch_choices.iter().any(|&k| k > 2) {
            return Err(SynthError::InvalidParams(
                "branch_choices must be a non-empty multiset over {0, 1, 2}".into(),
            ));
        }
        if self.branch_choices.iter().all(|&k| k == 0) {
            return Err(SynthError::InvalidParams(
                "branch_choices must allow at least one non-zero branch".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Normal,
    Hard,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [Difficulty::Easy, Difficulty::Normal, Difficulty::Hard];

    pub fn as_str(self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Normal => "normal",
            Difficulty::Hard => "hard",
        }
    }
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Difficulty {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "easy" => Ok(Difficulty::Easy),
            "normal" => Ok(Difficulty::Normal),
            "hard" => Ok(Difficulty::Hard),
            _ => Err(SynthError::InvalidParams(format!("unknown difficulty '{s}'"))),
        }
    }
}

/// Relative weights of the three difficulty levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Mix {
    pub easy: f64,
    pub normal: f64,
    pub hard: f64,
}

impl Default for Mix {
    fn default() -> Self {
        Mix {
            easy: 1.0,
            normal: 1.0,
            hard: 1.0,
        }
    }
}

impl Mix {
    fn weights(&self) -> [f64; 3] {
        [self.easy, self.normal, self.hard]
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let w = self.weights();
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) || w.iter().sum::<f64>() <= 0.0 {
            return Err(SynthError::InvalidParams(
                "mix weights must be non-negative with a positive sum".into(),
            ));
        }
        Ok(())
    }

    /// Largest-remainder apportionment of `total` records.
    pub fn counts(&self, total: usize) -> [usize; 3] {
        let w = self.weights();
        let sum: f64 = w.iter().sum();
        let quotas: Vec<f64> = w.iter().map(|x| x / sum * total as f64).collect();
        let mut counts = [0usize; 3];
        for i in 0..3 {
            counts[i] = quotas[i].floor() as usize;
        }
        let mut left = total - counts.iter().sum::<usize>();
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            let ra = quotas[a] - quotas[a].floor();
            let rb = quotas[b] - quotas[b].floor();
            rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
        });
        for &i in order.iter().cycle() {
            if left == 0 {
                break;
            }
            if w[i] > 0.0 {
                counts[i] += 1;
                left -= 1;
            }
        }
        counts
    }

    /// Difficulty of every record id, interleaved by smooth weighted
    /// round-robin so any prefix of the corpus is close to the target mix.
    pub fn schedule(&self, total: usize) -> Vec<Difficulty> {
        let counts = self.counts(total);
        let mut current = [0i64; 3];
        let mut out = Vec::with_capacity(total);
        for _ in 0..total {
            for i in 0..3 {
                current[i] += counts[i] as i64;
            }
            let best = (0..3)
                .max_by(|&a, &b| current[a].cmp(&current[b]).then(b.cmp(&a)))
                .unwrap();
            current[best] -= total as i64;
            out.push(Difficulty::ALL[best]);
        }
        out
    }
}
