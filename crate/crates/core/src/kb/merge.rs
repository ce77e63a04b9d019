use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::KbError;
use crate::graph::SYNTHETIC16;

const DEFAULT_MAP: &str = include_str!("../../data/default_merge_map.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeTarget {
    Drop,
    /// Index into [`SYNTHETIC16`]; `inverse` swaps head and tail.
    Canonical { relation: u8, inverse: bool },
}

/// Maps raw ConceptNet relation names (`IsA`, `RelatedTo`) onto the sixteen
/// canonical relations or DROP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeMap {
    entries: BTreeMap<String, MergeTarget>,
    version: String,
}

impl MergeMap {
    /// Parses the two-column `raw_relation canonical_or_DROP` format.
    pub fn parse(text: &str) -> Result<Self, KbError> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            let [raw, target] = cols.as_slice() else {
                return Err(KbError::MergeMap(format!(
                    "line {}: expected two columns, got '{line}'",
                    n + 1
                )));
            };
            let raw = raw.trim_start_matches("/r/");
            let target = if target.eq_ignore_ascii_case("drop") {
                MergeTarget::Drop
            } else {
                let (inverse, name) = match target.strip_prefix('~') {
                    Some(rest) => (true, rest),
                    None => (false, *target),
                };
                let relation = SYNTHETIC16
                    .iter()
                    .position(|r| *r == name)
                    .ok_or_else(|| {
                        KbError::MergeMap(format!(
                            "line {}: '{name}' is not one of the sixteen canonical relations",
                            n + 1
                        ))
                    })? as u8;
                MergeTarget::Canonical { relation, inverse }
            };
            if entries.insert(raw.to_string(), target).is_some() {
                return Err(KbError::MergeMap(format!(
                    "line {}: duplicate entry for '{raw}'",
                    n + 1
                )));
            }
        }
        if entries.get("RelatedTo") != Some(&MergeTarget::Drop) {
            return Err(KbError::MergeMap("RelatedTo must map to DROP".into()));
        }
        let image: BTreeSet<u8> = entries
            .values()
            .filter_map(|t| match t {
                MergeTarget::Canonical { relation, .. } => Some(*relation),
                MergeTarget::Drop => None,
            })
            .collect();
        if image.len() != SYNTHETIC16.len() {
            let missing: Vec<&str> = (0..SYNTHETIC16.len() as u8)
                .filter(|r| !image.contains(r))
                .map(|r| SYNTHETIC16[r as usize])
                .collect();
            return Err(KbError::MergeMap(format!(
                "no raw relation maps to: {}",
                missing.join(", ")
            )));
        }
        let version = version_of(&entries);
        Ok(MergeMap { entries, version })
    }

    pub fn load(path: &Path) -> Result<Self, KbError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| KbError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// `None` for relations the map does not mention.
    pub fn lookup(&self, raw: &str) -> Option<MergeTarget> {
        self.entries.get(raw).copied()
    }

    /// Short content hash identifying this map.
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, MergeTarget)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl Default for MergeMap {
    fn default() -> Self {
        MergeMap::parse(DEFAULT_MAP).expect("bundled merge map is valid")
    }
}

fn version_of(entries: &BTreeMap<String, MergeTarget>) -> String {
    let mut h = Sha256::new();
    for (raw, target) in entries {
        h.update(raw.as_bytes());
        match target {
            MergeTarget::Drop => h.update(b"\0DROP\n"),
            MergeTarget::Canonical { relation, inverse } => {
                h.update([0, *relation, *inverse as u8, b'\n']);
            }
        }
    }
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}
