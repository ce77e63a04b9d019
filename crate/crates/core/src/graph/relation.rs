use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::GraphError;

/// The sixteen relations kept after merging, in corpus-table order.
pub const SYNTHETIC16: [&str; 16] = [
    "is_a",
    "at_location",
    "part_of",
    "capable_of",
    "has_context",
    "desires",
    "antonym",
    "used_for",
    "causes",
    "has_subevent",
    "has_property",
    "receives_action",
    "made_of",
    "not_desires",
    "created_by",
    "not_capable_of",
];

/// Multi-word relation names seen in downstream explanation-graph data. Used
/// only to restore word boundaries when a relation arrives in compact form
/// (`usedfor`, `notcapableof`).
const KNOWN_MULTIWORD: &[&str] = &[
    "related_to",
    "synonym_of",
    "antonym_of",
    "not_at_location",
    "not_part_of",
    "not_has_context",
    "not_causes",
    "not_created_by",
    "not_is_a",
    "not_has_property",
    "not_has_subevent",
    "not_made_of",
    "not_receives_action",
    "not_used_for",
    "distinct_from",
    "similar_to",
    "has_a",
    "has_prerequisite",
    "motivated_by_goal",
    "causes_desire",
    "form_of",
    "derived_from",
    "manner_of",
    "located_near",
    "defined_as",
    "symbol_of",
    "instance_of",
];

/// Canonical relation label: lowercase words joined by `_`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Relation(String);

impl Relation {
    /// Accepts canonical (`used_for`), spaced (`used for`), camel-case
    /// (`UsedFor`) and compact (`usedfor`) spellings.
    pub fn parse(surface: &str) -> Result<Self, GraphError> {
        let trimmed = surface.trim();
        if trimmed.is_empty()
            || !trimmed
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == ' ')
        {
            return Err(GraphError::InvalidRelation(surface.to_string()));
        }
        let has_separator = trimmed.contains([' ', '_']);
        let has_inner_upper = trimmed.chars().skip(1).any(|c| c.is_ascii_uppercase())
            && trimmed.chars().any(|c| c.is_ascii_lowercase());
        let canonical = if has_separator {
            trimmed
                .split([' ', '_'])
                .filter(|t| !t.is_empty())
                .map(str::to_ascii_lowercase)
                .collect::<Vec<_>>()
                .join("_")
        } else if has_inner_upper {
            let mut out = String::new();
            for (i, c) in trimmed.chars().enumerate() {
                if c.is_ascii_uppercase() && i > 0 {
                    out.push('_');
                }
                out.push(c.to_ascii_lowercase());
            }
            out
        } else {
            let lower = trimmed.to_ascii_lowercase();
            SYNTHETIC16
                .iter()
                .chain(KNOWN_MULTIWORD)
                .find(|name| compact(name) == lower)
                .map(|name| name.to_string())
                .unwrap_or(lower)
        };
        Ok(Relation(canonical))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Underscore-free spelling used by the pipe format (`usedfor`).
    pub fn compact(&self) -> String {
        compact(&self.0)
    }

    /// Space-separated spelling used by the parenthesized format (`used for`).
    pub fn spaced(&self) -> String {
        self.0.replace('_', " ")
    }

    /// Position in [`SYNTHETIC16`], if the relation belongs to it.
    pub fn synthetic_index(&self) -> Option<usize> {
        SYNTHETIC16.iter().position(|r| *r == self.0)
    }

    pub(crate) fn from_static(name: &'static str) -> Self {
        Relation(name.to_string())
    }
}

fn compact(name: &str) -> String {
    name.chars().filter(|c| *c != '_').collect()
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Relation {
    type Error = GraphError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Relation::parse(&value)
    }
}

impl From<Relation> for String {
    fn from(r: Relation) -> String {
        r.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationOrigin {
    Synthetic16,
    DownstreamCustom,
}

/// An ordered, duplicate-free relation vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSet {
    members: Vec<Relation>,
    origin: RelationOrigin,
}

impl RelationSet {
    pub fn synthetic16() -> Self {
        RelationSet {
            members: SYNTHETIC16.iter().map(|r| Relation::from_static(r)).collect(),
            origin: RelationOrigin::Synthetic16,
        }
    }

    pub fn custom(members: Vec<Relation>) -> Result<Self, GraphError> {
        for (i, r) in members.iter().enumerate() {
            if members[..i].contains(r) {
                return Err(GraphError::DuplicateRelation(r.to_string()));
            }
        }
        Ok(RelationSet {
            members,
            origin: RelationOrigin::DownstreamCustom,
        })
    }

    /// One relation per line in any accepted spelling; blank lines and `#`
    /// comments are skipped.
    pub fn parse_list(text: &str) -> Result<Self, GraphError> {
        let members = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(Relation::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Self::custom(members)
    }

    pub fn load(path: &Path) -> Result<Self, GraphError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GraphError::Io(format!("{}: {e}", path.display())))?;
        Self::parse_list(&text)
    }

    pub fn contains(&self, r: &Relation) -> bool {
        self.members.contains(r)
    }

    pub fn members(&self) -> &[Relation] {
        &self.members
    }

    pub fn origin(&self) -> RelationOrigin {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic16_is_complete_and_unique() {
        let set = RelationSet::synthetic16();
        assert_eq!(set.len(), 16);
        assert!(RelationSet::custom(set.members().to_vec()).is_ok());
        assert_eq!(set.origin(), RelationOrigin::Synthetic16);
    }

    #[test]
    fn spellings_agree() {
        for s in ["used_for", "used for", "UsedFor", "usedfor", "USEDFOR"] {
            assert_eq!(Relation::parse(s).unwrap().as_str(), "used_for", "{s}");
        }
        assert_eq!(Relation::parse("isa").unwrap().as_str(), "is_a");
        assert_eq!(Relation::parse("notcapableof").unwrap().as_str(), "not_capable_of");
        assert_eq!(Relation::parse("not used for").unwrap().as_str(), "not_used_for");
        assert_eq!(Relation::parse("causes").unwrap().as_str(), "causes");
    }

    #[test]
    fn surface_forms() {
        let r = Relation::parse("has_subevent").unwrap();
        assert_eq!(r.compact(), "hassubevent");
        assert_eq!(r.spaced(), "has subevent");
        assert_eq!(r.synthetic_index(), Some(9));
    }

    #[test]
    fn unknown_compact_kept_verbatim() {
        assert_eq!(Relation::parse("frobnicates").unwrap().as_str(), "frobnicates");
        assert!(Relation::parse("bad-rel").is_err());
        assert!(Relation::parse("").is_err());
    }

    #[test]
    fn custom_rejects_duplicates() {
        let err = RelationSet::parse_list("causes\nCauses\n").unwrap_err();
        assert!(matches!(err, GraphError::DuplicateRelation(_)));
    }
}
