use std::fmt;

use serde::{Deserialize, Serialize};

use super::GraphError;

/// Characters that would break one of the two graph text formats.
const RESERVED: &[char] = &['|', ';', '(', ')', '\t'];

/// A normalized knowledge-base node: lowercase tokens joined by `_`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Concept(String);

impl Concept {
    /// Normalizes `surface` (spaces or underscores between words, any casing)
    /// into canonical concept text.
    pub fn new(surface: &str) -> Result<Self, GraphError> {
        let lowered = surface.trim().to_lowercase();
        let mut text = String::with_capacity(lowered.len());
        for token in lowered
            .split(|c: char| c.is_whitespace() || c == '_')
            .filter(|t| !t.is_empty())
        {
            if !text.is_empty() {
                text.push('_');
            }
            text.push_str(token);
        }
        if text.is_empty() {
            return Err(GraphError::InvalidConcept(surface.to_string()));
        }
        if text.contains(RESERVED) {
            return Err(GraphError::InvalidConcept(surface.to_string()));
        }
        Ok(Concept(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn word_count(&self) -> usize {
        self.0.split('_').count()
    }

    /// Space-joined form used by the parenthesized format and by anchoring.
    pub fn spaced(&self) -> String {
        self.0.replace('_', " ")
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Concept {
    type Error = GraphError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Concept::new(&value)
    }
}

impl From<Concept> for String {
    fn from(c: Concept) -> String {
        c.0
    }
}
