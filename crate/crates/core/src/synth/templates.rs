use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;

use super::SynthError;
use crate::graph::{Relation, SYNTHETIC16};

const DEFAULT_BANK: &str = include_str!("../../data/templates.tsv");

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece {
    Text(String),
    Head,
    Tail,
}

/// A verbalization pattern with exactly one head slot `X` and one tail slot `Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    source: String,
    pieces: Vec<Piece>,
}

impl Template {
    pub fn parse(text: &str) -> Result<Self, SynthError> {
        let chars: Vec<char> = text.chars().collect();
        let mut pieces = Vec::new();
        let mut buf = String::new();
        let (mut heads, mut tails) = (0, 0);
        for (i, &c) in chars.iter().enumerate() {
            let isolated = (c == 'X' || c == 'Y')
                && (i == 0 || !chars[i - 1].is_alphanumeric())
                && chars.get(i + 1).is_none_or(|n| !n.is_alphanumeric());
            if isolated {
                if !buf.is_empty() {
                    pieces.push(Piece::Text(std::mem::take(&mut buf)));
                }
                if c == 'X' {
                    heads += 1;
                    pieces.push(Piece::Head);
                } else {
                    tails += 1;
                    pieces.push(Piece::Tail);
                }
            } else {
                buf.push(c);
            }
        }
        if !buf.is_empty() {
            pieces.push(Piece::Text(buf));
        }
        if heads != 1 || tails != 1 {
            return Err(SynthError::Template(format!(
                "'{text}' must contain exactly one X and one Y slot"
            )));
        }
        Ok(Template {
            source: text.to_string(),
            pieces,
        })
    }

    pub fn as_str(&self) -> &str {
        &self.source
    }

    /// Fills the slots.
    pub fn render(&self, head: &str, tail: &str) -> String {
        let mut out = String::with_capacity(self.source.len() + head.len() + tail.len());
        for p in &self.pieces {
            match p {
                Piece::Text(t) => out.push_str(t),
                Piece::Head => out.push_str(head),
                Piece::Tail => out.push_str(tail),
            }
        }
        out
    }

    /// The relation wording alone: slots removed, whitespace collapsed.
    /// `Y is a result of X` gives `is a result of`.
    pub fn phrase(&self) -> String {
        let joined: String = self
            .pieces
            .iter()
            .map(|p| match p {
                Piece::Text(t) => t.as_str(),
                _ => " ",
            })
            .collect();
        joined.split_whitespace().collect::<Vec<_>>().join(" ")
    }
}

/// Relation-indexed template lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateBank {
    templates: BTreeMap<Relation, Vec<Template>>,
}

impl TemplateBank {
    /// Parses `relation<TAB>template` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, SynthError> {
        let mut templates: BTreeMap<Relation, Vec<Template>> = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (rel, tpl) = line.split_once('\t').ok_or_else(|| {
                SynthError::Template(format!("line {}: expected 'relation<TAB>template'", n + 1))
            })?;
            let relation = Relation::parse(rel)
                .map_err(|e| SynthError::Template(format!("line {}: {e}", n + 1)))?;
            let template = Template::parse(tpl.trim())
                .map_err(|e| SynthError::Template(format!("line {}: {e}", n + 1)))?;
            templates.entry(relation).or_default().push(template);
        }
        Ok(TemplateBank { templates })
    }

    pub fn load(path: &Path) -> Result<Self, SynthError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SynthError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Errors unless every one of the sixteen synthetic relations has a template.
    pub fn check_covers_synthetic16(&self) -> Result<(), SynthError> {
        for name in SYNTHETIC16 {
            let r = Relation::parse(name).expect("canonical name parses");
            if self.templates.get(&r).is_none_or(Vec::is_empty) {
                return Err(SynthError::MissingTemplate(name.to_string()));
            }
        }
        Ok(())
    }

    pub fn templates(&self, relation: &Relation) -> Option<&[Template]> {
        self.templates.get(relation).map(Vec::as_slice)
    }

    /// Uniform draw over the relation's templates.
    pub fn choose<R: Rng + ?Sized>(
        &self,
        relation: &Relation,
        rng: &mut R,
    ) -> Result<&Template, SynthError> {
        let list = self
            .templates
            .get(relation)
            .filter(|l| !l.is_empty())
            .ok_or_else(|| SynthError::MissingTemplate(relation.to_string()))?;
        Ok(&list[rng.gen_range(0..list.len())])
    }

    pub fn relations(&self) -> impl Iterator<Item = &Relation> {
        self.templates.keys()
    }
}

impl Default for TemplateBank {
    fn default() -> Self {
        TemplateBank::parse(DEFAULT_BANK).expect("bundled template bank is valid")
    }
}
