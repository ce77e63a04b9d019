use std::borrow::Cow;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::index::{IndexBuilder, IndexMeta, KbIndex};
use super::merge::{MergeMap, MergeTarget};
use super::KbError;
use crate::graph::Concept;

#[derive(Debug, Clone)]
pub struct IngestConfig {
    /// Malformed lines tolerated before ingest aborts.
    pub bad_line_budget: usize,
    /// Drop single-character and purely numeric concepts.
    pub drop_degenerate: bool,
    pub build_timestamp: u64,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            bad_line_budget: 1000,
            drop_degenerate: true,
            build_timestamp: 0,
        }
    }
}

/// Per-reason line counts from one ingest run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SkipReport {
    pub lines: u64,
    pub kept: u64,
    pub related_to_dropped: u64,
    pub other_dropped: u64,
    pub unknown_relation: u64,
    pub non_english: u64,
    pub degenerate: u64,
    pub invalid_concept: u64,
    pub self_loops: u64,
    pub malformed: u64,
    pub duplicates: u64,
    /// Kept lines whose relation was renamed or inverted by the merge map.
    pub merged: u64,
}

enum LineOutcome<'a> {
    Keep {
        head: Cow<'a, str>,
        relation: u8,
        tail: Cow<'a, str>,
        merged: bool,
    },
    Skip,
}

/// Streams a tab-separated ConceptNet assertion dump into an index.
pub fn ingest<R: Read>(
    reader: R,
    merge_map: &MergeMap,
    config: &IngestConfig,
) -> Result<(KbIndex, SkipReport), KbError> {
    let mut hashing = HashingReader::new(reader);
    let mut report = SkipReport::default();
    let mut builder = IndexBuilder::new();
    {
        let mut buffered = BufReader::with_capacity(1 << 20, &mut hashing);
        let mut line = String::new();
        let mut line_no = 0u64;
        loop {
            line.clear();
            let read = buffered
                .read_line(&mut line)
                .map_err(|e| KbError::Io(e.to_string()))?;
            if read == 0 {
                break;
            }
            line_no += 1;
            let text = line.trim_end_matches(['\n', '\r']);
            if text.is_empty() {
                continue;
            }
            report.lines += 1;
            match classify(text, merge_map, config, &mut report) {
                Ok(LineOutcome::Keep {
                    head,
                    relation,
                    tail,
                    merged,
                }) => {
                    report.kept += 1;
                    report.merged += merged as u64;
                    builder.push(&head, relation, &tail);
                }
                Ok(LineOutcome::Skip) => {}
                Err(reason) => {
                    report.malformed += 1;
                    log::debug!("line {line_no}: {reason}");
                    if report.malformed as usize > config.bad_line_budget {
                        return Err(KbError::MalformedDumpLine {
                            line: line_no,
                            reason,
                        });
                    }
                }
            }
        }
    }
    let meta = IndexMeta {
        source_checksum: hashing.hex_digest(),
        merge_map_version: merge_map.version().to_string(),
        build_timestamp: config.build_timestamp,
    };
    let (index, duplicates) = builder.finish(meta)?;
    report.duplicates = duplicates as u64;
    report.kept -= report.duplicates;
    Ok((index, report))
}

/// Opens `path` (plain or gzip, detected from magic bytes) and ingests it.
pub fn ingest_path(
    path: &Path,
    merge_map: &MergeMap,
    config: &IngestConfig,
) -> Result<(KbIndex, SkipReport), KbError> {
    let io_err = |e: io::Error| KbError::Io(format!("{}: {e}", path.display()));
    let mut file = File::open(path).map_err(io_err)?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic).map_err(io_err)?;
    let head = io::Cursor::new(magic[..n].to_vec()).chain(file);
    if n == 2 && magic == [0x1f, 0x8b] {
        ingest(MultiGzDecoder::new(head), merge_map, config)
    } else {
        ingest(head, merge_map, config)
    }
}

fn classify<'a>(
    line: &'a str,
    merge_map: &MergeMap,
    config: &IngestConfig,
    report: &mut SkipReport,
) -> Result<LineOutcome<'a>, String> {
    let mut cols = line.split('\t');
    let (Some(_uri), Some(rel), Some(start), Some(end)) =
        (cols.next(), cols.next(), cols.next(), cols.next())
    else {
        return Err("expected at least 4 tab-separated columns".into());
    };
    let raw = rel
        .strip_prefix("/r/")
        .ok_or_else(|| format!("relation '{rel}' lacks /r/ prefix"))?;
    let (start_lang, start_text) = split_concept_uri(start)?;
    let (end_lang, end_text) = split_concept_uri(end)?;

    let (relation, inverse) = match merge_map.lookup(raw) {
        Some(MergeTarget::Drop) => {
            if raw == "RelatedTo" {
                report.related_to_dropped += 1;
            } else {
                report.other_dropped += 1;
            }
            return Ok(LineOutcome::Skip);
        }
        None => {
            report.unknown_relation += 1;
            return Ok(LineOutcome::Skip);
        }
        Some(MergeTarget::Canonical { relation, inverse }) => (relation, inverse),
    };
    if start_lang != "en" || end_lang != "en" {
        report.non_english += 1;
        return Ok(LineOutcome::Skip);
    }
    let (Some(start_text), Some(end_text)) = (normalize(start_text), normalize(end_text)) else {
        report.invalid_concept += 1;
        return Ok(LineOutcome::Skip);
    };
    if config.drop_degenerate && (is_degenerate(&start_text) || is_degenerate(&end_text)) {
        report.degenerate += 1;
        return Ok(LineOutcome::Skip);
    }
    if start_text == end_text {
        report.self_loops += 1;
        return Ok(LineOutcome::Skip);
    }
    let (head, tail) = if inverse {
        (end_text, start_text)
    } else {
        (start_text, end_text)
    };
    let merged = inverse || !raw_matches_canonical(raw, relation);
    Ok(LineOutcome::Keep {
        head,
        relation,
        tail,
        merged,
    })
}

/// `/c/en/ice_cream/n/...` -> `("en", "ice_cream")`.
fn split_concept_uri(uri: &str) -> Result<(&str, &str), String> {
    let mut parts = uri.split('/');
    match (parts.next(), parts.next(), parts.next(), parts.next()) {
        (Some(""), Some("c"), Some(lang), Some(text)) if !lang.is_empty() && !text.is_empty() => {
            Ok((lang, text))
        }
        _ => Err(format!("'{uri}' is not a /c/<lang>/<text> concept URI")),
    }
}

fn normalize(text: &str) -> Option<Cow<'_, str>> {
    let c = Concept::new(text).ok()?;
    if c.as_str() == text {
        Some(Cow::Borrowed(text))
    } else {
        Some(Cow::Owned(c.into()))
    }
}

fn is_degenerate(text: &str) -> bool {
    text.chars().count() == 1 || text.chars().all(|c| c.is_ascii_digit() || c == '_')
}

fn raw_matches_canonical(raw: &str, relation: u8) -> bool {
    let canonical = crate::graph::SYNTHETIC16[relation as usize];
    raw.chars()
        .filter(|c| *c != '_')
        .map(|c| c.to_ascii_lowercase())
        .eq(canonical.chars().filter(|c| *c != '_'))
}

struct HashingReader<R> {
    inner: R,
    hasher: Sha256,
}

impl<R> HashingReader<R> {
    fn new(inner: R) -> Self {
        HashingReader {
            inner,
            hasher: Sha256::new(),
        }
    }

    fn hex_digest(self) -> String {
        self.hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

impl<R: Read> Read for HashingReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(rel: &str, start: &str, end: &str) -> String {
        format!("/a/[{rel},{start},{end}]\t{rel}\t{start}\t{end}\t{{\"weight\": 1.0}}\n")
    }

    fn run(dump: &str) -> Result<(KbIndex, SkipReport), KbError> {
        ingest(dump.as_bytes(), &MergeMap::default(), &IngestConfig::default())
    }

    #[test]
    fn canonical_line_maps_directly() {
        let (idx, report) = run(&line("/r/IsA", "/c/en/cat/n", "/c/en/animal")).unwrap();
        assert_eq!(idx.triple(0).to_string(), "(cat, is_a, animal)");
        assert_eq!(report.kept, 1);
        assert_eq!(report.merged, 0);
    }

    #[test]
    fn related_to_is_dropped() {
        let dump = line("/r/RelatedTo", "/c/en/cat", "/c/en/pet") + &line("/r/IsA", "/c/en/cat", "/c/en/animal");
        let (idx, report) = run(&dump).unwrap();
        assert_eq!(idx.triple_count(), 1);
        assert_eq!(report.related_to_dropped, 1);
        assert_eq!(idx.relation_histogram().iter().sum::<u64>(), 1);
    }

    #[test]
    fn inverse_entries_swap_endpoints() {
        let (idx, report) = run(&line("/r/HasA", "/c/en/car", "/c/en/wheel")).unwrap();
        assert_eq!(idx.triple(0).to_string(), "(wheel, part_of, car)");
        assert_eq!(report.merged, 1);
    }

    #[test]
    fn filters() {
        let dump = [
            line("/r/IsA", "/c/fr/chat", "/c/en/animal"),
            line("/r/IsA", "/c/en/x", "/c/en/letter"),
            line("/r/IsA", "/c/en/42", "/c/en/number"),
            line("/r/IsA", "/c/en/cat", "/c/en/cat/n"),
            line("/r/dbpedia/genre", "/c/en/jazz", "/c/en/music"),
            line("/r/Synonym", "/c/en/cat", "/c/en/feline"),
            line("/r/IsA", "/c/en/a|b", "/c/en/animal"),
            line("/r/IsA", "/c/en/Cat", "/c/en/animal"),
            line("/r/IsA", "/c/en/cat", "/c/en/animal"),
        ]
        .concat();
        let (idx, r) = run(&dump).unwrap();
        assert_eq!(idx.triple_count(), 1);
        assert_eq!((r.duplicates, r.kept), (1, 1));
        assert_eq!(
            (r.non_english, r.degenerate, r.self_loops, r.unknown_relation, r.other_dropped, r.invalid_concept),
            (1, 2, 1, 1, 1, 1)
        );
    }

    #[test]
    fn bad_line_budget() {
        let dump = format!("garbage\n{}", line("/r/IsA", "/c/en/cat", "/c/en/animal"));
        let ok = run(&dump).unwrap();
        assert_eq!(ok.1.malformed, 1);
        let strict = IngestConfig {
            bad_line_budget: 0,
            ..IngestConfig::default()
        };
        let err = ingest(dump.as_bytes(), &MergeMap::default(), &strict).unwrap_err();
        assert!(matches!(err, KbError::MalformedDumpLine { line: 1, .. }));
    }

    #[test]
    fn nothing_survives() {
        assert!(matches!(
            run(&line("/r/RelatedTo", "/c/en/cat", "/c/en/pet")),
            Err(KbError::EmptyIndex)
        ));
    }

    #[test]
    fn deterministic_checksum() {
        let dump = line("/r/IsA", "/c/en/cat", "/c/en/animal") + &line("/r/IsA", "/c/en/dog", "/c/en/animal");
        let a = run(&dump).unwrap().0;
        let b = run(&dump).unwrap().0;
        assert_eq!(a.content_checksum(), b.content_checksum());
        assert_eq!(a.meta().source_checksum, b.meta().source_checksum);
    }
}
