use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use tempfile::NamedTempFile;

/// Writes `path` through a temporary file in the same directory and renames
/// it into place only once `fill` succeeds.
pub fn write_atomic<T>(path: &Path, fill: impl FnOnce(&mut dyn Write) -> Result<T>) -> Result<T> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    let mut w = BufWriter::new(tmp);
    let out = fill(&mut w)?;
    let tmp = w.into_inner().map_err(|e| e.into_error())?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(out)
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

/// Non-blank lines of a tab-separated file split into exactly `columns`
/// fields, with their 1-based line numbers.
pub fn read_columns(path: &Path, columns: usize) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rows = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<String> = line.splitn(columns, '\t').map(|s| s.trim().to_string()).collect();
        if fields.len() != columns || fields.iter().any(String::is_empty) {
            bail!(
                "{}:{}: expected {} tab-separated fields",
                path.display(),
                i + 1,
                columns
            );
        }
        rows.push((i + 1, fields));
    }
    if rows.is_empty() {
        bail!("{}: no input lines", path.display());
    }
    Ok(rows)
}
