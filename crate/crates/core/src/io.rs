//! CSV and OBJ plumbing shared by the file formats.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Reads a headed CSV file and returns `(line number, record)` pairs.
///
/// Every record must have exactly `columns` fields.
pub(crate) fn read_csv_rows(path: &Path, columns: usize) -> Result<Vec<(u64, csv::StringRecord)>> {
    let file = fs::File::open(path).map_err(|e| Error::file(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header_len = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .len();
    if header_len != columns {
        return Err(Error::parse(
            path,
            1,
            format!("expected {columns} header columns, found {header_len}"),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::parse(path, line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != columns {
            return Err(Error::parse(
                path,
                line,
                format!("expected {columns} fields, found {}", record.len()),
            ));
        }
        rows.push((line, record));
    }
    Ok(rows)
}

/// Reads a headed CSV file and checks the header names.
pub(crate) fn read_csv_named(path: &Path, header: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>> {
    let file = fs::File::open(path).map_err(|e| Error::file(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let found = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::parse(
            path,
            1,
            format!(
                "expected header `{}`, found `{}`",
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    drop(reader);
    read_csv_rows(path, header.len())
}

pub(crate) fn parse_f64(path: &Path, line: u64, field: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| Error::parse(path, line, format!("`{field}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(path, line, format!("`{field}` is not finite")));
    }
    Ok(v)
}

pub(crate) fn parse_usize(path: &Path, line: u64, field: &str) -> Result<usize> {
    field
        .parse()
        .map_err(|_| Error::parse(path, line, format!("`{field}` is not a non-negative integer")))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::file(parent, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::file(path, e))
}

/// Files in `dir` whose name starts with `prefix` and ends with `.csv`, sorted by name.
pub fn list_csv(dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::file(dir, e))?;
    let mut out = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::file(dir, e))?;
        let name = entry.file_name();
        let name = name.to_string_lossy();
        if name.starts_with(prefix) && name.ends_with(".csv") {
            out.push(entry.path());
        }
    }
    out.sort();
    Ok(out)
}

/// Formats a float so that parsing it back yields the same bits.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}
