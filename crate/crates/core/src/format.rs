//! Fixed numeric formatting and small CSV helpers shared by every exporter.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Formats with 12 significant digits and a lowercase `e` exponent.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{:.11e}", x)
    }
}

pub fn csv_row(values: &[f64]) -> String {
    let mut line = values.iter().map(|v| num(*v)).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

/// Writes `contents` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidInput(format!("not a file path: {}", path.display())))?;
    let tmp = match dir {
        Some(d) => d.join(format!(".{}.tmp", file_name.to_string_lossy())),
        None => Path::new(&format!(".{}.tmp", file_name.to_string_lossy())).to_path_buf(),
    };
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// `key=value` pairs from a `# ...` descriptor line, in order.
pub fn parse_descriptor(line: &str) -> Vec<(String, String)> {
    line.trim_start_matches('#')
        .split_whitespace()
        .filter_map(|tok| {
            let (k, v) = tok.split_once('=')?;
            Some((k.to_string(), v.to_string()))
        })
        .collect()
}

pub fn descriptor_value<'a>(pairs: &'a [(String, String)], key: &str) -> Option<&'a str> {
    pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

pub(crate) fn parse_f64(field: &str, line_no: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line_no}: cannot parse `{field}` as a number")))
}

/// Splits CSV text into (comment lines, header, numeric rows).
pub(crate) fn read_numeric_csv(
    text: &str,
    expected_header: &str,
) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut comments = Vec::new();
    let mut rows = Vec::new();
    let mut header_seen = false;
    let width = expected_header.split(',').count();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            comments.push(line.to_string());
            continue;
        }
        if !header_seen {
            if line != expected_header {
                return Err(Error::Parse(format!(
                    "line {}: expected header `{expected_header}`, found `{line}`",
                    idx + 1
                )));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(Error::Parse(format!(
                "line {}: expected {width} fields, found {}",
                idx + 1,
                fields.len()
            )));
        }
        rows.push(
            fields
                .iter()
                .map(|f| parse_f64(f, idx + 1))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    if !header_seen {
        return Err(Error::Parse(format!("missing header `{expected_header}`")));
    }
    Ok((comments, rows))
}
