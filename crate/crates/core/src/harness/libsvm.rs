//! LIBSVM text format: `<label> <index>:<value> ...`, 1-based ascending
//! indices, `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::problems::DatasetMatrix;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LibsvmOptions {
    /// Column count; defaults to the largest index seen.
    pub dim: Option<usize>,
    /// Read label `0` as `−1`.
    pub zero_as_negative: bool,
}

struct Row {
    label: f64,
    features: BTreeMap<usize, f64>,
}

pub fn parse_libsvm(path: &Path, opts: LibsvmOptions) -> Result<DatasetMatrix<f64>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_libsvm_bytes(&bytes, opts)
}

pub fn parse_libsvm_str(text: &str, opts: LibsvmOptions) -> Result<DatasetMatrix<f64>> {
    parse_libsvm_bytes(text.as_bytes(), opts)
}

/// Parses arbitrary bytes; malformed input yields an error naming the line.
pub fn parse_libsvm_bytes(bytes: &[u8], opts: LibsvmOptions) -> Result<DatasetMatrix<f64>> {
    let mut rows = Vec::new();
    let mut max_index = 0usize;
    for (idx, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let line_no = idx + 1;
        let text = std::str::from_utf8(raw)
            .map_err(|_| Error::Parse { line: line_no, message: "invalid UTF-8".into() })?;
        let content = text.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let row = parse_line(content, line_no, opts)?;
        if let Some((&last, _)) = row.features.last_key_value() {
            max_index = max_index.max(last);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InsufficientData("LIBSVM input has no data rows".into()));
    }
    let cols = match opts.dim {
        Some(d) if d < max_index => {
            return Err(Error::Parse {
                line: 0,
                message: format!("feature index {max_index} exceeds the requested dimension {d}"),
            })
        }
        Some(d) => d,
        None => max_index,
    };
    if cols == 0 {
        return Err(Error::InsufficientData("LIBSVM input has no features".into()));
    }
    let mut entries = vec![0.0; rows.len() * cols];
    for (i, row) in rows.iter().enumerate() {
        for (&j, &v) in &row.features {
            entries[i * cols + j - 1] = v;
        }
    }
    let labels = rows.iter().map(|r| r.label).collect();
    DatasetMatrix::new(rows.len(), cols, entries, labels)
}

fn parse_line(content: &str, line: usize, opts: LibsvmOptions) -> Result<Row> {
    let bad = |message: String| Error::Parse { line, message };
    let mut tokens = content.split_whitespace();
    let label_token = tokens.next().ok_or_else(|| bad("missing label".into()))?;
    let label_value: f64 = label_token
        .parse()
        .map_err(|_| bad(format!("label {label_token:?} is not a number")))?;
    let label = if label_value == 1.0 {
        1.0
    } else if label_value == -1.0 || (label_value == 0.0 && opts.zero_as_negative) {
        -1.0
    } else {
        return Err(Error::LabelDomain { line, label: label_token.to_string() });
    };
    let mut features = BTreeMap::new();
    for token in tokens {
        let (i, v) = token
            .split_once(':')
            .ok_or_else(|| bad(format!("feature {token:?} is not index:value")))?;
        let index: usize = i.parse().map_err(|_| bad(format!("bad feature index {i:?}")))?;
        if index == 0 {
            return Err(bad("feature indices are 1-based".into()));
        }
        let value: f64 = v.parse().map_err(|_| bad(format!("bad feature value {v:?}")))?;
        if !value.is_finite() {
            return Err(bad(format!("non-finite feature value {v:?}")));
        }
        if let Some(d) = opts.dim {
            if index > d {
                return Err(bad(format!("feature index {index} exceeds dimension {d}")));
            }
        }
        if features.insert(index, value).is_some() {
            return Err(bad(format!("duplicate feature index {index}")));
        }
    }
    Ok(Row { label, features })
}

/// Serializes nonzero entries; values use the shortest round-trip form.
pub fn write_libsvm(data: &DatasetMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..data.rows() {
        out.push_str(if data.label(i) > 0.0 { "+1" } else { "-1" });
        for (j, &v) in data.row(i).iter().enumerate() {
            if v != 0.0 {
                let _ = write!(out, " {}:{}", j + 1, v);
            }
        }
        out.push('\n');
    }
    out
}

/// Induced 1-norm of the instance matrix.
pub fn matrix_one_norm(data: &DatasetMatrix<f64>) -> f64 {
    data.one_norm()
}
