//! Bundled and downloadable datasets.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::Command;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::harness::libsvm::{parse_libsvm_str, write_libsvm, LibsvmOptions};
use crate::numerics::{RngState, SAMPLE_STREAM};
use crate::problems::DatasetMatrix;

/// Name under which configs refer to the bundled dataset.
pub const BUNDLED_NAME: &str = "bundled";
pub const BUNDLED_FILE: &str = "synthetic_w1a_like_200x50.libsvm";
pub const BUNDLED_ROWS: usize = 200;
pub const BUNDLED_COLS: usize = 50;
pub const BUNDLED_SEED: u64 = 20_250_101;

const BUNDLED_TEXT: &str = include_str!("../../data/synthetic_w1a_like_200x50.libsvm");

/// A dataset that `dataset fetch` knows how to download.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnownDataset {
    pub name: &'static str,
    pub url: &'static str,
    /// Pinned SHA-256 of the file, when one has been recorded.
    pub sha256: Option<&'static str>,
    pub rows: usize,
    pub cols: usize,
}

pub const KNOWN_DATASETS: &[KnownDataset] = &[KnownDataset {
    name: "w1a",
    url: "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary/w1a",
    sha256: None,
    rows: 2477,
    cols: 300,
}];

pub fn known_dataset(name: &str) -> Option<KnownDataset> {
    KNOWN_DATASETS.iter().copied().find(|d| d.name == name)
}

/// The bundled sparse binary classification set (200 rows, 50 features).
pub fn bundled_dataset() -> DatasetMatrix<f64> {
    parse_libsvm_str(BUNDLED_TEXT, LibsvmOptions { dim: Some(BUNDLED_COLS), zero_as_negative: false })
        .expect("bundled dataset is well formed")
}

pub fn bundled_libsvm_text() -> &'static str {
    BUNDLED_TEXT
}

/// Sparse binary features with skewed feature popularity and imbalanced
/// labels from a planted linear model. Rows whose planted score lies within
/// `MARGIN` of the decision threshold are redrawn, so the classes are
/// linearly separable with a visible margin and the logistic loss has
/// infimum 0 without a minimizer.
pub fn generate_synthetic(rows: usize, cols: usize, seed: u64) -> Result<DatasetMatrix<f64>> {
    const MARGIN: f64 = 1.0;
    const OFFSET: f64 = 1.5;
    if rows == 0 || cols < 2 {
        return Err(Error::InvalidArgument("synthetic dataset needs rows >= 1 and cols >= 2".into()));
    }
    let mut rng = RngState::new(seed, SAMPLE_STREAM);
    let planted: Vec<f64> = (0..cols).map(|_| 2.0 * rng.standard_normal()).collect();
    let popularity: Vec<f64> = (0..cols).map(|j| 1.0 / ((j + 1) as f64).powf(0.3)).collect();
    let mut entries = vec![0.0; rows * cols];
    let mut labels = Vec::with_capacity(rows);
    for i in 0..rows {
        let row = &mut entries[i * cols..(i + 1) * cols];
        let score = loop {
            row.iter_mut().for_each(|v| *v = 0.0);
            let nnz = (3 + rng.index(6)).min(cols);
            let mut weights = popularity.clone();
            for _ in 0..nnz {
                let total: f64 = weights.iter().sum();
                let mut u = rng.uniform() * total;
                let mut pick = cols - 1;
                for (j, w) in weights.iter().enumerate() {
                    if *w > 0.0 && u < *w {
                        pick = j;
                        break;
                    }
                    u -= w;
                }
                row[pick] = 1.0;
                weights[pick] = 0.0;
            }
            let score = row.iter().zip(&planted).map(|(a, w)| a * w).sum::<f64>() - OFFSET;
            if score.abs() >= MARGIN {
                break score;
            }
        };
        labels.push(if score > 0.0 { 1.0 } else { -1.0 });
    }
    DatasetMatrix::new(rows, cols, entries, labels)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Downloads `url` to `dest` with `curl` and, when `sha256` is given,
/// verifies the file before keeping it.
pub fn fetch_dataset(url: &str, dest: &Path, sha256: Option<&str>) -> Result<String> {
    let partial = dest.with_extension("partial");
    let status = Command::new("curl")
        .args(["--fail", "--silent", "--show-error", "--location", "--output"])
        .arg(&partial)
        .arg(url)
        .status()
        .map_err(|e| Error::io(&partial, e))?;
    if !status.success() {
        let _ = fs::remove_file(&partial);
        return Err(Error::io(dest, std::io::Error::other(format!("download of {url} failed ({status})"))));
    }
    let bytes = fs::read(&partial).map_err(|e| Error::io(&partial, e))?;
    let actual = sha256_hex(&bytes);
    if let Some(expected) = sha256 {
        if !expected.eq_ignore_ascii_case(&actual) {
            let _ = fs::remove_file(&partial);
            return Err(Error::Checksum { expected: expected.to_string(), actual });
        }
    }
    fs::rename(&partial, dest).map_err(|e| Error::io(dest, e))?;
    Ok(actual)
}

/// Dense CSV with a `label,x1,…,xd` header.
pub fn to_dense_csv(data: &DatasetMatrix<f64>) -> String {
    let mut out = String::from("label");
    for j in 1..=data.cols() {
        let _ = write!(out, ",x{j}");
    }
    out.push('\n');
    for i in 0..data.rows() {
        let _ = write!(out, "{}", data.label(i));
        for v in data.row(i) {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

/// Regenerates the bundled file's contents.
pub fn bundled_generation_text() -> Result<String> {
    Ok(write_libsvm(&generate_synthetic(BUNDLED_ROWS, BUNDLED_COLS, BUNDLED_SEED)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_file_matches_generator() {
        assert_eq!(bundled_generation_text().unwrap(), bundled_libsvm_text());
        let d = bundled_dataset();
        assert_eq!((d.rows(), d.cols()), (BUNDLED_ROWS, BUNDLED_COLS));
    }

    #[test]
    fn both_classes_present() {
        let d = bundled_dataset();
        let pos = d.labels().iter().filter(|&&y| y > 0.0).count();
        assert!(pos > 0 && pos < d.rows());
    }

    #[test]
    fn dense_csv_shape() {
        let d = generate_synthetic(3, 4, 1).unwrap();
        let csv = to_dense_csv(&d);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().all(|l| l.split(',').count() == 5));
    }
}
