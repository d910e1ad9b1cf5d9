use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const COLUMNS: &str = "k,f,subopt,grad_norm,regime,fo_calls,zo_calls,elapsed_s";

/// Regime label of a logged iterate relative to the run's threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `‖∇f‖ ≥ threshold`.
    Linear,
    Sublinear,
    /// No threshold configured.
    Unclassified,
}

impl Regime {
    pub fn classify(grad_norm: f64, threshold: Option<f64>) -> Self {
        match threshold {
            None => Regime::Unclassified,
            Some(t) if grad_norm >= t => Regime::Linear,
            Some(_) => Regime::Sublinear,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Linear => "linear",
            Regime::Sublinear => "sublinear",
            Regime::Unclassified => "-",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(Regime::Linear),
            "sublinear" => Some(Regime::Sublinear),
            "-" => Some(Regime::Unclassified),
            _ => None,
        }
    }
}

/// One logged row of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub k: usize,
    pub f_value: f64,
    pub subopt: f64,
    pub grad_norm: f64,
    pub regime: Regime,
    pub fo_calls: u64,
    pub zo_calls: u64,
    pub elapsed_s: f64,
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

impl TrajectoryRecord {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.k,
            format_real(self.f_value),
            format_real(self.subopt),
            format_real(self.grad_norm),
            self.regime.as_str(),
            self.fo_calls,
            self.zo_calls,
            format_real(self.elapsed_s)
        )
    }

    fn parse(line: &str, line_no: usize) -> Result<Self> {
        let bad = |message: String| Error::Parse { line: line_no, message };
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 8 {
            return Err(bad(format!("expected 8 columns, found {}", cols.len())));
        }
        let real = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
        let int = |s: &str| s.parse::<u64>().map_err(|e| bad(format!("{s:?}: {e}")));
        Ok(Self {
            k: int(cols[0])? as usize,
            f_value: real(cols[1])?,
            subopt: real(cols[2])?,
            grad_norm: real(cols[3])?,
            regime: Regime::parse(cols[4]).ok_or_else(|| bad(format!("unknown regime {:?}", cols[4])))?,
            fo_calls: int(cols[5])?,
            zo_calls: int(cols[6])?,
            elapsed_s: real(cols[7])?,
        })
    }
}

/// A trajectory CSV: `# key = value` header lines, the column line, records,
/// and optional trailing `# key = value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryFile {
    pub header: Vec<(String, String)>,
    pub records: Vec<TrajectoryRecord>,
}

impl TrajectoryFile {
    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header = Vec::new();
        let mut records = Vec::new();
        let mut seen_columns = false;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.trim().split_once(" = ") {
                    header.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            if !seen_columns {
                if line != COLUMNS {
                    return Err(Error::Parse { line: line_no, message: format!("expected column header {COLUMNS:?}") });
                }
                seen_columns = true;
                continue;
            }
            records.push(TrajectoryRecord::parse(line, line_no)?);
        }
        if !seen_columns {
            return Err(Error::Parse { line: 0, message: "missing column header".into() });
        }
        Ok(Self { header, records })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

/// Non-comment lines with the elapsed column removed: the part of a
/// trajectory CSV that must be identical across repeats.
pub fn deterministic_body(csv: &str) -> String {
    let mut out = String::new();
    for line in csv.lines().filter(|l| !l.starts_with('#')) {
        let kept = line.rsplit_once(',').map_or(line, |(head, _)| head);
        let _ = writeln!(out, "{kept}");
    }
    out
}
