use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harness::trajectory::{format_real, TrajectoryFile};

/// Values at or below zero are clamped here before `log10`.
pub const PLOT_FLOOR: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMode {
    SuboptVsIter,
    SuboptVsCalls,
    GradnormVsIter,
}

impl FromStr for PlotMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subopt-vs-iter" => Ok(PlotMode::SuboptVsIter),
            "subopt-vs-calls" => Ok(PlotMode::SuboptVsCalls),
            "gradnorm-vs-iter" => Ok(PlotMode::GradnormVsIter),
            other => Err(Error::Config(format!("unknown plot mode {other:?}"))),
        }
    }
}

fn unquote(v: &str) -> &str {
    v.trim_matches('"')
}

/// Long-format `series,x,y` CSV with `y` in `log10`. Clamped rows are listed
/// in `# clamped` comment lines.
pub fn emit_plot_data(files: &[PathBuf], mode: PlotMode) -> Result<String> {
    if files.is_empty() {
        return Err(Error::InvalidArgument("no trajectory files given".into()));
    }
    let parsed = files.iter().map(|f| TrajectoryFile::read(f)).collect::<Result<Vec<_>>>()?;
    let fingerprint = |t: &TrajectoryFile| t.header_value("problem_fingerprint").map(unquote).unwrap_or("").to_string();
    let first = fingerprint(&parsed[0]);
    for (file, t) in files.iter().zip(&parsed).skip(1) {
        let other = fingerprint(t);
        if other != first {
            return Err(Error::FingerprintMismatch { first: first.clone(), other, path: file.clone() });
        }
    }
    let mut labels: Vec<String> = Vec::new();
    for (file, t) in files.iter().zip(&parsed) {
        let mut label = t.header_value("algorithm").map(unquote).unwrap_or("run").to_string();
        if labels.contains(&label) {
            let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            label = format!("{label}:{stem}");
        }
        labels.push(label);
    }
    let mut out = String::from("series,x,y\n");
    let mut clamped = String::new();
    for (label, t) in labels.iter().zip(&parsed) {
        for r in &t.records {
            let (x, raw) = match mode {
                PlotMode::SuboptVsIter => (r.k as f64, r.subopt),
                PlotMode::SuboptVsCalls => ((r.fo_calls + r.zo_calls) as f64, r.subopt),
                PlotMode::GradnormVsIter => (r.k as f64, r.grad_norm),
            };
            if raw <= PLOT_FLOOR {
                let _ = writeln!(clamped, "# clamped series={label} x={x} raw={}", format_real(raw));
            }
            let _ = writeln!(out, "{label},{x},{}", format_real(raw.max(PLOT_FLOOR).log10()));
        }
    }
    out.push_str(&clamped);
    Ok(out)
}
