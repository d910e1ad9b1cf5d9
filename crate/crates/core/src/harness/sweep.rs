use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::analysis::detect_regimes;
use crate::error::{Error, Result};
use crate::harness::config::{RunConfig, MAX_SEED};
use crate::harness::runner::run;
use crate::harness::trajectory::format_real;

/// Seed of sweep cell `index`: a splitmix64 mix of the base seed.
pub fn derive_seed(base: u64, index: usize) -> u64 {
    let mut z = base ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    (z ^ (z >> 31)) & MAX_SEED
}

/// Result of one sweep cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub final_subopt: f64,
    pub switch_iteration: Option<usize>,
    pub linear_slope: Option<f64>,
    pub sublinear_slope: Option<f64>,
    pub fo_calls: u64,
    pub zo_calls: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub value: String,
    pub seed: u64,
    pub output: Option<String>,
    /// The run's summary, or its error message.
    pub result: std::result::Result<SweepRow, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub axis: String,
    pub cells: Vec<SweepCell>,
}

impl SweepSummary {
    pub fn to_csv(&self) -> String {
        let opt_real = |v: Option<f64>| v.map(format_real).unwrap_or_default();
        let mut out = format!("# axis = {}\n", self.axis);
        out.push_str("value,seed,final_subopt,switch_iteration,linear_slope,sublinear_slope,fo_calls,zo_calls,status\n");
        for c in &self.cells {
            let value = c.value.replace(',', ";");
            match &c.result {
                Ok(r) => {
                    let _ = writeln!(
                        out,
                        "{value},{},{},{},{},{},{},{},ok",
                        c.seed,
                        format_real(r.final_subopt),
                        r.switch_iteration.map(|k| k.to_string()).unwrap_or_default(),
                        opt_real(r.linear_slope),
                        opt_real(r.sublinear_slope),
                        r.fo_calls,
                        r.zo_calls
                    );
                }
                Err(e) => {
                    let _ = writeln!(out, "{value},{},,,,,,,\"error: {}\"", c.seed, e.replace('"', "'"));
                }
            }
        }
        out
    }
}

/// Parses a sweep value as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn cell_output(base: &str, axis: &str, index: usize) -> String {
    let p = Path::new(base);
    let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    let ext = p.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    p.with_file_name(format!("{stem}.{axis}-{index}.{ext}")).to_string_lossy().into_owned()
}

fn cell_config(base: &RunConfig, axis: &str, value: &str, index: usize) -> Result<RunConfig> {
    let mut table = base.to_table();
    table.insert(axis.to_string(), parse_value(value));
    if axis != "seed" {
        table.insert("seed".into(), toml::Value::Integer(derive_seed(base.seed, index) as i64));
    }
    if let Some(out) = &base.output {
        table.insert("output".into(), toml::Value::String(cell_output(out, axis, index)));
    }
    RunConfig::from_table(table)
}

/// Runs one trajectory per value of `axis` on the rayon pool. Cell failures
/// are recorded and do not stop the sweep; rows keep the order of `values`.
pub fn sweep(base: &RunConfig, axis: &str, values: &[String]) -> Result<SweepSummary> {
    if !RunConfig::keys().contains(&axis) {
        return Err(Error::Config(format!("unknown sweep axis {axis:?}")));
    }
    base.validate()?;
    let cells = values
        .par_iter()
        .enumerate()
        .map(|(i, value)| {
            let cfg = cell_config(base, axis, value, i);
            let seed = cfg.as_ref().map_or(base.seed, |c| c.seed);
            let output = cfg.as_ref().ok().and_then(|c| c.output.clone());
            let result = cfg.and_then(|c| {
                let out = run(&c)?;
                let last = out.records.last().expect("runs log at least one record");
                let regimes = out.threshold.and_then(|t| detect_regimes(&out.records, t).ok());
                Ok(SweepRow {
                    final_subopt: last.subopt,
                    switch_iteration: regimes.as_ref().and_then(|r| r.switch_iteration),
                    linear_slope: regimes.as_ref().and_then(|r| r.linear_slope),
                    sublinear_slope: regimes.as_ref().and_then(|r| r.sublinear_slope),
                    fo_calls: last.fo_calls,
                    zo_calls: last.zo_calls,
                })
            });
            SweepCell { value: value.clone(), seed, output, result: result.map_err(|e: Error| e.to_string()) }
        })
        .collect();
    Ok(SweepSummary { axis: axis.to_string(), cells })
}
