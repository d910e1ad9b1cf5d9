use crate::error::{Error, Result};
use crate::harness::TrajectoryRecord;

/// Fewer points than this in a phase leave its slope unreported.
pub const MIN_PHASE_POINTS: usize = 5;
const MIN_RECORDS: usize = 10;
/// Suboptimalities at or below zero are clamped here before `log10`.
const SUBOPT_FLOOR: f64 = 1e-16;

/// Ordinary least-squares line `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 for an exact fit, including constant data.
    pub r_squared: f64,
    pub points: usize,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), found: ys.len() });
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("line fit needs 2 points, got {n}")));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("line fit input"));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData("line fit needs two distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(LineFit { slope, intercept, r_squared, points: n })
}

/// Split of a trajectory into its fast and slow phases.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    /// First logged iteration with `‖∇f‖ < threshold`.
    pub switch_iteration: Option<usize>,
    /// Per-iteration change of `log10` suboptimality before the switch.
    pub linear_slope: Option<f64>,
    /// Same, from the switch on.
    pub sublinear_slope: Option<f64>,
    pub linear_fit: Option<LineFit>,
    pub sublinear_fit: Option<LineFit>,
    pub linear_points: usize,
    pub sublinear_points: usize,
    pub threshold: f64,
}

/// Regime split using each record's logged suboptimality.
pub fn detect_regimes(traj: &[TrajectoryRecord], threshold: f64) -> Result<RegimeReport> {
    let subopt: Vec<f64> = traj.iter().map(|r| r.subopt).collect();
    split_and_fit(traj, &subopt, threshold)
}

/// Regime split measuring suboptimality as `f − f_target`, for objectives
/// whose infimum is not attained.
pub fn detect_regimes_against(traj: &[TrajectoryRecord], threshold: f64, f_target: f64) -> Result<RegimeReport> {
    let subopt: Vec<f64> = traj.iter().map(|r| r.f_value - f_target).collect();
    split_and_fit(traj, &subopt, threshold)
}

fn split_and_fit(traj: &[TrajectoryRecord], subopt: &[f64], threshold: f64) -> Result<RegimeReport> {
    if traj.len() < MIN_RECORDS {
        return Err(Error::InsufficientData(format!(
            "regime detection needs {MIN_RECORDS} records, got {}",
            traj.len()
        )));
    }
    if subopt.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("trajectory suboptimality"));
    }
    let switch = traj.iter().position(|r| r.grad_norm < threshold);
    let cut = switch.unwrap_or(traj.len());
    let fit_phase = |range: std::ops::Range<usize>| -> Option<LineFit> {
        if range.len() < MIN_PHASE_POINTS {
            return None;
        }
        let xs: Vec<f64> = traj[range.clone()].iter().map(|r| r.k as f64).collect();
        let ys: Vec<f64> = subopt[range].iter().map(|s| s.max(SUBOPT_FLOOR).log10()).collect();
        fit_line(&xs, &ys).ok()
    };
    let linear_fit = fit_phase(0..cut);
    let sublinear_fit = fit_phase(cut..traj.len());
    Ok(RegimeReport {
        switch_iteration: switch.map(|i| traj[i].k),
        linear_slope: linear_fit.map(|f| f.slope),
        sublinear_slope: sublinear_fit.map(|f| f.slope),
        linear_fit,
        sublinear_fit,
        linear_points: cut,
        sublinear_points: traj.len() - cut,
        threshold,
    })
}
