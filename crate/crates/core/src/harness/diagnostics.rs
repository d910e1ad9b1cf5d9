//! Smoothness and oracle diagnostics driven by a run configuration.

use std::fmt::Write as _;

use crate::analysis::{estimate_l0_l1, finite_diff_check, measure_estimator_bias, sample_gradient_second_moment};
use crate::analysis::{EstimatorStats, SmoothnessEstimate};
use crate::error::{Error, Result};
use crate::harness::config::RunConfig;
use crate::harness::runner::{build_problem, run_built, BuiltProblem};
use crate::harness::trajectory::format_real;
use crate::numerics::{RngState, Vector, ANALYSIS_STREAM};
use crate::oracles::{zo_bias_bound, zo_second_moment_bound, NoiseModel, ZoEstimatorConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessOptions {
    /// Number of logged iterates used as anchors.
    pub anchors: usize,
    pub pairs_per_anchor: usize,
    pub radius: f64,
    pub seed: u64,
}

impl Default for SmoothnessOptions {
    fn default() -> Self {
        Self { anchors: 40, pairs_per_anchor: 50, radius: 1.0, seed: 0 }
    }
}

/// Envelope fit over the iterates of a run, with `M_hat` the largest
/// gradient norm seen on the trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessReport {
    pub estimate: SmoothnessEstimate,
    pub grad_ceiling: f64,
    pub anchors: usize,
}

impl SmoothnessReport {
    pub fn to_text(&self) -> String {
        let e = &self.estimate;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("l0_hat", format_real(e.l0_hat));
        kv("l1_hat", format_real(e.l1_hat));
        kv("regime_threshold", e.regime_threshold().map(format_real).unwrap_or_else(|| "inf".into()));
        kv("m_hat", format_real(self.grad_ceiling));
        kv("anchors", self.anchors.to_string());
        kv("pairs_sampled", e.pairs_sampled.to_string());
        kv("pairs_used", e.pairs_used.to_string());
        kv("violation_rate", format_real(e.violation_rate));
        kv("locality_rounds", e.rounds.to_string());
        out
    }
}

/// Picks `n` iterates spread evenly over the logged trajectory.
pub fn spread_anchors(iterates: &[Vector<f64>], n: usize) -> Vec<Vector<f64>> {
    if iterates.len() <= n {
        return iterates.to_vec();
    }
    let last = iterates.len() - 1;
    (0..n).map(|j| iterates[j * last / (n - 1).max(1)].clone()).collect()
}

/// Runs `cfg` and fits `(L0, L1)` on pairs around its logged iterates.
pub fn estimate_smoothness(cfg: &RunConfig, opts: &SmoothnessOptions) -> Result<SmoothnessReport> {
    let built = build_problem(&cfg.problem)?;
    estimate_smoothness_built(cfg, &built, opts)
}

pub fn estimate_smoothness_built(cfg: &RunConfig, built: &BuiltProblem, opts: &SmoothnessOptions) -> Result<SmoothnessReport> {
    if opts.anchors == 0 || opts.pairs_per_anchor == 0 {
        return Err(Error::InvalidArgument("anchors and pairs per anchor must be >= 1".into()));
    }
    let mut quiet = cfg.clone();
    quiet.output = None;
    let out = run_built(&quiet, built)?;
    let anchors = spread_anchors(&out.iterates, opts.anchors);
    let mut rng = RngState::new(opts.seed, ANALYSIS_STREAM);
    let estimate = estimate_l0_l1(built.problem.as_ref(), &anchors, opts.radius, opts.pairs_per_anchor, &mut rng)?;
    Ok(SmoothnessReport { estimate, grad_ceiling: out.grad_norm_max, anchors: anchors.len() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCheckOptions {
    /// Random points for the finite-difference check.
    pub points: usize,
    /// Coordinate scale of those points.
    pub spread: f64,
    /// Finite-difference step per unit of `1 + ‖x‖`.
    pub fd_step: f64,
    pub trials: usize,
    /// Smoothing radius when the config does not set one.
    pub smoothing: f64,
    pub seed: u64,
    pub smoothness: SmoothnessOptions,
}

impl Default for OracleCheckOptions {
    fn default() -> Self {
        Self {
            points: 100,
            spread: 1.0,
            fd_step: 1e-6,
            trials: 2000,
            smoothing: 1e-3,
            seed: 0,
            smoothness: SmoothnessOptions::default(),
        }
    }
}

/// Outcome of [`check_oracle`]. The estimator is measured at the start point.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub fd_max_error: f64,
    pub fd_points: usize,
    pub smoothing: f64,
    pub noise_level: f64,
    pub stats: EstimatorStats,
    pub sigma_tilde_sq: f64,
    pub bias_bound: f64,
    pub second_moment_bound: f64,
    pub smoothness: SmoothnessReport,
}

impl OracleReport {
    pub fn bias_within_bound(&self, slack: f64) -> bool {
        self.stats.bias_norm <= slack * self.bias_bound + 4.0 * self.stats.standard_error
    }

    pub fn second_moment_within_bound(&self, slack: f64) -> bool {
        self.stats.second_moment <= slack * self.second_moment_bound
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("fd_points", self.fd_points.to_string());
        kv("fd_max_rel_error", format_real(self.fd_max_error));
        kv("smoothing", format_real(self.smoothing));
        kv("noise_level", format_real(self.noise_level));
        kv("trials", self.stats.trials.to_string());
        kv("bias_norm", format_real(self.stats.bias_norm));
        kv("bias_se", format_real(self.stats.standard_error));
        kv("bias_bound", format_real(self.bias_bound));
        kv("second_moment", format_real(self.stats.second_moment));
        kv("second_moment_se", format_real(self.stats.second_moment_se));
        kv("second_moment_bound", format_real(self.second_moment_bound));
        kv("sigma_tilde_sq", format_real(self.sigma_tilde_sq));
        out.push_str(&self.smoothness.to_text());
        out
    }
}

/// Finite differences at random points, then the two-point estimator's
/// bias and second moment at the start point against their envelope bounds.
pub fn check_oracle(cfg: &RunConfig, opts: &OracleCheckOptions) -> Result<OracleReport> {
    if opts.points == 0 || !(opts.fd_step > 0.0) || !(opts.spread > 0.0) {
        return Err(Error::InvalidArgument("points, fd_step and spread must be positive".into()));
    }
    let built = build_problem(&cfg.problem)?;
    let p = built.problem.as_ref();
    let d = p.dim();
    let mut rng = RngState::new(opts.seed, ANALYSIS_STREAM);

    let mut fd_max_error: f64 = 0.0;
    for _ in 0..opts.points {
        let x = Vector::from_vec((0..d).map(|_| opts.spread * rng.standard_normal()).collect());
        let i = rng.index(p.num_samples());
        fd_max_error = fd_max_error.max(finite_diff_check(p, &x, i, opts.fd_step * (1.0 + x.norm())));
    }

    let x0 = match &cfg.x0 {
        Some(v) => Vector::from_f64_slice(v)?,
        None => Vector::zeros(d),
    };
    let smoothing = cfg.smoothing.unwrap_or(opts.smoothing);
    let noise = if cfg.algorithm.is_zero_order() { cfg.oracle.noise } else { NoiseModel::Zero };
    let est_cfg = ZoEstimatorConfig::new(smoothing, 1, noise)?;
    let stats = measure_estimator_bias(p, &x0, &est_cfg, opts.trials, &mut rng)?;

    let smoothness = estimate_smoothness_built(cfg, &built, &opts.smoothness)?;
    let e = &smoothness.estimate;
    let m_hat = smoothness.grad_ceiling;
    let sigma_tilde_sq = sample_gradient_second_moment(p, &x0);
    let level = noise.level();
    Ok(OracleReport {
        fd_max_error,
        fd_points: opts.points,
        smoothing,
        noise_level: level,
        stats,
        sigma_tilde_sq,
        bias_bound: zo_bias_bound(e.l0_hat, e.l1_hat, m_hat, d, smoothing, level),
        second_moment_bound: zo_second_moment_bound(sigma_tilde_sq, e.l0_hat, e.l1_hat, m_hat, d, smoothing, level),
        smoothness,
    })
}
