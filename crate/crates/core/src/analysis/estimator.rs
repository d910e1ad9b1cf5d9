use rand::RngCore;

use crate::error::{Error, Result};
use crate::numerics::{RngState, Vector, DIRECTION_STREAM, SAMPLE_STREAM};
use crate::oracles::{zo_gradient, CallCounter, ZoEstimatorConfig};
use crate::problems::Problem;
use crate::scalar::Real;

/// Smallest accepted Monte-Carlo sample.
pub const MIN_TRIALS: usize = 1000;

/// Monte-Carlo statistics of the two-point estimator at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorStats {
    /// `‖ḡ − ∇f(x)‖` over the trials.
    pub bias_norm: f64,
    /// Jackknife standard error of `ḡ`, measured in norm:
    /// `sqrt(Σ‖gᵢ − ḡ‖² / (n(n−1)))`.
    pub standard_error: f64,
    /// Sample mean of `‖gᵢ‖²`.
    pub second_moment: f64,
    pub second_moment_se: f64,
    pub trials: usize,
}

/// Draws `trials` independent estimates `zo_gradient(x)` and compares their
/// mean with the exact gradient. The sample and direction streams are seeded
/// from `rng`.
pub fn measure_estimator_bias<T: Real>(
    p: &dyn Problem<T>,
    x: &Vector<T>,
    cfg: &ZoEstimatorConfig<T>,
    trials: usize,
    rng: &mut RngState,
) -> Result<EstimatorStats> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidArgument(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    cfg.validate()?;
    let mut sample_rng = RngState::new(rng.next_u64(), SAMPLE_STREAM);
    let mut direction_rng = RngState::new(rng.next_u64(), DIRECTION_STREAM);
    let mut calls = CallCounter::default();
    let d = p.dim();

    // Accumulate in f64 so the statistics are comparable across scalar types.
    let mut draws: Vec<Vec<f64>> = Vec::with_capacity(trials);
    for _ in 0..trials {
        let g = zo_gradient(p, x, cfg, &mut sample_rng, &mut direction_rng, &mut calls);
        draws.push(g.to_f64_vec());
    }
    let n = trials as f64;
    let mut mean = vec![0.0; d];
    for g in &draws {
        mean.iter_mut().zip(g).for_each(|(m, v)| *m += v);
    }
    mean.iter_mut().for_each(|m| *m /= n);

    let exact = p.gradient(x).to_f64_vec();
    let bias_norm = mean.iter().zip(&exact).map(|(m, e)| (m - e) * (m - e)).sum::<f64>().sqrt();

    let mut spread = 0.0;
    let mut sq_norms = Vec::with_capacity(trials);
    for g in &draws {
        spread += g.iter().zip(&mean).map(|(v, m)| (v - m) * (v - m)).sum::<f64>();
        sq_norms.push(g.iter().map(|v| v * v).sum::<f64>());
    }
    let standard_error = (spread / (n * (n - 1.0))).sqrt();
    let second_moment = sq_norms.iter().sum::<f64>() / n;
    let var = sq_norms.iter().map(|s| (s - second_moment) * (s - second_moment)).sum::<f64>() / (n - 1.0);
    Ok(EstimatorStats {
        bias_norm,
        standard_error,
        second_moment,
        second_moment_se: (var / n).sqrt(),
        trials,
    })
}

/// `E_ξ‖∇f(x, ξ)‖²` computed exactly over all samples of a finite sum.
pub fn sample_gradient_second_moment<T: Real>(p: &dyn Problem<T>, x: &Vector<T>) -> T {
    let m = p.num_samples();
    let total = (0..m).fold(T::zero(), |acc, i| acc + p.sample_gradient(x, i).norm_squared());
    total / T::from_count(m)
}
