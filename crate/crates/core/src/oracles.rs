//! Stochastic gradient and zero-order oracles.
//!
//! The first-order oracle returns a minibatch gradient plus an optional
//! bounded bias `b(x)`, `‖b(x)‖ ≤ ζ`. The zero-order oracle returns function
//! values corrupted by a bounded deterministic noise `δ(x)`, `|δ(x)| ≤ Δ`,
//! and the two-point estimator built on it:
//!
//! ```text
//! g(x, e, ξ) = d / (2γ) · (f̃(x + γe, ξ) − f̃(x − γe, ξ)) · e,   e ~ U(S^d)
//! ```

use crate::error::{Error, Result};
use crate::numerics::{sample_unit_sphere, MeanAccumulator, RngState, Vector};
use crate::problems::Problem;
use crate::scalar::Real;

/// Systematic error added to every first-order oracle answer.
#[derive(Debug, Clone, PartialEq)]
pub enum BiasInjector<T> {
    None,
    /// Fixed vector `v`; `ζ = ‖v‖`.
    Constant(Vector<T>),
    /// `b(x) = −ζ ∇f(x)/‖∇f(x)‖` (zero where `∇f(x) = 0`).
    AntiGradient(T),
}

impl<T: Real> BiasInjector<T> {
    pub fn anti_gradient(zeta: T) -> Result<Self> {
        if !(zeta.is_finite() && zeta >= T::zero()) {
            return Err(Error::InvalidArgument("bias magnitude must be finite and >= 0".into()));
        }
        Ok(if zeta.is_zero() { BiasInjector::None } else { BiasInjector::AntiGradient(zeta) })
    }

    /// The bound `ζ`.
    pub fn magnitude(&self) -> T {
        match self {
            BiasInjector::None => T::zero(),
            BiasInjector::Constant(v) => v.norm(),
            BiasInjector::AntiGradient(z) => *z,
        }
    }

    /// `b(x)`. Returns `None` for the unbiased oracle.
    pub fn bias_at(&self, p: &dyn Problem<T>, x: &Vector<T>) -> Option<Vector<T>> {
        match self {
            BiasInjector::None => None,
            BiasInjector::Constant(v) => Some(v.clone()),
            BiasInjector::AntiGradient(zeta) => {
                let g = p.gradient(x);
                let n = g.norm();
                if n.is_zero() {
                    Some(Vector::zeros(x.dim()))
                } else {
                    Some(g.scale(-*zeta / n))
                }
            }
        }
    }
}

/// Which end of a two-point query a function value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSide {
    /// `x + γe`, or a lone query.
    Plus,
    /// `x − γe`.
    Minus,
}

/// Bounded adversarial corruption `δ(x)` of zero-order function values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel<T> {
    Zero,
    /// Hash of the bit pattern of `x` mapped to `[−Δ, Δ]`.
    HashUniform(T),
    /// `+Δ` at the plus end of each pair, `−Δ` at the minus end.
    SignAdversarial(T),
}

impl<T: Real> NoiseModel<T> {
    pub fn level(&self) -> T {
        match *self {
            NoiseModel::Zero => T::zero(),
            NoiseModel::HashUniform(d) | NoiseModel::SignAdversarial(d) => d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.level();
        if d.is_finite() && d >= T::zero() {
            Ok(())
        } else {
            Err(Error::InvalidArgument("noise level must be finite and >= 0".into()))
        }
    }

    /// `δ(x)` for a query at `x` on the given side of its pair.
    pub fn delta(&self, x: &Vector<T>, side: PairSide) -> T {
        match *self {
            NoiseModel::Zero => T::zero(),
            NoiseModel::HashUniform(level) => level * T::lit(hash_to_unit_interval(x)),
            NoiseModel::SignAdversarial(level) => match side {
                PairSide::Plus => level,
                PairSide::Minus => -level,
            },
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic map from the coordinates' bit patterns to `[−1, 1]`.
fn hash_to_unit_interval<T: Real>(x: &Vector<T>) -> f64 {
    let h = x
        .iter()
        .fold(0x243F_6A88_85A3_08D3u64, |acc, c| splitmix64(acc ^ c.to_f64_lossless().to_bits()));
    // 53 high bits -> [0, 1], then affine to [-1, 1].
    let u = (h >> 11) as f64 / ((1u64 << 53) - 1) as f64;
    2.0 * u - 1.0
}

/// Settings of the two-point estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoEstimatorConfig<T> {
    pub smoothing: T,
    pub batch: usize,
    pub noise: NoiseModel<T>,
}

impl<T: Real> ZoEstimatorConfig<T> {
    pub fn new(smoothing: T, batch: usize, noise: NoiseModel<T>) -> Result<Self> {
        let cfg = Self { smoothing, batch, noise };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.smoothing.is_finite() && self.smoothing > T::zero()) {
            return Err(Error::InvalidArgument("smoothing parameter must be finite and > 0".into()));
        }
        if self.batch == 0 {
            return Err(Error::InvalidArgument("batch size must be >= 1".into()));
        }
        self.noise.validate()
    }
}

/// Oracle-call tallies for one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CallCounter {
    pub first_order: u64,
    pub zero_order: u64,
}

impl CallCounter {
    pub fn merge(&mut self, other: CallCounter) {
        self.first_order += other.first_order;
        self.zero_order += other.zero_order;
    }
}

/// How minibatch indices are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    /// `B` i.i.d. uniform indices.
    #[default]
    WithReplacement,
    /// Every sample exactly once; `B` is ignored and `M_data` calls are counted.
    FullBatch,
}

/// Minibatch gradient `(1/B) Σ ∇f(x, ξⱼ) + b(x)`.
pub fn batch_gradient<T: Real>(
    p: &dyn Problem<T>,
    x: &Vector<T>,
    batch: usize,
    sampling: Sampling,
    bias: &BiasInjector<T>,
    rng: &mut RngState,
    calls: &mut CallCounter,
) -> Vector<T> {
    assert!(batch >= 1, "batch_gradient: batch must be >= 1");
    let mut g = match sampling {
        Sampling::FullBatch => {
            calls.first_order += p.num_samples() as u64;
            p.gradient(x)
        }
        Sampling::WithReplacement => {
            let m = p.num_samples();
            let mut acc = MeanAccumulator::new(p.dim());
            for _ in 0..batch {
                acc.push(&p.sample_gradient(x, rng_index(rng, m)));
            }
            calls.first_order += batch as u64;
            acc.mean()
        }
    };
    if let Some(b) = bias.bias_at(p, x) {
        g.axpy(T::one(), &b);
    }
    g
}

/// `f̃(x, i) = f(x, i) + δ(x)` for a lone query.
pub fn noisy_value<T: Real>(p: &dyn Problem<T>, x: &Vector<T>, i: usize, noise: &NoiseModel<T>) -> T {
    noisy_value_on(p, x, i, noise, PairSide::Plus)
}

pub fn noisy_value_on<T: Real>(
    p: &dyn Problem<T>,
    x: &Vector<T>,
    i: usize,
    noise: &NoiseModel<T>,
    side: PairSide,
) -> T {
    p.sample_value(x, i) + noise.delta(x, side)
}

/// Single-direction two-point estimate for a given direction and sample.
pub fn two_point_estimate<T: Real>(
    p: &dyn Problem<T>,
    x: &Vector<T>,
    direction: &Vector<T>,
    sample: usize,
    smoothing: T,
    noise: &NoiseModel<T>,
) -> Vector<T> {
    let plus = x.add_scaled(smoothing, direction);
    let minus = x.add_scaled(-smoothing, direction);
    let f_plus = noisy_value_on(p, &plus, sample, noise, PairSide::Plus);
    let f_minus = noisy_value_on(p, &minus, sample, noise, PairSide::Minus);
    let d = T::from_count(x.dim());
    direction.scale(d / (T::lit(2.0) * smoothing) * (f_plus - f_minus))
}

/// Two-point gradient estimate averaged over `B` independent
/// (direction, sample) pairs; adds `2B` zero-order calls.
pub fn zo_gradient<T: Real>(
    p: &dyn Problem<T>,
    x: &Vector<T>,
    cfg: &ZoEstimatorConfig<T>,
    sample_rng: &mut RngState,
    direction_rng: &mut RngState,
    calls: &mut CallCounter,
) -> Vector<T> {
    let m = p.num_samples();
    let mut acc = MeanAccumulator::new(p.dim());
    for _ in 0..cfg.batch {
        let e = sample_unit_sphere::<T>(p.dim(), direction_rng);
        let i = rng_index(sample_rng, m);
        acc.push(&two_point_estimate(p, x, &e, i, cfg.smoothing, &cfg.noise));
    }
    calls.zero_order += 2 * cfg.batch as u64;
    acc.mean()
}

/// Deterministic objectives do not consume sample draws, which keeps the
/// direction stream aligned across problems of different `M_data`.
fn rng_index(rng: &mut RngState, m: usize) -> usize {
    if m == 1 {
        0
    } else {
        rng.index(m)
    }
}

/// Upper bound on `‖E g − ∇f(x)‖`: `(L0 + L1·M)γ + dΔ/γ`.
pub fn zo_bias_bound<T: Real>(l0: T, l1: T, grad_ceiling: T, dim: usize, smoothing: T, noise: T) -> T {
    (l0 + l1 * grad_ceiling) * smoothing + T::from_count(dim) * noise / smoothing
}

/// Upper bound on `E‖g‖²`:
/// `4dσ̃² + 4d(L0 + L1·M)²γ² + d²Δ²/γ²`.
pub fn zo_second_moment_bound<T: Real>(
    sigma_tilde_sq: T,
    l0: T,
    l1: T,
    grad_ceiling: T,
    dim: usize,
    smoothing: T,
    noise: T,
) -> T {
    let d = T::from_count(dim);
    let four = T::lit(4.0);
    let lm = l0 + l1 * grad_ceiling;
    four * d * sigma_tilde_sq
        + four * d * lm * lm * smoothing * smoothing
        + d * d * noise * noise / (smoothing * smoothing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{DIRECTION_STREAM, SAMPLE_STREAM};
    use crate::problems::{affine_problem, quadratic_problem};

    fn v(c: &[f64]) -> Vector<f64> {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn constant_bias_on_deterministic_problem() {
        let p = quadratic_problem(2).unwrap();
        let x = v(&[1.0, -2.0]);
        let bias = BiasInjector::Constant(v(&[0.25, 0.5]));
        let mut rng = RngState::new(0, SAMPLE_STREAM);
        let mut calls = CallCounter::default();
        let g = batch_gradient(&p, &x, 3, Sampling::WithReplacement, &bias, &mut rng, &mut calls);
        assert_eq!(g.as_slice(), &[1.25, -1.5]);
        assert_eq!(calls.first_order, 3);
    }

    #[test]
    fn anti_gradient_bias_has_norm_zeta() {
        let p = quadratic_problem(3).unwrap();
        let bias = BiasInjector::anti_gradient(0.1).unwrap();
        let b = bias.bias_at(&p, &v(&[3.0, 0.0, 4.0])).unwrap();
        assert!((b.norm() - 0.1).abs() < 1e-15);
        assert!(b[0] < 0.0 && b[2] < 0.0);
        assert!(bias.bias_at(&p, &Vector::zeros(3)).unwrap().is_zero());
        assert_eq!(BiasInjector::<f64>::anti_gradient(0.0).unwrap(), BiasInjector::None);
    }

    #[test]
    fn noise_modes() {
        let p = quadratic_problem(2).unwrap();
        let x = v(&[0.3, 0.7]);
        let exact = Problem::<f64>::sample_value(&p, &x, 0);
        assert_eq!(noisy_value(&p, &x, 0, &NoiseModel::Zero), exact);

        let hu = NoiseModel::HashUniform(1e-3);
        let a = noisy_value(&p, &x, 0, &hu);
        assert!((a - exact).abs() <= 1e-3);
        assert_eq!(a, noisy_value(&p, &x, 0, &hu));

        let sa = NoiseModel::SignAdversarial(0.5);
        let e = v(&[1.0, 0.0]);
        let plus = x.add_scaled(0.1, &e);
        let minus = x.add_scaled(-0.1, &e);
        let dp = noisy_value_on(&p, &plus, 0, &sa, PairSide::Plus) - Problem::<f64>::value(&p, &plus);
        let dm = noisy_value_on(&p, &minus, 0, &sa, PairSide::Minus) - Problem::<f64>::value(&p, &minus);
        assert!((dp - 0.5).abs() < 1e-12 && (dm + 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_point_on_quadratic() {
        let p = quadratic_problem(2).unwrap();
        let x = v(&[1.0, 0.0]);
        let g = two_point_estimate(&p, &x, &v(&[0.0, 1.0]), 0, 0.1, &NoiseModel::Zero);
        assert!(g.norm() < 1e-15);
        let g = two_point_estimate(&p, &x, &v(&[1.0, 0.0]), 0, 0.1, &NoiseModel::Zero);
        assert!((g[0] - 2.0).abs() < 1e-12 && g[1] == 0.0);
    }

    #[test]
    fn two_point_on_affine_is_exact() {
        let a = v(&[1.0, -2.0, 0.5]);
        let p = affine_problem(a.clone(), 3.0);
        let e = v(&[0.6, 0.0, 0.8]);
        for gamma in [1e-3, 0.5, 4.0] {
            let g = two_point_estimate(&p, &Vector::zeros(3), &e, 0, gamma, &NoiseModel::Zero);
            let expected = e.scale(3.0 * a.dot(&e));
            assert!(g.sub(&expected).norm() < 1e-9, "gamma = {gamma}");
        }
    }

    #[test]
    fn zo_gradient_counts_two_calls_per_direction() {
        let p = quadratic_problem(4).unwrap();
        let cfg = ZoEstimatorConfig::new(1e-3, 5, NoiseModel::Zero).unwrap();
        let mut s = RngState::new(1, SAMPLE_STREAM);
        let mut d = RngState::new(1, DIRECTION_STREAM);
        let mut calls = CallCounter::default();
        for _ in 0..3 {
            zo_gradient(&p, &v(&[1.0, 2.0, 3.0, 4.0]), &cfg, &mut s, &mut d, &mut calls);
        }
        assert_eq!(calls.zero_order, 30);
        assert_eq!(calls.first_order, 0);
    }

    #[test]
    fn estimator_config_validation() {
        assert!(ZoEstimatorConfig::new(0.0, 1, NoiseModel::<f64>::Zero).is_err());
        assert!(ZoEstimatorConfig::new(1e-3, 0, NoiseModel::<f64>::Zero).is_err());
        assert!(ZoEstimatorConfig::new(1e-3, 1, NoiseModel::HashUniform(-1.0)).is_err());
    }

    #[test]
    fn bound_formulas() {
        assert_eq!(zo_bias_bound(0.0, 0.0, 123.0, 7, 0.5, 0.0), 0.0);
        assert!((zo_bias_bound::<f64>(1.0, 0.0, 0.0, 2, 0.1, 0.01) - 0.3).abs() < 1e-15);
        assert_eq!(zo_second_moment_bound(0.0, 0.0, 0.0, 0.0, 5, 0.1, 0.0), 0.0);
        assert!((zo_second_moment_bound::<f64>(1.0, 0.0, 0.0, 0.0, 3, 0.1, 0.0) - 12.0).abs() < 1e-12);
    }
}
