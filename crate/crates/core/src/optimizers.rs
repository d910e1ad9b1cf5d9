//! ClipSGD, NSGD, their zero-order counterparts and plain (S)GD baselines.
//!
//! Every step is a function `(OptState, oracle inputs) -> OptState`. The
//! iterate is never projected; divergence is detected by the caller.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::{RngState, Vector, DIRECTION_STREAM, SAMPLE_STREAM};
use crate::oracles::{batch_gradient, zo_gradient, BiasInjector, CallCounter, NoiseModel, Sampling, ZoEstimatorConfig};
use crate::problems::Problem;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Sgd,
    Gd,
    ClipSgd,
    Nsgd,
    ZoClipSgd,
    ZoNsgd,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Sgd,
        Algorithm::Gd,
        Algorithm::ClipSgd,
        Algorithm::Nsgd,
        Algorithm::ZoClipSgd,
        Algorithm::ZoNsgd,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Sgd => "sgd",
            Algorithm::Gd => "gd",
            Algorithm::ClipSgd => "clip-sgd",
            Algorithm::Nsgd => "nsgd",
            Algorithm::ZoClipSgd => "zo-clip-sgd",
            Algorithm::ZoNsgd => "zo-nsgd",
        }
    }

    pub fn is_zero_order(self) -> bool {
        matches!(self, Algorithm::ZoClipSgd | Algorithm::ZoNsgd)
    }

    pub fn is_clipped(self) -> bool {
        matches!(self, Algorithm::ClipSgd | Algorithm::ZoClipSgd)
    }

    pub fn is_normalized(self) -> bool {
        matches!(self, Algorithm::Nsgd | Algorithm::ZoNsgd)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

/// Hyperparameters for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerParams<T> {
    pub step: T,
    pub clip_radius: Option<T>,
    /// Normalization hyperparameter; only feeds the step-size rule.
    pub lambda: Option<T>,
    pub batch: usize,
    pub sampling: Sampling,
    pub iterations: usize,
    pub smoothing: Option<T>,
    /// Anchor `s` for the `R_s = ‖x⁰ − s‖` device on unattained infima.
    pub anchor: Option<Vector<T>>,
}

impl<T: Real> OptimizerParams<T> {
    pub fn new(step: T, batch: usize, iterations: usize) -> Self {
        Self {
            step,
            clip_radius: None,
            lambda: None,
            batch,
            sampling: Sampling::WithReplacement,
            iterations,
            smoothing: None,
            anchor: None,
        }
    }

    pub fn with_clip_radius(mut self, c: T) -> Self {
        self.clip_radius = Some(c);
        self
    }

    pub fn with_smoothing(mut self, gamma: T) -> Self {
        self.smoothing = Some(gamma);
        self
    }

    pub fn with_lambda(mut self, lambda: T) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn full_batch(mut self) -> Self {
        self.sampling = Sampling::FullBatch;
        self
    }

    /// Checks that every parameter the algorithm reads is present and valid.
    pub fn validate(&self, algorithm: Algorithm) -> Result<()> {
        let positive = |name: &str, v: Option<T>| -> Result<()> {
            match v {
                Some(v) if v.is_finite() && v > T::zero() => Ok(()),
                Some(v) => Err(Error::Config(format!("{name} = {v} must be finite and > 0"))),
                None => Err(Error::Config(format!("{algorithm} requires {name}"))),
            }
        };
        positive("step", Some(self.step))?;
        if self.batch == 0 {
            return Err(Error::Config("batch must be >= 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be >= 1".into()));
        }
        if algorithm.is_clipped() {
            positive("clip_radius", self.clip_radius)?;
        }
        if algorithm.is_zero_order() {
            positive("smoothing", self.smoothing)?;
        }
        if let Some(l) = self.lambda {
            positive("lambda", Some(l))?;
        }
        Ok(())
    }
}

/// Iterate, counters and the two random streams of a run.
#[derive(Debug, Clone)]
pub struct OptState<T> {
    pub x: Vector<T>,
    pub k: usize,
    /// Sample-index stream.
    pub sample_rng: RngState,
    /// Sphere-direction stream.
    pub direction_rng: RngState,
    pub calls: CallCounter,
}

impl<T: Real> OptState<T> {
    pub fn new(x0: Vector<T>, seed: u64) -> Self {
        Self {
            x: x0,
            k: 0,
            sample_rng: RngState::new(seed, SAMPLE_STREAM),
            direction_rng: RngState::new(seed, DIRECTION_STREAM),
            calls: CallCounter::default(),
        }
    }
}

/// `min{1, c/‖g‖}·g`; the zero vector is returned unchanged.
pub fn clip<T: Real>(g: &Vector<T>, c: T) -> Vector<T> {
    let n = g.norm();
    if n <= c {
        g.clone()
    } else {
        g.scale(c / n)
    }
}

/// `g/‖g‖`, or [`Error::ZeroGradient`] when `g = 0`.
pub fn normalize<T: Real>(g: &Vector<T>) -> Result<Vector<T>> {
    let n = g.norm();
    if n.is_zero() {
        return Err(Error::ZeroGradient);
    }
    Ok(g.scale(T::one() / n))
}

/// `x ← x − η·clip_c(g)`, `k ← k + 1`.
pub fn apply_clipped<T: Real>(mut state: OptState<T>, g: &Vector<T>, step: T, c: T) -> OptState<T> {
    state.x.axpy(-step, &clip(g, c));
    state.k += 1;
    state
}

/// `x ← x − η·g/‖g‖`, skipping the move (but not the count) when `g = 0`.
pub fn apply_normalized<T: Real>(mut state: OptState<T>, g: &Vector<T>, step: T) -> OptState<T> {
    if let Ok(dir) = normalize(g) {
        state.x.axpy(-step, &dir);
    }
    state.k += 1;
    state
}

fn apply_plain<T: Real>(mut state: OptState<T>, g: &Vector<T>, step: T) -> OptState<T> {
    state.x.axpy(-step, g);
    state.k += 1;
    state
}

fn first_order_gradient<T: Real>(
    state: &mut OptState<T>,
    p: &dyn Problem<T>,
    params: &OptimizerParams<T>,
    sampling: Sampling,
    bias: &BiasInjector<T>,
) -> Vector<T> {
    batch_gradient(p, &state.x, params.batch, sampling, bias, &mut state.sample_rng, &mut state.calls)
}

fn zero_order_gradient<T: Real>(
    state: &mut OptState<T>,
    p: &dyn Problem<T>,
    params: &OptimizerParams<T>,
    noise: &NoiseModel<T>,
) -> Vector<T> {
    let cfg = ZoEstimatorConfig {
        smoothing: params.smoothing.expect("zero-order step requires smoothing"),
        batch: params.batch,
        noise: *noise,
    };
    zo_gradient(p, &state.x, &cfg, &mut state.sample_rng, &mut state.direction_rng, &mut state.calls)
}

/// One step of minibatch SGD.
pub fn sgd_step<T: Real>(
    mut state: OptState<T>,
    p: &dyn Problem<T>,
    params: &OptimizerParams<T>,
    bias: &BiasInjector<T>,
) -> OptState<T> {
    let g = first_order_gradient(&mut state, p, params, params.sampling, bias);
    apply_plain(state, &g, params.step)
}

/// One step of full-batch gradient descent.
pub fn gd_step<T: Real>(
    mut state: OptState<T>,
    p: &dyn Problem<T>,
    params: &OptimizerParams<T>,
    bias: &BiasInjector<T>,
) -> OptState<T> {
    let g = first_order_gradient(&mut state, p, params, Sampling::FullBatch, bias);
    apply_plain(state, &g, params.step)
}

/// ClipSGD: `x ← x − η·clip_c(∇f(x, ξ))`.
pub fn clip_sgd_step<T: Real>(
    mut state: OptState<T>,
    p: &dyn Problem<T>,
    params: &OptimizerParams<T>,
    bias: &BiasInjector<T>,
) -> OptState<T> {
    let c = params.clip_radius.expect("clip-sgd requires clip_radius");
    let g = first_order_gradient(&mut state, p, params, params.sampling, bias);
    apply_clipped(state, &g, params.step, c)
}

/// NSGD: `x ← x − η·∇f(x, ξ)/‖∇f(x, ξ)‖`.
pub fn nsgd_step<T: Real>(
    mut state: OptState<T>,
    p: &dyn Problem<T>,
    params: &OptimizerParams<T>,
    bias: &BiasInjector<T>,
) -> OptState<T> {
    let g = first_order_gradient(&mut state, p, params, params.sampling, bias);
    apply_normalized(state, &g, params.step)
}

/// ZO-ClipSGD: ClipSGD driven by the two-point estimator.
pub fn zo_clip_sgd_step<T: Real>(
    mut state: OptState<T>,
    p: &dyn Problem<T>,
    params: &OptimizerParams<T>,
    noise: &NoiseModel<T>,
) -> OptState<T> {
    let c = params.clip_radius.expect("zo-clip-sgd requires clip_radius");
    let g = zero_order_gradient(&mut state, p, params, noise);
    apply_clipped(state, &g, params.step, c)
}

/// ZO-NSGD: NSGD driven by the two-point estimator.
pub fn zo_nsgd_step<T: Real>(
    mut state: OptState<T>,
    p: &dyn Problem<T>,
    params: &OptimizerParams<T>,
    noise: &NoiseModel<T>,
) -> OptState<T> {
    let g = zero_order_gradient(&mut state, p, params, noise);
    apply_normalized(state, &g, params.step)
}

/// Dispatches one step of `algorithm`.
pub fn step<T: Real>(
    algorithm: Algorithm,
    state: OptState<T>,
    p: &dyn Problem<T>,
    params: &OptimizerParams<T>,
    bias: &BiasInjector<T>,
    noise: &NoiseModel<T>,
) -> OptState<T> {
    match algorithm {
        Algorithm::Sgd => sgd_step(state, p, params, bias),
        Algorithm::Gd => gd_step(state, p, params, bias),
        Algorithm::ClipSgd => clip_sgd_step(state, p, params, bias),
        Algorithm::Nsgd => nsgd_step(state, p, params, bias),
        Algorithm::ZoClipSgd => zo_clip_sgd_step(state, p, params, noise),
        Algorithm::ZoNsgd => zo_nsgd_step(state, p, params, noise),
    }
}

/// Largest constant ClipSGD step admitted by the convergence theorem:
/// `1 / (4(L0 + L1·c))`.
pub fn clip_step_size<T: Real>(l0: T, l1: T, c: T) -> Result<T> {
    if l0.is_zero() && l1.is_zero() {
        return Err(Error::DegenerateSmoothness);
    }
    let denom = l0 + l1 * c;
    if !(denom > T::zero()) {
        return Err(Error::InvalidArgument("L0 + L1·c must be positive".into()));
    }
    Ok(T::one() / (T::lit(4.0) * denom))
}

/// Largest constant NSGD step admitted by the convergence theorem:
/// `λ / (2(L0 + L1·λ))`. With `L0 = 0` this is `1/(2·L1)` for every `λ`.
pub fn nsgd_step_size<T: Real>(l0: T, l1: T, lambda: T) -> Result<T> {
    if l0.is_zero() && l1.is_zero() {
        return Err(Error::DegenerateSmoothness);
    }
    if !(lambda > T::zero()) {
        return Err(Error::InvalidArgument("lambda must be positive".into()));
    }
    if l0.is_zero() {
        return Ok(T::one() / (T::lit(2.0) * l1));
    }
    Ok(lambda / (T::lit(2.0) * (l0 + l1 * lambda)))
}

/// Which zero-order method the hyperparameters are for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZoVariant<T> {
    Clip { clip_radius: T },
    Norm,
}

/// Problem constants feeding the zero-order hyperparameter rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoProblemConstants<T> {
    /// Target accuracy ε.
    pub epsilon: T,
    /// Distance `R` from the start to a solution (or `R_s`).
    pub radius: T,
    pub l0: T,
    pub l1: T,
    /// Gradient-norm ceiling `M`.
    pub grad_ceiling: T,
    /// `σ̃` with `E‖∇f(x, ξ)‖² ≤ σ̃²`.
    pub sigma_tilde: T,
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoHyperparams<T> {
    pub smoothing: T,
    pub max_noise: T,
    pub batch: u64,
}

/// Smoothing parameter, admissible noise level and batch size that the
/// zero-order convergence theorems prescribe for accuracy ε.
pub fn zo_hyperparams<T: Real>(k: &ZoProblemConstants<T>, variant: ZoVariant<T>) -> Result<ZoHyperparams<T>> {
    let all_positive = [k.epsilon, k.radius, k.grad_ceiling, k.sigma_tilde]
        .iter()
        .all(|v| v.is_finite() && *v > T::zero());
    if !all_positive || k.dim == 0 || k.l0 < T::zero() || k.l1 < T::zero() {
        return Err(Error::InvalidArgument("zo_hyperparams: inputs must be positive".into()));
    }
    let lm = k.l0 + k.l1 * k.grad_ceiling;
    if !(lm > T::zero()) {
        return Err(Error::DegenerateSmoothness);
    }
    let sqrt_d = T::from_count(k.dim).sqrt();
    let d = T::from_count(k.dim);
    let sigma_sq = k.sigma_tilde * k.sigma_tilde;
    let out = match variant {
        ZoVariant::Clip { clip_radius } => {
            if !(clip_radius > T::zero()) {
                return Err(Error::InvalidArgument("clip radius must be positive".into()));
            }
            let smoothing = k.epsilon / (k.radius * lm);
            let max_noise =
                k.epsilon / (sqrt_d * k.radius * lm) * k.sigma_tilde.min(k.epsilon / (sqrt_d * k.radius));
            let batch = d * k.grad_ceiling * k.radius * sigma_sq / (k.epsilon * clip_radius * clip_radius);
            ZoHyperparams { smoothing, max_noise, batch: ceil_count(batch) }
        }
        ZoVariant::Norm => {
            let eps32 = k.epsilon.powf(T::lit(1.5));
            let r32 = k.radius.powf(T::lit(1.5));
            let smoothing = eps32 / (lm * k.grad_ceiling.sqrt() * r32);
            let max_noise = eps32 / (sqrt_d * r32 * lm) * k.sigma_tilde.min(eps32 / (sqrt_d * r32));
            let batch = d * k.grad_ceiling * k.radius.powi(3) * sigma_sq / k.epsilon.powi(3);
            ZoHyperparams { smoothing, max_noise, batch: ceil_count(batch) }
        }
    };
    Ok(out)
}

fn ceil_count<T: Real>(v: T) -> u64 {
    // Saturating float-to-int conversion.
    (v.to_f64_lossless().ceil() as u64).max(1)
}

/// Anchored gap `f(x) − f(s)` used when the infimum is not attained.
pub fn rs_anchored_suboptimality<T: Real>(p: &dyn Problem<T>, x: &Vector<T>, anchor: &Vector<T>) -> T {
    p.value(x) - p.value(anchor)
}
