//! Benchmark objectives with exact per-sample and full-batch derivatives.
//!
//! Every objective is a finite sum `f(x) = (1/M) Σᵢ f(x, i)` with `i` drawn
//! uniformly; deterministic objectives have `M = 1`.

mod analytic;
mod logistic;
mod reference;

pub use analytic::{
    affine_problem, exp_inner_problem, noisy_quadratic_problem, power_norm_problem,
    quadratic_problem, AffineProblem, ExpInnerProblem, NoisyQuadraticProblem, PowerNormProblem,
    QuadraticProblem,
};
pub use logistic::{
    logistic_l_constant, logistic_problem, logistic_smoothness_diagnostics, DatasetMatrix,
    LogisticProblem, LogisticSmoothness,
};
pub use reference::{clear_reference_cache, reference_optimum, reference_optimum_report, ReferenceOptimum};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numerics::Vector;
use crate::scalar::Real;

/// What is known about `inf f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimum<T> {
    /// Attained minimum value.
    Attained(T),
    /// Infimum that no finite point reaches (e.g. `exp(⟨a,x⟩)`).
    Unattained(T),
    /// Must be computed, see [`reference_optimum`].
    Unknown,
    /// `f` is unbounded below.
    Unbounded,
}

impl<T: Copy> Optimum<T> {
    /// The optimal value when one is known, attained or not.
    pub fn value(&self) -> Option<T> {
        match *self {
            Optimum::Attained(v) | Optimum::Unattained(v) => Some(v),
            Optimum::Unknown | Optimum::Unbounded => None,
        }
    }
}

/// Analytic smoothness constants, when the objective has them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessHints<T> {
    pub l0: T,
    pub l1: T,
    /// Classical Lipschitz constant of the gradient, if finite.
    pub l: Option<T>,
}

/// A finite-sum objective.
pub trait Problem<T: Real>: Send + Sync {
    /// Short human-readable name.
    fn name(&self) -> String;

    fn dim(&self) -> usize;

    /// Number of samples `M_data` in the finite sum.
    fn num_samples(&self) -> usize;

    /// `f(x, i)`. Panics if `x` has the wrong dimension.
    fn sample_value(&self, x: &Vector<T>, i: usize) -> T;

    /// `∇f(x, i)`. Panics if `x` has the wrong dimension.
    fn sample_gradient(&self, x: &Vector<T>, i: usize) -> Vector<T>;

    fn value(&self, x: &Vector<T>) -> T {
        let m = self.num_samples();
        let sum = (0..m).fold(T::zero(), |acc, i| acc + self.sample_value(x, i));
        sum / T::from_count(m)
    }

    fn gradient(&self, x: &Vector<T>) -> Vector<T> {
        let m = self.num_samples();
        let mut acc = Vector::zeros(self.dim());
        for i in 0..m {
            acc.axpy(T::one(), &self.sample_gradient(x, i));
        }
        acc.scale_in_place(T::one() / T::from_count(m));
        acc
    }

    fn optimum(&self) -> Optimum<T>;

    fn smoothness_hints(&self) -> Option<SmoothnessHints<T>> {
        None
    }

    /// Stable content hash identifying the objective (hex).
    fn fingerprint(&self) -> String;

    fn check_point(&self, x: &Vector<T>) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.dim() });
        }
        Ok(())
    }

    fn try_value(&self, x: &Vector<T>) -> Result<T> {
        self.check_point(x)?;
        Ok(self.value(x))
    }

    fn try_gradient(&self, x: &Vector<T>) -> Result<Vector<T>> {
        self.check_point(x)?;
        Ok(self.gradient(x))
    }

    fn try_sample_gradient(&self, x: &Vector<T>, i: usize) -> Result<Vector<T>> {
        self.check_point(x)?;
        if i >= self.num_samples() {
            return Err(Error::InvalidArgument(format!(
                "sample index {i} out of range 0..{}",
                self.num_samples()
            )));
        }
        Ok(self.sample_gradient(x, i))
    }
}

/// Incremental SHA-256 over tagged numeric content.
pub(crate) struct Fingerprint(Sha256);

impl Fingerprint {
    pub(crate) fn new(tag: &str) -> Self {
        let mut h = Sha256::new();
        h.update(tag.as_bytes());
        Self(h)
    }

    pub(crate) fn u64(mut self, v: u64) -> Self {
        self.0.update(v.to_le_bytes());
        self
    }

    pub(crate) fn reals<T: Real>(mut self, values: &[T]) -> Self {
        self.0.update((values.len() as u64).to_le_bytes());
        for v in values {
            self.0.update(v.to_f64_lossless().to_bits().to_le_bytes());
        }
        self
    }

    pub(crate) fn finish(self) -> String {
        hex::encode(&self.0.finalize()[..12])
    }
}
