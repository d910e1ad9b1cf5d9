use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::numerics::{RngState, Vector, SAMPLE_STREAM};
use crate::problems::{Fingerprint, Optimum, Problem, SmoothnessHints};
use crate::scalar::Real;

/// `f(x) = ½‖x‖²`.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    dim: usize,
}

pub fn quadratic_problem(dim: usize) -> Result<QuadraticProblem> {
    if dim == 0 {
        return Err(Error::InvalidArgument("quadratic: dimension must be >= 1".into()));
    }
    Ok(QuadraticProblem { dim })
}

impl<T: Real> Problem<T> for QuadraticProblem {
    fn name(&self) -> String {
        format!("quadratic(d={})", self.dim)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn num_samples(&self) -> usize {
        1
    }

    fn sample_value(&self, x: &Vector<T>, _i: usize) -> T {
        assert_eq!(x.dim(), self.dim);
        T::lit(0.5) * x.norm_squared()
    }

    fn sample_gradient(&self, x: &Vector<T>, _i: usize) -> Vector<T> {
        assert_eq!(x.dim(), self.dim);
        x.clone()
    }

    fn optimum(&self) -> Optimum<T> {
        Optimum::Attained(T::zero())
    }

    fn smoothness_hints(&self) -> Option<SmoothnessHints<T>> {
        Some(SmoothnessHints { l0: T::one(), l1: T::zero(), l: Some(T::one()) })
    }

    fn fingerprint(&self) -> String {
        Fingerprint::new("quadratic").u64(self.dim as u64).finish()
    }
}

/// Stochastic quadratic `f(x, i) = ½‖x‖² + ⟨zᵢ, x⟩` with centered shifts
/// `zᵢ`, so the full objective is `½‖x + z̄‖² − ½‖z̄‖²` with `z̄ ≈ 0`.
#[derive(Debug, Clone)]
pub struct NoisyQuadraticProblem<T> {
    dim: usize,
    shifts: Vec<Vector<T>>,
    mean_shift: Vector<T>,
    scale: f64,
    seed: u64,
}

pub fn noisy_quadratic_problem<T: Real>(
    dim: usize,
    samples: usize,
    scale: f64,
    seed: u64,
) -> Result<NoisyQuadraticProblem<T>> {
    if dim == 0 || samples == 0 {
        return Err(Error::InvalidArgument("noisy quadratic: dim and samples must be >= 1".into()));
    }
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(Error::InvalidArgument("noisy quadratic: scale must be finite and >= 0".into()));
    }
    let mut rng = RngState::new(seed, SAMPLE_STREAM);
    let raw: Vec<Vec<f64>> = (0..samples)
        .map(|_| (0..dim).map(|_| scale * rng.standard_normal()).collect())
        .collect();
    let mut center = vec![0.0; dim];
    for row in &raw {
        for (c, v) in center.iter_mut().zip(row) {
            *c += v;
        }
    }
    center.iter_mut().for_each(|c| *c /= samples as f64);
    let shifts: Vec<Vector<T>> = raw
        .iter()
        .map(|row| Vector::from_vec(row.iter().zip(&center).map(|(v, c)| T::lit(v - c)).collect()))
        .collect();
    let mut acc = Vector::zeros(dim);
    for z in &shifts {
        acc.axpy(T::one(), z);
    }
    acc.scale_in_place(T::one() / T::from_count(samples));
    Ok(NoisyQuadraticProblem { dim, shifts, mean_shift: acc, scale, seed })
}

impl<T: Real> NoisyQuadraticProblem<T> {
    /// Exact minimizer `−z̄` of the full objective.
    pub fn minimizer(&self) -> Vector<T> {
        self.mean_shift.scale(-T::one())
    }
}

impl<T: Real> Problem<T> for NoisyQuadraticProblem<T> {
    fn name(&self) -> String {
        format!("noisy-quadratic(d={}, m={}, scale={})", self.dim, self.shifts.len(), self.scale)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn num_samples(&self) -> usize {
        self.shifts.len()
    }

    fn sample_value(&self, x: &Vector<T>, i: usize) -> T {
        T::lit(0.5) * x.norm_squared() + self.shifts[i].dot(x)
    }

    fn sample_gradient(&self, x: &Vector<T>, i: usize) -> Vector<T> {
        x.add(&self.shifts[i])
    }

    fn optimum(&self) -> Optimum<T> {
        Optimum::Attained(-T::lit(0.5) * self.mean_shift.norm_squared())
    }

    fn smoothness_hints(&self) -> Option<SmoothnessHints<T>> {
        Some(SmoothnessHints { l0: T::one(), l1: T::zero(), l: Some(T::one()) })
    }

    fn fingerprint(&self) -> String {
        Fingerprint::new("noisy-quadratic")
            .u64(self.dim as u64)
            .u64(self.shifts.len() as u64)
            .u64(self.scale.to_bits())
            .u64(self.seed)
            .finish()
    }
}

/// `f(x) = ‖x‖^p`, `p ≥ 2`.
#[derive(Debug, Clone)]
pub struct PowerNormProblem {
    power: f64,
    dim: usize,
}

pub fn power_norm_problem(power: f64, dim: usize) -> Result<PowerNormProblem> {
    if !(power.is_finite() && power >= 2.0) {
        return Err(Error::InvalidArgument(format!("power norm: p = {power} must be >= 2")));
    }
    if dim == 0 {
        return Err(Error::InvalidArgument("power norm: dimension must be >= 1".into()));
    }
    Ok(PowerNormProblem { power, dim })
}

impl PowerNormProblem {
    pub fn power(&self) -> f64 {
        self.power
    }
}

impl<T: Real> Problem<T> for PowerNormProblem {
    fn name(&self) -> String {
        format!("power-norm(p={}, d={})", self.power, self.dim)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn num_samples(&self) -> usize {
        1
    }

    fn sample_value(&self, x: &Vector<T>, _i: usize) -> T {
        assert_eq!(x.dim(), self.dim);
        x.norm().powf(T::lit(self.power))
    }

    fn sample_gradient(&self, x: &Vector<T>, _i: usize) -> Vector<T> {
        assert_eq!(x.dim(), self.dim);
        let r = x.norm();
        if r.is_zero() {
            return Vector::zeros(self.dim);
        }
        let p = T::lit(self.power);
        x.scale(p * r.powf(p - T::lit(2.0)))
    }

    fn optimum(&self) -> Optimum<T> {
        Optimum::Attained(T::zero())
    }

    fn fingerprint(&self) -> String {
        Fingerprint::new("power-norm").u64(self.power.to_bits()).u64(self.dim as u64).finish()
    }
}

/// `f(x) = exp(⟨a, x⟩)`: convex, `L0 = 0`, infimum 0 never attained.
#[derive(Debug, Clone)]
pub struct ExpInnerProblem<T> {
    direction: Vector<T>,
}

pub fn exp_inner_problem<T: Real>(direction: Vector<T>) -> Result<ExpInnerProblem<T>> {
    if direction.is_zero() {
        return Err(Error::InvalidArgument("exp-inner: direction must be nonzero".into()));
    }
    Ok(ExpInnerProblem { direction })
}

impl<T: Real> ExpInnerProblem<T> {
    pub fn direction(&self) -> &Vector<T> {
        &self.direction
    }
}

impl<T: Real> Problem<T> for ExpInnerProblem<T> {
    fn name(&self) -> String {
        format!("exp-inner(d={})", self.direction.dim())
    }

    fn dim(&self) -> usize {
        self.direction.dim()
    }

    fn num_samples(&self) -> usize {
        1
    }

    fn sample_value(&self, x: &Vector<T>, _i: usize) -> T {
        self.direction.dot(x).exp()
    }

    fn sample_gradient(&self, x: &Vector<T>, _i: usize) -> Vector<T> {
        self.direction.scale(self.direction.dot(x).exp())
    }

    fn optimum(&self) -> Optimum<T> {
        Optimum::Unattained(T::zero())
    }

    /// `L0 = 0` and `L1 = ‖a‖ / ln 2`, the smallest `L1` for which the
    /// generalized-smoothness inequality holds on the whole `1/L1` ball.
    fn smoothness_hints(&self) -> Option<SmoothnessHints<T>> {
        Some(SmoothnessHints {
            l0: T::zero(),
            l1: self.direction.norm() / T::lit(LN_2),
            l: None,
        })
    }

    fn fingerprint(&self) -> String {
        Fingerprint::new("exp-inner").reals(self.direction.as_slice()).finish()
    }
}

/// `f(x) = ⟨a, x⟩ + b`: constant gradient, used to probe estimators.
#[derive(Debug, Clone)]
pub struct AffineProblem<T> {
    slope: Vector<T>,
    offset: T,
}

pub fn affine_problem<T: Real>(slope: Vector<T>, offset: T) -> AffineProblem<T> {
    AffineProblem { slope, offset }
}

impl<T: Real> Problem<T> for AffineProblem<T> {
    fn name(&self) -> String {
        format!("affine(d={})", self.slope.dim())
    }

    fn dim(&self) -> usize {
        self.slope.dim()
    }

    fn num_samples(&self) -> usize {
        1
    }

    fn sample_value(&self, x: &Vector<T>, _i: usize) -> T {
        self.slope.dot(x) + self.offset
    }

    fn sample_gradient(&self, _x: &Vector<T>, _i: usize) -> Vector<T> {
        self.slope.clone()
    }

    fn optimum(&self) -> Optimum<T> {
        Optimum::Unbounded
    }

    fn smoothness_hints(&self) -> Option<SmoothnessHints<T>> {
        Some(SmoothnessHints { l0: T::zero(), l1: T::zero(), l: Some(T::zero()) })
    }

    fn fingerprint(&self) -> String {
        Fingerprint::new("affine")
            .reals(self.slope.as_slice())
            .reals(&[self.offset])
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector<f64> {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn quadratic_examples() {
        let p = quadratic_problem(2).unwrap();
        let x = v(&[1.0, 2.0]);
        assert_eq!(Problem::<f64>::value(&p, &x), 2.5);
        assert_eq!(Problem::<f64>::gradient(&p, &x).as_slice(), &[1.0, 2.0]);
        let z = Vector::<f64>::zeros(2);
        assert_eq!(Problem::<f64>::value(&p, &z), 0.0);
        assert!(Problem::<f64>::gradient(&p, &z).is_zero());
    }

    #[test]
    fn quadratic_two_point_identity() {
        let p = quadratic_problem(3).unwrap();
        let x = v(&[0.5, -1.0, 2.0]);
        let e = v(&[0.6, 0.0, 0.8]);
        let gamma = 0.25;
        let lhs = Problem::<f64>::value(&p, &x.add_scaled(gamma, &e))
            - Problem::<f64>::value(&p, &x.add_scaled(-gamma, &e));
        assert!((lhs - 2.0 * gamma * x.dot(&e)).abs() < 1e-15);
    }

    #[test]
    fn power_norm_examples() {
        let p2 = power_norm_problem(2.0, 2).unwrap();
        let x = v(&[3.0, 4.0]);
        assert!((Problem::<f64>::value(&p2, &x) - 25.0).abs() < 1e-12);
        let g = Problem::<f64>::gradient(&p2, &x);
        assert!((g[0] - 6.0).abs() < 1e-12 && (g[1] - 8.0).abs() < 1e-12);

        let p4 = power_norm_problem(4.0, 3).unwrap();
        let z = Vector::<f64>::zeros(3);
        assert_eq!(Problem::<f64>::value(&p4, &z), 0.0);
        assert!(Problem::<f64>::gradient(&p4, &z).is_zero());

        let p3 = power_norm_problem(3.0, 2).unwrap();
        let e1 = v(&[1.0, 0.0]);
        assert!((Problem::<f64>::value(&p3, &e1) - 1.0).abs() < 1e-15);
        let g3 = Problem::<f64>::gradient(&p3, &e1);
        assert!((g3[0] - 3.0).abs() < 1e-15 && g3[1] == 0.0);

        assert!(power_norm_problem(1.5, 2).is_err());
    }

    #[test]
    fn exp_inner_examples() {
        let p = exp_inner_problem(v(&[1.0])).unwrap();
        assert_eq!(p.value(&v(&[0.0])), 1.0);
        assert_eq!(p.gradient(&v(&[0.0])).as_slice(), &[1.0]);
        let mut prev = f64::INFINITY;
        for t in [1.0, 5.0, 20.0, 80.0] {
            let f = p.value(&v(&[-t]));
            assert!(f > 0.0 && f < prev);
            prev = f;
        }
        assert_eq!(p.optimum(), Optimum::Unattained(0.0));
        assert!(exp_inner_problem(v(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn noisy_quadratic_mean_matches_full_gradient() {
        let p = noisy_quadratic_problem::<f64>(3, 16, 0.5, 7).unwrap();
        let x = v(&[0.2, -0.4, 1.0]);
        let g = p.gradient(&x);
        let expected = x.sub(&p.minimizer());
        assert!(g.sub(&expected).norm() < 1e-12);
        let fstar = p.optimum().value().unwrap();
        assert!(p.value(&p.minimizer()) - fstar < 1e-12);
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let p = quadratic_problem(2).unwrap();
        assert!(matches!(
            Problem::<f64>::try_value(&p, &v(&[1.0])),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn f32_instantiation() {
        let p = quadratic_problem(2).unwrap();
        let x = Vector::<f32>::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(Problem::<f32>::value(&p, &x), 12.5);
    }
}
