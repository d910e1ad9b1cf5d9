//! Dense vectors, reproducible random streams and uniform sphere sampling.
//!
//! Every reduction in this module runs left to right in index order so that
//! results are bitwise reproducible for a fixed input.

use std::ops::Index;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense real vector: iterates, gradients and estimator outputs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Vector<T> {
    coords: Vec<T>,
}

impl<T: Real> Vector<T> {
    /// Builds a vector, rejecting empty input and non-finite coordinates.
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("vector dimension must be >= 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("vector coordinates"));
        }
        Ok(Self { coords })
    }

    /// Builds a vector without validation. Used on hot paths where the
    /// coordinates come from arithmetic on already-validated vectors.
    pub fn from_vec(coords: Vec<T>) -> Self {
        Self { coords }
    }

    pub fn from_f64_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| T::lit(v)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self { coords: vec![T::zero(); dim] }
    }

    /// Unit vector along coordinate `axis`.
    pub fn basis(dim: usize, axis: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.coords[axis] = T::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.coords
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.coords
    }

    pub fn into_vec(self) -> Vec<T> {
        self.coords
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.coords.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Inner product. Panics on dimension mismatch; see [`dot`] for the
    /// checked form.
    pub fn dot(&self, other: &Self) -> T {
        assert_eq!(self.dim(), other.dim(), "dot: dimension mismatch");
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn norm_squared(&self) -> T {
        self.coords.iter().fold(T::zero(), |acc, &a| acc + a * a)
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn scale(&self, alpha: T) -> Self {
        Self::from_vec(self.coords.iter().map(|&c| alpha * c).collect())
    }

    pub fn scale_in_place(&mut self, alpha: T) {
        self.coords.iter_mut().for_each(|c| *c = *c * alpha);
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: T, other: &Self) {
        assert_eq!(self.dim(), other.dim(), "axpy: dimension mismatch");
        for (a, &b) in self.coords.iter_mut().zip(&other.coords) {
            *a = *a + alpha * b;
        }
    }

    /// `self + alpha * other` as a new vector.
    pub fn add_scaled(&self, alpha: T, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(alpha, other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(-T::one(), other)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(T::one(), other)
    }

    pub fn distance(&self, other: &Self) -> T {
        self.sub(other).norm()
    }

    /// Converts every coordinate to another scalar type.
    pub fn cast<U: Real>(&self) -> Vector<U> {
        Vector::from_vec(self.coords.iter().map(|c| U::lit(c.to_f64_lossless())).collect())
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.to_f64_lossless()).collect()
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.coords[i]
    }
}

/// Checked inner product `Σ aᵢbᵢ`.
pub fn dot<T: Real>(a: &Vector<T>, b: &Vector<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(a.dot(b))
}

/// Euclidean norm.
pub fn norm<T: Real>(a: &Vector<T>) -> T {
    a.norm()
}

/// Running left-to-right mean of equally sized vectors.
pub(crate) struct MeanAccumulator<T> {
    sum: Vector<T>,
    count: usize,
}

impl<T: Real> MeanAccumulator<T> {
    pub(crate) fn new(dim: usize) -> Self {
        Self { sum: Vector::zeros(dim), count: 0 }
    }

    pub(crate) fn push(&mut self, v: &Vector<T>) {
        self.sum.axpy(T::one(), v);
        self.count += 1;
    }

    pub(crate) fn mean(mut self) -> Vector<T> {
        let n = T::from_count(self.count.max(1));
        self.sum.scale_in_place(T::one() / n);
        self.sum
    }
}

/// Stream used for sample-index draws (the ξ family).
pub const SAMPLE_STREAM: u64 = 0;
/// Stream used for sphere-direction draws (the e family).
pub const DIRECTION_STREAM: u64 = 1;
/// Stream reserved for analysis instruments (pair sampling, anchors).
pub const ANALYSIS_STREAM: u64 = 2;

/// Counter-based random stream identified by `(seed, stream)`.
///
/// Backed by ChaCha12: the 64-bit stream id selects an independent
/// keystream and the word position is the counter. Identical
/// `(seed, stream)` pairs yield identical draws on every platform.
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    stream: u64,
    inner: ChaCha12Rng,
}

impl RngState {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Number of 32-bit words consumed so far.
    pub fn counter(&self) -> u64 {
        self.inner.get_word_pos() as u64
    }

    /// Fresh stream with the same seed and a different stream id.
    pub fn split(&self, stream: u64) -> Self {
        Self::new(self.seed, stream)
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index: empty range");
        self.inner.random_range(0..n as u64) as usize
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Draws `e` uniformly from the unit sphere in `dim` dimensions by
/// normalizing a standard Gaussian vector.
pub fn sample_unit_sphere<T: Real>(dim: usize, rng: &mut RngState) -> Vector<T> {
    assert!(dim >= 1, "sample_unit_sphere: dimension must be >= 1");
    loop {
        let raw: Vec<f64> = (0..dim).map(|_| rng.standard_normal()).collect();
        let norm = raw.iter().fold(0.0f64, |acc, v| acc + v * v).sqrt();
        if norm > 0.0 {
            return Vector::from_vec(raw.iter().map(|v| T::lit(v / norm)).collect());
        }
    }
}

/// Draws a point uniformly from the ball of the given radius around the origin.
pub(crate) fn sample_ball<T: Real>(dim: usize, radius: T, rng: &mut RngState) -> Vector<T> {
    let e = sample_unit_sphere::<T>(dim, rng);
    let r = T::lit(rng.uniform().powf(1.0 / dim as f64)) * radius;
    e.scale(r)
}
