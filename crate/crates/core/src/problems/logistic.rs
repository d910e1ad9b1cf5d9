use crate::error::{Error, Result};
use crate::numerics::Vector;
use crate::problems::{Fingerprint, Optimum, Problem};
use crate::scalar::Real;

/// Margins beyond this magnitude switch to the asymptotic softplus branch.
const MARGIN_CUTOFF: f64 = 30.0;

/// Dense row-major instance matrix with ±1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
    labels: Vec<T>,
}

impl<T: Real> DatasetMatrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>, labels: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("dataset must have at least one row and column".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: entries.len() });
        }
        if labels.len() != rows {
            return Err(Error::DimensionMismatch { expected: rows, found: labels.len() });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dataset entries"));
        }
        if let Some(bad) = labels.iter().find(|&&y| y != T::one() && y != -T::one()) {
            return Err(Error::InvalidArgument(format!("label {bad} is not +1 or -1")));
        }
        Ok(Self { rows, cols, entries, labels })
    }

    /// Builds from nested rows; convenient in tests.
    pub fn from_rows(rows: &[Vec<f64>], labels: &[f64]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("ragged rows".into()));
        }
        let entries = rows.iter().flatten().map(|&v| T::lit(v)).collect();
        Self::new(rows.len(), cols, entries, labels.iter().map(|&y| T::lit(y)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn label(&self, i: usize) -> T {
        self.labels[i]
    }

    pub fn labels(&self) -> &[T] {
        &self.labels
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn cast<U: Real>(&self) -> DatasetMatrix<U> {
        DatasetMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| U::lit(v.to_f64_lossless())).collect(),
            labels: self.labels.iter().map(|v| U::lit(v.to_f64_lossless())).collect(),
        }
    }

    /// Induced 1-norm: the maximum absolute column sum.
    pub fn one_norm(&self) -> T {
        let mut sums = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            for (s, v) in sums.iter_mut().zip(self.row(i)) {
                *s = *s + v.abs();
            }
        }
        sums.into_iter().fold(T::zero(), T::max)
    }

    fn row_dot(&self, i: usize, x: &[T]) -> T {
        self.row(i).iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    /// `Aᵀ(A v)`.
    fn gram_apply(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            let s = self.row_dot(i, v);
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + s * a;
            }
        }
        out
    }

    pub(crate) fn fingerprint(&self) -> String {
        Fingerprint::new("logistic")
            .u64(self.rows as u64)
            .u64(self.cols as u64)
            .reals(&self.entries)
            .reals(&self.labels)
            .finish()
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus<T: Real>(z: T) -> T {
    if z.abs() > T::lit(MARGIN_CUTOFF) {
        z.max(T::zero()) + (-z.abs()).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Logistic function `1 / (1 + exp(−z))`.
fn sigmoid<T: Real>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// Averaged logistic loss `f_i(x) = log(1 + exp(−yᵢ (Ax)ᵢ))`.
#[derive(Debug, Clone)]
pub struct LogisticProblem<T> {
    data: DatasetMatrix<T>,
    fingerprint: String,
}

pub fn logistic_problem<T: Real>(data: DatasetMatrix<T>) -> LogisticProblem<T> {
    let fingerprint = data.fingerprint();
    LogisticProblem { data, fingerprint }
}

impl<T: Real> LogisticProblem<T> {
    pub fn data(&self) -> &DatasetMatrix<T> {
        &self.data
    }

    fn margin(&self, x: &Vector<T>, i: usize) -> T {
        assert_eq!(x.dim(), self.data.cols, "logistic: dimension mismatch");
        self.data.label(i) * self.data.row_dot(i, x.as_slice())
    }

    /// Coefficient `−yᵢ σ(−mᵢ)` multiplying row `i` in the gradient.
    fn gradient_weight(&self, x: &Vector<T>, i: usize) -> T {
        -self.data.label(i) * sigmoid(-self.margin(x, i))
    }
}

impl<T: Real> Problem<T> for LogisticProblem<T> {
    fn name(&self) -> String {
        format!("logistic({}x{})", self.data.rows, self.data.cols)
    }

    fn dim(&self) -> usize {
        self.data.cols
    }

    fn num_samples(&self) -> usize {
        self.data.rows
    }

    fn sample_value(&self, x: &Vector<T>, i: usize) -> T {
        softplus(-self.margin(x, i))
    }

    fn sample_gradient(&self, x: &Vector<T>, i: usize) -> Vector<T> {
        let w = self.gradient_weight(x, i);
        Vector::from_vec(self.data.row(i).iter().map(|&a| w * a).collect())
    }

    fn gradient(&self, x: &Vector<T>) -> Vector<T> {
        let mut acc = vec![T::zero(); self.data.cols];
        for i in 0..self.data.rows {
            let w = self.gradient_weight(x, i);
            for (o, &a) in acc.iter_mut().zip(self.data.row(i)) {
                *o = *o + w * a;
            }
        }
        let inv = T::one() / T::from_count(self.data.rows);
        Vector::from_vec(acc.into_iter().map(|v| v * inv).collect())
    }

    fn optimum(&self) -> Optimum<T> {
        Optimum::Unknown
    }

    fn fingerprint(&self) -> String {
        self.fingerprint.clone()
    }
}

/// Both candidate smoothness constants of the averaged logistic loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticSmoothness<T> {
    /// Largest eigenvalue of `AᵀA`.
    pub lambda_max: T,
    /// `sqrt(λ_max) / (4M)`, the constant the step-size rule is built on.
    pub reported: T,
    /// `λ_max / (4M)`, the classical Hessian bound.
    pub hessian_bound: T,
    pub iterations: usize,
}

const POWER_ITERATION_CAP: usize = 100_000;

/// Largest eigenvalue of `AᵀA` by power iteration with a Rayleigh-quotient
/// stopping rule.
fn gram_lambda_max<T: Real>(data: &DatasetMatrix<T>) -> Result<(T, usize)> {
    let tol = T::lit(1e-10).max(T::epsilon() * T::lit(64.0));
    let n = data.cols;
    // Deterministic start with distinct coordinates so it is not orthogonal
    // to the leading eigenvector in symmetric cases.
    let mut v: Vec<T> = (0..n).map(|j| T::one() + T::lit(j as f64 / (n as f64 * 7.0))).collect();
    let mut lambda = T::zero();
    for it in 1..=POWER_ITERATION_CAP {
        let vn = v.iter().fold(T::zero(), |a, &b| a + b * b).sqrt();
        if vn.is_zero() {
            return Ok((T::zero(), it));
        }
        v.iter_mut().for_each(|c| *c = *c / vn);
        let w = data.gram_apply(&v);
        let next = v.iter().zip(&w).fold(T::zero(), |a, (&p, &q)| a + p * q);
        if it > 1 && (next - lambda).abs() <= tol * next.abs().max(T::min_positive_value()) {
            return Ok((next, it));
        }
        lambda = next;
        v = w;
    }
    Err(Error::ConvergenceFailure { what: "power iteration", iterations: POWER_ITERATION_CAP })
}

pub fn logistic_smoothness_diagnostics<T: Real>(
    data: &DatasetMatrix<T>,
) -> Result<LogisticSmoothness<T>> {
    let (lambda_max, iterations) = gram_lambda_max(data)?;
    let four_m = T::lit(4.0) * T::from_count(data.rows);
    Ok(LogisticSmoothness {
        lambda_max,
        reported: lambda_max.sqrt() / four_m,
        hessian_bound: lambda_max / four_m,
        iterations,
    })
}

/// `L = sqrt(λ_max(AᵀA)) / (4M)`.
pub fn logistic_l_constant<T: Real>(data: &DatasetMatrix<T>) -> Result<T> {
    Ok(logistic_smoothness_diagnostics(data)?.reported)
}
