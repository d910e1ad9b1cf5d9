use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::numerics::Vector;
use crate::problems::Problem;
use crate::scalar::Real;

const ITERATION_CAP: usize = 2_000_000;
const ARMIJO_SLOPE: f64 = 0.5;

/// Outcome of the reference solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceOptimum {
    pub value: f64,
    /// Final `‖∇f‖`, at most the requested tolerance.
    pub grad_norm: f64,
    pub iterations: usize,
    pub minimizer: Vec<f64>,
}

type Cache = RwLock<HashMap<(String, u64), ReferenceOptimum>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

pub fn clear_reference_cache() {
    cache().write().expect("reference cache poisoned").clear();
}

/// Reference optimal value `f̂*` for a convex problem, cached by fingerprint.
pub fn reference_optimum<T: Real>(p: &dyn Problem<T>, tol: f64) -> Result<f64> {
    Ok(reference_optimum_report(p, tol)?.value)
}

/// Full-gradient descent with Armijo backtracking from the origin until
/// `‖∇f‖ ≤ tol`. The trial step is the Barzilai–Borwein step, halved until
/// the sufficient-decrease condition holds, so every accepted step is
/// monotone.
pub fn reference_optimum_report<T: Real>(p: &dyn Problem<T>, tol: f64) -> Result<ReferenceOptimum> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let key = (p.fingerprint(), tol.to_bits());
    if let Some(hit) = cache().read().expect("reference cache poisoned").get(&key) {
        return Ok(hit.clone());
    }

    let mut x = Vector::<T>::zeros(p.dim());
    let mut f = p.value(&x);
    let mut g = p.gradient(&x);
    let mut step = T::one();
    let tol_t = T::lit(tol);
    let c = T::lit(ARMIJO_SLOPE);
    let mut iterations = 0;
    while g.norm() > tol_t {
        if iterations >= ITERATION_CAP {
            return Err(Error::ConvergenceFailure { what: "reference optimum", iterations });
        }
        let gg = g.norm_squared();
        let (x_next, f_next) = loop {
            let trial = x.add_scaled(-step, &g);
            let ft = p.value(&trial);
            if ft <= f - c * step * gg {
                break (trial, ft);
            }
            step = step * T::lit(0.5);
            if step < T::min_positive_value() {
                return Err(Error::ConvergenceFailure { what: "reference optimum line search", iterations });
            }
        };
        let g_next = p.gradient(&x_next);
        let s = x_next.sub(&x);
        let y = g_next.sub(&g);
        let sy = s.dot(&y);
        step = if sy > T::zero() { s.norm_squared() / sy } else { step * T::lit(2.0) };
        x = x_next;
        f = f_next;
        g = g_next;
        iterations += 1;
    }
    let report = ReferenceOptimum {
        value: f.to_f64_lossless(),
        grad_norm: g.norm().to_f64_lossless(),
        iterations,
        minimizer: x.to_f64_vec(),
    };
    cache()
        .write()
        .expect("reference cache poisoned")
        .insert(key, report.clone());
    Ok(report)
}
