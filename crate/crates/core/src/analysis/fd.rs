use crate::numerics::Vector;
use crate::problems::Problem;
use crate::scalar::Real;

/// Largest coordinate error between the analytic per-sample gradient and a
/// central difference with step `h`, relative to `max(1, |analytic|)`.
pub fn finite_diff_check<T: Real>(p: &dyn Problem<T>, x: &Vector<T>, i: usize, h: T) -> T {
    assert!(h > T::zero(), "finite-difference step must be positive");
    let g = p.sample_gradient(x, i);
    let two_h = h + h;
    (0..x.dim()).fold(T::zero(), |worst, j| {
        let mut plus = x.clone();
        plus.as_mut_slice()[j] = x[j] + h;
        let mut minus = x.clone();
        minus.as_mut_slice()[j] = x[j] - h;
        let numeric = (p.sample_value(&plus, i) - p.sample_value(&minus, i)) / two_h;
        let err = (numeric - g[j]).abs() / T::one().max(g[j].abs());
        worst.max(err)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{power_norm_problem, quadratic_problem};

    #[test]
    fn quadratic_is_exact() {
        let p = quadratic_problem(3).unwrap();
        let x = Vector::new(vec![0.3, -1.2, 4.0]).unwrap();
        assert!(finite_diff_check::<f64>(&p, &x, 0, 1e-6) <= 1e-9);
    }

    #[test]
    fn power_norm_four() {
        let p = power_norm_problem(4.0, 2).unwrap();
        let x = Vector::new(vec![1.0, 1.0]).unwrap();
        assert!(finite_diff_check::<f64>(&p, &x, 0, 1e-6) <= 1e-6);
    }
}
