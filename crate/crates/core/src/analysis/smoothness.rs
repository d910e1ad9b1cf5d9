use crate::error::{Error, Result};
use crate::numerics::{sample_ball, RngState, Vector};
use crate::problems::Problem;
use crate::scalar::Real;

/// Cap on refits that enforce `‖y − x‖ ≤ 1/L1_hat`.
pub const LOCALITY_ROUNDS: usize = 5;
const BISECTION_STEPS: usize = 200;
const COVER_RELATIVE_SLACK: f64 = 1e-9;
const COVER_ABSOLUTE_SLACK: f64 = 1e-12;
const MAX_VIOLATION_RATE: f64 = 0.01;

/// Fitted `(L0, L1)` envelope `‖∇f(y) − ∇f(x)‖/‖y − x‖ ≤ L0 + L1‖∇f(x)‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessEstimate {
    pub l0_hat: f64,
    pub l1_hat: f64,
    pub pairs_sampled: usize,
    /// Pairs left after the locality filter, i.e. the final fitting set.
    pub pairs_used: usize,
    /// Fraction of the fitting set above the envelope.
    pub violation_rate: f64,
    /// Number of fits performed, including the first.
    pub rounds: usize,
    /// Largest `‖∇f‖` over the anchors.
    pub grad_norm_max: f64,
}

impl SmoothnessEstimate {
    /// `L0_hat / L1_hat`, the gradient norm separating the two regimes.
    pub fn regime_threshold(&self) -> Option<f64> {
        (self.l1_hat > 0.0).then(|| self.l0_hat / self.l1_hat)
    }

    pub fn covers(&self, grad_norm: f64, ratio: f64) -> bool {
        ratio <= (self.l0_hat + self.l1_hat * grad_norm) * (1.0 + COVER_RELATIVE_SLACK) + COVER_ABSOLUTE_SLACK
    }
}

#[derive(Debug, Clone, Copy)]
struct Pair {
    grad_norm: f64,
    ratio: f64,
    dist: f64,
}

fn sample_pairs<T: Real>(
    p: &dyn Problem<T>,
    anchors: &[Vector<T>],
    radius: T,
    per_anchor: usize,
    rng: &mut RngState,
) -> Result<Vec<Pair>> {
    if anchors.is_empty() {
        return Err(Error::InvalidArgument("at least one anchor is required".into()));
    }
    if !(radius.is_finite() && radius > T::zero()) || per_anchor == 0 {
        return Err(Error::InvalidArgument("radius and pairs per anchor must be positive".into()));
    }
    let mut pairs = Vec::with_capacity(anchors.len() * per_anchor);
    for x in anchors {
        let gx = p.try_gradient(x)?;
        let grad_norm = gx.norm().to_f64_lossless();
        for _ in 0..per_anchor {
            let step = sample_ball::<T>(x.dim(), radius, rng);
            let dist = step.norm();
            if dist.is_zero() {
                continue;
            }
            let y = x.add(&step);
            let ratio = (p.gradient(&y).sub(&gx).norm() / dist).to_f64_lossless();
            if !(ratio.is_finite() && grad_norm.is_finite()) {
                return Err(Error::EnvelopeInfeasible);
            }
            pairs.push(Pair { grad_norm, ratio, dist: dist.to_f64_lossless() });
        }
    }
    Ok(pairs)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Minimizes `L0 + ρ·L1` over `L0, L1 ≥ 0` with every pair covered.
///
/// Eliminating `L0 = max(0, maxⱼ(rⱼ − L1·gⱼ))` leaves a convex piecewise-linear
/// function of `L1`, minimized by bisection on its right derivative.
fn fit_envelope(pairs: &[Pair]) -> (f64, f64) {
    let rho = median(pairs.iter().map(|q| q.grad_norm).collect());
    let excess = |s: f64| pairs.iter().map(|q| q.ratio - s * q.grad_norm).fold(0.0, f64::max);
    let objective = |s: f64| excess(s) + rho * s;
    let right_slope = |s: f64| {
        let mut best = f64::NEG_INFINITY;
        let mut g_active = 0.0;
        for q in pairs {
            let v = q.ratio - s * q.grad_norm;
            if v > best || (v == best && q.grad_norm < g_active) {
                best = v;
                g_active = q.grad_norm;
            }
        }
        if best > 0.0 {
            rho - g_active
        } else {
            rho
        }
    };
    let s_max = pairs
        .iter()
        .filter(|q| q.grad_norm > 0.0)
        .map(|q| q.ratio / q.grad_norm)
        .fold(0.0, f64::max);
    let l1 = if right_slope(0.0) >= 0.0 || s_max == 0.0 {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, s_max);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if right_slope(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if objective(lo) <= objective(hi) {
            lo
        } else {
            hi
        }
    };
    (excess(l1), l1)
}

/// Fits the tightest `(L0, L1)` envelope over sampled pairs `(x, y)` with
/// `x` an anchor and `‖y − x‖ ≤ radius`, then refits on the pairs satisfying
/// `‖y − x‖ ≤ 1/L1_hat` until that set stops changing.
pub fn estimate_l0_l1<T: Real>(
    p: &dyn Problem<T>,
    anchors: &[Vector<T>],
    radius: T,
    pairs_per_anchor: usize,
    rng: &mut RngState,
) -> Result<SmoothnessEstimate> {
    let all = sample_pairs(p, anchors, radius, pairs_per_anchor, rng)?;
    if all.is_empty() {
        return Err(Error::EnvelopeInfeasible);
    }
    let grad_norm_max = all.iter().map(|q| q.grad_norm).fold(0.0, f64::max);
    let mut used = all.clone();
    let (mut l0, mut l1) = fit_envelope(&used);
    let mut rounds = 1;
    while rounds < LOCALITY_ROUNDS && l1 > 0.0 {
        let reach = 1.0 / l1;
        let kept: Vec<Pair> = all.iter().copied().filter(|q| q.dist <= reach).collect();
        if kept.len() == used.len() || kept.is_empty() {
            break;
        }
        used = kept;
        (l0, l1) = fit_envelope(&used);
        rounds += 1;
    }
    if !(l0.is_finite() && l1.is_finite()) {
        return Err(Error::EnvelopeInfeasible);
    }
    let mut est = SmoothnessEstimate {
        l0_hat: l0,
        l1_hat: l1,
        pairs_sampled: all.len(),
        pairs_used: used.len(),
        violation_rate: 0.0,
        rounds,
        grad_norm_max,
    };
    let violations = used.iter().filter(|q| !est.covers(q.grad_norm, q.ratio)).count();
    est.violation_rate = violations as f64 / used.len() as f64;
    if est.violation_rate > MAX_VIOLATION_RATE {
        return Err(Error::EnvelopeInfeasible);
    }
    Ok(est)
}

/// Fraction of freshly sampled local pairs (`‖y − x‖ ≤ min(radius, 1/L1_hat)`)
/// that the estimate covers.
pub fn envelope_coverage<T: Real>(
    p: &dyn Problem<T>,
    est: &SmoothnessEstimate,
    anchors: &[Vector<T>],
    radius: T,
    pairs_per_anchor: usize,
    rng: &mut RngState,
) -> Result<f64> {
    let pairs = sample_pairs(p, anchors, radius, pairs_per_anchor, rng)?;
    let reach = if est.l1_hat > 0.0 { 1.0 / est.l1_hat } else { f64::INFINITY };
    let local: Vec<&Pair> = pairs.iter().filter(|q| q.dist <= reach).collect();
    if local.is_empty() {
        return Err(Error::InsufficientData("no held-out pair within the locality radius".into()));
    }
    let covered = local.iter().filter(|q| est.covers(q.grad_norm, q.ratio)).count();
    Ok(covered as f64 / local.len() as f64)
}
