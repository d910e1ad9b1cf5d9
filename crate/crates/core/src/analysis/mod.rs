//! Empirical instruments: smoothness-envelope fitting, regime detection,
//! estimator bias and second-moment measurement, finite-difference checks.

mod estimator;
mod fd;
mod regimes;
mod smoothness;

pub use estimator::{measure_estimator_bias, sample_gradient_second_moment, EstimatorStats, MIN_TRIALS};
pub use fd::finite_diff_check;
pub use regimes::{detect_regimes, detect_regimes_against, fit_line, LineFit, RegimeReport, MIN_PHASE_POINTS};
pub use smoothness::{envelope_coverage, estimate_l0_l1, SmoothnessEstimate, LOCALITY_ROUNDS};
