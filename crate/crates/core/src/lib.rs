//! Clipped and normalized stochastic gradient methods, their zero-order
//! counterparts, and tooling to measure them on (L0,L1)-smooth problems.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar type for the common `f64` case.

// `!(x > 0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod optimizers;
pub mod oracles;
pub mod problems;
pub mod scalar;

pub use error::{Error, Result};
pub use numerics::{sample_unit_sphere, RngState, Vector, ANALYSIS_STREAM, DIRECTION_STREAM, SAMPLE_STREAM};
pub use optimizers::{
    apply_clipped, apply_normalized, clip, clip_sgd_step, clip_step_size, gd_step, normalize, nsgd_step,
    nsgd_step_size, rs_anchored_suboptimality, sgd_step, step, zo_clip_sgd_step, zo_hyperparams, zo_nsgd_step,
    Algorithm, OptState, OptimizerParams, ZoHyperparams, ZoProblemConstants, ZoVariant,
};
pub use oracles::{
    batch_gradient, noisy_value, noisy_value_on, two_point_estimate, zo_bias_bound, zo_gradient,
    zo_second_moment_bound, BiasInjector, CallCounter, NoiseModel, PairSide, Sampling, ZoEstimatorConfig,
};
pub use problems::{Optimum, Problem, SmoothnessHints};
pub use scalar::Real;

/// Double-precision point.
pub type Point = Vector<f64>;
/// Single-precision point.
pub type Point32 = Vector<f32>;
pub type Dataset = problems::DatasetMatrix<f64>;
pub type Params = OptimizerParams<f64>;
pub type State = OptState<f64>;
