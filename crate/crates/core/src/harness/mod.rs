//! Experiment engine: datasets, configs, runs, sweeps and plot data.

pub mod config;
pub mod dataset;
pub mod diagnostics;
pub mod libsvm;
pub mod plot;
pub mod runner;
pub mod sweep;
pub mod trajectory;

pub use config::{BiasSpec, OracleSpec, ProblemSpec, RunConfig, StepRule};
pub use diagnostics::{check_oracle, estimate_smoothness, OracleCheckOptions, OracleReport, SmoothnessOptions, SmoothnessReport};
pub use libsvm::{matrix_one_norm, parse_libsvm, parse_libsvm_bytes, parse_libsvm_str, write_libsvm, LibsvmOptions};
pub use plot::{emit_plot_data, PlotMode};
pub use runner::{build_problem, run, run_built, BuiltProblem, RunOutcome};
pub use sweep::{sweep, SweepSummary};
pub use trajectory::{deterministic_body, Regime, TrajectoryFile, TrajectoryRecord};
