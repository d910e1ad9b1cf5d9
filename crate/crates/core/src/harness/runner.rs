use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::harness::config::{BiasSpec, ProblemSpec, RunConfig, StepRule};
use crate::harness::dataset::{bundled_dataset, BUNDLED_NAME};
use crate::harness::libsvm::{parse_libsvm, LibsvmOptions};
use crate::harness::trajectory::{format_real, Regime, TrajectoryRecord, COLUMNS};
use crate::numerics::Vector;
use crate::optimizers::{clip_step_size, nsgd_step_size, step, Algorithm, OptState, OptimizerParams};
use crate::oracles::BiasInjector;
use crate::problems::{
    exp_inner_problem, logistic_l_constant, logistic_problem, noisy_quadratic_problem, power_norm_problem,
    quadratic_problem, reference_optimum, DatasetMatrix, Optimum, Problem, SmoothnessHints,
};

/// Iterates or values beyond this magnitude abort the run.
pub const DIVERGENCE_LIMIT: f64 = 1e100;

/// A problem instance plus the data it was built from, if any.
pub struct BuiltProblem {
    pub problem: Box<dyn Problem<f64>>,
    pub data: Option<DatasetMatrix<f64>>,
}

pub fn load_dataset(dataset: &str, dim: Option<usize>, zero_as_negative: bool) -> Result<DatasetMatrix<f64>> {
    if dataset == BUNDLED_NAME {
        let data = bundled_dataset();
        if let Some(d) = dim {
            if d != data.cols() {
                return Err(Error::Config(format!("bundled dataset has {} columns, not {d}", data.cols())));
            }
        }
        return Ok(data);
    }
    parse_libsvm(Path::new(dataset), LibsvmOptions { dim, zero_as_negative })
}

pub fn build_problem(spec: &ProblemSpec) -> Result<BuiltProblem> {
    let (problem, data): (Box<dyn Problem<f64>>, _) = match spec {
        ProblemSpec::Quadratic { dim } => (Box::new(quadratic_problem(*dim)?), None),
        ProblemSpec::NoisyQuadratic { dim, samples, scale, seed } => {
            (Box::new(noisy_quadratic_problem::<f64>(*dim, *samples, *scale, *seed)?), None)
        }
        ProblemSpec::PowerNorm { power, dim } => (Box::new(power_norm_problem(*power, *dim)?), None),
        ProblemSpec::ExpInner { direction } => {
            (Box::new(exp_inner_problem(Vector::from_f64_slice(direction)?)?), None)
        }
        ProblemSpec::Logistic { dataset, dim, zero_as_negative } => {
            let data = load_dataset(dataset, *dim, *zero_as_negative)?;
            (Box::new(logistic_problem(data.clone())), Some(data))
        }
    };
    Ok(BuiltProblem { problem, data })
}

fn hints(built: &BuiltProblem) -> Result<SmoothnessHints<f64>> {
    built
        .problem
        .smoothness_hints()
        .ok_or_else(|| Error::Config(format!("{} has no analytic (L0, L1) constants", built.problem.name())))
}

/// Plain `L` of an `L`-smooth problem: the logistic constant for datasets,
/// otherwise the analytic hint.
fn plain_smoothness(built: &BuiltProblem) -> Result<f64> {
    if let Some(data) = &built.data {
        return logistic_l_constant(data);
    }
    let h = hints(built)?;
    h.l.filter(|l| *l > 0.0)
        .ok_or_else(|| Error::Config(format!("{} is not L-smooth with a known L", built.problem.name())))
}

fn theorem_step(algorithm: Algorithm, l0: f64, l1: f64, l_plain: Option<f64>, cfg: &RunConfig) -> Result<f64> {
    if algorithm.is_clipped() {
        clip_step_size(l0, l1, cfg.clip_radius.unwrap_or_default())
    } else if algorithm.is_normalized() {
        nsgd_step_size(l0, l1, cfg.lambda.unwrap_or(1.0))
    } else {
        let l = l_plain.ok_or_else(|| Error::Config(format!("{algorithm} needs a plain smoothness constant")))?;
        Ok(1.0 / l)
    }
}

/// Resolves the configured step rule to a number.
pub fn resolve_step(cfg: &RunConfig, built: &BuiltProblem) -> Result<f64> {
    let one_norm = || {
        built
            .data
            .as_ref()
            .map(DatasetMatrix::one_norm)
            .ok_or_else(|| Error::Config("step rule needs a dataset".into()))
    };
    let step = match cfg.step {
        StepRule::Explicit(s) => s,
        StepRule::InverseOneNorm => 1.0 / one_norm()?,
        StepRule::InverseClipOneNorm => 1.0 / (cfg.clip_radius.unwrap_or_default() * one_norm()?),
        StepRule::StandardSmoothness => {
            let l = plain_smoothness(built)?;
            theorem_step(cfg.algorithm, l, 0.0, Some(l), cfg)?
        }
        StepRule::Theorem => {
            let h = hints(built)?;
            theorem_step(cfg.algorithm, h.l0, h.l1, h.l, cfg)?
        }
    };
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Config(format!("resolved step {step} is not a positive number")));
    }
    Ok(step)
}

/// How the suboptimality reference `f̂*` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceSource {
    Attained,
    Infimum,
    Anchor,
    Solved,
}

impl ReferenceSource {
    fn as_str(self) -> &'static str {
        match self {
            ReferenceSource::Attained => "attained",
            ReferenceSource::Infimum => "infimum",
            ReferenceSource::Anchor => "anchor",
            ReferenceSource::Solved => "reference-solve",
        }
    }
}

pub fn reference_value(cfg: &RunConfig, p: &dyn Problem<f64>) -> Result<(f64, ReferenceSource)> {
    if let Some(anchor) = &cfg.anchor {
        let s = Vector::from_f64_slice(anchor)?;
        return Ok((p.try_value(&s)?, ReferenceSource::Anchor));
    }
    match p.optimum() {
        Optimum::Attained(v) => Ok((v, ReferenceSource::Attained)),
        Optimum::Unattained(v) => Ok((v, ReferenceSource::Infimum)),
        Optimum::Unknown => Ok((reference_optimum(p, cfg.reference_tol)?, ReferenceSource::Solved)),
        Optimum::Unbounded => Err(Error::Config(format!("{} is unbounded below", p.name()))),
    }
}

/// The regime threshold: explicit, else `c` for clipped methods, else `L0/L1`.
pub fn regime_threshold(cfg: &RunConfig, p: &dyn Problem<f64>) -> Option<f64> {
    cfg.regime_threshold
        .or(if cfg.algorithm.is_clipped() { cfg.clip_radius } else { None })
        .or_else(|| p.smoothness_hints().filter(|h| h.l1 > 0.0).map(|h| h.l0 / h.l1))
}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub csv: String,
    pub records: Vec<TrajectoryRecord>,
    pub final_x: Vector<f64>,
    /// Iterate at every logged record, aligned with `records`.
    pub iterates: Vec<Vector<f64>>,
    pub step: f64,
    pub f_star: f64,
    pub threshold: Option<f64>,
    /// Largest full-gradient norm over the logged iterates.
    pub grad_norm_max: f64,
    pub config_fingerprint: String,
    pub problem_fingerprint: String,
}

fn toml_value<T: Into<toml::Value>>(v: T) -> String {
    v.into().to_string()
}

fn header(cfg: &RunConfig, p: &dyn Problem<f64>, step: f64, f_star: f64, source: ReferenceSource, threshold: Option<f64>) -> String {
    let mut h = String::new();
    for line in cfg.to_toml_string().lines() {
        let _ = writeln!(h, "# {line}");
    }
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(h, "# {k} = {v}");
    };
    kv("config_fingerprint", toml_value(cfg.fingerprint()));
    kv("problem_fingerprint", toml_value(p.fingerprint()));
    kv("problem_name", toml_value(p.name()));
    kv("dim", toml_value(p.dim() as i64));
    kv("num_samples", toml_value(p.num_samples() as i64));
    kv("start", toml_value(if cfg.x0.is_some() { "x0" } else { "origin" }));
    kv("resolved_step", format_real(step));
    kv("f_star", format_real(f_star));
    kv("f_star_source", toml_value(source.as_str()));
    if let Some(t) = threshold {
        kv("regime_threshold_used", format_real(t));
    }
    if let (true, Some(c)) = (cfg.algorithm.is_clipped(), cfg.clip_radius) {
        kv("clip_threshold_half", format_real(c / 2.0));
        kv("clip_threshold_third", format_real(c / 3.0));
    }
    h.push_str(COLUMNS);
    h.push('\n');
    h
}

fn write_output(cfg: &RunConfig, csv: &str) -> Result<()> {
    if let Some(path) = &cfg.output {
        let path = Path::new(path);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        fs::write(path, csv).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// Builds the problem and runs the config; writes `output` when set.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let built = build_problem(&cfg.problem)?;
    run_built(cfg, &built)
}

/// Runs against an already built problem (lets sweeps share data).
pub fn run_built(cfg: &RunConfig, built: &BuiltProblem) -> Result<RunOutcome> {
    cfg.validate()?;
    let p = built.problem.as_ref();
    let dim = p.dim();
    let x0 = match &cfg.x0 {
        Some(v) if v.len() != dim => return Err(Error::Config(format!("x0 has {} coordinates, problem has {dim}", v.len()))),
        Some(v) => Vector::from_f64_slice(v)?,
        None => Vector::zeros(dim),
    };
    let bias = match &cfg.oracle.bias {
        BiasSpec::None => BiasInjector::None,
        BiasSpec::AntiGradient(z) => BiasInjector::anti_gradient(*z)?,
        BiasSpec::Constant(v) if v.len() != dim => {
            return Err(Error::Config(format!("bias_vector has {} coordinates, problem has {dim}", v.len())))
        }
        BiasSpec::Constant(v) => BiasInjector::Constant(Vector::from_f64_slice(v)?),
    };
    let step_size = resolve_step(cfg, built)?;
    let (f_star, source) = reference_value(cfg, p)?;
    let threshold = regime_threshold(cfg, p);
    let mut params = OptimizerParams::new(step_size, cfg.batch, cfg.iterations);
    params.clip_radius = cfg.clip_radius;
    params.lambda = cfg.lambda;
    params.sampling = cfg.sampling;
    params.smoothing = cfg.smoothing;
    params.validate(cfg.algorithm).map_err(|e| Error::Config(e.to_string()))?;

    let mut csv = header(cfg, p, step_size, f_star, source, threshold);
    let mut records = Vec::new();
    let mut iterates = Vec::new();
    let mut grad_norm_max: f64 = 0.0;
    let started = Instant::now();
    let mut state = OptState::new(x0, cfg.seed);

    let mut log = |state: &OptState<f64>, csv: &mut String, records: &mut Vec<TrajectoryRecord>| -> Result<()> {
        let f_value = p.value(&state.x);
        let grad_norm = p.gradient(&state.x).norm();
        if !f_value.is_finite() || f_value.abs() > DIVERGENCE_LIMIT {
            return Err(Error::Divergence { iteration: state.k, reason: format!("f = {f_value}") });
        }
        grad_norm_max = grad_norm_max.max(grad_norm);
        let rec = TrajectoryRecord {
            k: state.k,
            f_value,
            subopt: f_value - f_star,
            grad_norm,
            regime: Regime::classify(grad_norm, threshold),
            fo_calls: state.calls.first_order,
            zo_calls: state.calls.zero_order,
            elapsed_s: started.elapsed().as_secs_f64(),
        };
        csv.push_str(&rec.to_csv_line());
        csv.push('\n');
        records.push(rec);
        iterates.push(state.x.clone());
        Ok(())
    };

    let mut outcome = log(&state, &mut csv, &mut records);
    while outcome.is_ok() && state.k < cfg.iterations {
        state = step(cfg.algorithm, state, p, &params, &bias, &cfg.oracle.noise);
        let xn = state.x.norm();
        if !xn.is_finite() || xn > DIVERGENCE_LIMIT {
            outcome = Err(Error::Divergence { iteration: state.k, reason: format!("‖x‖ = {xn}") });
            break;
        }
        if state.k % cfg.log_every == 0 || state.k == cfg.iterations {
            outcome = log(&state, &mut csv, &mut records);
        }
    }
    let _ = writeln!(csv, "# grad_norm_max = {}", format_real(grad_norm_max));
    write_output(cfg, &csv)?;
    outcome?;
    Ok(RunOutcome {
        csv,
        records,
        final_x: state.x,
        iterates,
        step: step_size,
        f_star,
        threshold,
        grad_norm_max,
        config_fingerprint: cfg.fingerprint(),
        problem_fingerprint: p.fingerprint(),
    })
}
