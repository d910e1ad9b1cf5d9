//! Run configuration stored as a flat TOML table.
//!
//! Keys (all lower case):
//!
//! | key | type | used by |
//! |---|---|---|
//! | `problem` | `quadratic`, `noisy-quadratic`, `power-norm`, `exp-inner`, `logistic` | all |
//! | `dim` | integer | quadratic, noisy-quadratic, power-norm |
//! | `power` | float ≥ 2 | power-norm |
//! | `direction` | float array | exp-inner |
//! | `samples`, `noise_scale`, `problem_seed` | integer, float, integer | noisy-quadratic |
//! | `dataset` | path or `bundled` | logistic |
//! | `dataset_dim`, `zero_as_negative` | integer, bool | logistic (optional) |
//! | `algorithm` | `sgd`, `gd`, `clip-sgd`, `nsgd`, `zo-clip-sgd`, `zo-nsgd` | all |
//! | `step_rule` | `explicit`, `theorem`, `standard-smoothness`, `inverse-one-norm`, `inverse-clip-one-norm` | all |
//! | `step` | float | `step_rule = explicit` |
//! | `clip_radius`, `lambda`, `smoothing` | float | clipped, step rules, zero-order |
//! | `batch` | integer | all |
//! | `sampling` | `with-replacement`, `full-batch` | first-order |
//! | `bias`, `bias_level`, `bias_vector` | `none`/`anti-gradient`/`constant`, float, float array | first-order |
//! | `noise`, `noise_level` | `zero`/`hash-uniform`/`sign-adversarial`, float | zero-order |
//! | `seed`, `iterations`, `log_every` | integer | all |
//! | `output` | path | optional |
//! | `x0`, `anchor` | float array | optional; `x0` defaults to the origin |
//! | `regime_threshold`, `reference_tol` | float | optional |

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::harness::dataset::BUNDLED_NAME;
use crate::optimizers::Algorithm;
use crate::oracles::{NoiseModel, Sampling};

/// Largest accepted seed; TOML integers are signed 64-bit.
pub const MAX_SEED: u64 = i64::MAX as u64;
pub const DEFAULT_REFERENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Quadratic { dim: usize },
    NoisyQuadratic { dim: usize, samples: usize, scale: f64, seed: u64 },
    PowerNorm { power: f64, dim: usize },
    ExpInner { direction: Vec<f64> },
    Logistic { dataset: String, dim: Option<usize>, zero_as_negative: bool },
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::Quadratic { .. } => "quadratic",
            ProblemSpec::NoisyQuadratic { .. } => "noisy-quadratic",
            ProblemSpec::PowerNorm { .. } => "power-norm",
            ProblemSpec::ExpInner { .. } => "exp-inner",
            ProblemSpec::Logistic { .. } => "logistic",
        }
    }

    /// Dimension when known without loading data.
    pub fn known_dim(&self) -> Option<usize> {
        match self {
            ProblemSpec::Quadratic { dim }
            | ProblemSpec::NoisyQuadratic { dim, .. }
            | ProblemSpec::PowerNorm { dim, .. } => Some(*dim),
            ProblemSpec::ExpInner { direction } => Some(direction.len()),
            ProblemSpec::Logistic { dim, .. } => *dim,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    Explicit(f64),
    /// Theorem maximum from the problem's `(L0, L1)` constants.
    Theorem,
    /// Theorem maximum with `L0 = L`, `L1 = 0`: the classical `L`-smooth step.
    StandardSmoothness,
    /// `1/‖A‖₁`.
    InverseOneNorm,
    /// `1/(c·‖A‖₁)`.
    InverseClipOneNorm,
}

impl StepRule {
    fn rule_name(&self) -> &'static str {
        match self {
            StepRule::Explicit(_) => "explicit",
            StepRule::Theorem => "theorem",
            StepRule::StandardSmoothness => "standard-smoothness",
            StepRule::InverseOneNorm => "inverse-one-norm",
            StepRule::InverseClipOneNorm => "inverse-clip-one-norm",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BiasSpec {
    None,
    AntiGradient(f64),
    Constant(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpec {
    pub bias: BiasSpec,
    pub noise: NoiseModel<f64>,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self { bias: BiasSpec::None, noise: NoiseModel::Zero }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub algorithm: Algorithm,
    pub step: StepRule,
    pub clip_radius: Option<f64>,
    pub lambda: Option<f64>,
    pub batch: usize,
    pub sampling: Sampling,
    pub smoothing: Option<f64>,
    pub oracle: OracleSpec,
    pub seed: u64,
    pub iterations: usize,
    pub log_every: usize,
    pub output: Option<String>,
    /// Start point; `None` is the origin.
    pub x0: Option<Vec<f64>>,
    /// Reference point `s`; suboptimality is then `f(x) − f(s)`.
    pub anchor: Option<Vec<f64>>,
    pub regime_threshold: Option<f64>,
    pub reference_tol: f64,
}

impl RunConfig {
    /// Minimal valid configuration: explicit step, batch 1, one log per step.
    pub fn new(problem: ProblemSpec, algorithm: Algorithm, step: StepRule, iterations: usize) -> Self {
        Self {
            problem,
            algorithm,
            step,
            clip_radius: None,
            lambda: None,
            batch: 1,
            sampling: Sampling::WithReplacement,
            smoothing: None,
            oracle: OracleSpec::default(),
            seed: 0,
            iterations,
            log_every: 1,
            output: None,
            x0: None,
            anchor: None,
            regime_threshold: None,
            reference_tol: DEFAULT_REFERENCE_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        let positive = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} = {v} must be finite and > 0")))
            }
        };
        let finite_vec = |name: &str, v: &[f64]| -> Result<()> {
            if v.is_empty() || v.iter().any(|c| !c.is_finite()) {
                Err(Error::Config(format!("{name} must be a nonempty array of finite numbers")))
            } else {
                Ok(())
            }
        };
        match &self.problem {
            ProblemSpec::Quadratic { dim } | ProblemSpec::PowerNorm { dim, .. } if *dim == 0 => {
                return fail("dim must be >= 1".into())
            }
            ProblemSpec::PowerNorm { power, .. } if !(power.is_finite() && *power >= 2.0) => {
                return fail(format!("power = {power} must be >= 2"))
            }
            ProblemSpec::NoisyQuadratic { dim, samples, scale, seed } => {
                if *dim == 0 || *samples == 0 {
                    return fail("dim and samples must be >= 1".into());
                }
                if !(scale.is_finite() && *scale >= 0.0) {
                    return fail(format!("noise_scale = {scale} must be finite and >= 0"));
                }
                if *seed > MAX_SEED {
                    return fail(format!("problem_seed must be <= {MAX_SEED}"));
                }
            }
            ProblemSpec::ExpInner { direction } => {
                finite_vec("direction", direction)?;
                if direction.iter().all(|&c| c == 0.0) {
                    return fail("direction must be nonzero".into());
                }
            }
            ProblemSpec::Logistic { dataset, dim, .. } => {
                if dataset.is_empty() {
                    return fail("dataset must name a file or `bundled`".into());
                }
                if *dim == Some(0) {
                    return fail("dataset_dim must be >= 1".into());
                }
            }
            _ => {}
        }
        let a = self.algorithm;
        if a.is_clipped() {
            match self.clip_radius {
                Some(c) => positive("clip_radius", c)?,
                None => return fail(format!("{a} requires clip_radius")),
            }
        }
        if a.is_zero_order() {
            match self.smoothing {
                Some(g) => positive("smoothing", g)?,
                None => return fail(format!("{a} requires smoothing")),
            }
            if self.sampling == Sampling::FullBatch {
                return fail(format!("{a} draws samples; full-batch sampling does not apply"));
            }
            if self.oracle.bias != BiasSpec::None {
                return fail("bias injection applies to first-order oracles only".into());
            }
        } else if self.oracle.noise != NoiseModel::Zero {
            return fail("function-value noise applies to zero-order oracles only".into());
        }
        if let Some(l) = self.lambda {
            positive("lambda", l)?;
        }
        match self.step {
            StepRule::Explicit(s) => positive("step", s)?,
            StepRule::Theorem | StepRule::StandardSmoothness if a.is_normalized() && self.lambda.is_none() => {
                return fail(format!("step_rule = {} for {a} requires lambda", self.step.rule_name()))
            }
            StepRule::InverseOneNorm | StepRule::InverseClipOneNorm
                if !matches!(self.problem, ProblemSpec::Logistic { .. }) =>
            {
                return fail(format!("step_rule = {} needs a dataset problem", self.step.rule_name()))
            }
            StepRule::InverseClipOneNorm if self.clip_radius.is_none() => {
                return fail("step_rule = inverse-clip-one-norm requires clip_radius".into())
            }
            _ => {}
        }
        if self.batch == 0 {
            return fail("batch must be >= 1".into());
        }
        if self.iterations == 0 {
            return fail("iterations must be >= 1".into());
        }
        if self.log_every == 0 {
            return fail("log_every must be >= 1".into());
        }
        if self.seed > MAX_SEED {
            return fail(format!("seed must be <= {MAX_SEED}"));
        }
        match &self.oracle.bias {
            BiasSpec::None => {}
            BiasSpec::AntiGradient(z) => {
                if !(z.is_finite() && *z >= 0.0) {
                    return fail(format!("bias_level = {z} must be finite and >= 0"));
                }
            }
            BiasSpec::Constant(v) => finite_vec("bias_vector", v)?,
        }
        self.oracle.noise.validate().map_err(|e| Error::Config(e.to_string()))?;
        if let Some(t) = self.regime_threshold {
            if !(t.is_finite() && t >= 0.0) {
                return fail(format!("regime_threshold = {t} must be finite and >= 0"));
            }
        }
        positive("reference_tol", self.reference_tol)?;
        let dim = self.problem.known_dim();
        for (name, v) in [("x0", &self.x0), ("anchor", &self.anchor)] {
            if let Some(v) = v {
                finite_vec(name, v)?;
                if let Some(d) = dim {
                    if v.len() != d {
                        return fail(format!("{name} has {} coordinates, problem has {d}", v.len()));
                    }
                }
            }
        }
        if let (BiasSpec::Constant(v), Some(d)) = (&self.oracle.bias, dim) {
            if v.len() != d {
                return fail(format!("bias_vector has {} coordinates, problem has {d}", v.len()));
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let flat: Flat = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = flat.into_config()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_table(table: toml::Table) -> Result<Self> {
        Self::from_toml_str(&toml::to_string(&table).map_err(|e| Error::Config(e.to_string()))?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&Flat::from_config(self)).expect("flat config always serializes")
    }

    pub fn to_table(&self) -> toml::Table {
        toml::Table::try_from(Flat::from_config(self)).expect("flat config always serializes")
    }

    /// Reads a config file; a relative dataset path is taken relative to the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let ProblemSpec::Logistic { dataset, .. } = &mut cfg.problem {
            let p = Path::new(dataset.as_str());
            if dataset != BUNDLED_NAME && p.is_relative() {
                if let Some(dir) = path.parent() {
                    *dataset = dir.join(p).to_string_lossy().into_owned();
                }
            }
        }
        Ok(cfg)
    }

    /// First 24 hex digits of the SHA-256 of the serialized config.
    pub fn fingerprint(&self) -> String {
        hex::encode(&Sha256::digest(self.to_toml_string().as_bytes())[..12])
    }

    /// Every key the flat format accepts.
    pub fn keys() -> &'static [&'static str] {
        FLAT_KEYS
    }
}

const FLAT_KEYS: &[&str] = &[
    "problem",
    "dim",
    "power",
    "direction",
    "samples",
    "noise_scale",
    "problem_seed",
    "dataset",
    "dataset_dim",
    "zero_as_negative",
    "algorithm",
    "step_rule",
    "step",
    "clip_radius",
    "lambda",
    "batch",
    "sampling",
    "smoothing",
    "bias",
    "bias_level",
    "bias_vector",
    "noise",
    "noise_level",
    "seed",
    "iterations",
    "log_every",
    "output",
    "x0",
    "anchor",
    "regime_threshold",
    "reference_tol",
];

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Flat {
    problem: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    power: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    direction: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    problem_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dataset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dataset_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    zero_as_negative: Option<bool>,
    algorithm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    step_rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    clip_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    batch: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sampling: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    smoothing: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bias: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bias_level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bias_vector: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise_level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    log_every: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    anchor: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    regime_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reference_tol: Option<f64>,
}

fn required<T>(v: Option<T>, key: &str, problem: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("problem {problem:?} requires `{key}`")))
}

impl Flat {
    fn into_config(self) -> Result<RunConfig> {
        let p = self.problem.as_str();
        let problem = match p {
            "quadratic" => ProblemSpec::Quadratic { dim: required(self.dim, "dim", p)? },
            "noisy-quadratic" => ProblemSpec::NoisyQuadratic {
                dim: required(self.dim, "dim", p)?,
                samples: required(self.samples, "samples", p)?,
                scale: required(self.noise_scale, "noise_scale", p)?,
                seed: self.problem_seed.unwrap_or(0),
            },
            "power-norm" => ProblemSpec::PowerNorm {
                power: required(self.power, "power", p)?,
                dim: required(self.dim, "dim", p)?,
            },
            "exp-inner" => ProblemSpec::ExpInner { direction: required(self.direction, "direction", p)? },
            "logistic" => ProblemSpec::Logistic {
                dataset: required(self.dataset, "dataset", p)?,
                dim: self.dataset_dim,
                zero_as_negative: self.zero_as_negative.unwrap_or(false),
            },
            other => return Err(Error::Config(format!("unknown problem {other:?}"))),
        };
        let algorithm: Algorithm = self.algorithm.parse()?;
        let step = match self.step_rule.as_deref() {
            None | Some("explicit") => StepRule::Explicit(
                self.step.ok_or_else(|| Error::Config("`step` is required for step_rule = explicit".into()))?,
            ),
            Some(rule) => {
                if self.step.is_some() {
                    return Err(Error::Config(format!("`step` conflicts with step_rule = {rule}")));
                }
                match rule {
                    "theorem" => StepRule::Theorem,
                    "standard-smoothness" => StepRule::StandardSmoothness,
                    "inverse-one-norm" => StepRule::InverseOneNorm,
                    "inverse-clip-one-norm" => StepRule::InverseClipOneNorm,
                    other => return Err(Error::Config(format!("unknown step_rule {other:?}"))),
                }
            }
        };
        let sampling = match self.sampling.as_deref() {
            None | Some("with-replacement") => Sampling::WithReplacement,
            Some("full-batch") => Sampling::FullBatch,
            Some(other) => return Err(Error::Config(format!("unknown sampling {other:?}"))),
        };
        let bias = match self.bias.as_deref() {
            None | Some("none") => BiasSpec::None,
            Some("anti-gradient") => BiasSpec::AntiGradient(
                self.bias_level.ok_or_else(|| Error::Config("bias = anti-gradient requires bias_level".into()))?,
            ),
            Some("constant") => BiasSpec::Constant(
                self.bias_vector.ok_or_else(|| Error::Config("bias = constant requires bias_vector".into()))?,
            ),
            Some(other) => return Err(Error::Config(format!("unknown bias {other:?}"))),
        };
        let level = || self.noise_level.ok_or_else(|| Error::Config("noise requires noise_level".into()));
        let noise = match self.noise.as_deref() {
            None | Some("zero") => NoiseModel::Zero,
            Some("hash-uniform") => NoiseModel::HashUniform(level()?),
            Some("sign-adversarial") => NoiseModel::SignAdversarial(level()?),
            Some(other) => return Err(Error::Config(format!("unknown noise {other:?}"))),
        };
        Ok(RunConfig {
            problem,
            algorithm,
            step,
            clip_radius: self.clip_radius,
            lambda: self.lambda,
            batch: self.batch.unwrap_or(1),
            sampling,
            smoothing: self.smoothing,
            oracle: OracleSpec { bias, noise },
            seed: self.seed.unwrap_or(0),
            iterations: self.iterations,
            log_every: self.log_every.unwrap_or(1),
            output: self.output,
            x0: self.x0,
            anchor: self.anchor,
            regime_threshold: self.regime_threshold,
            reference_tol: self.reference_tol.unwrap_or(DEFAULT_REFERENCE_TOL),
        })
    }

    fn from_config(c: &RunConfig) -> Self {
        let mut f = Flat { problem: c.problem.name().to_string(), ..Default::default() };
        match &c.problem {
            ProblemSpec::Quadratic { dim } => f.dim = Some(*dim),
            ProblemSpec::NoisyQuadratic { dim, samples, scale, seed } => {
                f.dim = Some(*dim);
                f.samples = Some(*samples);
                f.noise_scale = Some(*scale);
                f.problem_seed = Some(*seed);
            }
            ProblemSpec::PowerNorm { power, dim } => {
                f.power = Some(*power);
                f.dim = Some(*dim);
            }
            ProblemSpec::ExpInner { direction } => f.direction = Some(direction.clone()),
            ProblemSpec::Logistic { dataset, dim, zero_as_negative } => {
                f.dataset = Some(dataset.clone());
                f.dataset_dim = *dim;
                f.zero_as_negative = Some(*zero_as_negative);
            }
        }
        f.algorithm = c.algorithm.as_str().to_string();
        f.step_rule = Some(c.step.rule_name().to_string());
        if let StepRule::Explicit(s) = c.step {
            f.step = Some(s);
        }
        f.clip_radius = c.clip_radius;
        f.lambda = c.lambda;
        f.batch = Some(c.batch);
        f.sampling = Some(
            match c.sampling {
                Sampling::WithReplacement => "with-replacement",
                Sampling::FullBatch => "full-batch",
            }
            .to_string(),
        );
        f.smoothing = c.smoothing;
        match &c.oracle.bias {
            BiasSpec::None => f.bias = Some("none".into()),
            BiasSpec::AntiGradient(z) => {
                f.bias = Some("anti-gradient".into());
                f.bias_level = Some(*z);
            }
            BiasSpec::Constant(v) => {
                f.bias = Some("constant".into());
                f.bias_vector = Some(v.clone());
            }
        }
        match c.oracle.noise {
            NoiseModel::Zero => f.noise = Some("zero".into()),
            NoiseModel::HashUniform(d) => {
                f.noise = Some("hash-uniform".into());
                f.noise_level = Some(d);
            }
            NoiseModel::SignAdversarial(d) => {
                f.noise = Some("sign-adversarial".into());
                f.noise_level = Some(d);
            }
        }
        f.seed = Some(c.seed);
        f.iterations = c.iterations;
        f.log_every = Some(c.log_every);
        f.output = c.output.clone();
        f.x0 = c.x0.clone();
        f.anchor = c.anchor.clone();
        f.regime_threshold = c.regime_threshold;
        f.reference_tol = Some(c.reference_tol);
        f
    }
}
