//! Acceptance suite. Runs without the libtest harness and prints one
//! `PASS`/`FAIL` line per criterion; the process fails if any criterion does.
//!
//! Set `GENSMOOTH_W1A` to the path of the full w1a file to include the
//! full-size parse check in criterion 10.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gensmooth::analysis::{detect_regimes, fit_line, measure_estimator_bias, sample_gradient_second_moment};
use gensmooth::harness::diagnostics::{estimate_smoothness_built, SmoothnessOptions};
use gensmooth::harness::{
    build_problem, deterministic_body, parse_libsvm, parse_libsvm_str, run, run_built, sweep, write_libsvm,
    LibsvmOptions, RunConfig,
};
use gensmooth::harness::dataset::{bundled_dataset, bundled_libsvm_text, BUNDLED_COLS, BUNDLED_ROWS};
use gensmooth::problems::{
    exp_inner_problem, logistic_problem, noisy_quadratic_problem, power_norm_problem, quadratic_problem,
};
use gensmooth::{
    apply_clipped, apply_normalized, clip, clip_sgd_step, normalize, nsgd_step, nsgd_step_size, rs_anchored_suboptimality,
    sample_unit_sphere, sgd_step, zo_bias_bound, zo_second_moment_bound, BiasInjector, NoiseModel, OptState,
    OptimizerParams, Point, Problem, RngState, Vector, ZoEstimatorConfig, ANALYSIS_STREAM,
};
use gensmooth::analysis::finite_diff_check;
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};

type Verdict = Result<String, String>;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn preset(name: &str) -> RunConfig {
    let mut cfg = RunConfig::load(&configs_dir().join(name)).unwrap_or_else(|e| panic!("preset {name}: {e}"));
    cfg.output = None;
    cfg
}

fn ensure(cond: bool, detail: String) -> Verdict {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, started: Instant) -> Result<(), String> {
    let t = started.elapsed();
    if t <= limit {
        Ok(())
    } else {
        Err(format!("took {t:.1?}, limit {limit:?}"))
    }
}

fn log_subopt(v: f64) -> f64 {
    v.max(1e-16).log10()
}

// 1. NSGD with step 1/‖A‖₁ against the global-smoothness step.
fn step_strategy_ordering() -> Verdict {
    let started = Instant::now();
    let ours = run(&preset("logistic_nsgd_inverse_one_norm.toml")).map_err(|e| e.to_string())?;
    let standard = run(&preset("logistic_nsgd_standard.toml")).map_err(|e| e.to_string())?;
    within(Duration::from_secs(120), started)?;
    let first = |o: &gensmooth::harness::RunOutcome| o.records.first().unwrap().f_value;
    let last = |o: &gensmooth::harness::RunOutcome| o.records.last().unwrap().f_value;
    let (f0, f_ours, f_std) = (first(&ours), last(&ours), last(&standard));
    let ratio = (first(&standard) - f_std) / (f0 - f_ours);
    let k = ours.records.last().unwrap().k;
    ensure(
        k == 25_000 && f_ours < f_std && ratio < 0.25,
        format!(
            "f0={f0:.6} ours(eta={:.3e})={f_ours:.6e} standard(eta={:.3e})={f_std:.6e} decrease ratio={ratio:.4} (< 0.25)",
            ours.step, standard.step
        ),
    )
}

// 2. Log-linear decay over the window ‖∇f‖ ≥ L0_hat/L1_hat.
fn linear_phase_slope() -> Verdict {
    let cfg = preset("logistic_nsgd_inverse_one_norm.toml");
    let built = build_problem(&cfg.problem).map_err(|e| e.to_string())?;
    let report = estimate_smoothness_built(&cfg, &built, &SmoothnessOptions::default()).map_err(|e| e.to_string())?;
    let threshold = report.estimate.regime_threshold().ok_or("L1_hat = 0: no finite threshold")?;
    let out = run_built(&cfg, &built).map_err(|e| e.to_string())?;
    let window: Vec<_> = out.records.iter().filter(|r| r.grad_norm >= threshold).collect();
    let xs: Vec<f64> = window.iter().map(|r| r.k as f64).collect();
    let ys: Vec<f64> = window.iter().map(|r| log_subopt(r.subopt)).collect();
    let fit = fit_line(&xs, &ys).map_err(|e| e.to_string())?;
    ensure(
        fit.slope < 0.0 && fit.r_squared >= 0.9,
        format!(
            "L0_hat={:.3e} L1_hat={:.3e} window={} points slope={:.3e} R2={:.4} (>= 0.9)",
            report.estimate.l0_hat,
            report.estimate.l1_hat,
            window.len(),
            fit.slope,
            fit.r_squared
        ),
    )
}

// 3. ClipSGD switches from a steep to a shallow phase.
fn clip_two_regimes() -> Verdict {
    let started = Instant::now();
    let out = run(&preset("logistic_clip_sgd.toml")).map_err(|e| e.to_string())?;
    within(Duration::from_secs(120), started)?;
    let threshold = out.threshold.ok_or("no regime threshold")?;
    let r = detect_regimes(&out.records, threshold).map_err(|e| e.to_string())?;
    let k_star = r.switch_iteration.ok_or("no switch iteration")?;
    let lin = r.linear_slope.ok_or("linear phase too short to fit")?;
    let sub = r.sublinear_slope.ok_or("sublinear phase too short to fit")?;
    let ratio = lin / sub;
    ensure(
        lin < 0.0 && sub < 0.0 && ratio >= 2.0,
        format!("k*={k_star} linear slope={lin:.3e} sublinear slope={sub:.3e} ratio={ratio:.2} (>= 2)"),
    )
}

// 4. Deterministic NGD with L0 = 0: iterations grow linearly in log(1/ε).
fn l0_zero_linear_rate() -> Verdict {
    let a = Vector::from_vec(vec![1.0, 0.5, -0.25]);
    let p = exp_inner_problem(a.clone()).map_err(|e| e.to_string())?;
    let hints = p.smoothness_hints().ok_or("exp-inner has no smoothness hints")?;
    let eta = nsgd_step_size(0.0, hints.l1, 1.0).map_err(|e| e.to_string())?;
    let x0 = Vector::from_vec(vec![2.0, 1.0, -1.0]);
    // Anchor far down the descent ray: f(s) = e^-40.
    let unit = a.scale(1.0 / a.norm());
    let shift = (a.dot(&x0) + 40.0) / a.norm();
    let anchor = x0.add_scaled(-shift, &unit);
    let params = OptimizerParams::new(eta, 1, 100_000).full_batch();
    let mut state = OptState::new(x0, 0);
    let eps: Vec<f64> = (1..=6).map(|j| 10f64.powi(-j)).collect();
    let mut hits = Vec::new();
    for &e in &eps {
        while rs_anchored_suboptimality(&p, &state.x, &anchor) > e {
            if state.k >= params.iterations {
                return Err(format!("gap {e:e} not reached in {} iterations", params.iterations));
            }
            state = nsgd_step(state, &p, &params, &BiasInjector::None);
        }
        hits.push(state.k as f64);
    }
    let xs: Vec<f64> = eps.iter().map(|e| (1.0 / e).log10()).collect();
    let fit = fit_line(&xs, &hits).map_err(|e| e.to_string())?;
    ensure(
        fit.r_squared >= 0.95,
        format!("eta={eta:.4} iterations={hits:?} slope={:.2}/decade R2={:.5} (>= 0.95)", fit.slope, fit.r_squared),
    )
}

// 5. The two-point estimator is unbiased on a quadratic.
fn estimator_unbiased() -> Verdict {
    let started = Instant::now();
    let p = quadratic_problem(5).map_err(|e| e.to_string())?;
    let x = Vector::from_vec(vec![1.0, -0.5, 2.0, 0.3, -1.2]);
    let cfg = ZoEstimatorConfig::new(1e-3, 1, NoiseModel::Zero).map_err(|e| e.to_string())?;
    let mut rng = RngState::new(5, ANALYSIS_STREAM);
    let s = measure_estimator_bias(&p, &x, &cfg, 100_000, &mut rng).map_err(|e| e.to_string())?;
    within(Duration::from_secs(30), started)?;
    ensure(
        s.bias_norm <= 4.0 * s.standard_error,
        format!("bias={:.3e} SE={:.3e} ratio={:.2} (<= 4)", s.bias_norm, s.standard_error, s.bias_norm / s.standard_error),
    )
}

struct OracleGridCell {
    point: &'static str,
    gamma: f64,
    delta: f64,
    bias: f64,
    bias_se: f64,
    bias_bound: f64,
    second: f64,
    second_bound: f64,
}

// Shared by criteria 6 and 7: the (γ, Δ) grid on the bundled logistic problem
// at the origin and at a mid-trajectory iterate of the NSGD preset.
fn oracle_grid() -> Result<Vec<OracleGridCell>, String> {
    let cfg = preset("logistic_nsgd_inverse_one_norm.toml");
    let built = build_problem(&cfg.problem).map_err(|e| e.to_string())?;
    let report = estimate_smoothness_built(&cfg, &built, &SmoothnessOptions::default()).map_err(|e| e.to_string())?;
    let out = run_built(&cfg, &built).map_err(|e| e.to_string())?;
    let p = built.problem.as_ref();
    let (l0, l1) = (report.estimate.l0_hat, report.estimate.l1_hat);
    let m_hat = report.grad_ceiling;
    let d = p.dim();
    let points: [(&'static str, Point); 2] =
        [("origin", Vector::zeros(d)), ("mid-run", out.iterates[out.iterates.len() / 2].clone())];
    let mut rng = RngState::new(6, ANALYSIS_STREAM);
    let mut cells = Vec::new();
    for (name, x) in &points {
        let sigma_sq = sample_gradient_second_moment(p, x);
        for gamma in [1e-2, 1e-3, 1e-4] {
            for delta in [0.0, 1e-6] {
                let cfg = ZoEstimatorConfig::new(gamma, 1, NoiseModel::SignAdversarial(delta)).map_err(|e| e.to_string())?;
                let s = measure_estimator_bias(p, x, &cfg, 20_000, &mut rng).map_err(|e| e.to_string())?;
                cells.push(OracleGridCell {
                    point: name,
                    gamma,
                    delta,
                    bias: s.bias_norm,
                    bias_se: s.standard_error,
                    bias_bound: zo_bias_bound(l0, l1, m_hat, d, gamma, delta),
                    second: s.second_moment,
                    second_bound: zo_second_moment_bound(sigma_sq, l0, l1, m_hat, d, gamma, delta),
                });
            }
        }
    }
    Ok(cells)
}

fn bias_bound(cells: &Result<Vec<OracleGridCell>, String>) -> Verdict {
    let cells = cells.as_ref().map_err(Clone::clone)?;
    let bad: Vec<String> = cells
        .iter()
        .filter(|c| c.bias > 1.05 * c.bias_bound + 4.0 * c.bias_se)
        .map(|c| format!("{} gamma={:e} delta={:e}: {:.3e} > {:.3e}", c.point, c.gamma, c.delta, c.bias, c.bias_bound))
        .collect();
    let worst = cells.iter().map(|c| c.bias / (1.05 * c.bias_bound + 4.0 * c.bias_se)).fold(0.0, f64::max);
    ensure(bad.is_empty(), format!("{} cells, worst bias/allowance={worst:.3} {}", cells.len(), bad.join("; ")))
}

fn second_moment_bound(cells: &Result<Vec<OracleGridCell>, String>) -> Verdict {
    let cells = cells.as_ref().map_err(Clone::clone)?;
    let bad: Vec<String> = cells
        .iter()
        .filter(|c| c.second > 1.05 * c.second_bound)
        .map(|c| format!("{} gamma={:e} delta={:e}: {:.3e} > {:.3e}", c.point, c.gamma, c.delta, c.second, c.second_bound))
        .collect();
    let worst = cells.iter().map(|c| c.second / (1.05 * c.second_bound)).fold(0.0, f64::max);
    ensure(bad.is_empty(), format!("{} cells, worst moment/allowance={worst:.3} {}", cells.len(), bad.join("; ")))
}

// 8. Anti-gradient bias raises the error floor of ClipSGD and NSGD.
fn bias_error_floor() -> Verdict {
    const SEEDS: u64 = 8;
    let levels = ["0", "0.01", "0.1"].map(String::from);
    let mut details = Vec::new();
    let mut pass = true;
    for name in ["quadratic_biased_clip_sgd.toml", "quadratic_biased_nsgd.toml"] {
        let base = preset(name);
        let mut finals = vec![Vec::new(); levels.len()];
        for seed in 0..SEEDS {
            let mut cfg = base.clone();
            cfg.seed = seed;
            let summary = sweep(&cfg, "bias_level", &levels).map_err(|e| e.to_string())?;
            for (j, cell) in summary.cells.iter().enumerate() {
                finals[j].push(cell.result.as_ref().map_err(Clone::clone)?.final_subopt);
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let means: Vec<f64> = finals.iter().map(|v| mean(v)).collect();
        let m0 = means[0];
        let sd0 = (finals[0].iter().map(|v| (v - m0).powi(2)).sum::<f64>() / (SEEDS - 1) as f64).sqrt();
        let ok = means.windows(2).all(|w| w[1] - w[0] > 4.0 * sd0);
        pass &= ok;
        details.push(format!(
            "{}: means={:.2e}/{:.2e}/{:.2e} sd(zeta=0)={sd0:.2e}",
            base.algorithm, means[0], means[1], means[2]
        ));
    }
    ensure(pass, details.join("; "))
}

fn vec_strategy(max_dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, 1..=max_dim)
}

fn close(a: &Point, b: &Point, tol: f64) -> bool {
    a.sub(b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

// 9. Clip/normalize invariants, step-length laws, ClipSGD ≡ SGD when clipping is inactive.
fn operator_properties() -> Verdict {
    const CASES: u32 = 10_000;
    let mut runner = TestRunner::new(PropConfig { cases: CASES, failure_persistence: None, ..PropConfig::default() });
    let mut names = Vec::new();
    let mut check = |name: &str, result: Result<(), String>| -> Result<(), String> {
        names.push(name.to_string());
        result.map_err(|e| format!("{name}: {e}"))
    };

    check(
        "clip",
        runner
            .run(&(vec_strategy(12), 1e-6f64..1e3), |(g, c)| {
                let g = Vector::from_vec(g);
                let out = clip(&g, c);
                prop_assert!(out.norm() <= c * (1.0 + 1e-12) || out == g);
                prop_assert!(out.norm() <= g.norm() * (1.0 + 1e-12));
                prop_assert!(close(&clip(&out, c), &out, 1e-12));
                if g.norm() > 0.0 {
                    // Direction preserved: out = s·g with s ∈ (0, 1].
                    let s = out.dot(&g) / g.norm_squared();
                    prop_assert!(s > 0.0 && s <= 1.0 + 1e-12);
                    prop_assert!(close(&g.scale(s), &out, 1e-12));
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;

    check(
        "normalize",
        runner
            .run(&(vec_strategy(12), 1e-3f64..1e3), |(g, alpha)| {
                let g = Vector::from_vec(g);
                match normalize(&g) {
                    Ok(n) => {
                        prop_assert!((n.norm() - 1.0).abs() <= 1e-12);
                        prop_assert!(close(&normalize(&g.scale(alpha)).unwrap(), &n, 1e-12));
                        prop_assert!(close(&normalize(&n).unwrap(), &n, 1e-12));
                    }
                    Err(_) => prop_assert!(g.is_zero()),
                }
                let zero = Vector::zeros(g.dim());
                let s = apply_normalized(OptState::new(g.clone(), 0), &zero, alpha);
                prop_assert!(s.x == g && s.k == 1);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;

    check(
        "step-length",
        runner
            .run(&(vec_strategy(12), vec_strategy(12), 1e-4f64..10.0, 1e-4f64..10.0), |(x, g, eta, c)| {
                let d = x.len().min(g.len());
                let x = Vector::from_vec(x[..d].to_vec());
                let g = Vector::from_vec(g[..d].to_vec());
                let n = apply_normalized(OptState::new(x.clone(), 0), &g, eta);
                let moved = n.x.distance(&x);
                if g.is_zero() {
                    prop_assert!(moved == 0.0);
                } else {
                    prop_assert!((moved - eta).abs() <= 1e-9 * (1.0 + x.norm()));
                }
                let cl = apply_clipped(OptState::new(x.clone(), 0), &g, eta, c);
                let moved = cl.x.distance(&x);
                prop_assert!(moved <= eta * c.min(g.norm()) + 1e-9 * (1.0 + x.norm()));
                prop_assert!(n.k == 1 && cl.k == 1);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;

    check(
        "clip-sgd-equals-sgd",
        runner
            .run(&(1usize..6, 1usize..20, 1usize..4, any::<u64>(), 1e-3f64..0.5), |(dim, m, batch, seed, eta)| {
                let p = noisy_quadratic_problem::<f64>(dim, m, 1.0, seed).unwrap();
                let x0 = Vector::from_vec(vec![0.5; dim]);
                let plain = OptimizerParams::new(eta, batch, 5);
                let clipped = plain.clone().with_clip_radius(1e12);
                let mut a = OptState::new(x0.clone(), seed);
                let mut b = OptState::new(x0, seed);
                for _ in 0..5 {
                    a = sgd_step(a, &p, &plain, &BiasInjector::None);
                    b = clip_sgd_step(b, &p, &clipped, &BiasInjector::None);
                    prop_assert!(a.x == b.x);
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;
    Ok(format!("{} properties x {CASES} cases: {}", names.len(), names.join(", ")))
}

// 10. Finite differences, sphere moments, LIBSVM round trip.
fn gradient_and_format_checks() -> Verdict {
    let problems: Vec<Box<dyn Problem<f64>>> = vec![
        Box::new(quadratic_problem(4).unwrap()),
        Box::new(noisy_quadratic_problem::<f64>(5, 20, 1.0, 3).unwrap()),
        Box::new(power_norm_problem(3.0, 4).unwrap()),
        Box::new(power_norm_problem(4.0, 3).unwrap()),
        Box::new(exp_inner_problem(Vector::from_vec(vec![1.0, 0.5, -0.3])).unwrap()),
        Box::new(logistic_problem(bundled_dataset())),
    ];
    let mut rng = RngState::new(10, ANALYSIS_STREAM);
    let mut worst: f64 = 0.0;
    for p in &problems {
        for _ in 0..100 {
            let x = Vector::from_vec((0..p.dim()).map(|_| rng.standard_normal()).collect());
            let i = rng.index(p.num_samples());
            worst = worst.max(finite_diff_check(p.as_ref(), &x, i, 1e-6 * (1.0 + x.norm())));
        }
    }
    if worst > 1e-5 {
        return Err(format!("finite-difference relative error {worst:.3e} > 1e-5"));
    }

    // E[e] = 0 and E[eeᵀ] = I/d on the sphere in d = 3.
    const DRAWS: usize = 100_000;
    let d = 3;
    let draws: Vec<Point> = (0..DRAWS).map(|_| sample_unit_sphere(d, &mut rng)).collect();
    let mut worst_z: f64 = 0.0;
    let mut zscore = |f: &dyn Fn(&Point) -> f64, target: f64| {
        let vals: Vec<f64> = draws.iter().map(f).collect();
        let n = DRAWS as f64;
        let m = vals.iter().sum::<f64>() / n;
        let se = (vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
        worst_z = worst_z.max((m - target).abs() / se);
    };
    for i in 0..d {
        zscore(&|e: &Point| e[i], 0.0);
        for j in i..d {
            zscore(&|e: &Point| e[i] * e[j], if i == j { 1.0 / d as f64 } else { 0.0 });
        }
    }
    if worst_z > 5.0 {
        return Err(format!("sphere moment off by {worst_z:.2} SE"));
    }

    let opts = LibsvmOptions { dim: Some(BUNDLED_COLS), zero_as_negative: false };
    let parsed = parse_libsvm_str(bundled_libsvm_text(), opts).map_err(|e| e.to_string())?;
    let again = parse_libsvm_str(&write_libsvm(&parsed), opts).map_err(|e| e.to_string())?;
    if parsed != again || parsed.rows() != BUNDLED_ROWS || parsed.cols() != BUNDLED_COLS {
        return Err("bundled LIBSVM round trip changed the data".into());
    }
    let full = match std::env::var_os("GENSMOOTH_W1A") {
        Some(path) => {
            let w1a = parse_libsvm(Path::new(&path), LibsvmOptions::default()).map_err(|e| e.to_string())?;
            if (w1a.rows(), w1a.cols()) != (2477, 300) {
                return Err(format!("w1a parsed as {}x{}, expected 2477x300", w1a.rows(), w1a.cols()));
            }
            "w1a full file 2477x300".to_string()
        }
        None => "w1a full file NOT VERIFIED (GENSMOOTH_W1A unset)".to_string(),
    };
    Ok(format!(
        "fd max rel error={worst:.2e} (<= 1e-5), sphere max |z|={worst_z:.2} (<= 5), bundled round trip {}x{}, {full}",
        parsed.rows(),
        parsed.cols()
    ))
}

// 11. Repeated runs and sweeps reproduce bit for bit.
fn determinism() -> Verdict {
    let mut names: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    names.sort();
    for path in &names {
        let name = path.file_name().unwrap().to_string_lossy();
        let cfg = preset(&name);
        let a = run(&cfg).map_err(|e| format!("{name}: {e}"))?;
        let b = run(&cfg).map_err(|e| format!("{name}: {e}"))?;
        if deterministic_body(&a.csv) != deterministic_body(&b.csv) {
            return Err(format!("{name}: CSV bodies differ"));
        }
    }
    let base = preset("quadratic_biased_clip_sgd.toml");
    let values = ["0", "0.01", "0.1"].map(String::from);
    let s1 = sweep(&base, "bias_level", &values).map_err(|e| e.to_string())?;
    let s2 = sweep(&base, "bias_level", &values).map_err(|e| e.to_string())?;
    ensure(s1.to_csv() == s2.to_csv(), format!("{} presets run twice, sweep repeated", names.len()))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut failures = 0;
    let mut report = |id: usize, name: &str, verdict: Verdict, t: Instant| {
        let secs = t.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {id:>2} PASS  {name} [{secs:.1}s] {detail}"),
            Err(detail) => {
                failures += 1;
                println!("criterion {id:>2} FAIL  {name} [{secs:.1}s] {detail}");
            }
        }
    };
    let t = Instant::now();
    report(1, "step-strategy ordering", step_strategy_ordering(), t);
    let t = Instant::now();
    report(2, "linear-phase slope", linear_phase_slope(), t);
    let t = Instant::now();
    report(3, "clip-sgd two regimes", clip_two_regimes(), t);
    let t = Instant::now();
    report(4, "L0 = 0 linear rate", l0_zero_linear_rate(), t);
    let t = Instant::now();
    report(5, "zero-order estimator unbiased", estimator_unbiased(), t);
    let t = Instant::now();
    let grid = oracle_grid();
    report(6, "zero-order bias bound", bias_bound(&grid), t);
    let t = Instant::now();
    report(7, "zero-order second-moment bound", second_moment_bound(&grid), t);
    let t = Instant::now();
    report(8, "bias error-floor growth", bias_error_floor(), t);
    let t = Instant::now();
    report(9, "operator properties", operator_properties(), t);
    let t = Instant::now();
    report(10, "gradient and format checks", gradient_and_format_checks(), t);
    let t = Instant::now();
    report(11, "determinism", determinism(), t);
    println!("acceptance: {} of 11 passed in {:.1?}", 11 - failures, started.elapsed());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
