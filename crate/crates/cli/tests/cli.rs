use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gensmooth(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gensmooth")).args(args).current_dir(cwd).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const QUADRATIC: &str = r#"
problem = "noisy-quadratic"
dim = 3
samples = 20
noise_scale = 0.1
problem_seed = 2
algorithm = "clip-sgd"
clip_radius = 1.0
step_rule = "explicit"
step = 0.05
batch = 2
iterations = 60
log_every = 5
seed = 4
x0 = [1.0, 1.0, 1.0]
"#;

#[test]
fn run_writes_a_trajectory_and_stdout_matches_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "q.toml", QUADRATIC);
    let cfg = cfg.to_str().unwrap();

    let o = gensmooth(&["run", cfg, "-o", "traj.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let file = fs::read_to_string(dir.path().join("traj.csv")).unwrap();
    assert!(file.lines().any(|l| l.starts_with("# algorithm = ")));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k=60"));

    let o = gensmooth(&["run", cfg, "-o", "-"], dir.path());
    assert_eq!(code(&o), 0);
    let deterministic = |s: &str| -> Vec<String> {
        // Wall-clock fields are the only nondeterministic content.
        s.lines().filter(|l| !l.contains("elapsed") && !l.starts_with('#')).map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f.pop();
            f.join(",")
        }).collect()
    };
    assert_eq!(deterministic(&String::from_utf8_lossy(&o.stdout)), deterministic(&file));
}

#[test]
fn exit_codes_follow_error_kinds() {
    let dir = tempfile::tempdir().unwrap();

    let bad = write(dir.path(), "bad.toml", &QUADRATIC.replace("step = 0.05", "step = -1.0"));
    assert_eq!(code(&gensmooth(&["run", bad.to_str().unwrap()], dir.path())), 2);

    assert_eq!(code(&gensmooth(&["run", "missing.toml"], dir.path())), 4);

    write(dir.path(), "labels.libsvm", "1 1:0.5\n3 2:1.0\n");
    let cfg = write(
        dir.path(),
        "l.toml",
        "problem = \"logistic\"\ndataset = \"labels.libsvm\"\nalgorithm = \"nsgd\"\nstep_rule = \"explicit\"\nstep = 0.1\niterations = 5\n",
    );
    assert_eq!(code(&gensmooth(&["run", cfg.to_str().unwrap()], dir.path())), 5);

    let diverge = write(
        dir.path(),
        "d.toml",
        "problem = \"quadratic\"\ndim = 2\nalgorithm = \"gd\"\nstep_rule = \"explicit\"\nstep = 3.0\niterations = 10000\nx0 = [1.0, 1.0]\n",
    );
    assert_eq!(code(&gensmooth(&["run", diverge.to_str().unwrap(), "-o", "d.csv"], dir.path())), 3);
    assert!(dir.path().join("d.csv").exists());
}

#[test]
fn sweep_then_plot() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{QUADRATIC}output = \"{}\"\n", dir.path().join("s.csv").display());
    let cfg = write(dir.path(), "s.toml", &text);
    let o = gensmooth(
        &["sweep", cfg.to_str().unwrap(), "--axis", "clip_radius", "--values", "0.1,1,10", "--summary", "sum.csv"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(dir.path().join("sum.csv")).unwrap();
    assert_eq!(summary.lines().filter(|l| !l.starts_with('#')).count(), 4, "{summary}");

    let cells: Vec<String> =
        (0..3).map(|i| dir.path().join(format!("s.clip_radius-{i}.csv")).to_string_lossy().into_owned()).collect();
    let mut args = vec!["plot", "--mode", "gradnorm-vs-iter"];
    args.extend(cells.iter().map(String::as_str));
    let o = gensmooth(&args, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = String::from_utf8_lossy(&o.stdout).lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 3 * 13);

    assert_eq!(code(&gensmooth(&["plot", "--mode", "nonsense", &cells[0]], dir.path())), 2);
}

#[test]
fn dataset_convert_round_trips_the_bundled_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = gensmooth(&["dataset", "convert", "bundled", "--to", "libsvm", "-o", "b.libsvm"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = gensmooth(&["dataset", "convert", "b.libsvm", "--to", "libsvm"], dir.path());
    assert_eq!(String::from_utf8_lossy(&o.stdout), fs::read_to_string(dir.path().join("b.libsvm")).unwrap());
    let o = gensmooth(&["dataset", "convert", "b.libsvm"], dir.path());
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 201);
    assert_eq!(code(&gensmooth(&["dataset", "fetch", "no-such-set"], dir.path())), 2);
}

#[test]
fn estimate_smoothness_reports_the_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "q.toml",
        "problem = \"quadratic\"\ndim = 3\nalgorithm = \"gd\"\nstep_rule = \"explicit\"\nstep = 0.5\niterations = 20\nx0 = [1.0, 2.0, 3.0]\n",
    );
    let o = gensmooth(&["estimate-smoothness", cfg.to_str().unwrap(), "--anchors", "5", "--pairs", "10"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout).into_owned();
    let l0: f64 = text.lines().find_map(|l| l.strip_prefix("l0_hat = ")).unwrap().parse().unwrap();
    assert!((l0 - 1.0).abs() < 0.05, "{text}");
    assert!(text.contains("m_hat = "));
}
