use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gensmooth::harness::dataset;
use gensmooth::harness::runner::load_dataset;
use gensmooth::harness::{
    check_oracle, emit_plot_data, estimate_smoothness, run, sweep, write_libsvm, OracleCheckOptions, PlotMode, RunConfig,
    SmoothnessOptions,
};
use gensmooth::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "gensmooth", version, about = "Clipped/normalized SGD experiments under (L0,L1)-smoothness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one configuration and write its trajectory CSV.
    Run {
        config: PathBuf,
        /// Overrides `output`; `-` writes to stdout.
        #[arg(long, short)]
        output: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a configuration once per value of one key, in parallel.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        axis: String,
        /// Comma-separated values; array values are separated by `;`.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        /// Summary CSV path (stdout when absent).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Fit (L0, L1) on pairs around the iterates of a run.
    EstimateSmoothness {
        config: PathBuf,
        #[arg(long, default_value_t = 40)]
        anchors: usize,
        #[arg(long, default_value_t = 50)]
        pairs: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Finite-difference, estimator bias and second-moment checks.
    CheckOracle {
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        /// Smoothing radius when the config has none.
        #[arg(long, default_value_t = 1e-3)]
        smoothing: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fetch or convert datasets.
    Dataset {
        #[command(subcommand)]
        action: DatasetAction,
    },
    /// Long-format plot data from trajectory CSVs.
    Plot {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value = "subopt-vs-iter")]
        mode: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum DatasetAction {
    /// Download a known dataset.
    Fetch {
        name: String,
        #[arg(long)]
        dest: Option<PathBuf>,
        /// Expected SHA-256 of the file.
        #[arg(long)]
        sha256: Option<String>,
    },
    /// Convert a LIBSVM file (or `bundled`) to another text format.
    Convert {
        name: String,
        #[arg(long, value_enum, default_value_t = Format::DenseCsv)]
        to: Format,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        zero_as_negative: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    DenseCsv,
    Libsvm,
}

fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_error(p, e)),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| io_error(Path::new("<stdout>"), e)),
    }
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, output, seed } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let to_stdout = match output.as_deref() {
                Some("-") => {
                    cfg.output = None;
                    true
                }
                Some(path) => {
                    cfg.output = Some(path.to_string());
                    false
                }
                None => cfg.output.is_none(),
            };
            let out = run(&cfg)?;
            if to_stdout {
                emit(&out.csv, None)?;
            }
            let last = out.records.last().expect("runs log at least one record");
            eprintln!(
                "{} k={} f={:.10e} subopt={:.6e} grad_norm={:.6e} step={:.6e}",
                cfg.algorithm, last.k, last.f_value, last.subopt, last.grad_norm, out.step
            );
            Ok(())
        }
        Command::Sweep { config, axis, values, summary } => {
            let cfg = RunConfig::load(&config)?;
            let result = sweep(&cfg, &axis, &values)?;
            emit(&result.to_csv(), summary.as_deref())?;
            let failed = result.cells.iter().filter(|c| c.result.is_err()).count();
            if failed > 0 {
                eprintln!("{failed} of {} sweep cells failed", result.cells.len());
            }
            Ok(())
        }
        Command::EstimateSmoothness { config, anchors, pairs, radius, seed } => {
            let cfg = RunConfig::load(&config)?;
            let opts = SmoothnessOptions { anchors, pairs_per_anchor: pairs, radius, seed };
            emit(&estimate_smoothness(&cfg, &opts)?.to_text(), None)
        }
        Command::CheckOracle { config, points, trials, smoothing, radius, seed } => {
            let cfg = RunConfig::load(&config)?;
            let opts = OracleCheckOptions {
                points,
                trials,
                smoothing,
                seed,
                smoothness: SmoothnessOptions { radius, seed, ..Default::default() },
                ..Default::default()
            };
            let report = check_oracle(&cfg, &opts)?;
            let mut text = report.to_text();
            text.push_str(&format!("fd_ok = {}\n", report.fd_max_error <= 1e-5));
            text.push_str(&format!("bias_ok = {}\n", report.bias_within_bound(1.05)));
            text.push_str(&format!("second_moment_ok = {}\n", report.second_moment_within_bound(1.05)));
            emit(&text, None)
        }
        Command::Dataset { action: DatasetAction::Fetch { name, dest, sha256 } } => {
            let known = dataset::known_dataset(&name)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown dataset {name:?}")))?;
            let dest = dest.unwrap_or_else(|| PathBuf::from(known.name));
            let pinned = sha256.as_deref().or(known.sha256);
            let digest = dataset::fetch_dataset(known.url, &dest, pinned)?;
            println!("{} sha256 = {digest}", dest.display());
            Ok(())
        }
        Command::Dataset { action: DatasetAction::Convert { name, to, output, dim, zero_as_negative } } => {
            let data = load_dataset(&name, dim, zero_as_negative)?;
            let text = match to {
                Format::DenseCsv => dataset::to_dense_csv(&data),
                Format::Libsvm => write_libsvm(&data),
            };
            emit(&text, output.as_deref())?;
            eprintln!("{} rows, {} features", data.rows(), data.cols());
            Ok(())
        }
        Command::Plot { files, mode, output } => {
            let mode: PlotMode = mode.parse()?;
            emit(&emit_plot_data(&files, mode)?, output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
