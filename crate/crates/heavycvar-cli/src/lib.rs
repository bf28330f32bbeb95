//! Command-line benchmark harness for robust CVaR estimation and learning.
//!
//! Subcommands: `estimate` (one-shot CVaR from a numeric file),
//! `bench-pointwise`, `bench-learning`, and `plot`. Exit codes: 0 success,
//! 2 usage error, 1 runtime error.

pub mod config;
pub mod error;
pub mod learning;
pub mod meta;
pub mod pointwise;
pub mod rows;
pub mod summarize;
pub mod svg;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use heavycvar::cvar::{cvar_r_trunc, cvar_robust, RiskLevel};
use heavycvar::robust_mean::{mom_blocks_conservative, RMeanSpec};
use heavycvar::Sample;

use config::{check_alpha, check_delta, BenchConfig, Preset};
use error::CliError;
use svg::PlotKind;

/// Run `f` inside a thread pool capped by the HEAVYCVAR_THREADS variable;
/// with the variable unset the global pool is used as-is. Output bytes never
/// depend on the pool size.
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let cap = std::env::var("HEAVYCVAR_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1);
    match cap {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "heavycvar",
    version,
    about = "Robust CVaR estimation and learning benchmarks",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct BenchArgs {
    /// Trials per experimental setting.
    #[arg(long)]
    trials: Option<usize>,
    /// Base seed; every trial derives its own seed from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Restrict the risk-level grid to a single value.
    #[arg(long)]
    alpha: Option<f64>,
    /// Restrict the sample-size grid (pointwise) or set the training size
    /// (learning).
    #[arg(long)]
    n: Option<usize>,
    /// Confidence parameter shared by the robust methods.
    #[arg(long)]
    delta: Option<f64>,
    /// key=value configuration file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scale preset: desk (default) or paper.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One-shot CVaR estimate from a whitespace/comma separated numeric file
    /// (the sample is used as both halves of the split estimator).
    Estimate {
        /// Estimator: empirical | mom | catoni | cat-12 | lm | hol | r-trunc.
        #[arg(long)]
        method: String,
        /// Risk level in (0,1).
        #[arg(long)]
        alpha: f64,
        /// Confidence parameter in (0,1) for the robust methods.
        #[arg(long, default_value_t = 0.02)]
        delta: f64,
        /// Input file of loss values.
        file: PathBuf,
    },
    /// Pointwise estimation benchmark (deviation from analytic CVaR).
    BenchPointwise(BenchArgs),
    /// Learning benchmark (excess CVaR risk over a gradient budget).
    BenchLearning(BenchArgs),
    /// Render SVG plots from a benchmark CSV.
    Plot {
        /// deviation-vs-n | deviation-vs-alpha | risk-vs-budget.
        #[arg(long)]
        kind: String,
        /// Output directory (defaults to the CSV's directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Benchmark CSV produced by bench-pointwise or bench-learning.
        csv: PathBuf,
    },
}

/// Parse and execute; returns the process exit code. Output goes to the
/// supplied writers so tests can capture it.
pub fn cli_entry(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    2
                }
            };
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Estimate {
            method,
            alpha,
            delta,
            file,
        } => {
            let value = estimate_file(&method, alpha, delta, &file)?;
            writeln!(stdout, "{value}").map_err(|e| CliError::runtime(e.to_string()))?;
            Ok(())
        }
        Command::BenchPointwise(args) => {
            let cfg = resolve_config(&args, true)?;
            let artifacts = pointwise::run_pointwise(&cfg)?;
            writeln!(
                stdout,
                "wrote {} ({} rows) and {}",
                artifacts.csv.display(),
                artifacts.rows,
                artifacts.sidecar.display()
            )
            .map_err(|e| CliError::runtime(e.to_string()))?;
            Ok(())
        }
        Command::BenchLearning(args) => {
            let cfg = resolve_config(&args, false)?;
            let artifacts = learning::run_learning(&cfg)?;
            writeln!(
                stdout,
                "wrote {} ({} rows) and {}",
                artifacts.csv.display(),
                artifacts.rows,
                artifacts.sidecar.display()
            )
            .map_err(|e| CliError::runtime(e.to_string()))?;
            Ok(())
        }
        Command::Plot { kind, out, csv } => {
            let kind = PlotKind::parse(&kind)?;
            let written = svg::plot(&csv, kind, out.as_deref())?;
            for path in written {
                writeln!(stdout, "wrote {}", path.display())
                    .map_err(|e| CliError::runtime(e.to_string()))?;
            }
            Ok(())
        }
    }
}

fn resolve_config(args: &BenchArgs, pointwise: bool) -> Result<BenchConfig, CliError> {
    let preset = match &args.preset {
        Some(p) => match p.as_str() {
            "desk" => Preset::Desk,
            "paper" => Preset::Paper,
            other => {
                return Err(CliError::usage(format!(
                    "unknown preset {other:?} (expected desk or paper)"
                )))
            }
        },
        None => Preset::Desk,
    };
    let mut cfg = BenchConfig::preset(preset);
    if let Some(path) = &args.config {
        cfg.apply_file(path)?;
    }
    if let Some(t) = args.trials {
        cfg.trials_pointwise = t;
        cfg.trials_learning = t;
    }
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    if let Some(a) = args.alpha {
        check_alpha(a)?;
        if pointwise {
            cfg.alpha_grid = vec![a];
        } else {
            cfg.alpha_learning = a;
        }
    }
    if let Some(n) = args.n {
        if pointwise {
            cfg.n_grid = vec![n];
        } else {
            cfg.n_learning = n;
        }
    }
    if let Some(d) = args.delta {
        check_delta(d)?;
        cfg.delta = d;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parse a numeric file and estimate CVaR with the named method, passing the
/// sample as both halves of the split estimator.
pub fn estimate_file(method: &str, alpha: f64, delta: f64, file: &Path) -> Result<f64, CliError> {
    check_alpha(alpha)?;
    check_delta(delta)?;
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", file.display())))?;
    let mut values = Vec::new();
    for token in text.split(|c: char| c.is_whitespace() || c == ',') {
        if token.is_empty() {
            continue;
        }
        let v: f64 = token
            .parse()
            .map_err(|_| CliError::runtime(format!("bad numeric value {token:?}")))?;
        values.push(v);
    }
    let sample = Sample::new(values)?;
    let level = RiskLevel::new(alpha).map_err(|e| CliError::usage(e.to_string()))?;
    let rmean = match method {
        "empirical" => RMeanSpec::Empirical,
        "mom" => RMeanSpec::mom(mom_blocks_conservative(delta).min(sample.len())),
        "catoni" | "cat-12" => RMeanSpec::catoni_auto(delta),
        "lm" => RMeanSpec::TruncatedMean { delta },
        "hol" => RMeanSpec::soft_truncated_auto(delta),
        "r-trunc" => {
            return Ok(cvar_r_trunc(&sample, &sample, level, delta)?);
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown method {other:?} (expected empirical, mom, catoni, cat-12, lm, hol or r-trunc)"
            )))
        }
    };
    Ok(cvar_robust(&sample, &sample, level, &rmean)?.chat)
}
