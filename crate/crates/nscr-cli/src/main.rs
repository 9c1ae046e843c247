//! `nscr` binary: dispatches the experiment subcommands.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use nscr_cli::commands::{
    cmd_benchmark, cmd_convergence, cmd_cv, cmd_sweep, cmd_time, ExperimentSpec,
};
use nscr_cli::config::Settings;

#[derive(Parser)]
#[command(
    name = "nscr",
    about = "Benchmark harness for non-negative sparse and collaborative coding classifiers",
    after_help = "Settings come from --config (key = value lines, # comments) and are \
                  overridden by trailing --key value pairs. NSCR_THREADS caps worker \
                  parallelism (0 = auto)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Settings file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Trailing `--key value` pairs overriding the file.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    overrides: Vec<String>,
}

impl RunArgs {
    fn settings(&self) -> Result<Settings> {
        Settings::from_sources(self.config.as_deref(), &self.overrides)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Repeated-trial accuracy benchmark (trials.csv, summary.csv,
    /// predictions.csv, trial_timing.csv).
    Benchmark(RunArgs),
    /// Held-out accuracy over the (alpha, beta) grid (sweep.csv).
    Sweep(RunArgs),
    /// Per-iteration residuals for one query (convergence.csv).
    Convergence(RunArgs),
    /// Per-query wall time for each coder (timing.csv).
    Time(RunArgs),
    /// Cross-validated grid search (heatmap.csv).
    Cv(RunArgs),
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<()> {
    init_thread_pool()?;
    let cli = Cli::parse();
    match &cli.command {
        Command::Benchmark(args) => {
            let settings = args.settings()?;
            let spec = ExperimentSpec::from_settings(&settings)?;
            let report = cmd_benchmark(&spec)?;
            for (key, value) in &report.config_echo {
                println!("config {key} = {value}");
            }
            println!("{}", report.summary_line());
            println!("artifacts in {}", spec.out_dir.display());
        }
        Command::Sweep(args) => {
            let settings = args.settings()?;
            let spec = ExperimentSpec::from_settings(&settings)?;
            let rows = cmd_sweep(&spec)?;
            let best = rows
                .iter()
                .max_by(|a, b| a.mean_accuracy.total_cmp(&b.mean_accuracy))
                .expect("grid is never empty");
            println!(
                "sweep: {} cells, best {:.1}% at alpha={}, beta={}",
                rows.len(),
                best.mean_accuracy,
                best.alpha,
                best.beta
            );
            println!("artifacts in {}", spec.out_dir.display());
        }
        Command::Convergence(args) => {
            let settings = args.settings()?;
            let spec = ExperimentSpec::from_settings(&settings)?;
            let query_index = settings.parsed_or("query_index", 0usize)?;
            let result = cmd_convergence(&spec, query_index)?;
            println!(
                "convergence: {} iterations, converged = {}, final zc_gap = {:.3e}",
                result.iterations,
                result.converged,
                result.zc_gap.last().copied().unwrap_or(f64::NAN)
            );
            println!("artifacts in {}", spec.out_dir.display());
        }
        Command::Time(args) => {
            let settings = args.settings()?;
            let spec = ExperimentSpec::from_settings(&settings)?;
            let coders = settings
                .comma_list("coders")
                .unwrap_or_else(|| ["nscr", "crc", "nrc", "src"].map(String::from).to_vec());
            let include_precompute = settings.flag("include_precompute", false)?;
            let rows = cmd_time(&spec, &coders, include_precompute)?;
            for row in &rows {
                println!(
                    "time: {} {:.3e} s/query over {} queries, accuracy {:.1}%",
                    row.coder, row.mean_query_seconds, row.queries, row.accuracy_percent
                );
            }
            println!("artifacts in {}", spec.out_dir.display());
        }
        Command::Cv(args) => {
            let settings = args.settings()?;
            let spec = ExperimentSpec::from_settings(&settings)?;
            let report = cmd_cv(&spec)?;
            println!(
                "cv: best alpha={}, beta={} at {:.1}%",
                report.best.0,
                report.best.1,
                report.best_accuracy() * 100.0
            );
            println!("artifacts in {}", spec.out_dir.display());
        }
    }
    Ok(())
}

/// Applies the NSCR_THREADS cap before any parallel work starts.
/// 0 or unset leaves the worker count automatic.
#[cfg(feature = "parallel")]
fn init_thread_pool() -> Result<()> {
    match std::env::var("NSCR_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let threads: usize = raw
                .parse()
                .map_err(|err| anyhow::anyhow!("NSCR_THREADS={raw:?}: {err}"))?;
            if threads == 0 {
                return Ok(());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .map_err(Into::into)
        }
    }
}

/// Without the parallel feature all work is sequential; the cap is moot.
#[cfg(not(feature = "parallel"))]
fn init_thread_pool() -> Result<()> {
    Ok(())
}
