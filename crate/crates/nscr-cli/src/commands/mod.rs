//! The experiment commands, plus the spec type and pipeline steps they
//! share: dataset loading, seed-derived trial splits, and optional PCA.

mod benchmark;
mod convergence;
mod cv;
mod sweep;
mod time;

pub use benchmark::{cmd_benchmark, BenchmarkReport};
pub use convergence::cmd_convergence;
pub use cv::cmd_cv;
pub use sweep::{cmd_sweep, SweepRow};
pub use time::{cmd_time, TimingRow};

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nscr::classifier::CoderKind;
use nscr::data::io::{load_binary_dataset, load_csv_dataset};
use nscr::data::pca::fit_pca;
use nscr::data::split::{split_half_per_class, subsample_per_class};
use nscr::data::SampleMatrix;
use nscr::model_selection::{preset, CvGrid};
use nscr::solver::SolverConfig;

use crate::config::Settings;

/// A fully resolved experiment: dataset, coder, pipeline options, and the
/// verbatim settings it was built from.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    /// Dataset file; `.csv` extension selects the CSV reader, anything else
    /// the binary reader.
    pub dataset: PathBuf,
    /// Directory all artifacts are written into (created if missing).
    pub out_dir: PathBuf,
    /// The coder under test.
    pub coder: CoderKind,
    /// Iteration settings shared by every splitting-based coder, carrying
    /// the resolved (α, β).
    pub base: SolverConfig,
    /// Ridge/lasso weight for the baseline coders.
    pub lambda: f64,
    /// Whether to cross-validate (α, β) on each trial's training half.
    pub cross_validate: bool,
    /// Grid for cross-validation and sweeps.
    pub grid: CvGrid,
    /// Project to this dimension with train-fitted PCA before coding.
    pub pca_dim: Option<usize>,
    /// Per-class training subsample size; the rest becomes the holdout.
    /// Without it, every class is split in half.
    pub n_per_class: Option<usize>,
    /// Independent repetitions, each with a seed-derived split.
    pub trials: usize,
    /// Master seed; every random choice derives from it.
    pub seed: u64,
    /// The settings this spec was resolved from, for reproducibility echoes.
    pub echo: Vec<(String, String)>,
}

impl ExperimentSpec {
    /// Resolves settings into a spec, applying preset weights and defaults.
    pub fn from_settings(settings: &Settings) -> Result<Self> {
        let dataset = PathBuf::from(settings.require("dataset")?);
        let out_dir = PathBuf::from(settings.get("out_dir").unwrap_or("."));

        let preset_weights = match settings.get("preset") {
            Some(name) => Some(preset(name)?),
            None => None,
        };
        let (preset_alpha, preset_beta) = preset_weights.unzip();
        let alpha = settings.parsed("alpha")?.or(preset_alpha).unwrap_or(0.01);
        let beta = settings.parsed("beta")?.or(preset_beta).unwrap_or(0.01);
        let base = SolverConfig {
            alpha,
            beta,
            rho: settings.parsed_or("rho", 10.0)?,
            tol: settings.parsed_or("tol", 1e-3)?,
            max_iter: settings.parsed_or("max_iter", 20usize)?,
        };
        let lambda = settings.parsed_or("lambda", 0.001)?;

        let coder_name = settings.get("coder").unwrap_or("nscr");
        let coder = coder_by_name(coder_name, &base, lambda)?;

        let cross_validate = settings.flag("cv", false)?;
        if cross_validate && !matches!(coder, CoderKind::Nscr(_)) {
            bail!("cv = true tunes (alpha, beta) and applies to the nscr coder only");
        }

        let default_grid = CvGrid::default();
        let grid = CvGrid {
            alphas: settings
                .number_list("grid_alphas")?
                .unwrap_or(default_grid.alphas),
            betas: settings
                .number_list("grid_betas")?
                .unwrap_or(default_grid.betas),
            folds: settings.parsed_or("folds", default_grid.folds)?,
        };

        let trials = settings.parsed_or("trials", 10usize)?;
        if trials == 0 {
            bail!("trials must be at least 1");
        }

        Ok(Self {
            dataset,
            out_dir,
            coder,
            base,
            lambda,
            cross_validate,
            grid,
            pca_dim: settings.parsed("pca_dim")?,
            n_per_class: settings.parsed("n_per_class")?,
            trials,
            seed: settings.parsed_or("seed", 0u64)?,
            echo: settings.echo(),
        })
    }
}

/// Maps a coder name to its kind, with the spec's iteration settings.
pub fn coder_by_name(name: &str, base: &SolverConfig, lambda: f64) -> Result<CoderKind> {
    match name {
        "nscr" => Ok(CoderKind::Nscr(base.clone())),
        "crc" => Ok(CoderKind::Crc { lambda }),
        "nrc" => Ok(CoderKind::Nrc(base.with_weights(0.0, 0.0))),
        "src" => Ok(CoderKind::Src {
            lambda,
            config: base.clone(),
        }),
        other => bail!("unknown coder {other:?}; expected nscr, crc, nrc, or src"),
    }
}

/// Loads a dataset by extension: `.csv` as labeled text, else binary.
pub fn load_dataset(path: &Path) -> Result<SampleMatrix> {
    let is_csv = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("csv"));
    let (matrix, _labels) = if is_csv {
        load_csv_dataset(path)
    } else {
        load_binary_dataset(path)
    }
    .with_context(|| format!("loading dataset {}", path.display()))?;
    Ok(matrix)
}

/// The per-trial seed: decorrelates trials while staying a pure function of
/// the master seed and the trial number.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(trial as u64 + 1)
}

/// One trial's data pipeline: seed-derived train/holdout split, then
/// optional PCA fitted on the training half only.
pub fn prepare_trial(
    data: &SampleMatrix,
    spec: &ExperimentSpec,
    seed: u64,
) -> Result<(SampleMatrix, SampleMatrix)> {
    let (train, holdout) = match spec.n_per_class {
        Some(n) => {
            let (train, holdout) = subsample_per_class(data, n, seed)?;
            let holdout =
                holdout.context("n_per_class consumed every sample; nothing left to classify")?;
            (train, holdout)
        }
        None => split_half_per_class(data, seed)?,
    };
    match spec.pca_dim {
        Some(d) => {
            let pca = fit_pca(&train, d)?;
            Ok((pca.project_matrix(&train)?, pca.project_matrix(&holdout)?))
        }
        None => Ok((train, holdout)),
    }
}

/// Sample standard deviation; zero for a single observation.
pub fn sample_std(values: &[f64], mean: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let sum_sq: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (sum_sq / (values.len() - 1) as f64).sqrt()
}
