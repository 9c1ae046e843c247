//! Held-out accuracy over the full (α, β) grid, one Gram factorization per
//! (trial, α).

use std::fs;

use anyhow::{Context, Result};
use nscr::classifier::{batch_accuracy, fit_model, CoderKind};

use super::{load_dataset, prepare_trial, trial_seed, ExperimentSpec};

/// One grid cell of the sweep surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    /// Mean holdout accuracy over the trials, percent.
    pub mean_accuracy: f64,
}

/// Evaluates the non-negative coder on every grid cell with the same
/// seed-derived trials as `cmd_benchmark`, writing `sweep.csv`.
pub fn cmd_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRow>> {
    spec.grid.validate()?;
    let data = load_dataset(&spec.dataset)?;
    fs::create_dir_all(&spec.out_dir)
        .with_context(|| format!("creating {}", spec.out_dir.display()))?;

    let alphas = &spec.grid.alphas;
    let betas = &spec.grid.betas;
    let mut sums = vec![vec![0.0f64; betas.len()]; alphas.len()];

    for trial in 0..spec.trials {
        let mut run = || -> Result<()> {
            let seed = trial_seed(spec.seed, trial);
            let (train, holdout) = prepare_trial(&data, spec, seed)?;
            for (ai, &alpha) in alphas.iter().enumerate() {
                let model = fit_model(
                    &train,
                    CoderKind::Nscr(spec.base.with_weights(alpha, betas[0])),
                )?;
                for (bi, &beta) in betas.iter().enumerate() {
                    let cell =
                        model.with_coder(CoderKind::Nscr(spec.base.with_weights(alpha, beta)))?;
                    let results = cell.classify_batch(&holdout)?;
                    sums[ai][bi] += batch_accuracy(&results, &holdout)? * 100.0;
                }
            }
            Ok(())
        };
        run().with_context(|| format!("trial {}", trial + 1))?;
    }

    let mut rows = Vec::with_capacity(alphas.len() * betas.len());
    for (ai, &alpha) in alphas.iter().enumerate() {
        for (bi, &beta) in betas.iter().enumerate() {
            rows.push(SweepRow {
                alpha,
                beta,
                mean_accuracy: sums[ai][bi] / spec.trials as f64,
            });
        }
    }

    let mut writer = csv::Writer::from_path(spec.out_dir.join("sweep.csv"))?;
    writer.write_record(["alpha", "beta", "mean_accuracy"])?;
    for row in &rows {
        writer.write_record([
            row.alpha.to_string(),
            row.beta.to_string(),
            row.mean_accuracy.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(rows)
}
