//! Stratified k-fold cross-validation over the (α, β) grid, plus the
//! per-dataset preset registry of tuned weight pairs.
//!
//! The grid search fits one model per (fold, α) and swaps β in and out of
//! that model, reusing its Gram factorization, since β never enters the
//! factored matrix.

use std::path::Path;

use crate::classifier::{batch_accuracy, fit_model, CoderKind};
use crate::data::split::shuffled_class_indices;
use crate::data::SampleMatrix;
use crate::error::Error;
use crate::solver::SolverConfig;
use crate::Result;

/// Tuned (α, β) pairs by dataset name.
const PRESETS: &[(&str, f64, f64)] = &[
    ("aircraft", 0.05, 0.05),
    ("ar", 0.01, 0.01),
    ("caltech256", 0.01, 0.05),
    ("cars", 0.05, 0.01),
    ("cub", 0.1, 0.01),
    ("extended_yale_b", 0.05, 0.01),
    ("flowers", 0.01, 0.1),
    ("mnist", 0.05, 0.05),
    ("stanford40", 0.05, 0.1),
    ("usps", 0.01, 0.05),
];

/// The tuned (α, β) pair for a named dataset.
pub fn preset(dataset_name: &str) -> Result<(f64, f64)> {
    PRESETS
        .iter()
        .find(|(name, _, _)| *name == dataset_name)
        .map(|&(_, alpha, beta)| (alpha, beta))
        .ok_or_else(|| Error::UnknownPreset {
            name: dataset_name.to_string(),
            available: preset_names().iter().map(|s| s.to_string()).collect(),
        })
}

/// All dataset names with a preset, sorted.
pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(name, _, _)| *name).collect()
}

/// Search space of the cross-validated grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct CvGrid {
    /// Candidate ℓ2 weights, strictly increasing, ≥ 0.
    pub alphas: Vec<f64>,
    /// Candidate ℓ1 weights, strictly increasing, ≥ 0.
    pub betas: Vec<f64>,
    /// Fold count, ≥ 2 and at most the smallest class size.
    pub folds: usize,
}

impl Default for CvGrid {
    /// 5-fold search over {0.001, 0.01, 0.05, 0.1, 0.5} for both weights,
    /// spanning every preset value.
    fn default() -> Self {
        let values = vec![0.001, 0.01, 0.05, 0.1, 0.5];
        Self {
            alphas: values.clone(),
            betas: values,
            folds: 5,
        }
    }
}

impl CvGrid {
    /// Checks both lists are nonempty, finite, nonnegative, and strictly
    /// increasing, and folds ≥ 2.
    pub fn validate(&self) -> Result<()> {
        let sorted = |values: &[f64]| {
            !values.is_empty()
                && values.iter().all(|v| v.is_finite() && *v >= 0.0)
                && values.windows(2).all(|w| w[0] < w[1])
        };
        if sorted(&self.alphas) && sorted(&self.betas) && self.folds >= 2 {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("{self:?}")))
        }
    }
}

/// Accuracy surface of one grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    /// Grid α values, as searched.
    pub alphas: Vec<f64>,
    /// Grid β values, as searched.
    pub betas: Vec<f64>,
    /// Mean fold accuracy in [0, 1], indexed `[alpha index][beta index]`.
    pub accuracy: Vec<Vec<f64>>,
    /// Raw per-fold accuracies, indexed `[alpha index][beta index][fold]`.
    pub per_fold: Vec<Vec<Vec<f64>>>,
    /// The (α, β) pair attaining the best mean accuracy; ties resolve to the
    /// smaller α, then the smaller β.
    pub best: (f64, f64),
}

impl CvReport {
    /// Best mean accuracy attained on the grid.
    pub fn best_accuracy(&self) -> f64 {
        self.accuracy
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Writes heatmap rows `alpha,beta,mean_accuracy` in grid order, with
    /// accuracy in percent to match every other report artifact.
    pub fn write_heatmap_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut writer = csv::Writer::from_path(path.as_ref())?;
        writer.write_record(["alpha", "beta", "mean_accuracy"])?;
        for (ai, alpha) in self.alphas.iter().enumerate() {
            for (bi, beta) in self.betas.iter().enumerate() {
                writer.write_record([
                    alpha.to_string(),
                    beta.to_string(),
                    (self.accuracy[ai][bi] * 100.0).to_string(),
                ])?;
            }
        }
        writer.flush()?;
        Ok(())
    }
}

/// Splits every class across `folds` validation sets as evenly as possible
/// (per-class counts differ by at most 1); returns per-fold
/// (fit indices, validate indices), both sorted, disjoint, and exhaustive.
pub fn stratified_kfold(
    train: &SampleMatrix,
    folds: usize,
    seed: u64,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let min_class = train.partition().min_class_size();
    if folds < 2 || folds > min_class {
        return Err(Error::TooManyFolds { folds, min_class });
    }

    let mut validate_sets: Vec<Vec<usize>> = vec![Vec::new(); folds];
    for class_indices in shuffled_class_indices(train, seed) {
        for (i, &column) in class_indices.iter().enumerate() {
            validate_sets[i % folds].push(column);
        }
    }

    let mut splits = Vec::with_capacity(folds);
    for validate in &mut validate_sets {
        validate.sort_unstable();
        let fit = (0..train.len())
            .filter(|j| validate.binary_search(j).is_err())
            .collect();
        splits.push((fit, validate.clone()));
    }
    Ok(splits)
}

/// Cross-validates the non-negative coder over the (α, β) grid.
///
/// For every (α, β): fit on each fold complement, classify the fold, record
/// accuracy. `base` supplies the iteration settings (ρ, tol, max_iter).
pub fn grid_search(
    train: &SampleMatrix,
    grid: &CvGrid,
    base: &SolverConfig,
    seed: u64,
) -> Result<CvReport> {
    grid.validate()?;
    base.validate()?;
    let splits = stratified_kfold(train, grid.folds, seed)?;

    let mut per_fold = vec![vec![vec![0.0; grid.folds]; grid.betas.len()]; grid.alphas.len()];
    for (fold, (fit_idx, validate_idx)) in splits.iter().enumerate() {
        let fit = train.select_columns(fit_idx)?;
        let validate = train.select_columns(validate_idx)?;
        for (ai, &alpha) in grid.alphas.iter().enumerate() {
            let model = fit_model(
                &fit,
                CoderKind::Nscr(base.with_weights(alpha, grid.betas[0])),
            )?;
            for (bi, &beta) in grid.betas.iter().enumerate() {
                let swapped = model.with_coder(CoderKind::Nscr(base.with_weights(alpha, beta)))?;
                let results = swapped.classify_batch(&validate)?;
                per_fold[ai][bi][fold] = batch_accuracy(&results, &validate)?;
            }
        }
    }

    let mut accuracy = vec![vec![0.0; grid.betas.len()]; grid.alphas.len()];
    let mut best = (grid.alphas[0], grid.betas[0]);
    let mut best_mean = f64::NEG_INFINITY;
    for ai in 0..grid.alphas.len() {
        for bi in 0..grid.betas.len() {
            let mean = per_fold[ai][bi].iter().sum::<f64>() / grid.folds as f64;
            accuracy[ai][bi] = mean;
            // Strict inequality keeps the first (smallest α, then β) on ties.
            if mean > best_mean {
                best_mean = mean;
                best = (grid.alphas[ai], grid.betas[bi]);
            }
        }
    }

    Ok(CvReport {
        alphas: grid.alphas.clone(),
        betas: grid.betas.clone(),
        accuracy,
        per_fold,
        best,
    })
}
