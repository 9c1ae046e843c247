//! Repeated-trial benchmark: split, reduce, fit, classify, and report
//! accuracy statistics with per-query timing.

use std::fs;
use std::time::Instant;

use anyhow::{Context, Result};
use nscr::classifier::{batch_accuracy, fit_model, ClassificationResult, CoderKind};
use nscr::model_selection::grid_search;

use super::{load_dataset, prepare_trial, sample_std, trial_seed, ExperimentSpec};

/// Accuracy and timing statistics over all trials, in percent and seconds.
#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    /// Per-trial holdout accuracy, percent.
    pub trial_accuracy_percent: Vec<f64>,
    /// Arithmetic mean of the trial accuracies.
    pub mean_accuracy_percent: f64,
    /// Sample standard deviation of the trial accuracies.
    pub std_accuracy_percent: f64,
    /// Mean wall-clock seconds per classified query, over all trials,
    /// excluding dataset load and model fitting.
    pub mean_query_seconds: f64,
    /// The settings the run was configured with.
    pub config_echo: Vec<(String, String)>,
}

impl BenchmarkReport {
    /// The one-line summary printed after a run.
    pub fn summary_line(&self) -> String {
        format!(
            "benchmark: accuracy {:.1}% ± {:.1} over {} trials, {:.3e} s/query",
            self.mean_accuracy_percent,
            self.std_accuracy_percent,
            self.trial_accuracy_percent.len(),
            self.mean_query_seconds,
        )
    }
}

/// Runs `spec.trials` independent trials and writes `trials.csv`,
/// `summary.csv`, `predictions.csv` (all deterministic for a fixed seed)
/// and `trial_timing.csv` (wall-clock, varies run to run).
pub fn cmd_benchmark(spec: &ExperimentSpec) -> Result<BenchmarkReport> {
    let data = load_dataset(&spec.dataset)?;
    fs::create_dir_all(&spec.out_dir)
        .with_context(|| format!("creating {}", spec.out_dir.display()))?;

    let num_classes = data.partition().num_classes();
    let mut accuracies = Vec::with_capacity(spec.trials);
    let mut query_seconds = Vec::with_capacity(spec.trials);
    let mut predictions: Vec<(usize, Vec<ClassificationResult>, Vec<String>)> = Vec::new();

    for trial in 0..spec.trials {
        let mut run = || -> Result<()> {
            let seed = trial_seed(spec.seed, trial);
            let (train, holdout) = prepare_trial(&data, spec, seed)?;

            let coder = if spec.cross_validate {
                let report = grid_search(&train, &spec.grid, &spec.base, seed)?;
                let (alpha, beta) = report.best;
                CoderKind::Nscr(spec.base.with_weights(alpha, beta))
            } else {
                spec.coder.clone()
            };

            let model = fit_model(&train, coder)?;
            let start = Instant::now();
            let results = model.classify_batch(&holdout)?;
            query_seconds.push(start.elapsed().as_secs_f64() / holdout.len() as f64);
            accuracies.push(batch_accuracy(&results, &holdout)? * 100.0);
            predictions.push((trial, results, holdout.labels()));
            Ok(())
        };
        run().with_context(|| format!("trial {}", trial + 1))?;
    }

    let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
    let report = BenchmarkReport {
        std_accuracy_percent: sample_std(&accuracies, mean),
        mean_accuracy_percent: mean,
        trial_accuracy_percent: accuracies,
        mean_query_seconds: query_seconds.iter().sum::<f64>() / query_seconds.len() as f64,
        config_echo: spec.echo.clone(),
    };

    write_trials_csv(spec, &report)?;
    write_summary_csv(spec, &report)?;
    write_predictions_csv(spec, num_classes, &predictions)?;
    write_timing_csv(spec, &query_seconds)?;
    Ok(report)
}

fn write_trials_csv(spec: &ExperimentSpec, report: &BenchmarkReport) -> Result<()> {
    let mut writer = csv::Writer::from_path(spec.out_dir.join("trials.csv"))?;
    writer.write_record(["trial", "accuracy_percent"])?;
    for (trial, accuracy) in report.trial_accuracy_percent.iter().enumerate() {
        writer.write_record([(trial + 1).to_string(), accuracy.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

fn write_summary_csv(spec: &ExperimentSpec, report: &BenchmarkReport) -> Result<()> {
    let mut writer = csv::Writer::from_path(spec.out_dir.join("summary.csv"))?;
    writer.write_record(["trials", "mean_accuracy_percent", "std_accuracy_percent"])?;
    writer.write_record([
        report.trial_accuracy_percent.len().to_string(),
        report.mean_accuracy_percent.to_string(),
        report.std_accuracy_percent.to_string(),
    ])?;
    writer.flush()?;
    Ok(())
}

fn write_predictions_csv(
    spec: &ExperimentSpec,
    num_classes: usize,
    predictions: &[(usize, Vec<ClassificationResult>, Vec<String>)],
) -> Result<()> {
    let mut writer = csv::Writer::from_path(spec.out_dir.join("predictions.csv"))?;
    let mut header = vec![
        "trial".to_string(),
        "query_index".to_string(),
        "predicted_label".to_string(),
        "true_label".to_string(),
    ];
    header.extend((1..=num_classes).map(|k| format!("r_{k}")));
    writer.write_record(&header)?;
    for (trial, results, true_labels) in predictions {
        for (j, result) in results.iter().enumerate() {
            let mut record = vec![
                (trial + 1).to_string(),
                j.to_string(),
                result.label.clone(),
                true_labels[j].clone(),
            ];
            record.extend(result.residuals.iter().map(f64::to_string));
            writer.write_record(&record)?;
        }
    }
    writer.flush()?;
    Ok(())
}

fn write_timing_csv(spec: &ExperimentSpec, query_seconds: &[f64]) -> Result<()> {
    let mut writer = csv::Writer::from_path(spec.out_dir.join("trial_timing.csv"))?;
    writer.write_record(["trial", "mean_query_seconds"])?;
    for (trial, seconds) in query_seconds.iter().enumerate() {
        writer.write_record([(trial + 1).to_string(), seconds.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}
