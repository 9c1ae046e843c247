//! Per-query wall-time comparison across coders on one seed-derived split.

use std::fs;
use std::time::Instant;

use anyhow::{Context, Result};
use nscr::classifier::fit_model;
use nscr::data::Query;

use super::{coder_by_name, load_dataset, prepare_trial, trial_seed, ExperimentSpec};

/// Measured cost and accuracy of one coder.
#[derive(Debug, Clone)]
pub struct TimingRow {
    pub coder: String,
    /// Queries timed (holdout size, floored at 50 by cycling).
    pub queries: usize,
    /// Mean seconds per query; includes the fit when
    /// `include_precompute` is set, otherwise coding plus residuals only.
    pub mean_query_seconds: f64,
    /// Accuracy over the distinct holdout queries, percent.
    pub accuracy_percent: f64,
}

/// Times every requested coder over at least 50 queries (cycling through
/// the holdout if it is smaller) after one untimed warm-up query, and
/// writes `timing.csv`.
pub fn cmd_time(
    spec: &ExperimentSpec,
    coders: &[String],
    include_precompute: bool,
) -> Result<Vec<TimingRow>> {
    anyhow::ensure!(!coders.is_empty(), "no coders requested");
    let data = load_dataset(&spec.dataset)?;
    let (train, holdout) = prepare_trial(&data, spec, trial_seed(spec.seed, 0))?;
    let total_queries = holdout.len().max(50);

    let mut rows = Vec::with_capacity(coders.len());
    for name in coders {
        let coder = coder_by_name(name, &spec.base, spec.lambda)?;

        let fit_start = Instant::now();
        let model = fit_model(&train, coder)?;
        let fit_seconds = fit_start.elapsed().as_secs_f64();

        let warm_up = Query::new(holdout.column(0).into_owned())?;
        model
            .classify(&warm_up)
            .with_context(|| format!("warm-up query with coder {name}"))?;

        let mut correct = 0usize;
        let start = Instant::now();
        for i in 0..total_queries {
            let j = i % holdout.len();
            let query = Query::new(holdout.column(j).into_owned())?;
            let result = model.classify(&query)?;
            if i < holdout.len() && result.label == holdout.label_of(j) {
                correct += 1;
            }
        }
        let elapsed = start.elapsed().as_secs_f64();

        let timed = if include_precompute {
            fit_seconds + elapsed
        } else {
            elapsed
        };
        rows.push(TimingRow {
            coder: name.clone(),
            queries: total_queries,
            mean_query_seconds: timed / total_queries as f64,
            accuracy_percent: correct as f64 / holdout.len() as f64 * 100.0,
        });
    }

    fs::create_dir_all(&spec.out_dir)
        .with_context(|| format!("creating {}", spec.out_dir.display()))?;
    let mut writer = csv::Writer::from_path(spec.out_dir.join("timing.csv"))?;
    writer.write_record(["coder", "queries", "mean_query_seconds", "accuracy_percent"])?;
    for row in &rows {
        writer.write_record([
            row.coder.clone(),
            row.queries.to_string(),
            row.mean_query_seconds.to_string(),
            row.accuracy_percent.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(rows)
}
