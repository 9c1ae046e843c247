//! Residual-history export for one query, for convergence plots.

use std::fs;

use anyhow::{Context, Result};
use nscr::data::{normalize_columns, Query};
use nscr::error::Error;
use nscr::solver::{precompute, solve, SolveResult};

use super::{load_dataset, ExperimentSpec};

/// Codes one dataset column against all the others and writes the
/// per-iteration residuals to `convergence.csv`.
///
/// The indexed column is the query; the remaining columns form the
/// dictionary, so the curve reflects a query outside its own dictionary.
/// Set `tol = 0` to force a full `max_iter`-length curve.
pub fn cmd_convergence(spec: &ExperimentSpec, query_index: usize) -> Result<SolveResult> {
    let data = load_dataset(&spec.dataset)?;
    if query_index >= data.len() {
        return Err(Error::QueryIndexOutOfRange {
            index: query_index,
            len: data.len(),
        }
        .into());
    }
    let dictionary_indices: Vec<usize> = (0..data.len()).filter(|&j| j != query_index).collect();
    anyhow::ensure!(
        !dictionary_indices.is_empty(),
        "dataset needs at least 2 columns: one query and one dictionary atom"
    );
    let dictionary = normalize_columns(&data.select_columns(&dictionary_indices)?)?;
    let query = Query::new(data.column(query_index).into_owned())?.normalized()?;

    let gram = precompute(dictionary.values(), spec.base.alpha, spec.base.rho, None)?;
    let result = solve(dictionary.values(), query.vector(), &spec.base, &gram)?;

    fs::create_dir_all(&spec.out_dir)
        .with_context(|| format!("creating {}", spec.out_dir.display()))?;
    result.write_history_csv(spec.out_dir.join("convergence.csv"))?;
    Ok(result)
}
