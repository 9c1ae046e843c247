//! Standalone cross-validated grid search, exporting the accuracy surface.

use std::fs;

use anyhow::{Context, Result};
use nscr::data::pca::fit_pca;
use nscr::data::split::subsample_per_class;
use nscr::model_selection::{grid_search, CvReport};

use super::{load_dataset, ExperimentSpec};

/// Cross-validates the non-negative coder's (α, β) over the spec grid on
/// the full dataset (subsampled and PCA-reduced if requested) and writes
/// the surface to `heatmap.csv`.
pub fn cmd_cv(spec: &ExperimentSpec) -> Result<CvReport> {
    let data = load_dataset(&spec.dataset)?;
    let train = match spec.n_per_class {
        Some(n) => subsample_per_class(&data, n, spec.seed)?.0,
        None => data,
    };
    let train = match spec.pca_dim {
        Some(d) => fit_pca(&train, d)?.project_matrix(&train)?,
        None => train,
    };

    let report = grid_search(&train, &spec.grid, &spec.base, spec.seed)?;

    fs::create_dir_all(&spec.out_dir)
        .with_context(|| format!("creating {}", spec.out_dir.display()))?;
    report.write_heatmap_csv(spec.out_dir.join("heatmap.csv"))?;
    Ok(report)
}
