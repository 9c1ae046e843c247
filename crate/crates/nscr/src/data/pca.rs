//! PCA fit on training data and projection of matrices and queries.
//!
//! The projection is computed from the singular value decomposition of the
//! centered training matrix (economy form), which is stable whether D or N
//! dominates. Rows are principal directions ordered by decreasing variance,
//! with each row's sign fixed so its largest-magnitude entry is positive.

use nalgebra::{DMatrix, DVector};

use super::{Query, SampleMatrix};
use crate::error::Error;
use crate::Result;

/// Centering vector and orthonormal d×D projection learned from training data.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    mean: DVector<f64>,
    projection: DMatrix<f64>,
}

impl PcaModel {
    /// Per-feature training mean (length D).
    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// The d×D projection matrix with orthonormal rows.
    pub fn projection(&self) -> &DMatrix<f64> {
        &self.projection
    }

    /// Expected input dimension D.
    pub fn input_dim(&self) -> usize {
        self.projection.ncols()
    }

    /// Projected dimension d.
    pub fn output_dim(&self) -> usize {
        self.projection.nrows()
    }

    /// Projects every column: `projection · (column − mean)`.
    pub fn project_matrix(&self, matrix: &SampleMatrix) -> Result<SampleMatrix> {
        if matrix.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "pca matrix projection",
                expected: self.input_dim(),
                got: matrix.dim(),
            });
        }
        let mut centered = matrix.values().clone();
        for mut col in centered.column_iter_mut() {
            col -= &self.mean;
        }
        SampleMatrix::new(&self.projection * centered, matrix.partition().clone())
    }

    /// Projects a single query: `projection · (query − mean)`.
    pub fn project_query(&self, query: &Query) -> Result<Query> {
        if query.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "pca query projection",
                expected: self.input_dim(),
                got: query.dim(),
            });
        }
        Query::new(&self.projection * (query.vector() - &self.mean))
    }
}

/// Fits a d-dimensional PCA model on training columns.
///
/// Requires `1 ≤ d ≤ min(D, N)`. Deterministic: directions are sorted by
/// decreasing singular value and sign-fixed per row.
pub fn fit_pca(train: &SampleMatrix, d: usize) -> Result<PcaModel> {
    let max = train.dim().min(train.len());
    if d == 0 || d > max {
        return Err(Error::PcaDimension { requested: d, max });
    }

    let mean = train.values().column_mean();
    let mut centered = train.values().clone();
    for mut col in centered.column_iter_mut() {
        col -= &mean;
    }

    let svd = centered.svd(true, false);
    let u = svd.u.ok_or(Error::FactorizationFailed)?;
    let singular = &svd.singular_values;

    // nalgebra returns singular values in decreasing order; the sort is kept
    // as a guard so the top-d selection never depends on that behavior.
    let mut order: Vec<usize> = (0..singular.len()).collect();
    order.sort_by(|&a, &b| singular[b].partial_cmp(&singular[a]).expect("finite"));

    let mut projection = DMatrix::zeros(d, train.dim());
    for (row, &src) in order.iter().take(d).enumerate() {
        let direction = u.column(src);
        let lead = direction
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).expect("finite"))
            .map(|(i, _)| i)
            .expect("D >= 1");
        let sign = if direction[lead] < 0.0 { -1.0 } else { 1.0 };
        projection
            .row_mut(row)
            .copy_from(&(direction.transpose() * sign));
    }

    Ok(PcaModel { mean, projection })
}
