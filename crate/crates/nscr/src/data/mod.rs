//! Sample matrices with class partitions, queries, and unit-norm scaling.
//!
//! A dataset is a dense D×N matrix whose columns (atoms) are grouped
//! contiguously by class in ascending class-id order. All types here are
//! immutable after construction and safe to share across worker threads.

pub mod io;
pub mod pca;
pub mod split;
pub mod synthetic;

use std::collections::BTreeMap;
use std::ops::Range;

use nalgebra::{DMatrix, DVector, DVectorView};

use crate::error::Error;
use crate::Result;

/// Norm below which a vector is treated as zero and rejected.
pub const MIN_NORM: f64 = 1e-12;

/// Contiguous grouping of matrix columns into K classes.
///
/// Columns of class `k` occupy `boundaries[k]..boundaries[k+1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPartition {
    class_ids: Vec<String>,
    boundaries: Vec<usize>,
}

impl ClassPartition {
    /// Builds a partition, validating that class ids are distinct and every
    /// class holds at least one column.
    pub fn new(class_ids: Vec<String>, boundaries: Vec<usize>) -> Result<Self> {
        if class_ids.is_empty() {
            return Err(Error::BadPartition("no classes".into()));
        }
        if boundaries.len() != class_ids.len() + 1 {
            return Err(Error::BadPartition(format!(
                "{} classes need {} boundaries, got {}",
                class_ids.len(),
                class_ids.len() + 1,
                boundaries.len()
            )));
        }
        if boundaries[0] != 0 {
            return Err(Error::BadPartition("boundaries must start at 0".into()));
        }
        for (k, pair) in boundaries.windows(2).enumerate() {
            if pair[1] == pair[0] {
                return Err(Error::EmptyClass(class_ids[k].clone()));
            }
            if pair[1] < pair[0] {
                return Err(Error::BadPartition("boundaries must be increasing".into()));
            }
        }
        let mut sorted = class_ids.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadPartition("duplicate class id".into()));
        }
        Ok(Self {
            class_ids,
            boundaries,
        })
    }

    /// Partition with a single class spanning all `n` columns.
    pub fn single_class(id: impl Into<String>, n: usize) -> Result<Self> {
        Self::new(vec![id.into()], vec![0, n])
    }

    /// Number of classes K.
    pub fn num_classes(&self) -> usize {
        self.class_ids.len()
    }

    /// Total number of columns N covered by the partition.
    pub fn num_samples(&self) -> usize {
        *self.boundaries.last().expect("validated nonempty")
    }

    /// Class identifiers in partition order.
    pub fn class_ids(&self) -> &[String] {
        &self.class_ids
    }

    /// Column range of class `k`.
    pub fn class_range(&self, k: usize) -> Range<usize> {
        self.boundaries[k]..self.boundaries[k + 1]
    }

    /// Number of columns in class `k`.
    pub fn class_size(&self, k: usize) -> usize {
        self.boundaries[k + 1] - self.boundaries[k]
    }

    /// Size of the smallest class.
    pub fn min_class_size(&self) -> usize {
        (0..self.num_classes())
            .map(|k| self.class_size(k))
            .min()
            .expect("validated nonempty")
    }

    /// Index of the class containing column `j`.
    pub fn class_of_column(&self, j: usize) -> usize {
        debug_assert!(j < self.num_samples());
        match self.boundaries.binary_search(&j) {
            Ok(k) if k < self.class_ids.len() => k,
            Ok(k) => k - 1,
            Err(k) => k - 1,
        }
    }
}

/// Dense D×N feature matrix with samples as columns, partitioned by class.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    values: DMatrix<f64>,
    partition: ClassPartition,
}

impl SampleMatrix {
    /// Wraps a matrix and partition, validating finiteness and coverage.
    pub fn new(values: DMatrix<f64>, partition: ClassPartition) -> Result<Self> {
        if values.ncols() == 0 || values.nrows() == 0 {
            return Err(Error::EmptyDataset);
        }
        if partition.num_samples() != values.ncols() {
            return Err(Error::BadPartition(format!(
                "partition covers {} columns, matrix has {}",
                partition.num_samples(),
                values.ncols()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("sample matrix".into()));
        }
        Ok(Self { values, partition })
    }

    /// Builds a matrix from columns in arbitrary order with one label each,
    /// regrouping columns contiguously by ascending label and preserving the
    /// given order within each class.
    pub fn from_labeled_columns(values: DMatrix<f64>, labels: &[String]) -> Result<Self> {
        if labels.len() != values.ncols() {
            return Err(Error::DimensionMismatch {
                context: "labels per column",
                expected: values.ncols(),
                got: labels.len(),
            });
        }
        if values.ncols() == 0 || values.nrows() == 0 {
            return Err(Error::EmptyDataset);
        }
        let mut groups: BTreeMap<&String, Vec<usize>> = BTreeMap::new();
        for (j, label) in labels.iter().enumerate() {
            groups.entry(label).or_default().push(j);
        }
        let mut class_ids = Vec::with_capacity(groups.len());
        let mut boundaries = vec![0];
        let mut order = Vec::with_capacity(labels.len());
        for (label, cols) in &groups {
            class_ids.push((*label).clone());
            boundaries.push(boundaries.last().unwrap() + cols.len());
            order.extend_from_slice(cols);
        }
        let reordered = values.select_columns(&order);
        Self::new(reordered, ClassPartition::new(class_ids, boundaries)?)
    }

    /// Feature dimension D.
    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    /// Number of samples N.
    pub fn len(&self) -> usize {
        self.values.ncols()
    }

    /// Always false: construction rejects empty matrices.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The underlying D×N matrix.
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// The class partition.
    pub fn partition(&self) -> &ClassPartition {
        &self.partition
    }

    /// View of column `j`.
    pub fn column(&self, j: usize) -> DVectorView<'_, f64> {
        self.values.column(j)
    }

    /// Class id of column `j`.
    pub fn label_of(&self, j: usize) -> &str {
        &self.partition.class_ids[self.partition.class_of_column(j)]
    }

    /// Labels of all columns in column order.
    pub fn labels(&self) -> Vec<String> {
        (0..self.len())
            .map(|j| self.label_of(j).to_string())
            .collect()
    }

    /// New matrix holding the given columns, regrouped by class with the
    /// original within-class column order; classes left with no columns are
    /// dropped from the partition.
    pub fn select_columns(&self, indices: &[usize]) -> Result<SampleMatrix> {
        if indices.is_empty() {
            return Err(Error::EmptyDataset);
        }
        for &j in indices {
            if j >= self.len() {
                return Err(Error::QueryIndexOutOfRange {
                    index: j,
                    len: self.len(),
                });
            }
        }
        let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); self.partition.num_classes()];
        for &j in indices {
            per_class[self.partition.class_of_column(j)].push(j);
        }
        let mut class_ids = Vec::new();
        let mut boundaries = vec![0];
        let mut order = Vec::with_capacity(indices.len());
        for (k, cols) in per_class.iter_mut().enumerate() {
            if cols.is_empty() {
                continue;
            }
            cols.sort_unstable();
            class_ids.push(self.partition.class_ids[k].clone());
            boundaries.push(boundaries.last().unwrap() + cols.len());
            order.extend_from_slice(cols);
        }
        let values = self.values.select_columns(&order);
        SampleMatrix::new(values, ClassPartition::new(class_ids, boundaries)?)
    }
}

/// A single sample to be coded against the dictionary.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    vector: DVector<f64>,
}

impl Query {
    /// Wraps a vector, rejecting non-finite entries.
    pub fn new(vector: DVector<f64>) -> Result<Self> {
        if !vector.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("query".into()));
        }
        Ok(Self { vector })
    }

    /// Feature dimension D.
    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    /// The underlying vector.
    pub fn vector(&self) -> &DVector<f64> {
        &self.vector
    }

    /// Unit-norm copy; rejects vectors of norm ≤ 1e-12.
    pub fn normalized(&self) -> Result<Query> {
        let norm = self.vector.norm();
        if norm <= MIN_NORM {
            return Err(Error::ZeroQuery);
        }
        Ok(Query {
            vector: &self.vector / norm,
        })
    }
}

/// Scales every column to unit Euclidean norm; the partition is unchanged.
///
/// Columns of norm ≤ 1e-12 are rejected with their index.
pub fn normalize_columns(matrix: &SampleMatrix) -> Result<SampleMatrix> {
    let mut values = matrix.values.clone();
    for (j, mut col) in values.column_iter_mut().enumerate() {
        let norm = col.norm();
        if norm <= MIN_NORM {
            return Err(Error::ZeroNormColumn(j));
        }
        col /= norm;
    }
    Ok(SampleMatrix {
        values,
        partition: matrix.partition.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn two_class_matrix() -> SampleMatrix {
        let values = dmatrix![
            3.0, 0.0, 1.0, 2.0;
            4.0, 2.0, 0.0, 2.0;
        ];
        let partition = ClassPartition::new(vec!["a".into(), "b".into()], vec![0, 2, 4]).unwrap();
        SampleMatrix::new(values, partition).unwrap()
    }

    #[test]
    fn normalize_scales_three_four_column() {
        let normalized = normalize_columns(&two_class_matrix()).unwrap();
        assert_eq!(normalized.values()[(0, 0)], 0.6);
        assert_eq!(normalized.values()[(1, 0)], 0.8);
        for col in normalized.values().column_iter() {
            assert!((col.norm() - 1.0).abs() <= 1e-12);
        }
        assert_eq!(normalized.partition(), two_class_matrix().partition());
    }

    #[test]
    fn normalize_is_idempotent() {
        let once = normalize_columns(&two_class_matrix()).unwrap();
        let twice = normalize_columns(&once).unwrap();
        for (a, b) in once.values().iter().zip(twice.values().iter()) {
            assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn normalize_rejects_zero_column() {
        let values = dmatrix![1.0, 0.0; 0.0, 0.0];
        let matrix =
            SampleMatrix::new(values, ClassPartition::single_class("a", 2).unwrap()).unwrap();
        match normalize_columns(&matrix) {
            Err(Error::ZeroNormColumn(1)) => {}
            other => panic!("expected zero-norm error for column 1, got {other:?}"),
        }
    }

    #[test]
    fn partition_rejects_empty_class_and_bad_boundaries() {
        assert!(matches!(
            ClassPartition::new(vec!["a".into(), "b".into()], vec![0, 2, 2]),
            Err(Error::EmptyClass(id)) if id == "b"
        ));
        assert!(ClassPartition::new(vec!["a".into()], vec![1, 3]).is_err());
        assert!(ClassPartition::new(vec!["a".into(), "a".into()], vec![0, 1, 2]).is_err());
        assert!(ClassPartition::new(vec!["a".into()], vec![0, 2, 3]).is_err());
    }

    #[test]
    fn class_of_column_matches_ranges() {
        let m = two_class_matrix();
        for k in 0..m.partition().num_classes() {
            for j in m.partition().class_range(k) {
                assert_eq!(m.partition().class_of_column(j), k);
            }
        }
        assert_eq!(m.label_of(0), "a");
        assert_eq!(m.label_of(3), "b");
    }

    #[test]
    fn from_labeled_columns_groups_by_ascending_label() {
        let values = dmatrix![
            1.0, 2.0, 3.0, 4.0;
            0.0, 0.0, 0.0, 0.0;
        ];
        let labels: Vec<String> = ["b", "a", "b", "a"].map(String::from).to_vec();
        let m = SampleMatrix::from_labeled_columns(values, &labels).unwrap();
        assert_eq!(m.partition().class_ids(), ["a", "b"]);
        let row: Vec<f64> = m.values().row(0).iter().copied().collect();
        assert_eq!(row, [2.0, 4.0, 1.0, 3.0]);
    }

    #[test]
    fn select_columns_regroups_and_drops_absent_classes() {
        let m = two_class_matrix();
        let sub = m.select_columns(&[3, 2]).unwrap();
        assert_eq!(sub.partition().class_ids(), ["b"]);
        assert_eq!(sub.len(), 2);
        assert_eq!(sub.values().column(0), m.values().column(2));
        assert_eq!(sub.values().column(1), m.values().column(3));
    }

    #[test]
    fn rejects_non_finite_values() {
        let values = dmatrix![1.0, f64::NAN];
        assert!(SampleMatrix::new(values, ClassPartition::single_class("a", 2).unwrap()).is_err());
        assert!(Query::new(nalgebra::dvector![f64::INFINITY]).is_err());
    }

    #[test]
    fn query_normalization_rejects_zero() {
        let q = Query::new(nalgebra::dvector![0.0, 0.0]).unwrap();
        assert!(matches!(q.normalized(), Err(Error::ZeroQuery)));
        let q = Query::new(nalgebra::dvector![3.0, 4.0]).unwrap();
        let n = q.normalized().unwrap();
        assert!((n.vector().norm() - 1.0).abs() <= 1e-12);
    }
}
