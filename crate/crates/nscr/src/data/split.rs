//! Seeded experiment splits: per-class subsampling and half splits.
//!
//! All randomness comes from a fixed, documented generator (ChaCha8 keyed by
//! the caller's seed), so splits replicate bit-for-bit across platforms.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::SampleMatrix;
use crate::error::Error;
use crate::Result;

/// Per-class column index lists, each shuffled deterministically by `seed`.
pub(crate) fn shuffled_class_indices(matrix: &SampleMatrix, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..matrix.partition().num_classes())
        .map(|k| {
            let mut indices: Vec<usize> = matrix.partition().class_range(k).collect();
            indices.shuffle(&mut rng);
            indices
        })
        .collect()
}

/// Draws exactly `n_per_class` random columns from every class into a
/// training set; the remainder (possibly missing some classes, possibly
/// nothing at all) becomes the holdout.
pub fn subsample_per_class(
    matrix: &SampleMatrix,
    n_per_class: usize,
    seed: u64,
) -> Result<(SampleMatrix, Option<SampleMatrix>)> {
    if n_per_class == 0 {
        return Err(Error::InvalidConfig(
            "n_per_class must be at least 1".into(),
        ));
    }
    for k in 0..matrix.partition().num_classes() {
        let have = matrix.partition().class_size(k);
        if have < n_per_class {
            return Err(Error::ClassTooSmall {
                class: matrix.partition().class_ids()[k].clone(),
                have,
                need: n_per_class,
            });
        }
    }

    let mut train = Vec::new();
    let mut holdout = Vec::new();
    for indices in shuffled_class_indices(matrix, seed) {
        train.extend_from_slice(&indices[..n_per_class]);
        holdout.extend_from_slice(&indices[n_per_class..]);
    }

    let train = matrix.select_columns(&train)?;
    let holdout = if holdout.is_empty() {
        None
    } else {
        Some(matrix.select_columns(&holdout)?)
    };
    Ok((train, holdout))
}

/// Splits every class into random halves; with an odd class size the extra
/// sample goes to the training half. Every class needs at least 2 samples.
pub fn split_half_per_class(
    matrix: &SampleMatrix,
    seed: u64,
) -> Result<(SampleMatrix, SampleMatrix)> {
    for k in 0..matrix.partition().num_classes() {
        let have = matrix.partition().class_size(k);
        if have < 2 {
            return Err(Error::ClassTooSmall {
                class: matrix.partition().class_ids()[k].clone(),
                have,
                need: 2,
            });
        }
    }

    let mut train = Vec::new();
    let mut holdout = Vec::new();
    for indices in shuffled_class_indices(matrix, seed) {
        let take = indices.len().div_ceil(2);
        train.extend_from_slice(&indices[..take]);
        holdout.extend_from_slice(&indices[take..]);
    }
    Ok((
        matrix.select_columns(&train)?,
        matrix.select_columns(&holdout)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ClassPartition;
    use nalgebra::DMatrix;
    use std::collections::BTreeSet;

    fn indexed_matrix(class_sizes: &[usize]) -> SampleMatrix {
        let n: usize = class_sizes.iter().sum();
        let values = DMatrix::from_fn(1, n, |_, j| j as f64);
        let class_ids = (0..class_sizes.len()).map(|k| format!("c{k}")).collect();
        let mut boundaries = vec![0];
        for &size in class_sizes {
            boundaries.push(boundaries.last().unwrap() + size);
        }
        SampleMatrix::new(values, ClassPartition::new(class_ids, boundaries).unwrap()).unwrap()
    }

    fn column_set(m: &SampleMatrix) -> BTreeSet<u64> {
        m.values().iter().map(|v| *v as u64).collect()
    }

    #[test]
    fn exhaustive_selection_leaves_no_holdout() {
        let m = indexed_matrix(&[3, 5]);
        let (train, holdout) = subsample_per_class(&m, 3, 0).unwrap();
        assert_eq!(train.partition().class_size(0), 3);
        assert_eq!(train.partition().class_size(1), 3);
        assert_eq!(holdout.as_ref().map(|h| h.len()), Some(2));
        assert_eq!(holdout.unwrap().partition().class_ids(), ["c1"]);

        let (_, none) = subsample_per_class(&indexed_matrix(&[4, 4]), 4, 0).unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn same_seed_reproduces_split() {
        let m = indexed_matrix(&[10, 10, 10]);
        let (a_train, a_hold) = subsample_per_class(&m, 4, 42).unwrap();
        let (b_train, b_hold) = subsample_per_class(&m, 4, 42).unwrap();
        assert_eq!(a_train, b_train);
        assert_eq!(a_hold, b_hold);
    }

    #[test]
    fn different_seeds_select_differently() {
        let m = indexed_matrix(&[100]);
        let (a, _) = subsample_per_class(&m, 50, 1).unwrap();
        let (b, _) = subsample_per_class(&m, 50, 2).unwrap();
        assert_ne!(column_set(&a), column_set(&b));
    }

    #[test]
    fn split_preserves_sample_totals() {
        let m = indexed_matrix(&[7, 9, 4]);
        let (train, holdout) = subsample_per_class(&m, 4, 5).unwrap();
        let holdout = holdout.unwrap();
        assert_eq!(train.len() + holdout.len(), m.len());
        let mut all = column_set(&train);
        all.extend(column_set(&holdout));
        assert_eq!(all, column_set(&m));
    }

    #[test]
    fn rejects_undersized_class() {
        let m = indexed_matrix(&[5, 2]);
        assert!(matches!(
            subsample_per_class(&m, 3, 0),
            Err(Error::ClassTooSmall { class, have: 2, need: 3 }) if class == "c1"
        ));
        assert!(subsample_per_class(&m, 0, 0).is_err());
    }

    #[test]
    fn half_split_gives_training_the_extra_sample() {
        let m = indexed_matrix(&[5, 8]);
        let (train, holdout) = split_half_per_class(&m, 9).unwrap();
        assert_eq!(train.partition().class_size(0), 3);
        assert_eq!(holdout.partition().class_size(0), 2);
        assert_eq!(train.partition().class_size(1), 4);
        assert_eq!(holdout.partition().class_size(1), 4);
        assert_eq!(train.len() + holdout.len(), m.len());

        let (t2, h2) = split_half_per_class(&m, 9).unwrap();
        assert_eq!((train, holdout), (t2, h2));
    }
}
