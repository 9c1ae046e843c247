//! Property tests for the data pipeline: normalization, column selection,
//! and file round-trips preserve what they promise to preserve.

use nalgebra::DMatrix;
use nscr::data::io::{
    load_binary_dataset, load_csv_dataset, write_binary_dataset, write_csv_dataset,
};
use nscr::data::pca::fit_pca;
use nscr::data::{normalize_columns, SampleMatrix};
use proptest::prelude::*;

/// A labeled matrix with 1-3 classes and nondegenerate columns.
fn arb_matrix() -> impl Strategy<Value = SampleMatrix> {
    (1usize..8, 2usize..10, 0u64..1_000).prop_map(|(dim, n, seed)| {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let values = nscr::data::synthetic::gaussian_matrix(dim, n, &mut rng);
        let labels: Vec<String> = (0..n).map(|j| format!("c{}", j % 3)).collect();
        SampleMatrix::from_labeled_columns(values, &labels).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every normalized column has unit norm, and normalizing twice changes
    /// nothing beyond floating-point noise.
    #[test]
    fn normalization_is_idempotent(matrix in arb_matrix()) {
        let once = normalize_columns(&matrix).unwrap();
        for column in once.values().column_iter() {
            prop_assert!((column.norm() - 1.0).abs() <= 1e-12);
        }
        let twice = normalize_columns(&once).unwrap();
        prop_assert!((twice.values() - once.values()).abs().max() <= 1e-12);
        prop_assert_eq!(once.labels(), matrix.labels());
    }

    /// Selecting columns keeps each selected column's values and label
    /// together, whatever the order of the requested indices.
    #[test]
    fn selection_preserves_label_value_pairs(
        matrix in arb_matrix(),
        seed in 0u64..1_000,
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut indices: Vec<usize> = (0..matrix.len()).collect();
        indices.shuffle(&mut rng);
        indices.truncate(1 + indices.len() / 2);

        let selected = matrix.select_columns(&indices).unwrap();
        prop_assert_eq!(selected.len(), indices.len());

        // Each (label, column) pair of the selection exists in the source.
        let mut used = vec![false; indices.len()];
        for j in 0..selected.len() {
            let found = indices.iter().enumerate().any(|(pos, &src)| {
                !used[pos]
                    && matrix.label_of(src) == selected.label_of(j)
                    && (matrix.column(src) - selected.column(j)).abs().max() == 0.0
                    && {
                        used[pos] = true;
                        true
                    }
            });
            prop_assert!(found, "selected column {j} missing from source");
        }

        // Labels arrive grouped and nondecreasing.
        let labels = selected.labels();
        prop_assert!(labels.windows(2).all(|w| w[0] <= w[1]));
    }

    /// CSV and binary round-trips reproduce values (binary exactly, CSV via
    /// full-precision decimal) and labels.
    #[test]
    fn file_round_trips_preserve_datasets(matrix in arb_matrix()) {
        let dir = tempfile::tempdir().unwrap();

        let csv_path = dir.path().join("data.csv");
        write_csv_dataset(&csv_path, &matrix).unwrap();
        let (from_csv, csv_labels) = load_csv_dataset(&csv_path).unwrap();
        prop_assert_eq!(from_csv.values(), matrix.values());
        prop_assert_eq!(csv_labels, matrix.labels());

        let bin_path = dir.path().join("data.bin");
        write_binary_dataset(&bin_path, &matrix).unwrap();
        let (from_bin, bin_labels) = load_binary_dataset(&bin_path).unwrap();
        prop_assert_eq!(from_bin.values(), matrix.values());
        prop_assert_eq!(bin_labels, matrix.labels());
    }

    /// A full-dimensional projection is an isometry on the training data:
    /// pairwise distances survive within floating-point tolerance.
    #[test]
    fn full_rank_projection_preserves_distances(matrix in arb_matrix()) {
        let d = matrix.dim().min(matrix.len());
        let pca = fit_pca(&matrix, d).unwrap();
        let projected = pca.project_matrix(&matrix).unwrap();
        prop_assume!(d == matrix.dim());
        for a in 0..matrix.len() {
            for b in (a + 1)..matrix.len() {
                let before = (matrix.column(a) - matrix.column(b)).norm();
                let after = (projected.column(a) - projected.column(b)).norm();
                prop_assert!((before - after).abs() <= 1e-8 * (1.0 + before));
            }
        }
    }
}

/// Labels survive a split into disjoint halves: every column lands in
/// exactly one half with its label intact.
#[test]
fn split_conserves_every_sample() {
    use nscr::data::split::split_half_per_class;
    use std::collections::BTreeMap;

    let values = DMatrix::from_fn(4, 12, |i, j| (i * 13 + j * 7) as f64 * 0.1 - 2.0);
    let labels: Vec<String> = (0..12).map(|j| format!("c{}", j % 3)).collect();
    let matrix = SampleMatrix::from_labeled_columns(values, &labels).unwrap();

    let (train, holdout) = split_half_per_class(&matrix, 9).unwrap();
    assert_eq!(train.len() + holdout.len(), matrix.len());

    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for part in [&train, &holdout] {
        for j in 0..part.len() {
            *counts.entry(part.label_of(j).to_string()).or_default() += 1;
        }
    }
    for class in ["c0", "c1", "c2"] {
        assert_eq!(counts[class], 4);
    }
}
