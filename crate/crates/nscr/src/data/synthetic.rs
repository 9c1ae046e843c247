//! Seeded synthetic fixtures: random coding problems and union-of-subspace
//! classification datasets.
//!
//! Fixtures are deterministic functions of their seed (ChaCha8 generator),
//! so tests and benchmarks replicate across platforms.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{ClassPartition, Query, SampleMatrix};
use crate::error::Error;
use crate::Result;

/// Matrix with independent standard-normal entries.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Vector with independent standard-normal entries.
pub fn gaussian_vector(len: usize, rng: &mut impl Rng) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn class_labels(classes: usize) -> Vec<String> {
    let width = (classes.saturating_sub(1)).to_string().len();
    (0..classes).map(|k| format!("c{k:0width$}")).collect()
}

/// Random dense coding problem: a D×N gaussian dictionary split into
/// `classes` groups of near-equal size, plus one gaussian query.
///
/// Values are unnormalized; run `normalize_columns` and `Query::normalized`
/// before solving.
pub fn random_problem(
    dim: usize,
    n: usize,
    classes: usize,
    seed: u64,
) -> Result<(SampleMatrix, Query)> {
    if classes == 0 || n < classes || dim == 0 {
        return Err(Error::InvalidConfig(format!(
            "random problem needs dim >= 1 and n >= classes >= 1, got dim={dim}, n={n}, classes={classes}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = gaussian_matrix(dim, n, &mut rng);
    let query = Query::new(gaussian_vector(dim, &mut rng))?;

    let base = n / classes;
    let extra = n % classes;
    let mut boundaries = vec![0];
    for k in 0..classes {
        let size = base + usize::from(k < extra);
        boundaries.push(boundaries.last().unwrap() + size);
    }
    let partition = ClassPartition::new(class_labels(classes), boundaries)?;
    Ok((SampleMatrix::new(values, partition)?, query))
}

/// Shape of a union-of-subspaces classification fixture.
#[derive(Debug, Clone)]
pub struct SubspaceSpec {
    /// Ambient feature dimension.
    pub ambient_dim: usize,
    /// Dimension of each class subspace.
    pub subspace_dim: usize,
    /// Number of classes.
    pub classes: usize,
    /// Training atoms drawn per class.
    pub atoms_per_class: usize,
    /// Query samples drawn per class.
    pub queries_per_class: usize,
    /// Standard deviation of ambient gaussian noise added to every sample.
    pub noise_sigma: f64,
    /// Generator seed.
    pub seed: u64,
}

/// Draws a training matrix and a query matrix from one random low-dimensional
/// subspace per class: each sample is `basis · g + sigma · noise` with `g`
/// standard normal in the subspace.
pub fn subspace_dataset(spec: &SubspaceSpec) -> Result<(SampleMatrix, SampleMatrix)> {
    if spec.classes == 0
        || spec.atoms_per_class == 0
        || spec.queries_per_class == 0
        || spec.subspace_dim == 0
        || spec.subspace_dim > spec.ambient_dim
        || !spec.noise_sigma.is_finite()
        || spec.noise_sigma < 0.0
    {
        return Err(Error::InvalidConfig(format!("bad subspace spec: {spec:?}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let bases: Vec<DMatrix<f64>> = (0..spec.classes)
        .map(|_| {
            gaussian_matrix(spec.ambient_dim, spec.subspace_dim, &mut rng)
                .qr()
                .q()
        })
        .collect();

    let draw_block = |per_class: usize, rng: &mut ChaCha8Rng| {
        let mut values = DMatrix::zeros(spec.ambient_dim, spec.classes * per_class);
        for (k, basis) in bases.iter().enumerate() {
            for j in 0..per_class {
                let sample = basis * gaussian_vector(spec.subspace_dim, rng)
                    + gaussian_vector(spec.ambient_dim, rng) * spec.noise_sigma;
                values.set_column(k * per_class + j, &sample);
            }
        }
        values
    };

    let train_values = draw_block(spec.atoms_per_class, &mut rng);
    let query_values = draw_block(spec.queries_per_class, &mut rng);

    let block_partition = |per_class: usize| {
        let boundaries = (0..=spec.classes).map(|k| k * per_class).collect();
        ClassPartition::new(class_labels(spec.classes), boundaries)
    };
    Ok((
        SampleMatrix::new(train_values, block_partition(spec.atoms_per_class)?)?,
        SampleMatrix::new(query_values, block_partition(spec.queries_per_class)?)?,
    ))
}
