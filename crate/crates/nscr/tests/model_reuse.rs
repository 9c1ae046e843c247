//! Reusing one fitted model across many queries must beat refitting per
//! query by a wide margin, without changing a single label.

use nscr::classifier::{fit_model_with_mode, CoderKind};
use nscr::data::synthetic::{gaussian_matrix, random_problem};
use nscr::data::{Query, SampleMatrix};
use nscr::solver::{GramMode, SolverConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// The factorization is the dominant cost at N=1000, D=128 when the direct
/// (N×N) path is forced, so amortizing it across queries must save at least
/// 5× per query. The fresh-fit mean is taken over a 12-query subset; both
/// sides are per-query means, so the subset sizes do not bias the ratio.
#[test]
fn reused_model_amortizes_the_factorization() {
    let (train, _) = random_problem(128, 1000, 10, 31).unwrap();
    let coder = CoderKind::Nscr(SolverConfig::default());
    let mode = Some(GramMode::Direct);

    let mut rng = ChaCha8Rng::seed_from_u64(97);
    let queries = SampleMatrix::from_labeled_columns(
        gaussian_matrix(128, 100, &mut rng),
        &vec!["q".to_string(); 100],
    )
    .unwrap();

    // Warm-up run, untimed.
    let warm = fit_model_with_mode(&train, coder.clone(), mode).unwrap();
    warm.classify(&Query::new(queries.column(0).into_owned()).unwrap())
        .unwrap();

    let start = Instant::now();
    let model = fit_model_with_mode(&train, coder.clone(), mode).unwrap();
    let reused = model.classify_batch(&queries).unwrap();
    let fit_and_batch = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let batch_only = model.classify_batch(&queries).unwrap();
    let reuse_seconds = start.elapsed().as_secs_f64() / queries.len() as f64;
    assert_eq!(batch_only.len(), reused.len());

    let fresh_count = 12;
    let mut fresh_labels = Vec::with_capacity(fresh_count);
    let start = Instant::now();
    for j in 0..fresh_count {
        let fresh = fit_model_with_mode(&train, coder.clone(), mode).unwrap();
        let query = Query::new(queries.column(j).into_owned()).unwrap();
        fresh_labels.push(fresh.classify(&query).unwrap().label);
    }
    let fresh_seconds = start.elapsed().as_secs_f64() / fresh_count as f64;

    for (j, fresh_label) in fresh_labels.iter().enumerate() {
        assert_eq!(&reused[j].label, fresh_label, "label changed at query {j}");
    }
    // Sanity: one fit plus the batch cannot be slower than refitting per query.
    assert!(fit_and_batch / queries.len() as f64 <= fresh_seconds);
    let ratio = fresh_seconds / reuse_seconds;
    assert!(
        ratio >= 5.0,
        "per-query amortization only {ratio:.2}x ({fresh_seconds:.5}s fresh vs {reuse_seconds:.5}s reused)"
    );
}
