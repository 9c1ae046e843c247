//! Throughput of batch classification: the data-parallel path against its
//! sequential twin, across dictionary sizes and coders.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use nscr::classifier::{fit_model, ClassifierModel, CoderKind};
use nscr::data::synthetic::{subspace_dataset, SubspaceSpec};
use nscr::data::SampleMatrix;
use nscr::solver::SolverConfig;

fn fixture(atoms_per_class: usize) -> (SampleMatrix, SampleMatrix) {
    subspace_dataset(&SubspaceSpec {
        ambient_dim: 64,
        subspace_dim: 5,
        classes: 10,
        atoms_per_class,
        queries_per_class: 4,
        noise_sigma: 0.05,
        seed: 11,
    })
    .unwrap()
}

fn bench_batch_classification(c: &mut Criterion) {
    let mut group = c.benchmark_group("classify_batch");
    group.sample_size(10);
    group.warm_up_time(Duration::from_millis(500));
    group.measurement_time(Duration::from_secs(2));

    for &atoms_per_class in &[10usize, 40, 80] {
        let (train, queries) = fixture(atoms_per_class);
        let model = fit_model(&train, CoderKind::Nscr(SolverConfig::default())).unwrap();
        group.throughput(Throughput::Elements(queries.len() as u64));

        group.bench_with_input(
            BenchmarkId::new("parallel", train.len()),
            &(&model, &queries),
            |b, (model, queries)| b.iter(|| model.classify_batch(black_box(queries)).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("sequential", train.len()),
            &(&model, &queries),
            |b, (model, queries)| b.iter(|| model.classify_batch_seq(black_box(queries)).unwrap()),
        );
    }
    group.finish();
}

fn bench_coders(c: &mut Criterion) {
    let mut group = c.benchmark_group("coders");
    group.sample_size(10);
    group.warm_up_time(Duration::from_millis(500));
    group.measurement_time(Duration::from_secs(2));

    let (train, queries) = fixture(40);
    let coders: [(&str, CoderKind); 4] = [
        ("nscr", CoderKind::Nscr(SolverConfig::default())),
        (
            "nrc",
            CoderKind::Nrc(SolverConfig::default().with_weights(0.0, 0.0)),
        ),
        ("crc", CoderKind::Crc { lambda: 0.001 }),
        (
            "src",
            CoderKind::Src {
                lambda: 0.001,
                config: SolverConfig::default(),
            },
        ),
    ];
    group.throughput(Throughput::Elements(queries.len() as u64));
    for (name, coder) in coders {
        let model: ClassifierModel = fit_model(&train, coder).unwrap();
        group.bench_with_input(
            BenchmarkId::new(name, train.len()),
            &(&model, &queries),
            |b, (model, queries)| b.iter(|| model.classify_batch(black_box(queries)).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_batch_classification, bench_coders);
criterion_main!(benches);
