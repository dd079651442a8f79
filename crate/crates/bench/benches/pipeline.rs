use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ifrisk_core::forecast::aggregate_mc_samples;
use ifrisk_core::io::{knn_impute, load_decision_matrix, FeatureTable};
use ifrisk_core::ranking::{marcos_utilities, rank};
use ifrisk_core::weighting::{entropy_weights, EntropyMeasure};
use ifrisk_core::RankOptions;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn ranking(c: &mut Criterion) {
    let problem = load_decision_matrix("fixtures:table12").unwrap();
    let matrix = problem.flattened();
    c.bench_function("rank_table12", |b| {
        b.iter(|| rank(black_box(&problem), &RankOptions::default()).unwrap())
    });
    c.bench_function("entropy_weights_table12", |b| {
        b.iter(|| entropy_weights(black_box(&matrix), EntropyMeasure::Szmidt).unwrap())
    });
    let s = [0.737, 0.652, 0.580, 0.382, 0.072];
    c.bench_function("marcos_5", |b| {
        b.iter(|| marcos_utilities(black_box(&s)).unwrap())
    });
}

fn preprocessing(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rows: Vec<Vec<Option<f64>>> = (0..200)
        .map(|_| {
            (0..8)
                .map(|j| (j == 0 || !rng.random_bool(0.1)).then(|| rng.random_range(-10.0..10.0)))
                .collect()
        })
        .collect();
    let table = FeatureTable::from_rows(rows).unwrap();
    c.bench_function("knn_impute_200x8", |b| {
        b.iter(|| knn_impute(black_box(&table), 5).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let draws: Vec<f64> = Normal::new(10.0, 2.0)
        .unwrap()
        .sample_iter(&mut rng)
        .take(100_000)
        .collect();
    c.bench_function("aggregate_mc_1e5", |b| {
        b.iter(|| aggregate_mc_samples(black_box(&draws)).unwrap())
    });
}

criterion_group!(benches, ranking, preprocessing, monte_carlo);
criterion_main!(benches);
