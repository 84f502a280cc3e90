//! Parallel vs sequential throughput for batch sketching and pairwise
//! estimation. The parallel paths require the default `parallel`
//! feature; with it disabled both variants run the sequential code.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use fsketch::estimator::{estimate_pair, EstimatorConfig};
use fsketch::eval::select_pairs;
use fsketch::params::SketchParams;
use fsketch::sketch::{sketch_all, sketch_all_sequential};
use fsketch::synth::random_dataset;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

fn bench_batch_sketching(c: &mut Criterion) {
    let n = 20_000;
    let sigma = 200;
    let count = 2_000;
    let ds = random_dataset(n, count, sigma, 42, 1).unwrap();
    let params = SketchParams::new(n, 4 * sigma, 43, 2).unwrap();

    let mut group = c.benchmark_group("batch_sketching");
    group.throughput(Throughput::Elements(count as u64));
    group.bench_with_input(BenchmarkId::new("parallel", count), &ds, |b, ds| {
        b.iter(|| sketch_all(black_box(ds.points()), &params).unwrap())
    });
    group.bench_with_input(BenchmarkId::new("sequential", count), &ds, |b, ds| {
        b.iter(|| sketch_all_sequential(black_box(ds.points()), &params).unwrap())
    });
    group.finish();
}

fn bench_pairwise_estimation(c: &mut Criterion) {
    let n = 2_000;
    let sigma = 100;
    let count = 400;
    let d = 4 * sigma;
    let ds = random_dataset(n, count, sigma, 42, 3).unwrap();
    let params = SketchParams::new(n, d, 43, 4).unwrap();
    let sketches = sketch_all(ds.points(), &params).unwrap();
    let cfg = EstimatorConfig::new(d, 43, ds.sigma()).unwrap();
    let pairs = select_pairs(count, usize::MAX, 0);

    let mut group = c.benchmark_group("pairwise_estimation");
    group.throughput(Throughput::Elements(pairs.len() as u64));
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter(|| {
            pairs
                .par_iter()
                .map(|&(i, j)| estimate_pair(&sketches[i], &sketches[j], &cfg).unwrap().h_hat)
                .sum::<f64>()
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            pairs
                .iter()
                .map(|&(i, j)| estimate_pair(&sketches[i], &sketches[j], &cfg).unwrap().h_hat)
                .sum::<f64>()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_batch_sketching, bench_pairwise_estimation);
criterion_main!(benches);
