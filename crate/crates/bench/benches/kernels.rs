use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use std::hint::black_box;

use gibbslab::gibbs::{lambda_bruteforce, lambda_complexity, log_partition, metropolis_sample, posterior};
use gibbslab::margins::{margin_value, LabeledPoint, LinearHypothesis};
use gibbslab::measures::kappa_inverse_upper;
use gibbslab::model::sample_dataset;
use gibbslab::seed::rng_from_seed;
use gibbslab_bench::fixture;
use rand::Rng as _;

fn gibbs_kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("gibbs");
    for h in [64usize, 1024, 16384] {
        let f = fixture(h, 32, 100, 1).unwrap();
        let prior = f.instance.space.prior().to_vec();
        group.bench_with_input(BenchmarkId::new("log_partition", h), &h, |b, _| {
            b.iter(|| log_partition(black_box(&prior), black_box(&f.empirical), 50.0).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("posterior", h), &h, |b, _| {
            b.iter(|| posterior(black_box(&prior), black_box(&f.empirical), 50.0).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("lambda_complexity", h), &h, |b, _| {
            b.iter(|| lambda_complexity(black_box(&prior), black_box(&f.empirical), 0, 50.0).unwrap())
        });
    }
    let f = fixture(256, 32, 100, 2).unwrap();
    let prior = f.instance.space.prior().to_vec();
    group.bench_function("lambda_bruteforce/256", |b| {
        b.iter(|| lambda_bruteforce(black_box(&prior), black_box(&f.empirical), 0, 50.0, 1e-4).unwrap())
    });
    group.bench_function("metropolis_sample/256x1000", |b| {
        b.iter(|| metropolis_sample(black_box(&prior), black_box(&f.empirical), 50.0, 1000, 3).unwrap())
    });
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let f = fixture(1024, 64, 100, 4).unwrap();
    c.bench_function("profile/1024x64,n=100", |b| {
        b.iter_batched(
            || sample_dataset(&f.instance.domain, 100, 5).unwrap(),
            |data| f.instance.profile(&data).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn kappa_inverse(c: &mut Criterion) {
    c.bench_function("kappa_inverse_upper", |b| {
        b.iter(|| kappa_inverse_upper(black_box(0.12), black_box(0.07)).unwrap())
    });
}

fn margins(c: &mut Criterion) {
    let mut rng = rng_from_seed(6);
    let data: Vec<LabeledPoint> = (0..1000)
        .map(|_| {
            let z = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            LabeledPoint::new(z, if rng.gen::<bool>() { 1 } else { -1 }).unwrap()
        })
        .collect();
    let h = LinearHypothesis::from_direction(vec![0.6, 0.8], 0.1).unwrap();
    c.bench_function("margin_value/n=1000", |b| {
        b.iter(|| margin_value(black_box(&h), black_box(&data), 0.1).unwrap())
    });
}

criterion_group!(benches, gibbs_kernels, sampling, kappa_inverse, margins);
criterion_main!(benches);
