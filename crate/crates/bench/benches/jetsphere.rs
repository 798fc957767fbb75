use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use jetsphere_core::checks::random_point;
use jetsphere_core::embeddings::BodyFunction;
use jetsphere_core::forms::obstruction_integral;
use jetsphere_core::metrics::{distortion_scan, SamplerSpec, ScanMap};
use jetsphere_core::{compose, jet_eval, GroupParams};

fn group_law(c: &mut Criterion) {
    let mut group = c.benchmark_group("compose");
    for (n, k) in [(1, 1), (2, 2), (3, 3), (2, 6)] {
        let params = GroupParams::new(n, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = random_point(&mut rng, params);
        let q = random_point(&mut rng, params);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("n{n}k{k}")),
            &(p, q),
            |b, (p, q)| b.iter(|| compose(black_box(p), black_box(q)).unwrap()),
        );
    }
    group.finish();
}

fn jets(c: &mut Criterion) {
    let mut group = c.benchmark_group("jet_eval/body");
    for k in [1, 2, 4] {
        let body = BodyFunction::assemble(2, k, false).unwrap();
        let x = [0.31, -0.22];
        group.bench_with_input(BenchmarkId::from_parameter(k), &body, |b, body| {
            b.iter(|| jet_eval(body.expr(), black_box(&x), k + 1).unwrap())
        });
    }
    group.finish();
}

fn obstruction(c: &mut Criterion) {
    let body = BodyFunction::assemble(2, 1, false).unwrap();
    let mut group = c.benchmark_group("obstruction");
    group.sample_size(10);
    group.bench_function("n2k1/res8", |b| {
        b.iter(|| obstruction_integral(&body, 8).unwrap())
    });
    group.finish();
}

fn distortion(c: &mut Criterion) {
    let map = ScanMap::circle(2).unwrap();
    let spec = SamplerSpec::new(2_000, 0);
    let mut group = c.benchmark_group("distortion");
    group.sample_size(10);
    group.bench_function("circle-k2/2000", |b| {
        b.iter(|| distortion_scan(&map, &spec).unwrap())
    });
    group.finish();
}

criterion_group!(benches, group_law, jets, obstruction, distortion);
criterion_main!(benches);
