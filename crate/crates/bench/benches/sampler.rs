use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use fjopt_core::forest::DEFAULT_LANES;
use fjopt_core::generators::random_digraph;
use fjopt_core::{BatchSampler, ForestSampler, RngStream, WalkGraph};

fn single_forest(c: &mut Criterion) {
    let mut group = c.benchmark_group("forest/sequential");
    group.sample_size(20);
    for n in [10_000usize, 100_000] {
        let g = random_digraph(n, 4.0, n as u64);
        let mut sampler = ForestSampler::new(n);
        let mut idx = 0u64;
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| {
                let mut rng = RngStream::new(1, idx).rng();
                idx += 1;
                black_box(sampler.sample(g, &mut rng).unwrap()[0])
            })
        });
    }
    group.finish();
}

fn batched_forests(c: &mut Criterion) {
    let mut group = c.benchmark_group("forest/batched");
    group.sample_size(10);
    for n in [10_000usize, 100_000, 1_000_000] {
        let g = random_digraph(n, 4.0, n as u64);
        let wg = WalkGraph::new(&g);
        let mut sampler = BatchSampler::new(DEFAULT_LANES);
        let mut idx = 0u64;
        group.throughput(Throughput::Elements((n * DEFAULT_LANES) as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &wg, |b, wg| {
            b.iter(|| {
                let mut rngs: Vec<_> = (0..DEFAULT_LANES as u64)
                    .map(|j| RngStream::new(2, idx + j).rng())
                    .collect();
                idx += DEFAULT_LANES as u64;
                sampler.sample(wg, &mut rngs).unwrap();
                black_box(sampler.roots(0)[0])
            })
        });
    }
    group.finish();
}

criterion_group!(benches, single_forest, batched_forests);
criterion_main!(benches);
