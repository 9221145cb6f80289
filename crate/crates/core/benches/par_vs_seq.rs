//! Compares the data-parallel Monte Carlo driver against the sequential
//! fallback on a representative noisy-circuit batch. Run with
//! `cargo bench -p ggm-core` (parallel) and
//! `cargo bench -p ggm-core --no-default-features` (sequential baseline).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ggm_core::mesh::clements_decompose;
use ggm_core::noise::{noisy_unitary, NoiseKind, NoiseModel};
use ggm_core::numerics::haar_random_unitary;
use ggm_core::par::{map_samples, map_samples_seq};

fn bench_noisy_batches(c: &mut Criterion) {
    let n = 16;
    let target = haar_random_unitary(n, 7).expect("haar");
    let mesh = clements_decompose(&target).expect("decompose");
    let model = NoiseModel::new(NoiseKind::Uncorrelated, 0.05, 11);

    let mut group = c.benchmark_group("noisy_unitary_batch");
    for &batch in &[16usize, 64, 256] {
        group.bench_with_input(
            BenchmarkId::new("map_samples", batch),
            &batch,
            |b, &batch| {
                b.iter(|| {
                    map_samples(batch, |s| {
                        noisy_unitary(&mesh, &model, s as u64).expect("simulate")
                    })
                })
            },
        );
        group.bench_with_input(
            BenchmarkId::new("sequential", batch),
            &batch,
            |b, &batch| {
                b.iter(|| {
                    map_samples_seq(batch, |s| {
                        noisy_unitary(&mesh, &model, s as u64).expect("simulate")
                    })
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_noisy_batches);
criterion_main!(benches);
