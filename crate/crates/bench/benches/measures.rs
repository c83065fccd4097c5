use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qcorr_core::measures::DistanceEngine;
use qcorr_core::*;

fn bench_states(c: &mut Criterion) {
    c.bench_function("construct_horodecki_4x4_key", |b| {
        b.iter(|| black_box(horodecki_4x4_key()))
    });
    c.bench_function("construct_upb_pyramid", |b| b.iter(|| black_box(upb_pyramid())));
}

fn bench_bloch(c: &mut Criterion) {
    let key = horodecki_4x4_key();
    c.bench_function("decompose_16x16", |b| {
        b.iter(|| black_box(decompose(black_box(&key)).unwrap()))
    });
    let wide = benatti_4x4().reinterpret(2, 8).unwrap();
    c.bench_function("decompose_2x8", |b| {
        b.iter(|| black_box(decompose(black_box(&wide)).unwrap()))
    });
}

fn bench_measures(c: &mut Criterion) {
    let key = horodecki_4x4_key();
    c.bench_function("gd_lower_bound_key", |b| {
        b.iter(|| black_box(gd_lower_bound(black_box(&key)).unwrap()))
    });
    let tiles = upb_tiles();
    c.bench_function("min_exact_nondegenerate_tiles", |b| {
        b.iter(|| black_box(min_exact_nondegenerate(black_box(&tiles)).unwrap()))
    });
    let pyramid = upb_pyramid();
    c.bench_function("min_exact_2d_block_pyramid", |b| {
        b.iter(|| black_box(min_exact_2d_block(black_box(&pyramid)).unwrap()))
    });

    // one full measurement evaluation through both routes
    let meas = Measurement::computational(4);
    c.bench_function("normalized_distance_key", |b| {
        b.iter(|| black_box(normalized_distance(black_box(&key), black_box(&meas)).unwrap()))
    });
    let engine = DistanceEngine::new(&key).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = haar_unitary(4, &mut rng);
    let kets: Vec<_> = (0..4).map(|j| u.column(j).into_owned()).collect();
    c.bench_function("distance_engine_key", |b| {
        b.iter(|| black_box(engine.normalized_disturbance(black_box(&kets))))
    });
}

fn bench_sampling(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    c.bench_function("haar_unitary_4", |b| {
        b.iter(|| black_box(haar_unitary(4, &mut rng)))
    });

    let tiles = upb_tiles();
    c.bench_function("sample_gd_tiles_256", |b| {
        b.iter(|| black_box(sample_gd(&tiles, &SamplerConfig::new(256, 1)).unwrap()))
    });
}

criterion_group!(benches, bench_states, bench_bloch, bench_measures, bench_sampling);
criterion_main!(benches);
