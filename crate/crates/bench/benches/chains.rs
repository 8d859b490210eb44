use axireg_bench::{bench_grid, bench_state};
use axireg_core::exponents::params_from_epsilon;
use axireg_core::verifier::verify_i3_chain;
use criterion::{black_box, Criterion};

pub fn bench(c: &mut Criterion) {
    let grid = bench_grid(128);
    let state = bench_state(&grid, 3);
    let params = params_from_epsilon(0.05, 0.05).unwrap();
    c.bench_function("coupling chain 128x128", |b| {
        b.iter(|| verify_i3_chain(black_box(&state), &params, 0.1, 0.1, 0.1).unwrap())
    });
}
