use axireg_bench::{bench_grid, bench_state};
use axireg_core::operators::{curl_cyl, divergence_cyl, swirl_laplacian};
use criterion::{black_box, Criterion};

pub fn bench(c: &mut Criterion) {
    let grid = bench_grid(192);
    let state = bench_state(&grid, 2);
    c.bench_function("divergence_cyl 192x192", |b| {
        b.iter(|| divergence_cyl(black_box(&state.u_r), black_box(&state.u_z)).unwrap())
    });
    c.bench_function("curl_cyl 192x192", |b| {
        b.iter(|| {
            curl_cyl(
                black_box(&state.u_r),
                black_box(&state.u_theta),
                black_box(&state.u_z),
            )
            .unwrap()
        })
    });
    c.bench_function("swirl_laplacian 192x192", |b| {
        b.iter(|| swirl_laplacian(black_box(&state.u_theta)).unwrap())
    });
}
