use criterion::{black_box, criterion_group, criterion_main, Criterion};

use fbweyl_core::conformal_disc::gauss_bonnet_residual;
use fbweyl_core::embedding::solve_embedding;
use fbweyl_core::numerics::{integrate, Tolerances};
use fbweyl_core::quasilocal::{mass_report, scan_masses};
use fbweyl_core::schwarzschild::{admissible_gammas, conformal_profile, SchwarzschildParams};

fn kernels(c: &mut Criterion) {
    let tol = Tolerances::default();
    c.bench_function("integrate 4/(1+x^2)", |b| {
        b.iter(|| integrate(|x| 4.0 / (1.0 + x * x), 0.0, black_box(1.0), &tol).unwrap())
    });
    c.bench_function("admissible_gammas m=3/16", |b| {
        b.iter(|| admissible_gammas(black_box(3.0 / 16.0), &tol).unwrap())
    });
}

fn geometry(c: &mut Criterion) {
    let tol = Tolerances::default();
    let p = SchwarzschildParams::example();
    let metric = conformal_profile(&p);
    c.bench_function("gauss_bonnet_residual example", |b| {
        b.iter(|| gauss_bonnet_residual(black_box(&metric), &tol).unwrap())
    });
    c.bench_function("solve_embedding example", |b| {
        b.iter(|| solve_embedding(black_box(&metric), &tol).unwrap())
    });
    c.bench_function("mass_report example", |b| {
        b.iter(|| mass_report(black_box(&p), &tol).unwrap())
    });
}

fn sweep(c: &mut Criterion) {
    let tol = Tolerances::default();
    let masses: Vec<f64> = (1..=19).map(|i| i as f64 * 0.01).collect();
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    group.bench_function("19 masses", |b| b.iter(|| scan_masses(black_box(&masses), &tol, 0).unwrap()));
    group.finish();
}

criterion_group!(benches, kernels, geometry, sweep);
criterion_main!(benches);
