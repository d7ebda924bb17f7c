//! Rayon against the sequential path on the two data-parallel kernels.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use smlab_core::analysis;
use smlab_core::exec;
use smlab_core::gallery;
use smlab_core::integrate::{gb_report, GbKind};

fn newton_sweep(c: &mut Criterion) {
    let cfg = gallery::get("bump-torus").unwrap();
    let w = analysis::whitney(&cfg).unwrap();
    let n = 48;
    let seeds: Vec<[f64; 2]> = (0..n * n)
        .map(|k| {
            let (i, j) = (k % n, k / n);
            [-1.0 + 2.0 * (i as f64 + 0.5) / n as f64, -1.0 + 2.0 * (j as f64 + 0.5) / n as f64]
        })
        .collect();
    let mut g = c.benchmark_group("cross-cap newton sweep");
    g.bench_function("par_map", |b| b.iter(|| exec::par_map(black_box(&seeds), |s| w.newton(*s).ok())));
    g.bench_function("seq_map", |b| b.iter(|| exec::seq_map(black_box(&seeds), |s| w.newton(*s).ok())));
    g.finish();
}

fn quadrature(c: &mut Criterion) {
    let mut cfg = gallery::get("bump-torus").unwrap();
    cfg.options.depth = 4;
    let mut g = c.benchmark_group("whitney gauss-bonnet");
    g.sample_size(10);
    g.bench_function("all workers", |b| {
        b.iter(|| exec::with_threads(None, || gb_report(black_box(&cfg), GbKind::Whitney).unwrap()))
    });
    g.bench_function("one worker", |b| {
        b.iter(|| exec::with_threads(Some(1), || gb_report(black_box(&cfg), GbKind::Whitney).unwrap()))
    });
    g.finish();
}

criterion_group!(benches, newton_sweep, quadrature);
criterion_main!(benches);
