use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use epmp_bench::planted;
use epmp_core::{
    arnoldi_factorize, epmp_sequential, hessenberg_qr_eig, power_method, ritz_values,
    seeded_unit_vector, EpmpConfig,
};

fn cfg(seed: u64) -> EpmpConfig {
    EpmpConfig {
        seed,
        t0: 5.0,
        alpha: 0.999,
        res_tol: 1e-6,
        ..EpmpConfig::default()
    }
}

fn bench_solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    for n in [128usize, 512] {
        let a = planted(n, 3);
        group.bench_with_input(BenchmarkId::new("power", n), &n, |b, _| {
            b.iter(|| power_method(black_box(&a), &cfg(7)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("epmp_seq", n), &n, |b, _| {
            b.iter(|| epmp_sequential(black_box(&a), &cfg(7)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("arnoldi_k30", n), &n, |b, _| {
            let q1 = seeded_unit_vector(n, 8).unwrap();
            b.iter(|| {
                let f = arnoldi_factorize(black_box(&a), &q1, 30).unwrap();
                ritz_values(&f).unwrap()
            })
        });
    }
    group.finish();

    let mut group = c.benchmark_group("oracle");
    for n in [64usize, 128] {
        let a = planted(n, 5);
        group.bench_with_input(BenchmarkId::new("hessenberg_qr", n), &n, |b, _| {
            b.iter(|| hessenberg_qr_eig(black_box(&a)).unwrap())
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_solvers
}
criterion_main!(benches);
