use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lieflow_bench::{dense_matrix, h4_drive, sl2, sl2_drive};
use lieflow_core::{
    expm, quadrature_solve, solve_group_direct, solve_wei_norman, superpose_planar_sl2, LieAlgebra,
};
use std::hint::black_box;

fn bench_expm(c: &mut Criterion) {
    let mut group = c.benchmark_group("expm");
    for n in [2, 4, 8] {
        let m = dense_matrix(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| expm(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn bench_direct(c: &mut Criterion) {
    let rep = sl2();
    let b = sl2_drive();
    c.bench_function("solve_group_direct sl2 1000 steps", |bch| {
        bch.iter(|| solve_group_direct(&rep, black_box(&b), 1.0, 1e-3).unwrap())
    });
}

fn bench_wei_norman(c: &mut Criterion) {
    let alg = LieAlgebra::sl2();
    let b = sl2_drive();
    c.bench_function("solve_wei_norman sl2 1000 steps", |bch| {
        bch.iter(|| solve_wei_norman(&alg, &[0, 1, 2], black_box(&b), 1.0, 1e-3).unwrap())
    });
}

fn bench_quadrature(c: &mut Criterion) {
    let alg = LieAlgebra::heisenberg_extended();
    let b = h4_drive();
    c.bench_function("quadrature_solve h4 1000 panels", |bch| {
        bch.iter(|| quadrature_solve(&alg, &[3, 1, 2, 0], black_box(&b), 1.0, 1e-3).unwrap())
    });
}

fn bench_planar(c: &mut Criterion) {
    let (s1, s2, s3) = ([0.3, 1.1], [-0.7, 0.4], [1.2, -0.5]);
    c.bench_function("superpose_planar_sl2", |bch| {
        bch.iter(|| superpose_planar_sl2(black_box(s1), s2, s3, 0.4, -1.3).unwrap())
    });
}

criterion_group!(
    benches,
    bench_expm,
    bench_direct,
    bench_wei_norman,
    bench_quadrature,
    bench_planar
);
criterion_main!(benches);
