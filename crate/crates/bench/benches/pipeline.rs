use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hkt_core::cstruct::{integrability_residual_matrix, nijenhuis_at_origin};
use hkt_core::liealg::{build_matrix_rep, structure_constants};
use hkt_core::spaces::{build_coset_triple, SpaceSpec, VerifyConfig};
use hkt_core::Family;

fn algebra(c: &mut Criterion) {
    c.bench_function("structure_constants A4", |b| {
        let rep = build_matrix_rep(Family::A, 4, 0).unwrap();
        b.iter(|| structure_constants(black_box(&rep)))
    });
    c.bench_function("build_matrix_rep B3 + U1^3", |b| {
        b.iter(|| build_matrix_rep(Family::B, black_box(3), 3).unwrap())
    });
}

fn verification(c: &mut Criterion) {
    let algebraic = VerifyConfig {
        nijenhuis: false,
        ..VerifyConfig::default()
    };
    for s in ["A2", "B3xU1^3", "B3xU1^2/A1:alpha", "D4xU1^4"] {
        let spec = SpaceSpec::parse(s).unwrap();
        c.bench_function(&format!("verify {s}"), |b| {
            b.iter(|| build_coset_triple(black_box(&spec), &algebraic).unwrap())
        });
    }

    let rep = build_matrix_rep(Family::A, 2, 0).unwrap();
    let f = structure_constants(&rep);
    let i = hkt_core::linalg::RMatrix::from_fn(8, 8, |r, k| match (r, k) {
        (r, k) if r == k + 1 && k % 2 == 0 => 1.0,
        (r, k) if k == r + 1 && r % 2 == 0 => -1.0,
        _ => 0.0,
    });
    c.bench_function("integrability su3", |b| b.iter(|| integrability_residual_matrix(black_box(&i), &f)));
    c.bench_function("nijenhuis su3", |b| b.iter(|| nijenhuis_at_origin(&f, &[black_box(&i)], 1e-4)));
}

criterion_group!(benches, algebra, verification);
criterion_main!(benches);
