//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

// `!(x < tol)` is deliberate: a NaN residual must fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hkt_core::autom::Removal;
use hkt_core::cstruct::{
    bismut_residual_matrix, integrability_residual_matrix, nijenhuis_at_origin, quaternion_residual_matrix,
    self_duality_residual,
};
use hkt_core::liealg::{
    bourbaki_residual, build_matrix_rep, build_spinor_rep_b3, coroot_periodicity_check, structure_constants,
    StructureConstants,
};
use hkt_core::linalg::{max_abs, CMatrix, RMatrix};
use hkt_core::rootsys::build_root_system;
use hkt_core::spaces::{
    build_coset_triple, classify_family, factor_triple, required_padding, surgery_chain, Factor, FactorTriple,
    SpaceSpec, Verdict, VerifyConfig,
};
use hkt_core::Family;
use nalgebra::{Matrix4, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn group_triple(family: Family, rank: usize, u1: usize) -> FactorTriple {
    let factor = Factor::new(family, rank).unwrap();
    let chain = surgery_chain(&build_root_system(family, rank).unwrap()).unwrap();
    factor_triple(factor, 0, u1, &Removal::default(), &chain, 1e-9).unwrap()
}

fn dm4(m: Matrix4<f64>) -> RMatrix {
    DMatrix::from_fn(4, 4, |r, c| m[(r, c)])
}

fn sub4(m: &RMatrix, idx: [usize; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|r, c| m[(idx[r], idx[c])])
}

const BLOCK_I: [[f64; 4]; 4] = [[0., -1., 0., 0.], [1., 0., 0., 0.], [0., 0., 0., -1.], [0., 0., 1., 0.]];
const BLOCK_J: [[f64; 4]; 4] = [[0., 0., -1., 0.], [0., 0., 0., 1.], [1., 0., 0., 0.], [0., -1., 0., 0.]];
const BLOCK_K: [[f64; 4]; 4] = [[0., 0., 0., -1.], [0., 0., -1., 0.], [0., 1., 0., 0.], [1., 0., 0., 0.]];

fn m4(a: [[f64; 4]; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|r, c| a[r][c])
}

fn su2_u1() -> Outcome {
    let start = Instant::now();
    let t = group_triple(Family::A, 1, 1);
    let elapsed = start.elapsed();
    let mut worst: f64 = 0.0;
    for (got, want) in [(&t.triple.i, BLOCK_I), (&t.triple.j, BLOCK_J), (&t.triple.k, BLOCK_K)] {
        let diff = max_abs(&(&got.matrix - dm4(m4(want))));
        worst = worst.max(diff);
        ensure!(diff < 1e-12, "matrix differs from the 't Hooft block by {diff:.2e}");
        ensure!(got.matrix.iter().all(|x| [0.0, 1.0, -1.0].contains(&x.round()) && (x - x.round()).abs() < 1e-12), "entries outside {{0, +-1}}");
        let sd = self_duality_residual(&sub4(&got.matrix, [0, 1, 2, 3]));
        ensure!(sd < 1e-12, "self-duality residual {sd:.2e}");
    }
    ensure!(elapsed < Duration::from_millis(100), "took {elapsed:?}");
    Ok(format!("max entry error {worst:.1e}, self-dual, {elapsed:.2?}"))
}

fn su3() -> Outcome {
    let t = group_triple(Family::A, 2, 0);
    // generators: 0,1 = t1,t2 (alpha); 2,3 = t6,t7 (beta); 4,5 = t4,t5 (alpha+beta); 6 = t3; 7 = t8
    let f = &t.f;
    let i = &t.triple.i.matrix;
    let j = &t.triple.j.matrix;
    let k = &t.triple.k.matrix;
    let di = [[4usize, 5, 6, 7], [0, 1, 2, 3]]
        .iter()
        .map(|&b| (sub4(i, b) - m4(BLOCK_I)).abs().max())
        .fold(0.0, f64::max);
    ensure!(di < 1e-12, "I is not diag(I, I): {di:.2e}");
    let offblock = (0..8)
        .flat_map(|r| (0..8).map(move |c| (r, c)))
        .filter(|&(r, c)| (r < 4) != (c < 4))
        .map(|(r, c)| i[(r, c)].abs())
        .fold(0.0, f64::max);
    ensure!(offblock < 1e-12, "I mixes the two blocks: {offblock:.2e}");
    ensure!((i[(7, 6)] - 1.0).abs() < 1e-12, "I_83 = {}", i[(7, 6)]);
    // Jt1 = -t6, Jt2 = t7, Jt6 = t1, Jt7 = -t2 (column convention)
    let expect = [((2, 0), -1.0), ((3, 1), 1.0), ((0, 2), 1.0), ((1, 3), -1.0)];
    let dj = expect
        .iter()
        .map(|&((r, c), v)| (j[(r, c)] - v).abs())
        .fold(0.0, f64::max);
    ensure!(dj < 1e-10, "J action on roots off by {dj:.2e}");
    let q = quaternion_residual_matrix(i, j, k);
    let integ = [i, j, k]
        .iter()
        .map(|m| integrability_residual_matrix(m, f))
        .fold(0.0, f64::max);
    ensure!(q < 1e-9 && integ < 1e-9, "quaternion {q:.2e}, integrability {integ:.2e}");
    Ok(format!("J action error {dj:.1e}, quaternion {q:.1e}, integrability {integ:.1e}"))
}

fn group_certification() -> Outcome {
    let cfg = VerifyConfig::default();
    let mut lines = Vec::new();
    for s in ["A2", "A3xU1", "A4", "A6", "C2xU1^2", "B3xU1^3", "D4xU1^4"] {
        let start = Instant::now();
        let r = build_coset_triple(&SpaceSpec::parse(s).unwrap(), &cfg).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        ensure!(r.verdict == Verdict::Certified, "{s}: {} {:?}", r.verdict, r.message);
        let c = r.certificate.as_ref().unwrap();
        for g in [&c.residuals.i, &c.residuals.j, &c.residuals.k] {
            ensure!(g.integrability < 1e-9, "{s}: integrability {:.2e}", g.integrability);
            let tm = g.torsion_match.ok_or(format!("{s}: torsion missing"))?;
            ensure!(tm < 1e-8, "{s}: torsion {tm:.2e}");
        }
        ensure!(c.quaternion < 1e-9, "{s}: quaternion {:.2e}", c.quaternion);
        ensure!(elapsed < Duration::from_secs(10), "{s}: took {elapsed:?}");
        lines.push(format!("{} {:.2?}", r.name, elapsed));
    }
    Ok(lines.join(", "))
}

fn classification() -> Outcome {
    let expected = |f: Family, l: usize| -> i64 {
        let l = l as i64;
        match f {
            Family::A if l % 2 == 0 => 0,
            Family::A => 1,
            Family::B | Family::C => l,
            Family::D if l % 2 == 0 => l,
            Family::D => l - 2,
        }
    };
    let mut n = 0;
    for (f, max) in [(Family::A, 8), (Family::B, 4), (Family::C, 4), (Family::D, 5)] {
        for row in classify_family(f, max).map_err(|e| e.to_string())? {
            // rank-1 coincidences with su(2): padding 1
            let want = if row.rank == 1 { 1 } else { expected(f, row.rank) };
            ensure!(row.padding == want, "{f}{}: padding {} expected {want}", row.rank, row.padding);
            n += 1;
        }
    }
    let p = required_padding(&[Factor::new(Family::D, 4).unwrap(), Factor::new(Family::A, 3).unwrap()]).unwrap();
    ensure!(p == 5, "padding not additive: {p}");
    Ok(format!("{n} rows match"))
}

fn cosets() -> Outcome {
    let cfg = VerifyConfig::default();
    let cases = [
        ("A3/A1:beta", 12, "SU(4)/SU(2)"),
        ("A3xU1/A1:betaxU1", 12, "SU(4)/(SU(2) x U(1)) x U(1)"),
        ("A2xU1/U1", 8, "SU(3)/U(1) x U(1)"),
        ("A6/A4:beta+gamma+delta+epsilon", 24, "SU(7)/SU(5)"),
        ("B3xU1/A1:alphaxA1:gamma", 16, "Spin(7)/(SU(2) x SU(2)) x U(1)"),
        ("B3xU1^2/A1:alpha", 20, "Spin(7)/SU(2) x [U(1)]^2"),
    ];
    let mut worst: f64 = 0.0;
    let mut leak: f64 = 0.0;
    for (s, dim, name) in cases {
        let r = build_coset_triple(&SpaceSpec::parse(s).unwrap(), &cfg).map_err(|e| e.to_string())?;
        ensure!(r.name == name, "{s}: name {}", r.name);
        ensure!(r.dimension == dim, "{s}: dimension {}", r.dimension);
        ensure!(r.verdict == Verdict::Certified, "{s}: {} {:?}", r.verdict, r.message);
        let c = r.certificate.as_ref().unwrap();
        // the automorphisms are floating-point exponentials, so "exact" means rounding level
        ensure!(c.invariance_leak < 1e-14, "{s}: subspace leak {:.2e}", c.invariance_leak);
        leak = leak.max(c.invariance_leak);
        ensure!(c.quaternion < 1e-9, "{s}: quaternion {:.2e}", c.quaternion);
        for g in [&c.residuals.i, &c.residuals.j, &c.residuals.k] {
            ensure!(g.integrability < 1e-9 && g.square < 1e-9, "{s}: integrability {:.2e}", g.integrability);
            worst = worst.max(g.integrability);
        }
        let js: Vec<&str> = c
            .automorphisms
            .iter()
            .filter(|a| a.kind == hkt_core::autom::AutomorphismKind::JKind)
            .map(|a| a.label.as_str())
            .collect();
        if s == "A3/A1:beta" {
            ensure!(js == ["alpha+beta+gamma"], "{s}: automorphisms {js:?}");
        }
        if s == "B3xU1^2/A1:alpha" {
            ensure!(js == ["alpha+2beta+2gamma", "gamma"], "{s}: automorphisms {js:?}");
        }
    }
    Ok(format!("6 cosets certified, max leak {leak:.1e}, max integrability {worst:.1e}"))
}

fn property_suites() -> Outcome {
    let cfg = VerifyConfig {
        nijenhuis: false,
        ..VerifyConfig::default()
    };
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for (fam, lo, hi) in [(Family::A, 1, 8), (Family::B, 2, 4), (Family::C, 2, 4), (Family::D, 3, 5)] {
        for rank in lo..=hi {
            let factor = Factor::new(fam, rank).unwrap();
            let p = required_padding(&[factor]).unwrap() as usize;
            let rep = build_matrix_rep(fam, rank, p).unwrap();
            let jac = structure_constants(&rep).jacobi_residual();
            ensure!(jac < 1e-9, "{factor}: jacobi {jac:.2e}");
            let r = build_coset_triple(&SpaceSpec::group(vec![factor], p), &cfg).map_err(|e| e.to_string())?;
            let c = r.certificate.as_ref().ok_or(format!("{factor}: no certificate"))?;
            for a in &c.automorphisms {
                ensure!(a.orthogonality < 1e-9 && a.invariance < 1e-9, "{factor}: automorphism {} {:?}", a.label, a);
                worst = worst.max(a.orthogonality).max(a.invariance).max(jac);
            }
            count += 1;
        }
    }
    for (fam, rank) in [(Family::A, 2), (Family::A, 3), (Family::B, 3)] {
        let b = bourbaki_residual(&build_matrix_rep(fam, rank, 0).unwrap());
        ensure!(b < 1e-9, "{fam}{rank}: Bourbaki residual {b:.2e}");
    }
    let reps = [
        build_matrix_rep(Family::A, 1, 0).unwrap(),
        build_matrix_rep(Family::A, 2, 0).unwrap(),
        build_spinor_rep_b3(0).unwrap(),
    ];
    for rep in &reps {
        for r in &rep.root_system.positive_roots {
            let h: CMatrix = rep.coroot_matrix(r);
            let p = coroot_periodicity_check(rep, &h).map_err(|e| e.to_string())?;
            ensure!(p.period_ok && p.min_nontrivial, "periodicity fails for {:?}", r.coords);
        }
    }
    let (rel, term) = su3_relations();
    ensure!(rel < 1e-10, "su(3) relations residual {rel:.2e}");
    ensure!(term > 0.1, "su(3) relations hold only because every term vanishes");
    Ok(format!("{count} algebras, max residual {worst:.1e}, relations {rel:.1e}"))
}

/// Both relations for every ordered triple of distinct positive roots `(a, b, c)` of su(3) with `a + b != c`.
fn su3_relations() -> (f64, f64) {
    let rep = build_matrix_rep(Family::A, 2, 0).unwrap();
    let f = structure_constants(&rep);
    let rs = &rep.root_system;
    let n = rs.num_positive();
    let mut worst: f64 = 0.0;
    let mut largest_term: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if a == b || b == c || a == c {
                    continue;
                }
                let sum = hkt_core::rootsys::add(&rs.positive_roots[a].coords, &rs.positive_roots[b].coords);
                if sum == rs.positive_roots[c].coords {
                    continue;
                }
                let (ea, eb, ec) = (rep.entry_for_root(a), rep.entry_for_root(b), rep.entry_for_root(c));
                let (x, xs) = (ea.re_index, ea.im_index);
                let (y, ys) = (eb.re_index, eb.im_index);
                let (z, zs) = (ec.re_index, ec.im_index);
                let r1 = f.get(x, y, zs) - f.get(xs, ys, zs);
                let r2 = f.get(xs, y, z) + f.get(x, ys, z);
                let r3 = f.get(x, y, zs) + f.get(ys, xs, zs) - f.get(z, ys, x) - f.get(xs, z, y);
                worst = worst.max(r1.abs()).max(r2.abs()).max(r3.abs());
                largest_term = largest_term.max(f.get(x, y, zs).abs()).max(f.get(xs, y, z).abs());
            }
        }
    }
    (worst, largest_term)
}

fn haar_structure(rng: &mut ChaCha8Rng, dim: usize) -> RMatrix {
    let g = RMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..dim {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    let mut i0 = RMatrix::zeros(dim, dim);
    for p in 0..dim / 2 {
        i0[(2 * p + 1, 2 * p)] = 1.0;
        i0[(2 * p, 2 * p + 1)] = -1.0;
    }
    &q * i0 * q.transpose()
}

fn negative_control() -> Outcome {
    let rep = build_matrix_rep(Family::A, 2, 0).unwrap();
    let f = structure_constants(&rep);
    let mut rng = ChaCha8Rng::seed_from_u64(20240917);
    let mut min_integ = f64::INFINITY;
    let mut max_bismut: f64 = 0.0;
    for _ in 0..100 {
        let i = haar_structure(&mut rng, 8);
        ensure!(max_abs(&(&i + i.transpose())) < 1e-12, "sample not antisymmetric");
        min_integ = min_integ.min(integrability_residual_matrix(&i, &f));
        max_bismut = max_bismut.max(bismut_residual_matrix(&i, &f));
    }
    ensure!(min_integ > 1e-2, "min integrability {min_integ:.2e}");
    ensure!(max_bismut < 1e-12, "max bismut {max_bismut:.2e}");
    Ok(format!("min integrability {min_integ:.3}, max bismut {max_bismut:.1e}"))
}

fn nijenhuis_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut agree = 0;
    let mut lines = Vec::new();
    for (fam, rank, u1) in [(Family::A, 2, 0), (Family::A, 1, 1)] {
        let t = group_triple(fam, rank, u1);
        let f: &StructureConstants = &t.f;
        let d = f.dim();
        let mut cands: Vec<RMatrix> = vec![t.triple.i.matrix.clone(), t.triple.j.matrix.clone(), t.triple.k.matrix.clone()];
        cands.extend((0..12).map(|_| haar_structure(&mut rng, d)));
        let refs: Vec<&RMatrix> = cands.iter().collect();
        let nij = nijenhuis_at_origin(f, &refs, 1e-4);
        let (mut integrable, mut not) = (0, 0);
        for (m, n) in cands.iter().zip(&nij) {
            let alg = integrability_residual_matrix(m, f);
            let alg_ok = alg < 1e-9;
            let fd_ok = n.residual < 1e-5;
            ensure!(alg_ok == fd_ok, "{fam}{rank}: algebraic {alg:.2e} but Nijenhuis {:.2e}", n.residual);
            if alg_ok {
                integrable += 1;
            } else {
                not += 1;
            }
            agree += 1;
        }
        lines.push(format!("{fam}{rank}xU1^{u1}: {integrable} integrable, {not} not"));
    }
    Ok(format!("{agree} structures agree ({})", lines.join("; ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 SU(2)xU(1) 't Hooft triple", su2_u1),
        ("2 SU(3) triple and J action", su3),
        ("3 group manifold certification", group_certification),
        ("4 U(1) padding classification", classification),
        ("5 coset certification", cosets),
        ("6 property suites", property_suites),
        ("7 negative control", negative_control),
        ("8 Nijenhuis cross-check", nijenhuis_consistency),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let out = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match out {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({why})");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
