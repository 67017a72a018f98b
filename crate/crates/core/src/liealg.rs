//! Matrix representations of compact classical algebras in a Hermitian,
//! trace-orthonormal generator basis adapted to the root decomposition.
//!
//! Generators are ordered as: for every positive root (in root-system order)
//! the pair `(t_A, t_A*)` with `E_alpha = s (t_A + i t_A*)`, then an
//! orthonormal basis of the Cartan subalgebra, then the appended `u(1)`
//! generators. Every generator satisfies `Tr(t_A t_B) = C delta_AB`.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HktError, Result};
use crate::linalg::{c, commutator, dagger, embed, expm, max_abs, trace_product, CMatrix, RMatrix, I};
use crate::rootsys::{self, build_root_system, coroot, to_f64, Family, Rational, RootSystem, Sign};

/// Default zero tolerance for algebraic identities.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootVectorEntry {
    /// Index into `RootSystem::positive_roots`.
    pub root: usize,
    pub re_index: usize,
    pub im_index: usize,
    /// `E_alpha = scale * (t_re + i t_im)`.
    pub scale: f64,
}

#[derive(Debug, Clone)]
pub struct AlgebraRep {
    pub root_system: RootSystem,
    pub matrix_dim: usize,
    pub generators: Vec<CMatrix>,
    pub norm_const: f64,
    /// Indices of the abelian directions (Cartan subalgebra followed by the `u(1)` generators).
    pub csa_indices: Vec<usize>,
    pub u1_count: usize,
    pub root_vector_table: Vec<RootVectorEntry>,
    /// `true` when the representation is faithful for the simply connected group.
    pub faithful: bool,
    pub tol: f64,
    coord_ops: Vec<CMatrix>,
    root_vectors: Vec<CMatrix>,
}

/// Raw data from which a representation is assembled.
struct RawRep {
    dim: usize,
    spanning: Vec<CMatrix>,
    coord_ops: Vec<CMatrix>,
    csa_candidates: Vec<CMatrix>,
    norm_const: f64,
    faithful: bool,
}

fn elem(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = c(1.0, 0.0);
    m
}

fn hermitian_parts(e: &CMatrix) -> (CMatrix, CMatrix) {
    let ed = dagger(e);
    let x = (e + &ed) * c(0.5, 0.0);
    let y = (e - &ed) * c(0.0, -0.5);
    (x, y)
}

fn raw_unitary(rank: usize) -> RawRep {
    let d = rank + 1;
    let mut spanning = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let (x, y) = hermitian_parts(&elem(d, i, j));
            spanning.push(x);
            spanning.push(y);
        }
    }
    for i in 0..rank {
        spanning.push((elem(d, i, i) - elem(d, i + 1, i + 1)) * c(0.5, 0.0));
    }
    let coord_ops: Vec<CMatrix> = (0..d).map(|i| elem(d, i, i)).collect();
    let id = CMatrix::identity(d, d) * c(1.0 / d as f64, 0.0);
    let csa_candidates = coord_ops.iter().map(|h| h - &id).collect();
    RawRep {
        dim: d,
        spanning,
        coord_ops,
        csa_candidates,
        norm_const: 0.5,
        faithful: true,
    }
}

fn raw_symplectic(rank: usize) -> RawRep {
    let n = rank;
    let d = 2 * n;
    let mut roots = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            roots.push(elem(d, i, j) - elem(d, n + j, n + i));
            roots.push(elem(d, i, n + j) + elem(d, j, n + i));
        }
        roots.push(elem(d, i, n + i));
    }
    let coord_ops: Vec<CMatrix> = (0..n).map(|i| elem(d, i, i) - elem(d, n + i, n + i)).collect();
    let mut spanning = Vec::new();
    for e in &roots {
        let (x, y) = hermitian_parts(e);
        spanning.push(x);
        spanning.push(y);
    }
    spanning.extend(coord_ops.iter().map(|h| h * c(0.5, 0.0)));
    RawRep {
        dim: d,
        spanning,
        csa_candidates: coord_ops.clone(),
        coord_ops,
        norm_const: 0.5,
        faithful: true,
    }
}

/// `so(n)` from rotation generators `T_jk`; the Cartan subalgebra is spanned
/// by `T_{12}, T_{34}, ...`.
fn raw_orthogonal(n_vec: usize, rank: usize, t: impl Fn(usize, usize) -> CMatrix, faithful: bool) -> RawRep {
    let mut spanning = Vec::new();
    for j in 0..n_vec {
        for k in j + 1..n_vec {
            spanning.push(t(j, k));
        }
    }
    let coord_ops: Vec<CMatrix> = (0..rank).map(|i| t(2 * i, 2 * i + 1)).collect();
    let dim = spanning[0].nrows();
    RawRep {
        dim,
        spanning,
        csa_candidates: coord_ops.clone(),
        coord_ops,
        norm_const: 1.0,
        faithful,
    }
}

/// Vector-representation rotation generator `T_jk = i (E_jk - E_kj)`.
pub fn vector_rotation(n: usize, j: usize, k: usize) -> CMatrix {
    (elem(n, j, k) - elem(n, k, j)) * I
}

fn frob(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Gram-Schmidt of Hermitian matrices under `Re Tr(X Y) / C`.
fn orthonormalize(spanning: &[CMatrix], norm_const: f64, tol: f64) -> Result<Vec<CMatrix>> {
    let mut basis: Vec<CMatrix> = Vec::with_capacity(spanning.len());
    for (k, m) in spanning.iter().enumerate() {
        let mut v = m.clone();
        for _ in 0..2 {
            for b in &basis {
                let p = frob(b, &v) / norm_const;
                v -= b * c(p, 0.0);
            }
        }
        let n2 = frob(&v, &v) / norm_const;
        if n2.sqrt() < tol.sqrt() {
            let (worst, _) = basis
                .iter()
                .enumerate()
                .map(|(i, b)| (i, (frob(b, m) / norm_const).abs()))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            return Err(HktError::Orthonormalization {
                first: worst,
                second: k,
                residual: n2.sqrt(),
            });
        }
        basis.push(v * c(1.0 / n2.sqrt(), 0.0));
    }
    Ok(basis)
}

fn coeffs_complex(basis: &[CMatrix], norm_const: f64, m: &CMatrix) -> DVector<Complex64> {
    DVector::from_iterator(basis.len(), basis.iter().map(|b| trace_product(b, m) / norm_const))
}

fn combine(basis: &[CMatrix], v: &DVector<Complex64>) -> CMatrix {
    let n = basis[0].nrows();
    let mut out = CMatrix::zeros(n, n);
    for (b, x) in basis.iter().zip(v.iter()) {
        if x.norm() > 0.0 {
            out += b * *x;
        }
    }
    out
}

fn coroot_matrix_of(coord_ops: &[CMatrix], coords: &[Rational]) -> CMatrix {
    let vals = to_f64(coords);
    let n = coord_ops[0].nrows();
    let mut h = CMatrix::zeros(n, n);
    for (op, x) in coord_ops.iter().zip(vals) {
        if x != 0.0 {
            h += op * c(x, 0.0);
        }
    }
    h
}

/// Scale `e` so that `[e, e^dagger] = h`; returns the scaled matrix and the
/// factor it was divided by.
fn chevalley_scale(e: &CMatrix, h: &CMatrix, label: &str, tol: f64) -> Result<(CMatrix, f64)> {
    let comm = commutator(e, &dagger(e));
    let lambda = trace_product(&comm, h).re / trace_product(h, h).re;
    if lambda <= tol {
        return Err(HktError::PhaseFixing {
            root: label.to_string(),
            reason: format!("[E, E^dagger] has non-positive projection {lambda:.3e} on the coroot"),
        });
    }
    let s = lambda.sqrt();
    let scaled = e * c(1.0 / s, 0.0);
    let resid = max_abs(&(commutator(&scaled, &dagger(&scaled)) - h));
    if resid > tol {
        return Err(HktError::PhaseFixing {
            root: label.to_string(),
            reason: format!("[E, E^dagger] - coroot residual {resid:.3e}"),
        });
    }
    Ok((scaled, s))
}

/// Chevalley-normalized positive root vectors expressed in an arbitrary
/// Hermitian orthonormal basis. Simple root vectors are joint eigenvectors
/// of the CSA adjoint action, with the phase fixed so that the leading
/// nonzero matrix entry is real positive; the others are commutators of
/// simple ones, rescaled to `[E, E^dagger] = alpha^vee`.
fn compute_root_vectors(
    basis: &[CMatrix],
    coord_ops: &[CMatrix],
    rs: &RootSystem,
    norm_const: f64,
    tol: f64,
) -> Result<(Vec<CMatrix>, Vec<f64>)> {
    let dim = basis.len();
    let ads: Vec<nalgebra::DMatrix<Complex64>> = coord_ops
        .iter()
        .map(|h| {
            let mut ad = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
            for (a, ta) in basis.iter().enumerate() {
                let col = coeffs_complex(basis, norm_const, &commutator(h, ta));
                ad.set_column(a, &col);
            }
            ad
        })
        .collect();

    let mut vectors: Vec<Option<CMatrix>> = vec![None; rs.num_positive()];
    let mut factors = vec![1.0; rs.num_positive()];
    for (i, simple) in rs.simple_roots.iter().enumerate() {
        let label = rootsys::simple_root_name(rs.simple_labels[i]);
        let weight = to_f64(&simple.coords);
        let mut m = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
        for (ad, w) in ads.iter().zip(&weight) {
            let shifted = ad - nalgebra::DMatrix::<Complex64>::identity(dim, dim) * c(*w, 0.0);
            m += shifted.adjoint() * &shifted;
        }
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let smallest = eig.eigenvalues[order[0]];
        let next = eig.eigenvalues[order[1]];
        if smallest.abs() > tol || next < 1e-6 {
            return Err(HktError::DegenerateEigenspace {
                root: label,
                smallest,
                next,
            });
        }
        let v = eig.eigenvectors.column(order[0]).into_owned();
        let mut e = combine(basis, &v);
        let h = coroot_matrix_of(coord_ops, &coroot(simple));
        e = chevalley_scale(&e, &h, &label, tol)?.0;
        let lead = e
            .transpose()
            .iter()
            .copied()
            .find(|z| z.norm() > 1e-8)
            .ok_or_else(|| HktError::PhaseFixing {
                root: label.clone(),
                reason: "root vector vanished".into(),
            })?;
        e *= lead.conj() / lead.norm();
        let k = rs.locate(&simple.coords).expect("simple root is a root").0;
        vectors[k] = Some(e);
    }

    for k in 0..rs.num_positive() {
        if vectors[k].is_some() {
            continue;
        }
        let coeffs = &rs.coefficients[k];
        let (i, j) = (0..rs.rank)
            .find_map(|i| {
                if coeffs[i] == 0 {
                    return None;
                }
                let mut lower = coeffs.clone();
                lower[i] -= 1;
                let coords = rootsys::sub(&rs.positive_roots[k].coords, &rs.simple_roots[i].coords);
                let _ = lower;
                match rs.locate(&coords) {
                    Some((j, Sign::Positive)) if vectors[j].is_some() => Some((i, j)),
                    _ => None,
                }
            })
            .expect("every non-simple positive root is a simple root plus a lower root");
        let si = rs.locate(&rs.simple_roots[i].coords).unwrap().0;
        let raw = commutator(vectors[si].as_ref().unwrap(), vectors[j].as_ref().unwrap());
        let h = coroot_matrix_of(coord_ops, &coroot(&rs.positive_roots[k]));
        let (e, s) = chevalley_scale(&raw, &h, &rs.root_label(k), tol)?;
        vectors[k] = Some(e);
        factors[k] = s;
    }
    Ok((vectors.into_iter().map(Option::unwrap).collect(), factors))
}

/// Build the representation of `family`/`rank` with `u1_count` appended
/// abelian generators.
pub fn build_matrix_rep(family: Family, rank: usize, u1_count: usize) -> Result<AlgebraRep> {
    build_matrix_rep_with_tol(family, rank, u1_count, DEFAULT_TOL)
}

pub fn build_matrix_rep_with_tol(family: Family, rank: usize, u1_count: usize, tol: f64) -> Result<AlgebraRep> {
    let rs = build_root_system(family, rank)?;
    let raw = match family {
        Family::A => raw_unitary(rank),
        Family::C => raw_symplectic(rank),
        Family::B => raw_orthogonal(2 * rank + 1, rank, |j, k| vector_rotation(2 * rank + 1, j, k), false),
        Family::D => raw_orthogonal(2 * rank, rank, |j, k| vector_rotation(2 * rank, j, k), false),
    };
    assemble(rs, raw, u1_count, tol)
}

/// `spin(7)` in its 8-dimensional spinor representation, `T_jk = i gamma_j gamma_k / 2`.
pub fn build_spinor_rep_b3(u1_count: usize) -> Result<AlgebraRep> {
    let cl = build_clifford(7)?;
    let rs = build_root_system(Family::B, 3)?;
    let raw = raw_orthogonal(7, 3, |j, k| cl.spin_generator(j, k), true);
    assemble(rs, raw, u1_count, DEFAULT_TOL)
}

fn assemble(rs: RootSystem, raw: RawRep, u1_count: usize, tol: f64) -> Result<AlgebraRep> {
    let cst = raw.norm_const;
    let total = raw.dim + u1_count;
    let basis = orthonormalize(&raw.spanning, cst, tol)?;
    let (vectors, _) = compute_root_vectors(&basis, &raw.coord_ops, &rs, cst, tol)?;

    let mut generators = Vec::with_capacity(rs.algebra_dim() + u1_count);
    let mut table = Vec::with_capacity(rs.num_positive());
    for (k, e) in vectors.iter().enumerate() {
        let (x, y) = hermitian_parts(e);
        let nx = (frob(&x, &x) / cst).sqrt();
        let ny = (frob(&y, &y) / cst).sqrt();
        if (nx - ny).abs() > tol {
            return Err(HktError::PhaseFixing {
                root: rs.root_label(k),
                reason: format!("real and imaginary parts have unequal norms {nx} vs {ny}"),
            });
        }
        table.push(RootVectorEntry {
            root: k,
            re_index: generators.len(),
            im_index: generators.len() + 1,
            scale: nx,
        });
        generators.push(embed(&(x * c(1.0 / nx, 0.0)), total));
        generators.push(embed(&(y * c(1.0 / ny, 0.0)), total));
    }
    let csa = orthonormalize_dropping(&raw.csa_candidates, cst, tol);
    if csa.len() != rs.rank {
        return Err(HktError::Dimension(format!(
            "Cartan subalgebra basis has {} elements, rank is {}",
            csa.len(),
            rs.rank
        )));
    }
    let mut csa_indices = Vec::new();
    for h in csa {
        csa_indices.push(generators.len());
        generators.push(embed(&h, total));
    }
    for k in 0..u1_count {
        let mut u = CMatrix::zeros(total, total);
        u[(raw.dim + k, raw.dim + k)] = c(cst.sqrt(), 0.0);
        csa_indices.push(generators.len());
        generators.push(u);
    }

    let coord_ops = raw.coord_ops.iter().map(|h| embed(h, total)).collect();
    let root_vectors = vectors.iter().map(|e| embed(e, total)).collect();
    let rep = AlgebraRep {
        root_system: rs,
        matrix_dim: total,
        generators,
        norm_const: cst,
        csa_indices,
        u1_count,
        root_vector_table: table,
        faithful: raw.faithful,
        tol,
        coord_ops,
        root_vectors,
    };
    rep.check_orthonormal()?;
    Ok(rep)
}

fn orthonormalize_dropping(cands: &[CMatrix], cst: f64, tol: f64) -> Vec<CMatrix> {
    let mut basis: Vec<CMatrix> = Vec::new();
    for m in cands {
        let mut v = m.clone();
        for _ in 0..2 {
            for b in &basis {
                let p = frob(b, &v) / cst;
                v -= b * c(p, 0.0);
            }
        }
        let n = (frob(&v, &v) / cst).sqrt();
        if n > tol.sqrt() {
            basis.push(v * c(1.0 / n, 0.0));
        }
    }
    basis
}

impl AlgebraRep {
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn family(&self) -> Family {
        self.root_system.family
    }

    pub fn rank(&self) -> usize {
        self.root_system.rank
    }

    /// Dimension of the simple part.
    pub fn simple_dim(&self) -> usize {
        self.dim() - self.u1_count
    }

    /// Real coefficients `(1/C) Re Tr(X t_A)` of a Hermitian matrix.
    pub fn coefficients(&self, m: &CMatrix) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.generators.iter().map(|t| trace_product(t, m).re / self.norm_const),
        )
    }

    pub fn coefficients_complex(&self, m: &CMatrix) -> DVector<Complex64> {
        coeffs_complex(&self.generators, self.norm_const, m)
    }

    pub fn matrix_of(&self, v: &DVector<f64>) -> CMatrix {
        let vc = v.map(|x| c(x, 0.0));
        combine(&self.generators, &vc)
    }

    /// Matrix of the CSA element with the given orthogonal coordinates,
    /// e.g. a coroot `alpha^vee`.
    pub fn csa_matrix(&self, coords: &[Rational]) -> CMatrix {
        coroot_matrix_of(&self.coord_ops, coords)
    }

    pub fn coroot_matrix(&self, root: &rootsys::Root) -> CMatrix {
        self.csa_matrix(&coroot(root))
    }

    /// Chevalley-normalized `E_alpha` for a positive root index and sign.
    pub fn root_vector(&self, k: usize, sign: Sign) -> CMatrix {
        match sign {
            Sign::Positive => self.root_vectors[k].clone(),
            Sign::Negative => dagger(&self.root_vectors[k]),
        }
    }

    /// `E_alpha` for any root given by its coordinates.
    pub fn root_vector_of(&self, coords: &[Rational]) -> Option<CMatrix> {
        self.root_system.locate(coords).map(|(k, s)| self.root_vector(k, s))
    }

    pub fn entry_for_root(&self, k: usize) -> &RootVectorEntry {
        &self.root_vector_table[k]
    }

    fn check_orthonormal(&self) -> Result<()> {
        let d = self.dim();
        for a in 0..d {
            let ta = &self.generators[a];
            let herm = max_abs(&(ta - dagger(ta)));
            if herm > self.tol {
                return Err(HktError::Orthonormalization {
                    first: a,
                    second: a,
                    residual: herm,
                });
            }
            for b in a..d {
                let g = trace_product(ta, &self.generators[b]) / self.norm_const;
                let target = if a == b { 1.0 } else { 0.0 };
                let r = (g - c(target, 0.0)).norm();
                if r > self.tol {
                    return Err(HktError::Orthonormalization {
                        first: a,
                        second: b,
                        residual: r,
                    });
                }
            }
        }
        Ok(())
    }

    /// Maximum of `|Tr(t_A t_B) - C delta_AB|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                let g = trace_product(&self.generators[a], &self.generators[b]);
                let target = if a == b { self.norm_const } else { 0.0 };
                worst = worst.max((g - c(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Replace the abelian generators by `new_basis`, a list of orthonormal
    /// coefficient vectors supported on `csa_indices`. The root generators are
    /// untouched.
    pub fn rebase_abelian(&self, new_basis: &[DVector<f64>]) -> Result<AlgebraRep> {
        if new_basis.len() != self.csa_indices.len() {
            return Err(HktError::Dimension(format!(
                "abelian basis needs {} vectors, got {}",
                self.csa_indices.len(),
                new_basis.len()
            )));
        }
        for (i, v) in new_basis.iter().enumerate() {
            for (a, x) in v.iter().enumerate() {
                if x.abs() > self.tol && !self.csa_indices.contains(&a) {
                    return Err(HktError::Dimension(format!(
                        "abelian basis vector {i} has weight on non-abelian generator {a}"
                    )));
                }
            }
            for (j, w) in new_basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                if (v.dot(w) - target).abs() > self.tol {
                    return Err(HktError::Orthonormalization {
                        first: i,
                        second: j,
                        residual: (v.dot(w) - target).abs(),
                    });
                }
            }
        }
        let mut out = self.clone();
        for (slot, v) in self.csa_indices.iter().zip(new_basis) {
            out.generators[*slot] = self.matrix_of(v);
        }
        Ok(out)
    }

    pub fn to_doc(&self) -> AlgebraRepDoc {
        AlgebraRepDoc {
            family: self.family(),
            rank: self.rank(),
            u1_count: self.u1_count,
            norm_const: self.norm_const,
            matrix_dim: self.matrix_dim,
            generators: self
                .generators
                .iter()
                .map(|g| g.transpose().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            csa_indices: self.csa_indices.clone(),
            root_table: self
                .root_vector_table
                .iter()
                .map(|e| RootTableDoc {
                    root: self.root_system.positive_roots[e.root]
                        .coords
                        .iter()
                        .map(rootsys::format_rational)
                        .collect(),
                    re_index: e.re_index,
                    im_index: e.im_index,
                    scale: e.scale,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootTableDoc {
    pub root: Vec<String>,
    pub re_index: usize,
    pub im_index: usize,
    pub scale: f64,
}

/// JSON form of a representation: generator matrices row-major as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraRepDoc {
    pub family: Family,
    pub rank: usize,
    pub u1_count: usize,
    pub norm_const: f64,
    pub matrix_dim: usize,
    pub generators: Vec<Vec<[f64; 2]>>,
    pub csa_indices: Vec<usize>,
    pub root_table: Vec<RootTableDoc>,
}

/// Recompute the Chevalley root vectors from the representation's
/// generators and express each as `scale (t_A + i t_A*)`.
pub fn chevalley_root_vectors(rep: &AlgebraRep, rs: &RootSystem) -> Result<Vec<RootVectorEntry>> {
    if rs.family != rep.family() || rs.rank != rep.rank() {
        return Err(HktError::Dimension(format!(
            "root system {} does not match representation {}{}",
            rs.type_label(),
            rep.family(),
            rep.rank()
        )));
    }
    let (vectors, _) = compute_root_vectors(&rep.generators, &rep.coord_ops, rs, rep.norm_const, rep.tol)?;
    let mut table = Vec::new();
    for (k, e) in vectors.iter().enumerate() {
        let v = rep.coefficients_complex(e);
        let re = v.map(|z| z.re);
        let im = v.map(|z| z.im);
        let a = re.iamax();
        let b = im.iamax();
        let scale = re[a];
        let mut expect = DVector::<Complex64>::zeros(v.len());
        expect[a] = c(scale, 0.0);
        expect[b] += c(0.0, scale);
        let resid = (&v - &expect).iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        if resid > rep.tol || scale <= 0.0 {
            return Err(HktError::PhaseFixing {
                root: rs.root_label(k),
                reason: format!("root vector is not aligned with a generator pair (residual {resid:.3e})"),
            });
        }
        table.push(RootVectorEntry {
            root: k,
            re_index: a,
            im_index: b,
            scale,
        });
    }
    Ok(table)
}

/// Largest deviation of `|N_{alpha,beta}|` from `q + 1` over all pairs of
/// roots whose sum is a root, where `[E_alpha, E_beta] = N E_{alpha+beta}` and
/// `q` is the greatest integer with `alpha - q beta` a root. Also includes
/// the component of the commutator orthogonal to `E_{alpha+beta}`.
pub fn bourbaki_residual(rep: &AlgebraRep) -> f64 {
    let rs = &rep.root_system;
    let roots = rs.roots();
    let vecs: Vec<CMatrix> = roots
        .iter()
        .map(|r| rep.root_vector_of(&r.coords).unwrap())
        .collect();
    let mut worst: f64 = 0.0;
    for (i, a) in roots.iter().enumerate() {
        for (j, b) in roots.iter().enumerate() {
            let sum = rootsys::add(&a.coords, &b.coords);
            let Some(target) = rep.root_vector_of(&sum) else {
                continue;
            };
            let q = rs.string_depth(&a.coords, &b.coords);
            let comm = commutator(&vecs[i], &vecs[j]);
            let n = trace_product(&comm, &dagger(&target)) / trace_product(&target, &dagger(&target));
            worst = worst.max((n.norm() - (q + 1) as f64).abs());
            worst = worst.max(max_abs(&(comm - target * n)));
        }
    }
    worst
}

/// Dense rank-3 real tensor; as structure constants `[t_A, t_B] = i f_ABC t_C`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    data: Vec<f64>,
}

impl StructureConstants {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.data[(a * self.dim + b) * self.dim + c] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Nonzero entries `(a, b, c, f_abc)` with `|f| > eps`.
    pub fn nonzeros(&self, eps: f64) -> Vec<(usize, usize, usize, f64)> {
        let d = self.dim;
        let mut out = Vec::new();
        for (idx, &v) in self.data.iter().enumerate() {
            if v.abs() > eps {
                out.push((idx / (d * d), (idx / d) % d, idx % d, v));
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                for cc in 0..d {
                    let v = self.get(a, b, cc);
                    worst = worst.max((v + self.get(b, a, cc)).abs());
                    worst = worst.max((v + self.get(a, cc, b)).abs());
                }
            }
        }
        worst
    }

    /// Max over `(A,B,C,D)` of `f_ABE f_ECD + f_BCE f_EAD + f_CAE f_EBD`,
    /// accumulated sparsely over nonzero entries.
    pub fn jacobi_residual(&self) -> f64 {
        let nz = self.nonzeros(1e-14);
        let mut by_first: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); self.dim];
        for &(a, b, cc, v) in &nz {
            by_first[a].push((b, cc, v));
        }
        // t[(x, y, z, w)] = sum_E f_xyE f_Ezw
        let mut t: HashMap<(usize, usize, usize, usize), f64> = HashMap::new();
        for &(x, y, e, v) in &nz {
            for &(z, w, u) in &by_first[e] {
                *t.entry((x, y, z, w)).or_insert(0.0) += v * u;
            }
        }
        let get = |k: &(usize, usize, usize, usize)| t.get(k).copied().unwrap_or(0.0);
        let mut worst: f64 = 0.0;
        for &(a, b, cc, dd) in t.keys() {
            // each key is the first term of J at (a,b,cc,dd), and also the second
            // or third term at cyclic relabelings; evaluating all three covers them.
            for (p, q, r) in [(a, b, cc), (cc, a, b), (b, cc, a)] {
                let j = get(&(p, q, r, dd)) + get(&(q, r, p, dd)) + get(&(r, p, q, dd));
                worst = worst.max(j.abs());
            }
        }
        worst
    }

    pub fn from_vec(dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dim * dim * dim);
        Self { dim, data }
    }

    /// Max entrywise difference.
    pub fn max_diff(&self, other: &StructureConstants) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Contract `m` into one slot: `out[..a..] = sum_j m[a, j] t[..j..]`.
    pub fn contract(&self, axis: usize, m: &RMatrix) -> StructureConstants {
        let d = self.dim;
        assert_eq!(m.nrows(), d);
        let mut out = vec![0.0; d * d * d];
        let dd = d * d;
        for a in 0..d {
            for j in 0..d {
                let w = m[(a, j)];
                if w == 0.0 {
                    continue;
                }
                match axis {
                    0 => {
                        let src = &self.data[j * dd..(j + 1) * dd];
                        for (o, s) in out[a * dd..(a + 1) * dd].iter_mut().zip(src) {
                            *o += w * s;
                        }
                    }
                    1 => {
                        for x in 0..d {
                            let src = &self.data[x * dd + j * d..x * dd + (j + 1) * d];
                            let dst = &mut out[x * dd + a * d..x * dd + (a + 1) * d];
                            for (o, s) in dst.iter_mut().zip(src) {
                                *o += w * s;
                            }
                        }
                    }
                    2 => {
                        for xy in 0..dd {
                            out[xy * d + a] += w * self.data[xy * d + j];
                        }
                    }
                    _ => panic!("rank-3 tensor has axes 0..3"),
                }
            }
        }
        StructureConstants { dim: d, data: out }
    }

    /// Apply `m` to every slot.
    pub fn transform(&self, m: &RMatrix) -> StructureConstants {
        self.contract(0, m).contract(1, m).contract(2, m)
    }

    /// Sub-tensor on the given indices.
    pub fn restrict(&self, indices: &[usize]) -> StructureConstants {
        let n = indices.len();
        let mut out = StructureConstants::zeros(n);
        for (a, &ga) in indices.iter().enumerate() {
            for (b, &gb) in indices.iter().enumerate() {
                for (cc, &gc) in indices.iter().enumerate() {
                    out.set(a, b, cc, self.get(ga, gb, gc));
                }
            }
        }
        out
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(parts: &[&StructureConstants]) -> StructureConstants {
        let dim = parts.iter().map(|p| p.dim).sum();
        let mut out = StructureConstants::zeros(dim);
        let mut off = 0;
        for p in parts {
            for (a, b, cc, v) in p.nonzeros(0.0) {
                out.set(off + a, off + b, off + cc, v);
            }
            off += p.dim;
        }
        out
    }
}

pub type Tensor3 = StructureConstants;

/// `f_ABC = -(i/C) Tr([t_A, t_B] t_C)`.
pub fn structure_constants(rep: &AlgebraRep) -> StructureConstants {
    structure_constants_of(&rep.generators, rep.norm_const)
}

pub fn structure_constants_of(generators: &[CMatrix], norm_const: f64) -> StructureConstants {
    let d = generators.len();
    let mut f = StructureConstants::zeros(d);
    for a in 0..d {
        for b in a + 1..d {
            let comm = commutator(&generators[a], &generators[b]);
            if max_abs(&comm) == 0.0 {
                continue;
            }
            for (cc, tc) in generators.iter().enumerate() {
                let v = trace_product(&comm, tc).im / norm_const;
                f.set(a, b, cc, v);
                f.set(b, a, cc, -v);
            }
        }
    }
    f
}

#[derive(Debug, Clone)]
pub struct CliffordRep {
    pub gammas: Vec<CMatrix>,
}

impl CliffordRep {
    /// `T_jk = i gamma_j gamma_k / 2` (0-based indices).
    pub fn spin_generator(&self, j: usize, k: usize) -> CMatrix {
        &self.gammas[j] * &self.gammas[k] * c(0.0, 0.5)
    }

    pub fn spin_generators(&self) -> Vec<((usize, usize), CMatrix)> {
        let n = self.gammas.len();
        let mut out = Vec::new();
        for j in 0..n {
            for k in j + 1..n {
                out.push(((j, k), self.spin_generator(j, k)));
            }
        }
        out
    }

    /// Max of `|{gamma_j, gamma_k} - 2 delta_jk|`.
    pub fn clifford_residual(&self) -> f64 {
        let n = self.gammas.len();
        let d = self.gammas[0].nrows();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let ac = &self.gammas[j] * &self.gammas[k] + &self.gammas[k] * &self.gammas[j];
                let target = if j == k {
                    CMatrix::identity(d, d) * c(2.0, 0.0)
                } else {
                    CMatrix::zeros(d, d)
                };
                worst = worst.max(max_abs(&(ac - target)));
            }
        }
        worst
    }
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Euclidean Dirac matrices for `Cl(7)` as tensor products of Pauli matrices.
pub fn build_clifford(dimension: usize) -> Result<CliffordRep> {
    if dimension != 7 {
        return Err(HktError::Dimension(format!(
            "only the 7-dimensional Clifford algebra is supported, got {dimension}"
        )));
    }
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let one = CMatrix::identity(2, 2);
    let sx = CMatrix::from_row_slice(2, 2, &[z, o, o, z]);
    let sy = CMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]);
    let sz = CMatrix::from_row_slice(2, 2, &[o, z, z, -o]);
    let gammas = vec![
        kron(&kron(&sx, &one), &one),
        kron(&kron(&sy, &one), &one),
        kron(&kron(&sz, &sx), &one),
        kron(&kron(&sz, &sy), &one),
        kron(&kron(&sz, &sz), &sx),
        kron(&kron(&sz, &sz), &sy),
        kron(&kron(&sz, &sz), &sz),
    ];
    Ok(CliffordRep { gammas })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Periodicity {
    /// `exp(2 pi i h) = 1`.
    pub period_ok: bool,
    /// `exp(i phi h) != 1` at `phi = pi, pi/2, 3 pi/2`.
    pub min_nontrivial: bool,
}

/// Check that a coroot generates a circle of period exactly `2 pi`.
pub fn coroot_periodicity_check(rep: &AlgebraRep, coroot_element: &CMatrix) -> Result<Periodicity> {
    if !rep.faithful {
        return Err(HktError::NonFaithfulRepresentation(format!(
            "the vector representation of {}{} does not represent the spin group faithfully; \
             short coroots would appear to have period pi",
            rep.family(),
            rep.rank()
        )));
    }
    let n = coroot_element.nrows();
    let id = CMatrix::identity(n, n);
    let dist = |phi: f64| max_abs(&(expm(&(coroot_element * c(0.0, phi))) - &id));
    let period_ok = dist(2.0 * PI) < rep.tol;
    let min_nontrivial = [PI, PI / 2.0, 1.5 * PI].iter().all(|&phi| dist(phi) > rep.tol);
    Ok(Periodicity {
        period_ok,
        min_nontrivial,
    })
}
