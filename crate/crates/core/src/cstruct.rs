//! Complex structures on the Lie algebra and the geometric residual checks
//! that certify them: integrability, quaternion algebra, Bismut constancy,
//! torsion and a finite-difference Nijenhuis tensor.
//!
//! Matrices act on generators by columns: `I t_A = sum_B I_BA t_B`.

use std::fmt;

use nalgebra::{DVector, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{HktError, Result};
use crate::liealg::{AlgebraRep, StructureConstants, Tensor3};
use crate::linalg::{max_abs, RMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockTag {
    I,
    J,
    MinusJ,
    K,
    MinusK,
    Other,
}

impl fmt::Display for BlockTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BlockTag::I => "I",
            BlockTag::J => "J",
            BlockTag::MinusJ => "-J",
            BlockTag::K => "K",
            BlockTag::MinusK => "-K",
            BlockTag::Other => "other",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    /// `(X_theta, Y_theta, t_k, e_k)`.
    Theta { root: usize },
    /// `(X_alpha, Y_alpha, X_beta, Y_beta)` with `alpha + beta = theta`.
    Quartet { alpha: usize, beta: usize, theta: usize },
    /// Two CSA pairs without an attached root.
    Abelian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    /// Global generator indices.
    pub indices: [usize; 4],
    pub kind: BlockKind,
    pub tag: BlockTag,
}

/// The 4x4 templates in block order `(1, 2, 3, 0)`.
pub fn template(tag: BlockTag) -> Option<Matrix4<f64>> {
    let i = Matrix4::new(
        0., -1., 0., 0., //
        1., 0., 0., 0., //
        0., 0., 0., -1., //
        0., 0., 1., 0.,
    );
    let j = Matrix4::new(
        0., 0., -1., 0., //
        0., 0., 0., 1., //
        1., 0., 0., 0., //
        0., -1., 0., 0.,
    );
    let k = i * j;
    match tag {
        BlockTag::I => Some(i),
        BlockTag::J => Some(j),
        BlockTag::MinusJ => Some(-j),
        BlockTag::K => Some(k),
        BlockTag::MinusK => Some(-k),
        BlockTag::Other => None,
    }
}

const TEMPLATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ComplexStructure {
    pub matrix: RMatrix,
    /// Global generator index of every row/column of `matrix`.
    pub support: Vec<usize>,
    pub blocks: Vec<Block>,
}

impl ComplexStructure {
    pub fn new(matrix: RMatrix, support: Vec<usize>, blocks: Vec<Block>) -> Self {
        let mut out = Self { matrix, support, blocks };
        out.retag();
        out
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn local_index(&self, global: usize) -> Option<usize> {
        self.support.iter().position(|&g| g == global)
    }

    pub fn block_matrix(&self, block: &Block) -> Matrix4<f64> {
        let loc: Vec<usize> = block.indices.iter().map(|&g| self.local_index(g).unwrap()).collect();
        Matrix4::from_fn(|r, c| self.matrix[(loc[r], loc[c])])
    }

    /// Largest entry coupling the block to indices outside it.
    pub fn block_leak(&self, block: &Block) -> f64 {
        let loc: Vec<usize> = block.indices.iter().map(|&g| self.local_index(g).unwrap()).collect();
        let mut worst: f64 = 0.0;
        for &r in &loc {
            for c in 0..self.dim() {
                if !loc.contains(&c) {
                    worst = worst.max(self.matrix[(r, c)].abs()).max(self.matrix[(c, r)].abs());
                }
            }
        }
        worst
    }

    pub fn classify_block(&self, block: &Block) -> BlockTag {
        if self.block_leak(block) > TEMPLATE_TOL {
            return BlockTag::Other;
        }
        let m = self.block_matrix(block);
        for tag in [BlockTag::I, BlockTag::J, BlockTag::MinusJ, BlockTag::K, BlockTag::MinusK] {
            let t = template(tag).unwrap();
            if (m - t).abs().max() < TEMPLATE_TOL {
                return tag;
            }
        }
        BlockTag::Other
    }

    pub fn retag(&mut self) {
        let tags: Vec<BlockTag> = self.blocks.iter().map(|b| self.classify_block(b)).collect();
        for (b, t) in self.blocks.iter_mut().zip(tags) {
            b.tag = t;
        }
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        max_abs(&(&self.matrix + self.matrix.transpose()))
    }

    /// `|I I + 1|`.
    pub fn square_residual(&self) -> f64 {
        let n = self.dim();
        max_abs(&(&self.matrix * &self.matrix + RMatrix::identity(n, n)))
    }

    /// `Omega I Omega^T`, with `omega` given on the same support.
    pub fn conjugated(&self, omega: &RMatrix) -> ComplexStructure {
        ComplexStructure::new(
            omega * &self.matrix * omega.transpose(),
            self.support.clone(),
            self.blocks.clone(),
        )
    }

    pub fn compose(&self, other: &ComplexStructure) -> ComplexStructure {
        ComplexStructure::new(&self.matrix * &other.matrix, self.support.clone(), self.blocks.clone())
    }

    /// Restriction to a subset of the support (global indices). Blocks
    /// not entirely contained in `indices` are dropped.
    pub fn restricted(&self, indices: &[usize]) -> ComplexStructure {
        let loc: Vec<usize> = indices.iter().map(|&g| self.local_index(g).expect("index in support")).collect();
        let n = loc.len();
        let m = RMatrix::from_fn(n, n, |r, c| self.matrix[(loc[r], loc[c])]);
        let blocks = self
            .blocks
            .iter()
            .filter(|b| b.indices.iter().all(|g| indices.contains(g)))
            .copied()
            .collect();
        ComplexStructure::new(m, indices.to_vec(), blocks)
    }

    pub fn tag_counts(&self) -> Vec<(BlockTag, usize)> {
        let mut out: Vec<(BlockTag, usize)> = Vec::new();
        for b in &self.blocks {
            match out.iter_mut().find(|(t, _)| *t == b.tag) {
                Some(e) => e.1 += 1,
                None => out.push((b.tag, 1)),
            }
        }
        out
    }
}

/// `X_AB - 1/2 eps_ABCD X_CD` on a 4x4 block in `(1, 2, 3, 0)` order, with
/// `eps_1230 = 1`.
pub fn self_duality_residual(m: &Matrix4<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let mut dual = 0.0;
            for c in 0..4 {
                for d in 0..4 {
                    dual += 0.5 * levi_civita4([a, b, c, d]) * m[(c, d)];
                }
            }
            worst = worst.max((m[(a, b)] - dual).abs());
        }
    }
    worst
}

fn levi_civita4(idx: [usize; 4]) -> f64 {
    let mut p = idx;
    let mut sign = 1.0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] == p[j] {
                return 0.0;
            }
            if p[i] > p[j] {
                p.swap(i, j);
                sign = -sign;
            }
        }
    }
    sign
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsaPair {
    /// Positive-root index of the basic root whose coroot gives `t`.
    pub theta: Option<usize>,
    pub t: DVector<f64>,
    pub e: DVector<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsaPairing {
    pub pairs: Vec<CsaPair>,
}

impl CsaPairing {
    /// Max over pairs of deviations from orthonormality of the `t`s and `e`s.
    pub fn orthonormality_residual(&self) -> f64 {
        let vecs: Vec<&DVector<f64>> = self.pairs.iter().flat_map(|p| [&p.t, &p.e]).collect();
        let mut worst: f64 = 0.0;
        for (i, a) in vecs.iter().enumerate() {
            for (j, b) in vecs.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dot(b) - target).abs());
            }
        }
        worst
    }
}

/// Canonical complex structure on the whole algebra.
pub fn canonical_i(rep: &AlgebraRep, pairing: &CsaPairing) -> Result<ComplexStructure> {
    let all: Vec<usize> = (0..rep.dim()).collect();
    canonical_i_on(rep, pairing, &all)
}

/// Canonical complex structure restricted to `support` (sorted global
/// indices closed under `A <-> A*`). The pairing must span exactly the
/// abelian directions inside `support`.
pub fn canonical_i_on(rep: &AlgebraRep, pairing: &CsaPairing, support: &[usize]) -> Result<ComplexStructure> {
    let d = rep.dim();
    let abelian_in: Vec<usize> = rep
        .csa_indices
        .iter()
        .copied()
        .filter(|a| support.contains(a))
        .collect();
    if !abelian_in.len().is_multiple_of(2) {
        return Err(HktError::Dimension(format!(
            "abelian part of the tangent space has odd dimension {}",
            abelian_in.len()
        )));
    }
    let required = abelian_in.len() / 2;
    if pairing.pairs.len() != required {
        return Err(HktError::PairingMismatch {
            required,
            given: pairing.pairs.len(),
        });
    }
    // the pairs must span exactly the abelian directions in the support
    let mut proj = RMatrix::zeros(d, d);
    for p in &pairing.pairs {
        proj += &p.t * p.t.transpose() + &p.e * p.e.transpose();
    }
    let mut target = RMatrix::zeros(d, d);
    for &a in &abelian_in {
        target[(a, a)] = 1.0;
    }
    if max_abs(&(proj - target)) > rep.tol || pairing.orthonormality_residual() > rep.tol {
        return Err(HktError::PairingMismatch {
            required,
            given: pairing.pairs.len(),
        });
    }

    let mut full = RMatrix::zeros(d, d);
    for entry in &rep.root_vector_table {
        full[(entry.im_index, entry.re_index)] = 1.0;
        full[(entry.re_index, entry.im_index)] = -1.0;
    }
    for p in &pairing.pairs {
        full += &p.e * p.t.transpose() - &p.t * p.e.transpose();
    }
    let n = support.len();
    let matrix = RMatrix::from_fn(n, n, |r, c| full[(support[r], support[c])]);
    let blocks = build_blocks(rep, pairing, support);
    Ok(ComplexStructure::new(matrix, support.to_vec(), blocks))
}

fn unit_index(v: &DVector<f64>, tol: f64) -> Option<usize> {
    let k = v.iamax();
    let rest = v.iter().enumerate().filter(|&(i, _)| i != k).fold(0.0_f64, |m, (_, x)| m.max(x.abs()));
    ((v[k] - 1.0).abs() < tol && rest < tol).then_some(k)
}

/// Partition into theta blocks, root quartets and abelian blocks. Roots are
/// assigned greedily to the first basic root (in pairing order) that they
/// complement. Only available when the pairing vectors are generators.
fn build_blocks(rep: &AlgebraRep, pairing: &CsaPairing, support: &[usize]) -> Vec<Block> {
    let rs = &rep.root_system;
    let table = &rep.root_vector_table;
    let mut assigned = vec![false; rs.num_positive()];
    let mut blocks = Vec::new();
    let mut loose_pairs = Vec::new();
    for p in &pairing.pairs {
        let (Some(ti), Some(ei)) = (unit_index(&p.t, rep.tol), unit_index(&p.e, rep.tol)) else {
            return Vec::new();
        };
        let Some(theta) = p.theta else {
            loose_pairs.push((ti, ei));
            continue;
        };
        assigned[theta] = true;
        let e = &table[theta];
        blocks.push(Block {
            indices: [e.re_index, e.im_index, ti, ei],
            kind: BlockKind::Theta { root: theta },
            tag: BlockTag::Other,
        });
        let tc = &rs.positive_roots[theta].coords;
        for a in 0..rs.num_positive() {
            if assigned[a] {
                continue;
            }
            let rest = crate::rootsys::sub(tc, &rs.positive_roots[a].coords);
            if let Some((b, crate::rootsys::Sign::Positive)) = rs.locate(&rest) {
                if b != a && !assigned[b] {
                    assigned[a] = true;
                    assigned[b] = true;
                    let (ea, eb) = (&table[a], &table[b]);
                    blocks.push(Block {
                        indices: [ea.re_index, ea.im_index, eb.re_index, eb.im_index],
                        kind: BlockKind::Quartet { alpha: a, beta: b, theta },
                        tag: BlockTag::Other,
                    });
                }
            }
        }
    }
    for pair in loose_pairs.chunks(2) {
        if let [(t0, e0), (t1, e1)] = pair {
            blocks.push(Block {
                indices: [*t0, *e0, *t1, *e1],
                kind: BlockKind::Abelian,
                tag: BlockTag::Other,
            });
        }
    }
    blocks.retain(|b| b.indices.iter().all(|g| support.contains(g)));
    blocks
}

fn restrict_f<'a>(
    i: &ComplexStructure,
    f: &'a StructureConstants,
    scratch: &'a mut Option<StructureConstants>,
) -> &'a StructureConstants {
    if f.dim() == i.dim() {
        f
    } else {
        scratch.insert(f.restrict(&i.support))
    }
}

/// `T_ABC = I_AD I_BE f_DEC`.
fn double_contract(i: &RMatrix, f: &Tensor3) -> Tensor3 {
    f.contract(0, i).contract(1, i)
}

/// Max over `(A, B, C)` of `f_ABC - I_AD I_BE f_DEC - I_BD I_CE f_DEA - I_CD I_AE f_DEB`.
/// When `f` lives on a larger index set than `i`, it is restricted to `i.support`.
pub fn integrability_residual(i: &ComplexStructure, f: &StructureConstants) -> f64 {
    let mut scratch = None;
    let f = restrict_f(i, f, &mut scratch);
    integrability_residual_matrix(&i.matrix, f)
}

pub fn integrability_residual_matrix(i: &RMatrix, f: &StructureConstants) -> f64 {
    let d = f.dim();
    let t = double_contract(i, f);
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let r = f.get(a, b, c) - t.get(a, b, c) - t.get(b, c, a) - t.get(c, a, b);
                worst = worst.max(r.abs());
            }
        }
    }
    worst
}

/// Max residual of `I_p I_q + delta_pq - eps_pqs I_s`, together with the
/// anticommutators `{I_p, I_q} + 2 delta_pq`.
pub fn quaternion_residual(i: &ComplexStructure, j: &ComplexStructure, k: &ComplexStructure) -> f64 {
    quaternion_residual_matrix(&i.matrix, &j.matrix, &k.matrix)
}

pub fn quaternion_residual_matrix(i: &RMatrix, j: &RMatrix, k: &RMatrix) -> f64 {
    let n = i.nrows();
    let id = RMatrix::identity(n, n);
    let ms = [i, j, k];
    let mut worst: f64 = 0.0;
    for p in 0..3 {
        for q in 0..3 {
            let mut r = ms[p] * ms[q];
            if p == q {
                r += &id;
            } else {
                let s = 3 - p - q;
                // eps_pqs for (p, q, s) a permutation of (0, 1, 2)
                let sign = if (q + 3 - p) % 3 == 1 { 1.0 } else { -1.0 };
                r -= ms[s] * sign;
            }
            worst = worst.max(max_abs(&r));
            let mut anti = ms[p] * ms[q] + ms[q] * ms[p];
            if p == q {
                anti += &id * 2.0;
            }
            worst = worst.max(max_abs(&anti));
        }
    }
    worst
}

/// `d_P I_MN` at the origin, stored as `[P][M][N]`:
/// `1/2 I_MQ f_NQP - 1/2 I_NQ f_MQP`.
pub fn derivative_at_origin(i: &RMatrix, f: &StructureConstants) -> Tensor3 {
    let d = f.dim();
    // g[M][N][P] = I_MQ f_NQP  (contract slot 1 of f with I, then move the slots)
    let g = f.contract(1, i); // g0[N][M][P] = sum_Q I_MQ f_NQP
    let mut out = Tensor3::zeros(d);
    for p in 0..d {
        for m in 0..d {
            for n in 0..d {
                out.set(p, m, n, 0.5 * g.get(n, m, p) - 0.5 * g.get(m, n, p));
            }
        }
    }
    out
}

/// Residual of `d_P I_MN - 1/2 f_QPM I_QN - 1/2 f_QPN I_MQ` at the origin.
pub fn bismut_residual(i: &ComplexStructure, f: &StructureConstants) -> f64 {
    let mut scratch = None;
    let f = restrict_f(i, f, &mut scratch);
    bismut_residual_matrix(&i.matrix, f)
}

pub fn bismut_residual_matrix(i: &RMatrix, f: &StructureConstants) -> f64 {
    let d = f.dim();
    let di = derivative_at_origin(i, f);
    // h[A][P][M] = sum_Q I_QA f_QPM  -> contract slot 0 of f with I^T
    let h = f.contract(0, &i.transpose());
    let mut worst: f64 = 0.0;
    for p in 0..d {
        for m in 0..d {
            for n in 0..d {
                // f_QPM I_QN = h[N][P][M];  f_QPN I_MQ = -f_QPN I_QM... use I_MQ directly
                let t1 = h.get(n, p, m);
                let mut t2 = 0.0;
                for q in 0..d {
                    t2 += f.get(q, p, n) * i[(m, q)];
                }
                let r = di.get(p, m, n) - 0.5 * t1 - 0.5 * t2;
                worst = worst.max(r.abs());
            }
        }
    }
    worst
}

/// `C_MNP = I_MQ I_NS I_PR (d_Q I_SR + d_S I_RQ + d_R I_QS)` at the origin.
pub fn torsion_via_hull(i: &ComplexStructure, f: &StructureConstants, tol: f64) -> Result<Tensor3> {
    let mut scratch = None;
    let f = restrict_f(i, f, &mut scratch);
    let integ = integrability_residual_matrix(&i.matrix, f);
    if integ > tol {
        return Err(HktError::NotIntegrable(integ));
    }
    Ok(torsion_matrix(&i.matrix, f))
}

fn torsion_matrix(i: &RMatrix, f: &StructureConstants) -> Tensor3 {
    let d = f.dim();
    let di = derivative_at_origin(i, f);
    let mut s = Tensor3::zeros(d);
    for q in 0..d {
        for a in 0..d {
            for r in 0..d {
                s.set(q, a, r, di.get(q, a, r) + di.get(a, r, q) + di.get(r, q, a));
            }
        }
    }
    s.transform(i)
}

/// `max |C - f|` for the Hull torsion.
pub fn torsion_match_residual(i: &ComplexStructure, f: &StructureConstants, tol: f64) -> Result<f64> {
    let mut scratch = None;
    let fr = restrict_f(i, f, &mut scratch);
    let c = torsion_via_hull(i, fr, tol)?;
    Ok(c.max_diff(fr))
}

fn ad_matrix(f: &StructureConstants, x: &[f64]) -> RMatrix {
    let d = f.dim();
    RMatrix::from_fn(d, d, |m, a| {
        x.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(p, v)| f.get(m, a, p) * v).sum()
    })
}

/// `g_MN = delta_MN - 1/12 f_MPQ f_NPR x^Q x^R`.
pub fn metric_at(f: &StructureConstants, x: &[f64]) -> RMatrix {
    let d = f.dim();
    let a = ad_matrix(f, x);
    RMatrix::identity(d, d) - &a * a.transpose() / 12.0
}

/// `e_MA = delta_MA + 1/2 f_MAP x^P + 1/6 (a a)_MA` with `a_MA = f_MAP x^P`.
pub fn vielbein_at(f: &StructureConstants, x: &[f64]) -> RMatrix {
    let d = f.dim();
    let a = ad_matrix(f, x);
    RMatrix::identity(d, d) + &a * 0.5 + (&a * &a) / 6.0
}

/// Killing metric `(1/C) Tr(d_M w d_N w^-1)` of `w = exp(i t.x)` by central differences.
pub fn killing_metric_numeric(rep: &AlgebraRep, x: &[f64], h: f64) -> RMatrix {
    use crate::linalg::{c, expm, trace_product};
    let d = rep.dim();
    let omega = |y: &[f64]| {
        let mut m = crate::linalg::CMatrix::zeros(rep.matrix_dim, rep.matrix_dim);
        for (t, v) in rep.generators.iter().zip(y) {
            m += t * c(0.0, *v);
        }
        expm(&m)
    };
    let deriv = |k: usize, inverse: bool| {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += h;
        xm[k] -= h;
        let (wp, wm) = if inverse {
            (omega(&xp).adjoint(), omega(&xm).adjoint())
        } else {
            (omega(&xp), omega(&xm))
        };
        (wp - wm) * c(1.0 / (2.0 * h), 0.0)
    };
    let dw: Vec<_> = (0..d).map(|k| deriv(k, false)).collect();
    let dwi: Vec<_> = (0..d).map(|k| deriv(k, true)).collect();
    RMatrix::from_fn(d, d, |m, n| trace_product(&dw[m], &dwi[n]).re / rep.norm_const)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NijenhuisResult {
    pub residual: f64,
    /// Max difference between the Richardson value and the half-step derivative.
    pub richardson_gap: f64,
    /// Set when the extrapolation looks unreliable for this step.
    pub step_warning: bool,
}

/// Nijenhuis tensor at the origin for the coordinate field
/// `I_M^N(x) = e(x) I e(x)^-1`, with derivatives from central differences
/// and one Richardson step. Several structures share the vielbein evaluations.
pub fn nijenhuis_at_origin(f: &StructureConstants, structures: &[&RMatrix], h: f64) -> Vec<NijenhuisResult> {
    let d = f.dim();
    let ns = structures.len();
    // dI[s][P] = d_P I_M^N, from steps h and h/2
    let mut d_h = vec![vec![RMatrix::zeros(d, d); d]; ns];
    let mut d_h2 = vec![vec![RMatrix::zeros(d, d); d]; ns];
    for p in 0..d {
        for (step, target) in [(h, &mut d_h), (h / 2.0, &mut d_h2)] {
            let mut plus = vec![0.0; d];
            plus[p] = step;
            let minus: Vec<f64> = plus.iter().map(|v| -v).collect();
            let ep = vielbein_at(f, &plus);
            let em = vielbein_at(f, &minus);
            let epi = ep.clone().try_inverse().expect("vielbein is invertible near the origin");
            let emi = em.clone().try_inverse().expect("vielbein is invertible near the origin");
            for (s, i) in structures.iter().enumerate() {
                let ip = &ep * *i * &epi;
                let im = &em * *i * &emi;
                target[s][p] = (ip - im) / (2.0 * step);
            }
        }
    }
    let mut out = Vec::with_capacity(ns);
    for (s, i) in structures.iter().enumerate() {
        let mut gap: f64 = 0.0;
        let mut scale: f64 = 0.0;
        let di: Vec<RMatrix> = (0..d)
            .map(|p| {
                let r = (&d_h2[s][p] * 4.0 - &d_h[s][p]) / 3.0;
                gap = gap.max(max_abs(&(&r - &d_h2[s][p])));
                scale = scale.max(max_abs(&r));
                r
            })
            .collect();
        // curl[K][M][N] = d_M I_N^K - d_N I_M^K
        let curl: Vec<RMatrix> = (0..d)
            .map(|k| RMatrix::from_fn(d, d, |m, n| di[m][(n, k)] - di[n][(m, k)]))
            .collect();
        let mut worst: f64 = 0.0;
        for ck in &curl {
            let rotated = *i * ck * i.transpose();
            worst = worst.max(max_abs(&(ck - rotated)));
        }
        out.push(NijenhuisResult {
            residual: worst,
            richardson_gap: gap,
            step_warning: gap > 1e-4 * (1.0 + scale),
        });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryResidualReport {
    pub integrability: f64,
    pub square: f64,
    pub bismut: f64,
    /// `max |C - f|`; absent for cosets and for non-integrable structures.
    pub torsion_match: Option<f64>,
    pub nijenhuis: Option<f64>,
}

impl GeometryResidualReport {
    /// Algebraic residuals for `i` against `f`; the torsion is computed when
    /// the integrability residual is within `tol` and `with_torsion` is set.
    pub fn algebraic(i: &ComplexStructure, f: &StructureConstants, tol: f64, with_torsion: bool) -> Self {
        let mut scratch = None;
        let fr = restrict_f(i, f, &mut scratch);
        let integrability = integrability_residual_matrix(&i.matrix, fr);
        let torsion_match = (with_torsion && integrability <= tol).then(|| torsion_matrix(&i.matrix, fr).max_diff(fr));
        GeometryResidualReport {
            integrability,
            square: i.square_residual().max(i.antisymmetry_residual()),
            bismut: bismut_residual_matrix(&i.matrix, fr),
            torsion_match,
            nijenhuis: None,
        }
    }

    pub fn max_algebraic(&self) -> f64 {
        self.integrability.max(self.square).max(self.bismut)
    }
}
