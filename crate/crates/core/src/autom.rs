//! Inner automorphisms generated by root vectors, centralizers, the nested
//! chain of basic roots and the quaternion triple built from them.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::cstruct::{canonical_i_on, BlockTag, ComplexStructure, CsaPair, CsaPairing};
use crate::error::{HktError, Result};
use crate::liealg::{AlgebraRep, StructureConstants};
use crate::linalg::{c, commutator, dagger, expm, gram_schmidt, max_abs, null_space, trace_product, unit, CMatrix, RMatrix};
use crate::rootsys::{self, extended_dynkin_surgery, Rational, Root, RootSystem, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AutomorphismKind {
    #[serde(rename = "J")]
    JKind,
    #[serde(rename = "K")]
    KKind,
}

#[derive(Debug, Clone)]
pub struct Automorphism {
    /// `Omega_BA`, the coefficient of `t_B` in `U^dagger t_A U`.
    pub matrix: RMatrix,
    pub root: Vec<Rational>,
    pub root_index: usize,
    pub kind: AutomorphismKind,
    pub orthogonality_residual: f64,
}

/// `U = exp(i pi/4 (E + E^dagger))` for the J kind, `exp(pi/4 (E - E^dagger))` for the K kind.
pub fn group_element(rep: &AlgebraRep, root_index: usize, kind: AutomorphismKind) -> CMatrix {
    let e = rep.root_vector(root_index, Sign::Positive);
    let ed = dagger(&e);
    let gen = match kind {
        AutomorphismKind::JKind => (e + ed) * c(0.0, PI / 4.0),
        AutomorphismKind::KKind => (e - ed) * c(PI / 4.0, 0.0),
    };
    expm(&gen)
}

/// Matrix of `X -> U^dagger X U` in the generator basis.
pub fn adjoint_action(rep: &AlgebraRep, u: &CMatrix) -> RMatrix {
    let ud = dagger(u);
    let d = rep.dim();
    let mut m = RMatrix::zeros(d, d);
    for (a, t) in rep.generators.iter().enumerate() {
        let img = &ud * t * u;
        for (b, tb) in rep.generators.iter().enumerate() {
            m[(b, a)] = trace_product(&img, tb).re / rep.norm_const;
        }
    }
    m
}

pub fn orthogonality_residual(m: &RMatrix) -> f64 {
    let n = m.nrows();
    max_abs(&(m * m.transpose() - RMatrix::identity(n, n)))
}

/// `max |Omega_AD Omega_BE Omega_CF f_DEF - f_ABC|`.
pub fn invariance_residual(m: &RMatrix, f: &StructureConstants) -> f64 {
    f.transform(m).max_diff(f)
}

pub fn automorphism_from_root(rep: &AlgebraRep, theta: &Root, kind: AutomorphismKind) -> Result<Automorphism> {
    let (k, sign) = rep
        .root_system
        .locate(&theta.coords)
        .ok_or_else(|| HktError::Dimension("automorphism root is not a root of the algebra".into()))?;
    if sign != Sign::Positive {
        return Err(HktError::Dimension("automorphism root must be positive".into()));
    }
    let u = group_element(rep, k, kind);
    let matrix = adjoint_action(rep, &u);
    let residual = orthogonality_residual(&matrix);
    if residual > 1e-10 {
        return Err(HktError::NonOrthogonalAutomorphism { residual });
    }
    Ok(Automorphism {
        matrix,
        root: theta.coords.clone(),
        root_index: k,
        kind,
        orthogonality_residual: residual,
    })
}

/// `exp(ad_R)` with `U^dagger X U = e^R X e^-R`, summed as a matrix series
/// in the adjoint representation.
pub fn hadamard_matrix(rep: &AlgebraRep, root_index: usize, kind: AutomorphismKind) -> RMatrix {
    let e = rep.root_vector(root_index, Sign::Positive);
    let ed = dagger(&e);
    let r = match kind {
        AutomorphismKind::JKind => (e + ed) * c(0.0, -PI / 4.0),
        AutomorphismKind::KKind => (e - ed) * c(-PI / 4.0, 0.0),
    };
    let d = rep.dim();
    let mut ad = RMatrix::zeros(d, d);
    for (a, t) in rep.generators.iter().enumerate() {
        let img = commutator(&r, t);
        for (b, tb) in rep.generators.iter().enumerate() {
            ad[(b, a)] = trace_product(&img, tb).re / rep.norm_const;
        }
    }
    expm(&ad)
}

#[derive(Debug, Clone)]
pub struct Centralizer {
    pub summands: Vec<RootSystem>,
    /// Positive-root indices (of the algebra's root system) inside the centralizer.
    pub roots: Vec<usize>,
    /// Orthonormal abelian directions (CSA plus `u(1)`) orthogonal to the summands' coroots.
    pub abelian: Vec<DVector<f64>>,
    /// Generator indices `(re, im)` of the centralizer roots.
    pub generator_indices: Vec<usize>,
    /// Dimension of the full centralizer.
    pub dim: usize,
}

const NULL_TOL: f64 = 1e-10;

/// Coefficient vector of a CSA element given in orthogonal coordinates.
pub fn csa_vector(rep: &AlgebraRep, coords: &[Rational]) -> DVector<f64> {
    rep.coefficients(&rep.csa_matrix(coords))
}

fn coroot_unit(rep: &AlgebraRep, root: &Root) -> DVector<f64> {
    let v = csa_vector(rep, &rootsys::coroot(root));
    let n = v.norm();
    v / n
}

/// Generators commuting with `E_{+-theta}` for every `theta`.
pub fn centralizer(rep: &AlgebraRep, thetas: &[Root]) -> Result<Centralizer> {
    let rs = &rep.root_system;
    let d = rep.dim();
    let mut rows: Vec<f64> = Vec::new();
    let mut nrows = 0;
    for theta in thetas {
        for sign in [1, -1] {
            let coords = if sign == 1 { theta.coords.clone() } else { theta.negated().coords };
            let e = rep
                .root_vector_of(&coords)
                .ok_or_else(|| HktError::Dimension("centralizer root is not a root".into()))?;
            let cols: Vec<_> = rep.generators.iter().map(|t| rep.coefficients_complex(&commutator(t, &e))).collect();
            for b in 0..d {
                for part in 0..2 {
                    for col in &cols {
                        rows.push(if part == 0 { col[b].re } else { col[b].im });
                    }
                    nrows += 1;
                }
            }
        }
    }
    let m = RMatrix::from_row_slice(nrows, d, &rows);
    let null = null_space(&m, NULL_TOL);
    let col_norm = |a: usize| m.column(a).norm();

    let mut roots = Vec::new();
    let mut generator_indices = Vec::new();
    for entry in &rep.root_vector_table {
        let inside = col_norm(entry.re_index) < 1e-8 && col_norm(entry.im_index) < 1e-8;
        if inside {
            roots.push(entry.root);
            generator_indices.push(entry.re_index);
            generator_indices.push(entry.im_index);
        }
    }
    let csa_cols: Vec<usize> = rep.csa_indices.clone();
    let m_csa = RMatrix::from_fn(nrows, csa_cols.len(), |r, k| m[(r, csa_cols[k])]);
    let null_csa: Vec<DVector<f64>> = null_space(&m_csa, NULL_TOL)
        .into_iter()
        .map(|v| {
            let mut full = DVector::zeros(d);
            for (k, &a) in csa_cols.iter().enumerate() {
                full[a] = v[k];
            }
            full
        })
        .collect();
    if null.len() != 2 * roots.len() + null_csa.len() {
        return Err(HktError::CentralizerMismatch(format!(
            "centralizer has dimension {} but {} roots and {} abelian directions were identified",
            null.len(),
            roots.len(),
            null_csa.len()
        )));
    }

    let summands = decompose(rs, &roots)?;
    let mut coroots = Vec::new();
    for s in &summands {
        for r in &s.simple_roots {
            coroots.push(csa_vector(rep, &rootsys::coroot(r)));
        }
    }
    let coroot_basis = gram_schmidt(&coroots, &[], 1e-9);
    let mut abelian = gram_schmidt(&null_csa, &coroot_basis, 1e-6);
    for v in &mut abelian {
        fix_matrix_sign(rep, v);
    }
    Ok(Centralizer {
        summands,
        roots,
        abelian,
        generator_indices,
        dim: null.len(),
    })
}

/// Flip `v` so that the first significant entry of its matrix is positive
/// (real part, or imaginary part when the real part vanishes).
fn fix_matrix_sign(rep: &AlgebraRep, v: &mut DVector<f64>) {
    let m = rep.matrix_of(v);
    if let Some(z) = m.transpose().iter().find(|z| z.norm() > 1e-9) {
        let s = if z.re.abs() > 1e-9 { z.re } else { z.im };
        if s < 0.0 {
            v.neg_mut();
        }
    }
}

/// Split a closed set of positive roots into simple summands.
fn decompose(rs: &RootSystem, roots: &[usize]) -> Result<Vec<RootSystem>> {
    let set: BTreeSet<usize> = roots.iter().copied().collect();
    let coords = |k: usize| &rs.positive_roots[k].coords;
    let mut simple: Vec<usize> = Vec::new();
    'outer: for &k in roots {
        for &a in roots {
            if a == k {
                continue;
            }
            let rest = rootsys::sub(coords(k), coords(a));
            if let Some((b, Sign::Positive)) = rs.locate(&rest) {
                if set.contains(&b) {
                    continue 'outer;
                }
            }
        }
        simple.push(k);
    }
    let label_of = |k: usize| -> Result<usize> {
        rs.simple_roots
            .iter()
            .position(|s| &s.coords == coords(k))
            .map(|i| rs.simple_labels[i])
            .ok_or_else(|| {
                HktError::CentralizerMismatch(format!(
                    "centralizer simple root {} is not a simple root of {}",
                    rs.root_label(k),
                    rs.type_label()
                ))
            })
    };
    let mut labelled: Vec<(usize, usize)> = simple.iter().map(|&k| Ok((label_of(k)?, k))).collect::<Result<_>>()?;
    labelled.sort();

    let n = labelled.len();
    let mut comp = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = groups.len();
        comp[start] = id;
        let mut stack = vec![start];
        let mut members = vec![];
        while let Some(v) = stack.pop() {
            members.push(v);
            for w in 0..n {
                let linked = rootsys::dot(coords(labelled[v].1), coords(labelled[w].1)) != Rational::from_integer(0);
                if comp[w] == usize::MAX && linked {
                    comp[w] = id;
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }
    groups
        .into_iter()
        .map(|g| {
            let simple = g.iter().map(|&i| coords(labelled[i].1).clone()).collect();
            let labels = g.iter().map(|&i| labelled[i].0).collect();
            RootSystem::from_simple_roots(simple, labels, Some(rs.family))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ChainNode {
    pub level: usize,
    pub root_system: RootSystem,
    pub parent: Option<usize>,
    /// Positive-root index of the node's highest root in the algebra's root system.
    pub theta_index: usize,
    pub theta: Root,
    /// CSA directions of this node orthogonal to its own coroot and to its children's coroots.
    pub abelian: Vec<DVector<f64>>,
}

impl ChainNode {
    pub fn abelian_dim(&self) -> usize {
        self.abelian.len()
    }

    pub fn label(&self) -> String {
        format!("{}:{}", self.root_system.type_label(), label_of_root(&self.root_system, &self.theta))
    }
}

fn label_of_root(rs: &RootSystem, r: &Root) -> String {
    let k = rs.locate(&r.coords).expect("root of node").0;
    rs.root_label(k)
}

#[derive(Debug, Clone)]
pub struct BasicRootChain {
    /// Ordered by level, then by the smallest simple-root label of each summand.
    pub nodes: Vec<ChainNode>,
}

impl BasicRootChain {
    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.level + 1).max().unwrap_or(0)
    }

    pub fn level(&self, k: usize) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].level == k).collect()
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&j| self.nodes[j].parent == Some(i)).collect()
    }

    /// `i` together with all its descendants.
    pub fn subtree(&self, i: usize) -> Vec<usize> {
        let mut out = vec![i];
        let mut k = 0;
        while k < out.len() {
            out.extend(self.children(out[k]));
            k += 1;
        }
        out.sort_unstable();
        out
    }

    pub fn thetas(&self) -> Vec<&Root> {
        self.nodes.iter().map(|n| &n.theta).collect()
    }

    /// Max `|(theta_i^vee, theta_j^vee)|` over distinct basic roots, in the trace metric.
    pub fn coroot_orthogonality_residual(&self, rep: &AlgebraRep) -> f64 {
        let v: Vec<_> = self.nodes.iter().map(|n| coroot_unit(rep, &n.theta)).collect();
        let mut worst: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                worst = worst.max(v[i].dot(&v[j]).abs());
            }
        }
        worst
    }
}

fn root_set(rs: &RootSystem) -> BTreeSet<Vec<Rational>> {
    rs.positive_roots.iter().map(|r| r.coords.clone()).collect()
}

/// Highest roots of the algebra, then of every simple summand of their
/// centralizer, and so on until the centralizer is abelian. Each level is
/// cross-checked against the extended Dynkin surgery of its parents.
pub fn basic_roots(rep: &AlgebraRep) -> Result<BasicRootChain> {
    let rs = &rep.root_system;
    let top_theta = rs.highest_root.clone();
    let mut nodes = vec![ChainNode {
        level: 0,
        root_system: rs.clone(),
        parent: None,
        theta_index: rs.locate(&top_theta.coords).unwrap().0,
        theta: top_theta,
        abelian: Vec::new(),
    }];
    let mut level = 0;
    loop {
        if level >= rs.rank {
            return Err(HktError::ChainDepth(level + 1));
        }
        let thetas: Vec<Root> = nodes.iter().map(|n| n.theta.clone()).collect();
        let cz = centralizer(rep, &thetas)?;
        let parents: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].level == level).collect();

        let mut new_nodes = Vec::new();
        for s in &cz.summands {
            let first = &s.positive_roots[0].coords;
            let parent = parents
                .iter()
                .copied()
                .find(|&p| nodes[p].root_system.is_root(first))
                .ok_or_else(|| HktError::CentralizerMismatch(format!("summand {} has no parent node", s.type_label())))?;
            let theta = s.highest_root.clone();
            new_nodes.push(ChainNode {
                level: level + 1,
                root_system: s.clone(),
                parent: Some(parent),
                theta_index: rs.locate(&theta.coords).unwrap().0,
                theta,
                abelian: Vec::new(),
            });
        }

        for &p in &parents {
            let surgery = extended_dynkin_surgery(&nodes[p].root_system)?;
            let expected: BTreeSet<_> = surgery.summands.iter().map(root_set).collect();
            let found: BTreeSet<_> = new_nodes
                .iter()
                .filter(|n| n.parent == Some(p))
                .map(|n| root_set(&n.root_system))
                .collect();
            if expected != found {
                return Err(HktError::CentralizerMismatch(format!(
                    "centralizer of the highest root of {} has {} simple summands, surgery gives {}",
                    nodes[p].root_system.type_label(),
                    found.len(),
                    expected.len()
                )));
            }
            // leftover CSA directions of the parent
            let own: Vec<DVector<f64>> = nodes[p]
                .root_system
                .simple_roots
                .iter()
                .map(|r| csa_vector(rep, &rootsys::coroot(r)))
                .collect();
            let mut start = vec![coroot_unit(rep, &nodes[p].theta)];
            for n in new_nodes.iter().filter(|n| n.parent == Some(p)) {
                let cs: Vec<_> = n
                    .root_system
                    .simple_roots
                    .iter()
                    .map(|r| csa_vector(rep, &rootsys::coroot(r)))
                    .collect();
                let more = gram_schmidt(&cs, &start, 1e-9);
                start.extend(more);
            }
            let mut ab = gram_schmidt(&own, &start, 1e-6);
            for v in &mut ab {
                fix_matrix_sign(rep, v);
            }
            if ab.len() != surgery.abelian_rank {
                return Err(HktError::CentralizerMismatch(format!(
                    "{} leaves {} abelian directions, surgery gives {}",
                    nodes[p].root_system.type_label(),
                    ab.len(),
                    surgery.abelian_rank
                )));
            }
            nodes[p].abelian = ab;
        }
        let abelian_total: usize = nodes.iter().map(|n| n.abelian.len()).sum::<usize>() + rep.u1_count;
        if abelian_total != cz.abelian.len() {
            return Err(HktError::CentralizerMismatch(format!(
                "centralizer has {} abelian directions, surgery accounts for {}",
                cz.abelian.len(),
                abelian_total
            )));
        }
        if new_nodes.is_empty() {
            break;
        }
        nodes.extend(new_nodes);
        level += 1;
    }
    Ok(BasicRootChain { nodes })
}

/// Part of the algebra divided out: whole chain nodes (with their
/// subtrees) and the abelian parts of whole levels. The abelian part of
/// level `k` consists of the leftover directions of the nodes at level `k - 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Removal {
    pub nodes: BTreeSet<usize>,
    pub abelian_levels: BTreeSet<usize>,
}

impl Removal {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.abelian_levels.is_empty()
    }

    /// Close the node set under taking descendants.
    pub fn closed(&self, chain: &BasicRootChain) -> Removal {
        let mut nodes = BTreeSet::new();
        for &n in &self.nodes {
            nodes.extend(chain.subtree(n));
        }
        Removal {
            nodes,
            abelian_levels: self.abelian_levels.clone(),
        }
    }

    fn drops_abelian_of(&self, chain: &BasicRootChain, node: usize) -> bool {
        self.nodes.contains(&node) || self.abelian_levels.contains(&(chain.nodes[node].level + 1))
    }
}

/// Kept basic roots, the paired CSA directions and the quotiented abelian directions.
#[derive(Debug, Clone)]
pub struct PairingPlan {
    pub kept_nodes: Vec<usize>,
    pub pairing: CsaPairing,
    pub quotiented: Vec<DVector<f64>>,
}

impl PairingPlan {
    /// New abelian basis `[t_0, e_0, t_1, e_1, ..., quotiented...]`.
    pub fn abelian_basis(&self) -> Vec<DVector<f64>> {
        let mut out = Vec::new();
        for p in &self.pairing.pairs {
            out.push(p.t.clone());
            out.push(p.e.clone());
        }
        out.extend(self.quotiented.iter().cloned());
        out
    }
}

/// Pair each kept basic coroot with a leftover abelian direction: node
/// leftovers in chain order, then the `u(1)` generators.
pub fn plan_pairing(rep: &AlgebraRep, chain: &BasicRootChain, removal: &Removal) -> Result<PairingPlan> {
    let removal = removal.closed(chain);
    let d = rep.dim();
    let kept: Vec<usize> = (0..chain.nodes.len()).filter(|i| !removal.nodes.contains(i)).collect();
    let ts: Vec<DVector<f64>> = kept.iter().map(|&i| coroot_unit(rep, &chain.nodes[i].theta)).collect();
    let mut cands = Vec::new();
    let mut dropped = Vec::new();
    for (i, node) in chain.nodes.iter().enumerate() {
        if removal.nodes.contains(&i) {
            dropped.push(coroot_unit(rep, &node.theta));
        }
        if removal.drops_abelian_of(chain, i) {
            dropped.extend(node.abelian.iter().cloned());
        } else {
            cands.extend(node.abelian.iter().cloned());
        }
    }
    for &a in &rep.csa_indices[rep.rank()..] {
        cands.push(unit(d, a));
    }
    let es = gram_schmidt(&cands, &ts, 1e-6);
    if es.len() != ts.len() {
        return Err(HktError::PairingMismatch {
            required: ts.len(),
            given: es.len(),
        });
    }
    let start: Vec<DVector<f64>> = ts.iter().chain(es.iter()).cloned().collect();
    let quotiented = gram_schmidt(&dropped, &start, 1e-6);
    if 2 * ts.len() + quotiented.len() != rep.csa_indices.len() {
        return Err(HktError::Dimension(format!(
            "{} paired and {} quotiented directions do not fill the {}-dimensional abelian part",
            2 * ts.len(),
            quotiented.len(),
            rep.csa_indices.len()
        )));
    }
    let pairs = kept
        .iter()
        .zip(ts.into_iter().zip(es))
        .map(|(&i, (t, e))| CsaPair {
            theta: Some(chain.nodes[i].theta_index),
            t,
            e,
        })
        .collect();
    Ok(PairingPlan {
        kept_nodes: kept,
        pairing: CsaPairing { pairs },
        quotiented,
    })
}

/// Rebase the representation so that every pairing vector is a generator,
/// and return the pairing in the new basis.
pub fn rebase_for_pairing(rep: &AlgebraRep, plan: &PairingPlan) -> Result<(AlgebraRep, CsaPairing)> {
    let basis = plan.abelian_basis();
    let new_rep = rep.rebase_abelian(&basis)?;
    let d = rep.dim();
    let csa = &new_rep.csa_indices;
    let pairs = plan
        .pairing
        .pairs
        .iter()
        .enumerate()
        .map(|(k, p)| CsaPair {
            theta: p.theta,
            t: unit(d, csa[2 * k]),
            e: unit(d, csa[2 * k + 1]),
        })
        .collect();
    Ok((new_rep, CsaPairing { pairs }))
}

/// Generator indices left after dividing out `removal` (the rep must be rebased by the plan).
pub fn coset_support(rep: &AlgebraRep, chain: &BasicRootChain, removal: &Removal, plan: &PairingPlan) -> Vec<usize> {
    let removal = removal.closed(chain);
    let mut out = Vec::new();
    for entry in &rep.root_vector_table {
        let coords = &rep.root_system.positive_roots[entry.root].coords;
        let gone = removal.nodes.iter().any(|&n| chain.nodes[n].root_system.is_root(coords));
        if !gone {
            out.push(entry.re_index);
            out.push(entry.im_index);
        }
    }
    out.extend(rep.csa_indices[..2 * plan.pairing.pairs.len()].iter().copied());
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutomorphismRecord {
    pub root: Vec<String>,
    pub label: String,
    pub kind: AutomorphismKind,
    pub level: usize,
    pub orthogonality: f64,
    pub invariance: f64,
    pub hadamard: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleReport {
    pub quaternion: f64,
    /// Largest entry of `Omega` coupling kept and quotiented directions.
    pub invariance_leak: f64,
    /// Block with the largest leak when the subspace is not invariant.
    pub leaking_block: Option<String>,
    /// `max |K - K'|` with `K'` from the K-kind chain.
    pub k_prime_difference: f64,
    /// Per block of `K`: `1` if `K'` agrees, `-1` if it is the negative, `0` otherwise.
    pub k_prime_block_signs: Vec<i8>,
    pub automorphisms: Vec<AutomorphismRecord>,
}

#[derive(Debug, Clone)]
pub struct QuaternionTriple {
    pub i: ComplexStructure,
    pub j: ComplexStructure,
    pub k: ComplexStructure,
    pub k_prime: ComplexStructure,
    pub report: TripleReport,
}

fn chain_product(
    rep: &AlgebraRep,
    chain: &BasicRootChain,
    kept: &[usize],
    kind: AutomorphismKind,
    f: &StructureConstants,
    records: Option<&mut Vec<AutomorphismRecord>>,
) -> Result<RMatrix> {
    let d = rep.dim();
    let mut omega = RMatrix::identity(d, d);
    let mut recs = Vec::new();
    for &n in kept {
        let node = &chain.nodes[n];
        let a = automorphism_from_root(rep, &node.theta, kind)?;
        if records.is_some() {
            let had = hadamard_matrix(rep, a.root_index, kind);
            recs.push(AutomorphismRecord {
                root: node.theta.coords.iter().map(rootsys::format_rational).collect(),
                label: rep.root_system.root_label(node.theta_index),
                kind,
                level: node.level,
                orthogonality: a.orthogonality_residual,
                invariance: invariance_residual(&a.matrix, f),
                hadamard: max_abs(&(had - &a.matrix)),
            });
        }
        omega = &a.matrix * omega;
    }
    if let Some(r) = records {
        r.extend(recs);
    }
    Ok(omega)
}

fn restrict(m: &RMatrix, rows: &[usize], cols: &[usize]) -> RMatrix {
    RMatrix::from_fn(rows.len(), cols.len(), |r, c| m[(rows[r], cols[c])])
}

/// `I` canonical, `J = Omega I Omega^T` with `Omega` the product of J-kind
/// automorphisms over the kept basic roots (outer level first), `K = I J`.
/// `rep` and `pairing` must come from [`rebase_for_pairing`].
pub fn build_quaternion_triple(
    rep: &AlgebraRep,
    chain: &BasicRootChain,
    plan: &PairingPlan,
    pairing: &CsaPairing,
    support: &[usize],
    f: &StructureConstants,
) -> Result<QuaternionTriple> {
    let i = canonical_i_on(rep, pairing, support)?;
    let quotiented: Vec<usize> = (0..rep.dim()).filter(|a| !support.contains(a)).collect();
    let mut records = Vec::new();
    let omega = chain_product(rep, chain, &plan.kept_nodes, AutomorphismKind::JKind, f, Some(&mut records))?;
    let omega_k = chain_product(rep, chain, &plan.kept_nodes, AutomorphismKind::KKind, f, Some(&mut records))?;
    let leak = [&omega, &omega_k]
        .iter()
        .map(|m| {
            max_abs(&restrict(m, &quotiented, support)).max(max_abs(&restrict(m, support, &quotiented)))
        })
        .fold(0.0_f64, f64::max);
    let leak = if quotiented.is_empty() { 0.0 } else { leak };
    let leaking_block = (leak > rep.tol).then(|| {
        let col_leak = |c: usize| {
            [&omega, &omega_k]
                .iter()
                .flat_map(|m| quotiented.iter().map(move |&q| m[(q, c)].abs().max(m[(c, q)].abs())))
                .fold(0.0_f64, f64::max)
        };
        let worst = support.iter().copied().max_by(|&a, &b| col_leak(a).total_cmp(&col_leak(b))).unwrap();
        match i.blocks.iter().find(|b| b.indices.contains(&worst)) {
            Some(b) => format!("{:?} {:?}", b.kind, b.indices),
            None => format!("generator {worst}"),
        }
    });
    let om = restrict(&omega, support, support);
    let omk = restrict(&omega_k, support, support);
    let j = i.conjugated(&om);
    let k = i.compose(&j);
    let k_prime = i.conjugated(&omk);
    let quaternion = crate::cstruct::quaternion_residual(&i, &j, &k);
    let k_prime_difference = max_abs(&(&k.matrix - &k_prime.matrix));
    let k_prime_block_signs = k
        .blocks
        .iter()
        .map(|b| {
            let a = k.block_matrix(b);
            let bp = k_prime.block_matrix(b);
            if (a - bp).abs().max() < 1e-9 {
                1
            } else if (a + bp).abs().max() < 1e-9 {
                -1
            } else {
                0
            }
        })
        .collect();
    Ok(QuaternionTriple {
        i,
        j,
        k,
        k_prime,
        report: TripleReport {
            quaternion,
            invariance_leak: leak,
            leaking_block,
            k_prime_difference,
            k_prime_block_signs,
            automorphisms: records,
        },
    })
}

/// True when every block of `s` carries one of the given tags.
pub fn blocks_tagged(s: &ComplexStructure, allowed: &[BlockTag]) -> bool {
    s.blocks.iter().all(|b| allowed.contains(&b.tag))
}
