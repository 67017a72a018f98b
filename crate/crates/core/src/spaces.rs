//! U(1) padding rules, the classification of HKT group manifolds, quotient
//! enumeration and end-to-end verification of group manifolds and cosets.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::autom::{
    basic_roots, build_quaternion_triple, coset_support, plan_pairing, rebase_for_pairing, AutomorphismRecord,
    BasicRootChain, Removal,
};
use crate::cstruct::{
    nijenhuis_at_origin, quaternion_residual_matrix, BlockTag, ComplexStructure, GeometryResidualReport,
};
use crate::error::{HktError, Result};
use crate::liealg::{build_matrix_rep_with_tol, structure_constants, StructureConstants};
use crate::linalg::RMatrix;
use crate::rootsys::{self, build_root_system, extended_dynkin_surgery, Family, RootSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Factor {
    pub family: Family,
    pub rank: usize,
}

impl Factor {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        build_root_system(family, rank)?;
        Ok(Factor { family, rank })
    }

    pub fn dim(&self) -> usize {
        self.family.algebra_dim(self.rank)
    }

    pub fn group_name(&self) -> String {
        self.family.group_name(self.rank)
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

/// One node of the chain of basic roots as read off the Dynkin diagram.
#[derive(Debug, Clone)]
pub struct SurgeryNode {
    pub level: usize,
    pub root_system: RootSystem,
    pub parent: Option<usize>,
    pub abelian_dim: usize,
}

impl SurgeryNode {
    /// `TYPE:label-of-highest-root`, labels in the factor's simple-root names.
    pub fn label(&self) -> String {
        let rs = &self.root_system;
        let k = rs.locate(&rs.highest_root.coords).unwrap().0;
        format!("{}:{}", rs.type_label(), rs.root_label(k))
    }
}

/// Chain of simple summands obtained by repeated extended-Dynkin surgery,
/// ordered by level and then by smallest simple-root label.
pub fn surgery_chain(rs: &RootSystem) -> Result<Vec<SurgeryNode>> {
    let mut nodes = vec![SurgeryNode {
        level: 0,
        root_system: rs.clone(),
        parent: None,
        abelian_dim: 0,
    }];
    let mut frontier = vec![0];
    let mut level = 0;
    while !frontier.is_empty() {
        let mut next: Vec<SurgeryNode> = Vec::new();
        for &p in &frontier {
            let s = extended_dynkin_surgery(&nodes[p].root_system)?;
            nodes[p].abelian_dim = s.abelian_rank;
            for sub in s.summands {
                next.push(SurgeryNode {
                    level: level + 1,
                    root_system: sub,
                    parent: Some(p),
                    abelian_dim: 0,
                });
            }
        }
        next.sort_by_key(|n| n.root_system.simple_labels.iter().copied().min());
        let start = nodes.len();
        nodes.extend(next);
        frontier = (start..nodes.len()).collect();
        level += 1;
        if level > rs.rank + 1 {
            return Err(HktError::ChainDepth(level));
        }
    }
    Ok(nodes)
}

fn subtree(nodes: &[SurgeryNode], i: usize) -> Vec<usize> {
    let mut out = vec![i];
    let mut k = 0;
    while k < out.len() {
        let cur = out[k];
        out.extend((0..nodes.len()).filter(|&j| nodes[j].parent == Some(cur)));
        k += 1;
    }
    out
}

/// Number of basic roots minus rank, doubled appropriately: `2 n_b - r` summed over factors.
pub fn required_padding(factors: &[Factor]) -> Result<i64> {
    let mut p = 0;
    for f in factors {
        let rs = build_root_system(f.family, f.rank)?;
        let nb = rootsys::basic_root_count(&rs)? as i64;
        p += 2 * nb - f.rank as i64;
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuotientPart {
    /// A chain node (with its subtree) of the given factor.
    Node { factor: usize, node: usize, label: String },
    /// The abelian part of a level: leftover directions of the nodes one level up.
    Abelian { factor: usize, level: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub simple_factors: Vec<Factor>,
    pub u1_count: usize,
    pub quotient: Vec<QuotientPart>,
}

/// Per-factor bookkeeping derived from a spec.
#[derive(Debug, Clone)]
pub struct FactorPlan {
    pub factor: Factor,
    pub chain: Vec<SurgeryNode>,
    pub removal: Removal,
    pub padding: i64,
    pub quotient_dim: usize,
    /// Names of the quotiented pieces, e.g. `SU(2)` or `U(1)`.
    pub quotient_names: Vec<String>,
}

impl FactorPlan {
    pub fn kept_basic_roots(&self) -> usize {
        self.chain.len() - self.removal.nodes.len()
    }
}

fn node_group_name(rs: &RootSystem) -> String {
    rs.family.group_name(rs.rank)
}

fn u1_power(n: usize) -> String {
    match n {
        1 => "U(1)".to_string(),
        _ => format!("[U(1)]^{n}"),
    }
}

impl SpaceSpec {
    pub fn group(factors: Vec<Factor>, u1_count: usize) -> Self {
        SpaceSpec {
            simple_factors: factors,
            u1_count,
            quotient: Vec::new(),
        }
    }

    pub fn is_coset(&self) -> bool {
        !self.quotient.is_empty()
    }

    pub fn factor_plans(&self) -> Result<Vec<FactorPlan>> {
        let mut plans = Vec::new();
        for (fi, factor) in self.simple_factors.iter().enumerate() {
            let rs = build_root_system(factor.family, factor.rank)?;
            let chain = surgery_chain(&rs)?;
            let mut removal = Removal::default();
            for part in &self.quotient {
                match part {
                    QuotientPart::Node { factor, node, .. } if *factor == fi => {
                        if *node == 0 || *node >= chain.len() {
                            return Err(HktError::InvalidQuotient(format!(
                                "factor {factor_name} has no removable node {node}",
                                factor_name = self.simple_factors[fi]
                            )));
                        }
                        removal.nodes.extend(subtree(&chain, *node));
                    }
                    QuotientPart::Abelian { factor, level } if *factor == fi => {
                        if *level == 0 {
                            return Err(HktError::InvalidQuotient("abelian levels start at 1".into()));
                        }
                        removal.abelian_levels.insert(*level);
                    }
                    _ => {}
                }
            }
            let mut quotient_dim = 0;
            let mut removed_csa = 0;
            let mut names = Vec::new();
            let tops: BTreeSet<usize> = removal
                .nodes
                .iter()
                .copied()
                .filter(|&n| chain[n].parent.is_none_or(|p| !removal.nodes.contains(&p)))
                .collect();
            for &n in &tops {
                quotient_dim += chain[n].root_system.algebra_dim();
                removed_csa += chain[n].root_system.rank;
                names.push(node_group_name(&chain[n].root_system));
            }
            for &lvl in &removal.abelian_levels {
                let a: usize = chain
                    .iter()
                    .enumerate()
                    .filter(|(i, n)| n.level + 1 == lvl && !removal.nodes.contains(i))
                    .map(|(_, n)| n.abelian_dim)
                    .sum();
                if a == 0 {
                    return Err(HktError::InvalidQuotient(format!(
                        "level {lvl} of {factor} has no abelian part"
                    )));
                }
                quotient_dim += a;
                removed_csa += a;
                names.push(u1_power(a));
            }
            let kept = (chain.len() - removal.nodes.len()) as i64;
            let padding = 2 * kept - (factor.rank as i64 - removed_csa as i64);
            plans.push(FactorPlan {
                factor: *factor,
                chain,
                removal,
                padding,
                quotient_dim,
                quotient_names: names,
            });
        }
        Ok(plans)
    }

    pub fn padding_required(&self) -> Result<i64> {
        Ok(self.factor_plans()?.iter().map(|p| p.padding).sum())
    }

    pub fn tangent_dim(&self) -> Result<i64> {
        let plans = self.factor_plans()?;
        let g: usize = self.simple_factors.iter().map(Factor::dim).sum();
        let h: usize = plans.iter().map(|p| p.quotient_dim).sum();
        Ok(g as i64 + self.u1_count as i64 - h as i64)
    }

    pub fn name(&self) -> String {
        let plans = match self.factor_plans() {
            Ok(p) => p,
            Err(_) => return self.to_string(),
        };
        let mut parts = Vec::new();
        for p in &plans {
            let g = p.factor.group_name();
            match p.quotient_names.len() {
                0 => parts.push(g),
                1 => parts.push(format!("{g}/{}", p.quotient_names[0])),
                _ => parts.push(format!("{g}/({})", p.quotient_names.join(" x "))),
            }
        }
        if self.u1_count > 0 {
            parts.push(u1_power(self.u1_count));
        }
        parts.join(" x ")
    }

    /// Parse strings such as `A2`, `A3xU1^1`, `B3xU1^2/A1:gamma`,
    /// `A3xU1/A1:betaxU1`. Quotient items are `TYPE:LABEL` (a simple-root
    /// name or a `+` sum naming the highest root) or `U1[:LEVEL]`.
    pub fn parse(s: &str) -> Result<SpaceSpec> {
        let s = s.trim();
        let (group, quotient) = match s.split_once('/') {
            Some((g, q)) => (g, Some(q)),
            None => (s, None),
        };
        let mut factors = Vec::new();
        let mut u1 = 0usize;
        for item in group.split('x').map(str::trim) {
            if item.is_empty() {
                return Err(HktError::Parse(format!("empty factor in '{s}'")));
            }
            if let Some(rest) = item.strip_prefix("U1").or_else(|| item.strip_prefix("u1")) {
                let n = match rest.strip_prefix('^') {
                    Some(n) => n.parse::<usize>().map_err(|_| HktError::Parse(format!("bad U(1) power '{item}'")))?,
                    None if rest.is_empty() => 1,
                    None => return Err(HktError::Parse(format!("bad U(1) factor '{item}'"))),
                };
                u1 += n;
                continue;
            }
            let (fam, rank) = item.split_at(1);
            let family: Family = fam.parse().map_err(HktError::Parse)?;
            let rank: usize = rank
                .parse()
                .map_err(|_| HktError::Parse(format!("bad rank in factor '{item}'")))?;
            factors.push(Factor::new(family, rank)?);
        }
        if factors.is_empty() {
            return Err(HktError::Parse(format!("'{s}' has no simple factor")));
        }
        let mut spec = SpaceSpec::group(factors, u1);
        if let Some(q) = quotient {
            let chains: Vec<Vec<SurgeryNode>> = spec
                .simple_factors
                .iter()
                .map(|f| surgery_chain(&build_root_system(f.family, f.rank)?))
                .collect::<Result<_>>()?;
            for item in q.split('x').map(str::trim) {
                spec.quotient.push(resolve_quotient_item(item, &chains)?);
            }
            spec.quotient.sort();
            spec.quotient.dedup();
        }
        Ok(spec)
    }
}

fn resolve_quotient_item(item: &str, chains: &[Vec<SurgeryNode>]) -> Result<QuotientPart> {
    if item.is_empty() {
        return Err(HktError::Parse("empty quotient item".into()));
    }
    if let Some(rest) = item.strip_prefix("U1").or_else(|| item.strip_prefix("u1")) {
        let level = match rest.strip_prefix(':') {
            Some(l) => l.parse::<usize>().map_err(|_| HktError::Parse(format!("bad level in '{item}'")))?,
            None if rest.is_empty() => 1,
            None => return Err(HktError::Parse(format!("bad quotient item '{item}'"))),
        };
        for (fi, chain) in chains.iter().enumerate() {
            let a: usize = chain.iter().filter(|n| n.level + 1 == level).map(|n| n.abelian_dim).sum();
            if a > 0 {
                return Ok(QuotientPart::Abelian { factor: fi, level });
            }
        }
        return Err(HktError::InvalidQuotient(format!("no factor has an abelian part at level {level}")));
    }
    let (ty, label) = item
        .split_once(':')
        .ok_or_else(|| HktError::Parse(format!("quotient item '{item}' should look like A1:gamma or U1")))?;
    for (fi, chain) in chains.iter().enumerate() {
        let top = &chain[0].root_system;
        // exact match on the highest root label first
        if let Some(n) = (1..chain.len()).find(|&n| chain[n].label() == format!("{ty}:{label}")) {
            return Ok(QuotientPart::Node {
                factor: fi,
                node: n,
                label: chain[n].label(),
            });
        }
        if let Some(idx) = rootsys::parse_simple_root_name(label) {
            if idx >= top.rank {
                continue;
            }
            let best = (1..chain.len())
                .filter(|&n| chain[n].root_system.type_label() == ty && chain[n].root_system.simple_labels.contains(&idx))
                .max_by_key(|&n| chain[n].level);
            if let Some(n) = best {
                return Ok(QuotientPart::Node {
                    factor: fi,
                    node: n,
                    label: chain[n].label(),
                });
            }
        }
    }
    Err(HktError::InvalidQuotient(format!("no centralizer summand matches '{item}'")))
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s: Vec<String> = self.simple_factors.iter().map(|x| x.to_string()).collect();
        match self.u1_count {
            0 => {}
            1 => s.push("U1".into()),
            n => s.push(format!("U1^{n}")),
        }
        write!(f, "{}", s.join("x"))?;
        if !self.quotient.is_empty() {
            let q: Vec<String> = self
                .quotient
                .iter()
                .map(|p| match p {
                    QuotientPart::Node { label, .. } => label.clone(),
                    QuotientPart::Abelian { level: 1, .. } => "U1".into(),
                    QuotientPart::Abelian { level, .. } => format!("U1:{level}"),
                })
                .collect();
            write!(f, "/{}", q.join("x"))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyRow {
    pub rank: usize,
    pub padding: i64,
    pub name: String,
}

/// Classical name used in the classification table (orthogonal groups as `SO`).
fn classical_name(family: Family, rank: usize) -> String {
    match family {
        Family::A => format!("SU({})", rank + 1),
        Family::B => format!("SO({})", 2 * rank + 1),
        Family::C => format!("Sp({rank})"),
        Family::D => format!("SO({})", 2 * rank),
    }
}

/// Padding per rank for `1..=max_rank`. Low ranks that coincide with other
/// algebras (`B1 = C1 = A1`, `D2 = A1 + A1`, `D3 = A3`) use that algebra; `D1` is abelian and skipped.
pub fn classify_family(family: Family, max_rank: usize) -> Result<Vec<ClassifyRow>> {
    let mut rows = Vec::new();
    for rank in 1..=max_rank {
        let factors = match (family, rank) {
            (Family::D, 1) => continue,
            (Family::B | Family::C, 1) => vec![Factor::new(Family::A, 1)?],
            (Family::D, 2) => vec![Factor::new(Family::A, 1)?, Factor::new(Family::A, 1)?],
            _ => vec![Factor::new(family, rank)?],
        };
        let padding = required_padding(&factors)?;
        let base = classical_name(family, rank);
        let name = if padding == 0 {
            base
        } else {
            format!("{base} x {}", u1_power(padding as usize))
        };
        rows.push(ClassifyRow { rank, padding, name });
    }
    Ok(rows)
}

/// Level 0 is the padded group manifold; level `k` divides by every
/// non-empty product of level-`k` summands, with or without the level's
/// abelian part, re-padded per quotient.
pub fn enumerate_quotients(factor: Factor, max_level: usize) -> Result<Vec<SpaceSpec>> {
    let rs = build_root_system(factor.family, factor.rank)?;
    let chain = surgery_chain(&rs)?;
    let mut out = Vec::new();
    let p0 = required_padding(&[factor])?;
    out.push(SpaceSpec::group(vec![factor], p0 as usize));
    for level in 1..=max_level {
        let nodes: Vec<usize> = (0..chain.len()).filter(|&i| chain[i].level == level).collect();
        let abelian: usize = chain.iter().filter(|n| n.level + 1 == level).map(|n| n.abelian_dim).sum();
        let ab_choices: &[bool] = if abelian > 0 { &[false, true] } else { &[false] };
        for mask in 0u32..(1 << nodes.len()) {
            for &with_ab in ab_choices {
                if mask == 0 && !with_ab {
                    continue;
                }
                let mut quotient = Vec::new();
                for (b, &n) in nodes.iter().enumerate() {
                    if mask & (1 << b) != 0 {
                        quotient.push(QuotientPart::Node {
                            factor: 0,
                            node: n,
                            label: chain[n].label(),
                        });
                    }
                }
                if with_ab {
                    quotient.push(QuotientPart::Abelian { factor: 0, level });
                }
                quotient.sort();
                let mut spec = SpaceSpec {
                    simple_factors: vec![factor],
                    u1_count: 0,
                    quotient,
                };
                let p = spec.padding_required()?;
                if p < 0 {
                    continue;
                }
                spec.u1_count = p as usize;
                if !out.contains(&spec) {
                    out.push(spec);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub tol: f64,
    pub fd_step: f64,
    pub torsion_tol: f64,
    pub nijenhuis_tol: f64,
    /// Run the finite-difference Nijenhuis check on group manifolds.
    pub nijenhuis: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            tol: 1e-9,
            fd_step: 1e-4,
            torsion_tol: 1e-8,
            nijenhuis_tol: 1e-5,
            nijenhuis: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    Failed,
    NotAdmissible,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "certified",
            Verdict::Failed => "failed",
            Verdict::NotAdmissible => "not-admissible",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicRootRecord {
    pub factor: usize,
    pub level: usize,
    pub label: String,
    pub root: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureResiduals {
    #[serde(rename = "I")]
    pub i: GeometryResidualReport,
    #[serde(rename = "J")]
    pub j: GeometryResidualReport,
    #[serde(rename = "K")]
    pub k: GeometryResidualReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub residuals: StructureResiduals,
    pub quaternion: f64,
    pub jacobi: f64,
    pub invariance_leak: f64,
    pub coset_closure_residual: f64,
    pub k_prime_difference: f64,
    pub k_prime_block_signs: Vec<i8>,
    pub j_block_tags: Vec<BlockTag>,
    pub basic_roots_used: Vec<BasicRootRecord>,
    pub automorphisms: Vec<AutomorphismRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub spec: SpaceSpec,
    pub dimension: i64,
    pub padding_required: i64,
    pub verdict: Verdict,
    pub message: Option<String>,
    pub certificate: Option<Certificate>,
}

impl VerificationReport {
    /// Largest algebraic residual (integrability, square, quaternion, torsion).
    pub fn max_residual(&self) -> Option<f64> {
        let c = self.certificate.as_ref()?;
        let mut m = c.quaternion.max(c.invariance_leak);
        for r in [&c.residuals.i, &c.residuals.j, &c.residuals.k] {
            m = m.max(r.max_algebraic());
            if let Some(t) = r.torsion_match {
                m = m.max(t);
            }
        }
        Some(m)
    }
}

/// Triple and tangent-space data of one factor.
pub struct FactorTriple {
    pub chain: BasicRootChain,
    pub f: StructureConstants,
    pub support: Vec<usize>,
    pub triple: crate::autom::QuaternionTriple,
    pub root_labels: Vec<BasicRootRecord>,
}

/// Build the quaternion triple of one factor with `u1_count` paddings and the given removal.
pub fn factor_triple(
    factor: Factor,
    fi: usize,
    u1_count: usize,
    removal: &Removal,
    surgery: &[SurgeryNode],
    tol: f64,
) -> Result<FactorTriple> {
    let rep0 = build_matrix_rep_with_tol(factor.family, factor.rank, u1_count, tol)?;
    let chain = basic_roots(&rep0)?;
    let same = chain.nodes.len() == surgery.len()
        && chain
            .nodes
            .iter()
            .zip(surgery)
            .all(|(a, b)| a.label() == b.label() && a.parent == b.parent && a.abelian_dim() == b.abelian_dim);
    if !same {
        return Err(HktError::CentralizerMismatch(format!(
            "numerical chain of {factor} differs from the Dynkin-surgery chain"
        )));
    }
    let plan = plan_pairing(&rep0, &chain, removal)?;
    let (rep, pairing) = rebase_for_pairing(&rep0, &plan)?;
    let f = structure_constants(&rep);
    let support = coset_support(&rep, &chain, removal, &plan);
    let triple = build_quaternion_triple(&rep, &chain, &plan, &pairing, &support, &f)?;
    let root_labels = plan
        .kept_nodes
        .iter()
        .map(|&n| {
            let node = &chain.nodes[n];
            BasicRootRecord {
                factor: fi,
                level: node.level,
                label: node.label(),
                root: node.theta.coords.iter().map(rootsys::format_rational).collect(),
            }
        })
        .collect();
    Ok(FactorTriple {
        chain,
        f,
        support,
        triple,
        root_labels,
    })
}

fn block_diag(parts: &[&RMatrix]) -> RMatrix {
    let n = parts.iter().map(|m| m.nrows()).sum();
    let mut out = RMatrix::zeros(n, n);
    let mut off = 0;
    for m in parts {
        out.view_mut((off, off), (m.nrows(), m.ncols())).copy_from(m);
        off += m.nrows();
    }
    out
}

fn whole(m: RMatrix) -> ComplexStructure {
    let n = m.nrows();
    ComplexStructure::new(m, (0..n).collect(), Vec::new())
}

/// Full pipeline for a group manifold or coset. Not-admissible specs and
/// residual failures are reported in the verdict; internal construction
/// errors are returned as `Err`.
pub fn build_coset_triple(spec: &SpaceSpec, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let plans = spec.factor_plans()?;
    let padding: i64 = plans.iter().map(|p| p.padding).sum();
    let dimension = spec.tangent_dim()?;
    let mut report = VerificationReport {
        name: spec.name(),
        spec: spec.clone(),
        dimension,
        padding_required: padding,
        verdict: Verdict::NotAdmissible,
        message: None,
        certificate: None,
    };
    if let Some(p) = plans.iter().find(|p| p.padding < 0) {
        report.message = Some(format!(
            "{} has more remaining Cartan directions than twice its basic roots",
            p.factor
        ));
        return Ok(report);
    }
    if spec.u1_count as i64 != padding {
        report.message = Some(format!(
            "requires {padding} U(1) factor{}, {} given",
            if padding == 1 { "" } else { "s" },
            spec.u1_count
        ));
        return Ok(report);
    }
    if dimension <= 0 || dimension % 4 != 0 {
        report.message = Some(format!("tangent dimension {dimension} is not a positive multiple of 4"));
        return Ok(report);
    }

    let mut parts = Vec::new();
    for (fi, p) in plans.iter().enumerate() {
        parts.push(factor_triple(p.factor, fi, p.padding as usize, &p.removal, &p.chain, cfg.tol)?);
    }

    let restricted_f: Vec<StructureConstants> = parts.iter().map(|p| p.f.restrict(&p.support)).collect();
    let f = StructureConstants::direct_sum(&restricted_f.iter().collect::<Vec<_>>());
    let i = whole(block_diag(&parts.iter().map(|p| &p.triple.i.matrix).collect::<Vec<_>>()));
    let j = whole(block_diag(&parts.iter().map(|p| &p.triple.j.matrix).collect::<Vec<_>>()));
    let k = whole(block_diag(&parts.iter().map(|p| &p.triple.k.matrix).collect::<Vec<_>>()));
    let kp = block_diag(&parts.iter().map(|p| &p.triple.k_prime.matrix).collect::<Vec<_>>());

    let group = !spec.is_coset();
    let mut ri = GeometryResidualReport::algebraic(&i, &f, cfg.tol, group);
    let mut rj = GeometryResidualReport::algebraic(&j, &f, cfg.tol, group);
    let mut rk = GeometryResidualReport::algebraic(&k, &f, cfg.tol, group);
    if group && cfg.nijenhuis {
        let n = nijenhuis_at_origin(&f, &[&i.matrix, &j.matrix, &k.matrix], cfg.fd_step);
        ri.nijenhuis = Some(n[0].residual);
        rj.nijenhuis = Some(n[1].residual);
        rk.nijenhuis = Some(n[2].residual);
    }
    let quaternion = quaternion_residual_matrix(&i.matrix, &j.matrix, &k.matrix);
    let jacobi = parts.iter().map(|p| p.f.jacobi_residual()).fold(0.0, f64::max);
    let invariance_leak = parts.iter().map(|p| p.triple.report.invariance_leak).fold(0.0, f64::max);
    let coset_closure_residual = parts
        .iter()
        .map(|p| closure_residual(&p.f, &p.support))
        .fold(0.0, f64::max);
    let k_prime_difference = crate::linalg::max_abs(&(&k.matrix - kp));

    let mut failures = Vec::new();
    for (name, r) in [("I", &ri), ("J", &rj), ("K", &rk)] {
        if r.integrability > cfg.tol {
            failures.push(format!("{name} integrability {:.3e}", r.integrability));
        }
        if r.square > cfg.tol {
            failures.push(format!("{name} square {:.3e}", r.square));
        }
        if r.bismut > cfg.tol {
            failures.push(format!("{name} bismut {:.3e}", r.bismut));
        }
        if group {
            match r.torsion_match {
                Some(t) if t <= cfg.torsion_tol.max(cfg.tol) => {}
                Some(t) => failures.push(format!("{name} torsion {t:.3e}")),
                None => failures.push(format!("{name} torsion not computed (not integrable)")),
            }
        }
        if let Some(n) = r.nijenhuis {
            if n > cfg.nijenhuis_tol {
                failures.push(format!("{name} nijenhuis {n:.3e}"));
            }
        }
    }
    if quaternion > cfg.tol {
        failures.push(format!("quaternion {quaternion:.3e}"));
    }
    if invariance_leak > cfg.tol {
        let at = parts.iter().find_map(|p| p.triple.report.leaking_block.clone()).unwrap_or_default();
        failures.push(format!("subspace invariance leak {invariance_leak:.3e} at {at}"));
    }
    if jacobi > cfg.tol {
        failures.push(format!("jacobi {jacobi:.3e}"));
    }
    let mut automorphisms = Vec::new();
    let mut j_block_tags = Vec::new();
    let mut k_prime_block_signs = Vec::new();
    let mut basic_roots_used = Vec::new();
    for p in &parts {
        for a in &p.triple.report.automorphisms {
            if a.orthogonality > 1e-10 || a.invariance > cfg.tol || a.hadamard > cfg.tol {
                failures.push(format!("automorphism {} ({:?}) not an automorphism", a.label, a.kind));
            }
        }
        automorphisms.extend(p.triple.report.automorphisms.iter().cloned());
        j_block_tags.extend(p.triple.j.blocks.iter().map(|b| b.tag));
        k_prime_block_signs.extend(p.triple.report.k_prime_block_signs.iter().copied());
        basic_roots_used.extend(p.root_labels.iter().cloned());
    }
    report.verdict = if failures.is_empty() {
        Verdict::Certified
    } else {
        Verdict::Failed
    };
    report.message = (!failures.is_empty()).then(|| failures.join("; "));
    report.certificate = Some(Certificate {
        residuals: StructureResiduals { i: ri, j: rj, k: rk },
        quaternion,
        jacobi,
        invariance_leak,
        coset_closure_residual,
        k_prime_difference,
        k_prime_block_signs,
        j_block_tags,
        basic_roots_used,
        automorphisms,
    });
    Ok(report)
}

/// `max |f_{m m' h}|` over kept `m, m'` and quotiented `h`; reported, never asserted.
fn closure_residual(f: &StructureConstants, support: &[usize]) -> f64 {
    let d = f.dim();
    let quot: Vec<usize> = (0..d).filter(|a| !support.contains(a)).collect();
    let mut worst: f64 = 0.0;
    for &a in support {
        for &b in support {
            for &h in &quot {
                worst = worst.max(f.get(a, b, h).abs());
            }
        }
    }
    worst
}

/// Convenience: verify the padded group manifold of the given factors.
pub fn verify_group(factors: &[Factor], cfg: &VerifyConfig) -> Result<VerificationReport> {
    let p = required_padding(factors)?;
    let spec = SpaceSpec::group(factors.to_vec(), p.max(0) as usize);
    build_coset_triple(&spec, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autom::Removal;

    fn f(family: Family, rank: usize) -> Factor {
        Factor::new(family, rank).unwrap()
    }

    #[test]
    fn paddings() {
        assert_eq!(required_padding(&[f(Family::A, 2)]).unwrap(), 0);
        assert_eq!(required_padding(&[f(Family::D, 4)]).unwrap(), 4);
        assert_eq!(required_padding(&[f(Family::B, 3)]).unwrap(), 3);
        assert_eq!(required_padding(&[f(Family::A, 2), f(Family::B, 3)]).unwrap(), 3);
    }

    #[test]
    fn classify_a7() {
        let rows = classify_family(Family::A, 7).unwrap();
        let p: Vec<i64> = rows.iter().map(|r| r.padding).collect();
        assert_eq!(p, vec![1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(rows[3].name, "SU(5)");
        assert_eq!(rows[2].name, "SU(4) x U(1)");
        let c = classify_family(Family::C, 1).unwrap();
        assert_eq!((c[0].padding, c[0].name.as_str()), (1, "Sp(1) x U(1)"));
    }

    #[test]
    fn su4_quotients() {
        let specs = enumerate_quotients(f(Family::A, 3), 1).unwrap();
        let names: Vec<String> = specs.iter().map(SpaceSpec::name).collect();
        assert_eq!(
            names,
            vec![
                "SU(4) x U(1)",
                "SU(4)/U(1) x [U(1)]^2",
                "SU(4)/SU(2)",
                "SU(4)/(SU(2) x U(1)) x U(1)",
            ]
        );
        for s in &specs {
            assert_eq!(s.tangent_dim().unwrap() % 4, 0);
        }
    }

    #[test]
    fn parse_specs() {
        let s = SpaceSpec::parse("B3xU1^2/A1:gamma").unwrap();
        assert_eq!(s.name(), "Spin(7)/SU(2) x [U(1)]^2");
        assert_eq!(s.tangent_dim().unwrap(), 20);
        let s = SpaceSpec::parse("A3xU1/A1:betaxU1").unwrap();
        assert_eq!(s.name(), "SU(4)/(SU(2) x U(1)) x U(1)");
        let s = SpaceSpec::parse("A6/A4:beta+gamma+delta+epsilon").unwrap();
        assert_eq!(s.name(), "SU(7)/SU(5)");
        assert!(matches!(SpaceSpec::parse("Q3"), Err(HktError::Parse(_))));
        assert!(SpaceSpec::parse("A2/A1:alpha").is_err());
        let s = SpaceSpec::parse("A2xB3xU1^3").unwrap();
        assert_eq!(s.to_string(), "A2xB3xU1^3");
    }

    #[test]
    fn verify_a2_and_a3() {
        let cfg = VerifyConfig::default();
        let r = build_coset_triple(&SpaceSpec::parse("A2").unwrap(), &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Certified, "{:?}", r.message);
        let r = build_coset_triple(&SpaceSpec::parse("A3").unwrap(), &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::NotAdmissible);
        assert!(r.message.unwrap().contains("requires 1 U(1) factor"));
    }

    #[test]
    fn surgery_chain_matches_numeric_chain() {
        for (fam, r) in [(Family::A, 5), (Family::B, 4), (Family::C, 3), (Family::D, 5)] {
            let rs = build_root_system(fam, r).unwrap();
            let sc = surgery_chain(&rs).unwrap();
            let p = required_padding(&[f(fam, r)]).unwrap() as usize;
            let rep = crate::liealg::build_matrix_rep(fam, r, p).unwrap();
            let chain = basic_roots(&rep).unwrap();
            let a: Vec<String> = sc.iter().map(SurgeryNode::label).collect();
            let b: Vec<String> = chain.nodes.iter().map(|n| n.label()).collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn group_spec_matches_direct_pipeline() {
        let cfg = VerifyConfig::default();
        let r = build_coset_triple(&SpaceSpec::parse("A3xU1").unwrap(), &cfg).unwrap();
        let chain = surgery_chain(&build_root_system(Family::A, 3).unwrap()).unwrap();
        let t = factor_triple(f(Family::A, 3), 0, 1, &Removal::default(), &chain, 1e-9).unwrap();
        let direct = GeometryResidualReport::algebraic(&t.triple.j, &t.f, 1e-9, true);
        let c = r.certificate.unwrap();
        assert_eq!(c.residuals.j.integrability, direct.integrability);
        assert_eq!(c.residuals.j.torsion_match, direct.torsion_match);
    }

    #[test]
    fn multi_factor_coset() {
        let s = SpaceSpec::parse("A3xB3xU1^3/A1:betaxA1:alpha").unwrap();
        // SU(4)/SU(2) needs 0, Spin(7)/SU(2) needs 2, so 3 is one too many
        let r = build_coset_triple(&s, &VerifyConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NotAdmissible);
        let s = SpaceSpec::parse("A3xB3xU1^2/A1:betaxA1:alpha").unwrap();
        let r = build_coset_triple(&s, &VerifyConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Certified, "{:?}", r.message);
        assert_eq!(r.dimension, 32);
        assert_eq!(r.name, "SU(4)/SU(2) x Spin(7)/SU(2) x [U(1)]^2");
    }

    #[test]
    fn wrong_padding_is_not_admissible() {
        let r = build_coset_triple(&SpaceSpec::parse("B3xU1^2").unwrap(), &VerifyConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NotAdmissible);
        assert!(r.certificate.is_none());
    }
}
