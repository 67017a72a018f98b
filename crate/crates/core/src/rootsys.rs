//! Classical root systems with exact rational coordinates.
//!
//! Roots live in the standard orthogonal coordinates of each family: `A_n`
//! is embedded in the zero-sum hyperplane of `Q^{n+1}`, the other families in
//! `Q^n`. Simple roots follow the Bourbaki numbering.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{HktError, Result};

pub type Rational = Rational64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl Family {
    /// Dimension of the simple algebra of this family and rank.
    pub fn algebra_dim(self, rank: usize) -> usize {
        match self {
            Family::A => rank * (rank + 2),
            Family::B | Family::C => rank * (2 * rank + 1),
            Family::D => rank * (2 * rank - 1),
        }
    }

    pub fn positive_root_count(self, rank: usize) -> usize {
        match self {
            Family::A => rank * (rank + 1) / 2,
            Family::B | Family::C => rank * rank,
            Family::D => rank * (rank - 1),
        }
    }

    pub fn min_rank(self) -> usize {
        match self {
            Family::A => 1,
            Family::B | Family::C => 2,
            Family::D => 3,
        }
    }

    /// Name of the compact simply connected group.
    pub fn group_name(self, rank: usize) -> String {
        match self {
            Family::A => format!("SU({})", rank + 1),
            Family::B => format!("Spin({})", 2 * rank + 1),
            Family::C => format!("Sp({rank})"),
            Family::D => format!("Spin({})", 2 * rank),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "C" | "c" => Ok(Family::C),
            "D" | "d" => Ok(Family::D),
            other => Err(format!("unknown family '{other}' (expected A, B, C or D)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LengthClass {
    Long,
    Short,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Root {
    pub coords: Vec<Rational>,
    pub length_class: LengthClass,
    pub sign: Sign,
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rational], k: Rational) -> Vec<Rational> {
    a.iter().map(|x| x * k).collect()
}

pub fn to_f64(a: &[Rational]) -> Vec<f64> {
    a.iter().map(|x| *x.numer() as f64 / *x.denom() as f64).collect()
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_integer(x)).collect()
}

impl Root {
    pub fn norm2(&self) -> Rational {
        dot(&self.coords, &self.coords)
    }

    pub fn negated(&self) -> Root {
        Root {
            coords: self.coords.iter().map(|x| -x).collect(),
            length_class: self.length_class,
            sign: match self.sign {
                Sign::Positive => Sign::Negative,
                Sign::Negative => Sign::Positive,
            },
        }
    }

    /// `<self, other^vee> = 2 (self, other) / (other, other)`.
    pub fn pairing(&self, other: &Root) -> Rational {
        Rational::from_integer(2) * dot(&self.coords, &other.coords) / other.norm2()
    }
}

/// Coroot `2 r / (r, r)` in the same orthogonal coordinates; a CSA element with `r(r^vee) = 2`.
pub fn coroot(r: &Root) -> Vec<Rational> {
    scale(&r.coords, Rational::from_integer(2) / r.norm2())
}

#[derive(Debug, Clone)]
pub struct RootSystem {
    pub family: Family,
    pub rank: usize,
    pub ambient_dim: usize,
    pub simple_roots: Vec<Root>,
    pub positive_roots: Vec<Root>,
    /// Simple-root coefficients of each positive root, parallel to `positive_roots`.
    pub coefficients: Vec<Vec<i64>>,
    pub cartan_matrix: Vec<Vec<i64>>,
    pub highest_root: Root,
    pub dynkin_labels: Vec<i64>,
    /// Indices of the simple roots in the top-level system this one was cut from.
    pub simple_labels: Vec<usize>,
    index: HashMap<Vec<Rational>, (usize, Sign)>,
}

/// Names used for simple roots in labels such as `A1:gamma`.
const SIMPLE_NAMES: [&str; 10] = [
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "iota", "kappa", "lambda",
];

pub fn simple_root_name(i: usize) -> String {
    SIMPLE_NAMES
        .get(i)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("a{}", i + 1))
}

/// Parse a simple-root name or `a<k>` (1-based) into an index.
pub fn parse_simple_root_name(s: &str) -> Option<usize> {
    if let Some(i) = SIMPLE_NAMES.iter().position(|n| *n == s) {
        return Some(i);
    }
    let k: usize = s.strip_prefix('a')?.parse().ok()?;
    k.checked_sub(1)
}

pub fn build_root_system(family: Family, rank: usize) -> Result<RootSystem> {
    if rank < family.min_rank() {
        return Err(HktError::UnsupportedFamilyRank {
            family,
            rank,
            reason: match family {
                Family::A => "rank must be at least 1",
                Family::B | Family::C => "rank must be at least 2 (B1 = C1 = A1)",
                Family::D => "rank must be at least 3 (D2 = A1+A1 is not simple)",
            },
        });
    }
    let n = rank;
    let dim = if family == Family::A { n + 1 } else { n };
    let e = |i: usize| -> Vec<i64> {
        let mut v = vec![0; dim];
        v[i] = 1;
        v
    };
    let diff = |i: usize, j: usize| -> Vec<i64> {
        let mut v = e(i);
        v[j] -= 1;
        v
    };
    let mut simple: Vec<Vec<i64>> = (0..n - 1).map(|i| diff(i, i + 1)).collect();
    let last = match family {
        Family::A => diff(n - 1, n),
        Family::B => e(n - 1),
        Family::C => {
            let mut v = e(n - 1);
            v[n - 1] = 2;
            v
        }
        Family::D => {
            let mut v = e(n - 2);
            v[n - 1] = 1;
            v
        }
    };
    simple.push(last);
    let simple: Vec<Vec<Rational>> = simple.iter().map(|v| ints(v)).collect();
    let rs = RootSystem::assemble(family, simple, (0..n).collect())?;
    debug_assert_eq!(rs.positive_roots.len(), family.positive_root_count(rank));
    Ok(rs)
}

impl RootSystem {
    /// Build an irreducible root system from a set of simple roots (given in
    /// some ambient orthogonal coordinates), identifying its family from the
    /// Cartan matrix. `hint` resolves the `B2 = C2` ambiguity.
    pub fn from_simple_roots(
        simple: Vec<Vec<Rational>>,
        labels: Vec<usize>,
        hint: Option<Family>,
    ) -> Result<RootSystem> {
        let family = classify(&simple, hint)?;
        RootSystem::assemble(family, simple, labels)
    }

    fn assemble(family: Family, simple: Vec<Vec<Rational>>, labels: Vec<usize>) -> Result<RootSystem> {
        let rank = simple.len();
        let ambient_dim = simple[0].len();
        let cartan = cartan_of(&simple);

        // Height-ordered closure using root strings: for a positive root b and
        // a simple root a_i, b + a_i is a root iff q - <b, a_i^vee> > 0 where
        // b - q a_i is the bottom of the a_i-string through b.
        let mut coeffs: Vec<Vec<i64>> = (0..rank)
            .map(|i| {
                let mut v = vec![0; rank];
                v[i] = 1;
                v
            })
            .collect();
        let mut seen: HashSet<Vec<i64>> = coeffs.iter().cloned().collect();
        let mut frontier = coeffs.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for b in &frontier {
                for i in 0..rank {
                    let mut q = 0;
                    loop {
                        let mut down = b.clone();
                        down[i] -= q + 1;
                        if seen.contains(&down) {
                            q += 1;
                        } else {
                            break;
                        }
                    }
                    // <b, a_i^vee> = sum_j b_j a_{ji}
                    let pair: i64 = (0..rank).map(|j| b[j] * cartan[j][i]).sum();
                    if q - pair > 0 {
                        let mut up = b.clone();
                        up[i] += 1;
                        if seen.insert(up.clone()) {
                            next.push(up);
                        }
                    }
                }
            }
            coeffs.extend(next.iter().cloned());
            frontier = next;
        }
        coeffs.sort_by(|a, b| {
            let ha: i64 = a.iter().sum();
            let hb: i64 = b.iter().sum();
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });

        let coords_of = |c: &[i64]| -> Vec<Rational> {
            let mut v = vec![Rational::zero(); ambient_dim];
            for (k, s) in c.iter().zip(&simple) {
                if *k != 0 {
                    for (x, y) in v.iter_mut().zip(s) {
                        *x += Rational::from_integer(*k) * y;
                    }
                }
            }
            v
        };
        let pos_coords: Vec<Vec<Rational>> = coeffs.iter().map(|c| coords_of(c)).collect();
        let max_norm = pos_coords.iter().map(|v| dot(v, v)).max().unwrap();
        let mk = |v: Vec<Rational>| -> Root {
            let n2 = dot(&v, &v);
            Root {
                coords: v,
                length_class: if n2 == max_norm {
                    LengthClass::Long
                } else {
                    LengthClass::Short
                },
                sign: Sign::Positive,
            }
        };
        let positive_roots: Vec<Root> = pos_coords.into_iter().map(mk).collect();
        let simple_roots: Vec<Root> = simple.iter().map(|s| mk(s.clone())).collect();

        let highest_index = positive_roots.len() - 1;
        let highest_root = positive_roots[highest_index].clone();
        let dynkin_labels = coeffs[highest_index].clone();

        let mut index = HashMap::new();
        for (k, r) in positive_roots.iter().enumerate() {
            index.insert(r.coords.clone(), (k, Sign::Positive));
            index.insert(r.negated().coords, (k, Sign::Negative));
        }

        let rs = RootSystem {
            family,
            rank,
            ambient_dim,
            simple_roots,
            positive_roots,
            coefficients: coeffs,
            cartan_matrix: cartan,
            highest_root,
            dynkin_labels,
            simple_labels: labels,
            index,
        };
        if rs.positive_roots.len() != family.positive_root_count(rank) {
            return Err(HktError::UnsupportedFamilyRank {
                family,
                rank,
                reason: "root closure produced the wrong number of positive roots",
            });
        }
        Ok(rs)
    }

    pub fn num_positive(&self) -> usize {
        self.positive_roots.len()
    }

    /// Dimension of the compact algebra.
    pub fn algebra_dim(&self) -> usize {
        self.rank + 2 * self.positive_roots.len()
    }

    pub fn is_root(&self, coords: &[Rational]) -> bool {
        self.index.contains_key(coords)
    }

    /// Position among the positive roots and the sign, if `coords` is a root.
    pub fn locate(&self, coords: &[Rational]) -> Option<(usize, Sign)> {
        self.index.get(coords).copied()
    }

    /// All roots: positive roots followed by their negatives.
    pub fn roots(&self) -> Vec<Root> {
        let mut out = self.positive_roots.clone();
        out.extend(self.positive_roots.iter().map(|r| r.negated()));
        out
    }

    pub fn height(&self, k: usize) -> i64 {
        self.coefficients[k].iter().sum()
    }

    /// Greatest `q >= 0` such that `a - q b` is a root.
    pub fn string_depth(&self, a: &[Rational], b: &[Rational]) -> i64 {
        let mut q = 0;
        let mut cur = a.to_vec();
        loop {
            cur = sub(&cur, b);
            if self.is_root(&cur) {
                q += 1;
            } else {
                return q;
            }
        }
    }

    /// Label of a positive root in terms of the top-level simple-root names,
    /// e.g. `alpha+2beta+2gamma`.
    pub fn root_label(&self, k: usize) -> String {
        let mut parts = Vec::new();
        for (i, &c) in self.coefficients[k].iter().enumerate() {
            if c == 0 {
                continue;
            }
            let name = simple_root_name(self.simple_labels[i]);
            if c == 1 {
                parts.push(name);
            } else {
                parts.push(format!("{c}{name}"));
            }
        }
        parts.join("+")
    }

    /// Short type label such as `B3` or `A1`.
    pub fn type_label(&self) -> String {
        format!("{}{}", self.family, self.rank)
    }

    pub fn to_doc(&self) -> RootSystemDoc {
        let fmt = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>();
        RootSystemDoc {
            family: self.family,
            rank: self.rank,
            simple_roots: self.simple_roots.iter().map(|r| fmt(&r.coords)).collect(),
            positive_roots: self.positive_roots.iter().map(|r| fmt(&r.coords)).collect(),
            cartan_matrix: self.cartan_matrix.clone(),
            highest_root: fmt(&self.highest_root.coords),
            dynkin_labels: self.dynkin_labels.clone(),
        }
    }
}

/// Serializable form of a root system; coordinates are rational strings such as `"1/2"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSystemDoc {
    pub family: Family,
    pub rank: usize,
    pub simple_roots: Vec<Vec<String>>,
    pub positive_roots: Vec<Vec<String>>,
    pub cartan_matrix: Vec<Vec<i64>>,
    pub highest_root: Vec<String>,
    pub dynkin_labels: Vec<i64>,
}

pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d: i64 = d.trim().parse().ok()?;
            if d == 0 {
                return None;
            }
            Some(Rational::new(n.trim().parse().ok()?, d))
        }
        None => Some(Rational::from_integer(s.trim().parse().ok()?)),
    }
}

/// `cartan[i][j] = <a_i, a_j^vee>`.
fn cartan_of(simple: &[Vec<Rational>]) -> Vec<Vec<i64>> {
    let two = Rational::from_integer(2);
    simple
        .iter()
        .map(|a| {
            simple
                .iter()
                .map(|b| {
                    let v = two * dot(a, b) / dot(b, b);
                    debug_assert!(v.is_integer());
                    v.to_integer()
                })
                .collect()
        })
        .collect()
}

fn classify(simple: &[Vec<Rational>], hint: Option<Family>) -> Result<Family> {
    let rank = simple.len();
    if rank == 1 {
        return Ok(Family::A);
    }
    let cartan = cartan_of(simple);
    let mut degree = vec![0usize; rank];
    let mut max_bond = 0;
    for i in 0..rank {
        for j in 0..rank {
            if i != j && cartan[i][j] != 0 {
                degree[i] += 1;
                max_bond = max_bond.max(cartan[i][j] * cartan[j][i]);
            }
        }
    }
    match max_bond {
        3 => Err(HktError::ExceptionalRootSystem),
        2 => {
            let norms: Vec<Rational> = simple.iter().map(|s| dot(s, s)).collect();
            let max = *norms.iter().max().unwrap();
            let short = norms.iter().filter(|n| **n < max).count();
            if rank == 2 {
                Ok(match hint {
                    Some(Family::C) => Family::C,
                    _ => Family::B,
                })
            } else if short == 1 {
                Ok(Family::B)
            } else {
                Ok(Family::C)
            }
        }
        _ => {
            let branch = degree.iter().filter(|&&d| d >= 3).count();
            if branch == 0 {
                Ok(Family::A)
            } else {
                // D_n has one trivalent node with two of its arms of length one.
                let b = degree.iter().position(|&d| d >= 3).unwrap();
                let leaves = (0..rank)
                    .filter(|&j| j != b && cartan[b][j] != 0 && degree[j] == 1)
                    .count();
                if branch == 1 && degree[b] == 3 && leaves >= 2 {
                    Ok(Family::D)
                } else {
                    Err(HktError::ExceptionalRootSystem)
                }
            }
        }
    }
}

/// Highest root: the positive root of maximal height.
pub fn highest_root(rs: &RootSystem) -> Root {
    rs.highest_root.clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynkinNode {
    Simple(usize),
    Lowest,
}

#[derive(Debug, Clone)]
pub struct DynkinDiagram {
    pub nodes: Vec<DynkinNode>,
    /// `(i, j, multiplicity)` with `i < j` indexing into `nodes`.
    pub edges: Vec<(usize, usize, u8)>,
}

impl DynkinDiagram {
    pub fn neighbors(&self, node: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(i, j, _)| {
                if i == node {
                    Some(j)
                } else if j == node {
                    Some(i)
                } else {
                    None
                }
            })
            .collect()
    }
}

/// Simple roots plus the lowest root `-theta`.
pub fn extended_dynkin_diagram(rs: &RootSystem) -> DynkinDiagram {
    let mut vecs: Vec<Vec<Rational>> = rs.simple_roots.iter().map(|r| r.coords.clone()).collect();
    vecs.push(rs.highest_root.negated().coords);
    let mut nodes: Vec<DynkinNode> = (0..rs.rank).map(DynkinNode::Simple).collect();
    nodes.push(DynkinNode::Lowest);
    let two = Rational::from_integer(2);
    let mut edges = Vec::new();
    for i in 0..vecs.len() {
        for j in i + 1..vecs.len() {
            let d = dot(&vecs[i], &vecs[j]);
            if d.is_zero() {
                continue;
            }
            let aij = two * d / dot(&vecs[j], &vecs[j]);
            let aji = two * d / dot(&vecs[i], &vecs[i]);
            let m = (aij * aji).abs();
            edges.push((i, j, m.to_integer() as u8));
        }
    }
    DynkinDiagram { nodes, edges }
}

#[derive(Debug, Clone)]
pub struct Surgery {
    /// Simple summands of the centralizer of `E_{+-theta}`.
    pub summands: Vec<RootSystem>,
    /// Leftover CSA directions of the centralizer (orthogonal to `theta^vee`
    /// and to the summands' coroots).
    pub abelian_rank: usize,
}

/// Delete `-theta` and its neighbours from the extended diagram; the
/// connected pieces left over are the simple summands of the centralizer.
pub fn extended_dynkin_surgery(rs: &RootSystem) -> Result<Surgery> {
    let diagram = extended_dynkin_diagram(rs);
    let lowest = rs.rank;
    let removed: HashSet<usize> = diagram.neighbors(lowest).into_iter().collect();
    let kept: Vec<usize> = (0..rs.rank).filter(|i| !removed.contains(i)).collect();

    let mut component = vec![usize::MAX; rs.rank];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &start in &kept {
        if component[start] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let mut stack = vec![start];
        let mut members = Vec::new();
        component[start] = id;
        while let Some(v) = stack.pop() {
            members.push(v);
            for w in diagram.neighbors(v) {
                if w < rs.rank && !removed.contains(&w) && component[w] == usize::MAX {
                    component[w] = id;
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }

    let mut summands = Vec::new();
    for g in groups {
        let simple = g.iter().map(|&i| rs.simple_roots[i].coords.clone()).collect();
        let labels = g.iter().map(|&i| rs.simple_labels[i]).collect();
        summands.push(RootSystem::from_simple_roots(simple, labels, Some(rs.family))?);
    }
    let used: usize = summands.iter().map(|s| s.rank).sum();
    Ok(Surgery {
        summands,
        abelian_rank: rs.rank - 1 - used,
    })
}

/// Number of basic roots: the highest root plus, recursively, those of every
/// summand left by the surgery.
pub fn basic_root_count(rs: &RootSystem) -> Result<usize> {
    let s = extended_dynkin_surgery(rs)?;
    let mut n = 1;
    for sub in &s.summands {
        n += basic_root_count(sub)?;
    }
    Ok(n)
}

impl fmt::Display for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.type_label())
    }
}

/// Helper for tests and callers that want integer coordinates.
pub fn rvec(v: &[i64]) -> Vec<Rational> {
    ints(v)
}

pub fn is_one(x: &Rational) -> bool {
    x.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn types(s: &Surgery) -> Vec<String> {
        s.summands.iter().map(|r| r.type_label()).collect()
    }

    #[test]
    fn positive_root_counts() {
        for (f, r) in [
            (Family::A, 1),
            (Family::A, 2),
            (Family::A, 6),
            (Family::B, 2),
            (Family::B, 3),
            (Family::B, 4),
            (Family::C, 3),
            (Family::C, 4),
            (Family::D, 3),
            (Family::D, 4),
            (Family::D, 5),
        ] {
            let rs = build_root_system(f, r).unwrap();
            assert_eq!(rs.num_positive(), f.positive_root_count(r), "{f}{r}");
            assert_eq!(rs.algebra_dim(), f.algebra_dim(r));
        }
    }

    #[test]
    fn a2_roots() {
        let rs = build_root_system(Family::A, 2).unwrap();
        let got: Vec<_> = (0..3).map(|k| rs.root_label(k)).collect();
        assert_eq!(got, vec!["alpha", "beta", "alpha+beta"]);
    }

    #[test]
    fn a1_single_root() {
        let rs = build_root_system(Family::A, 1).unwrap();
        assert_eq!(rs.num_positive(), 1);
        assert_eq!(rs.highest_root.coords, rvec(&[1, -1]));
    }

    #[test]
    fn b3_roots_and_highest() {
        let rs = build_root_system(Family::B, 3).unwrap();
        assert_eq!(rs.num_positive(), 9);
        assert!(rs.is_root(&rvec(&[0, 1, 0])));
        assert_eq!(rs.highest_root.coords, rvec(&[1, 1, 0]));
        assert_eq!(rs.dynkin_labels, vec![1, 2, 2]);
        assert_eq!(rs.root_label(rs.num_positive() - 1), "alpha+2beta+2gamma");
        assert_eq!(rs.simple_roots[2].length_class, LengthClass::Short);
        assert_eq!(rs.simple_roots[0].length_class, LengthClass::Long);
    }

    #[test]
    fn a3_highest() {
        let rs = build_root_system(Family::A, 3).unwrap();
        assert_eq!(rs.dynkin_labels, vec![1, 1, 1]);
    }

    #[test]
    fn unsupported_ranks_rejected() {
        assert!(build_root_system(Family::D, 2).is_err());
        assert!(build_root_system(Family::B, 1).is_err());
        assert!(build_root_system(Family::A, 0).is_err());
    }

    #[test]
    fn coroots_of_b3() {
        let rs = build_root_system(Family::B, 3).unwrap();
        let gamma = &rs.simple_roots[2];
        assert_eq!(coroot(gamma), rvec(&[0, 0, 2]));
        let k = rs.locate(&rvec(&[0, 1, 1])).unwrap().0;
        assert_eq!(coroot(&rs.positive_roots[k]), rvec(&[0, 1, 1]));
        for r in rs.roots() {
            assert_eq!(r.pairing(&r), Rational::from_integer(2));
        }
    }

    #[test]
    fn cartan_entries() {
        for (f, r) in [(Family::B, 4), (Family::C, 4), (Family::D, 5), (Family::A, 5)] {
            let rs = build_root_system(f, r).unwrap();
            for i in 0..r {
                assert_eq!(rs.cartan_matrix[i][i], 2);
                for j in 0..r {
                    if i != j {
                        assert!([0, -1, -2, -3].contains(&rs.cartan_matrix[i][j]));
                    }
                }
            }
        }
    }

    #[test]
    fn surgery_examples() {
        let a6 = build_root_system(Family::A, 6).unwrap();
        let s = extended_dynkin_surgery(&a6).unwrap();
        assert_eq!(types(&s), vec!["A4"]);
        assert_eq!(s.abelian_rank, 1);
        assert_eq!(s.summands[0].simple_labels, vec![1, 2, 3, 4]);

        let b3 = build_root_system(Family::B, 3).unwrap();
        let s = extended_dynkin_surgery(&b3).unwrap();
        assert_eq!(types(&s), vec!["A1", "A1"]);
        assert_eq!(s.abelian_rank, 0);

        let d4 = build_root_system(Family::D, 4).unwrap();
        let s = extended_dynkin_surgery(&d4).unwrap();
        assert_eq!(types(&s), vec!["A1", "A1", "A1"]);
        assert_eq!(s.abelian_rank, 0);

        let a1 = build_root_system(Family::A, 1).unwrap();
        let s = extended_dynkin_surgery(&a1).unwrap();
        assert!(s.summands.is_empty());
        assert_eq!(s.abelian_rank, 0);
    }

    #[test]
    fn surgery_c_and_d_families() {
        let c4 = build_root_system(Family::C, 4).unwrap();
        let s = extended_dynkin_surgery(&c4).unwrap();
        assert_eq!(types(&s), vec!["C3"]);
        let c2 = build_root_system(Family::C, 2).unwrap();
        assert_eq!(types(&extended_dynkin_surgery(&c2).unwrap()), vec!["A1"]);
        let d5 = build_root_system(Family::D, 5).unwrap();
        assert_eq!(types(&extended_dynkin_surgery(&d5).unwrap()), vec!["A1", "A3"]);
        let b4 = build_root_system(Family::B, 4).unwrap();
        assert_eq!(types(&extended_dynkin_surgery(&b4).unwrap()), vec!["A1", "B2"]);
    }

    #[test]
    fn basic_root_counts() {
        let cases = [
            (Family::A, 2, 1),
            (Family::A, 3, 2),
            (Family::A, 6, 3),
            (Family::B, 3, 3),
            (Family::C, 4, 4),
            (Family::D, 4, 4),
            (Family::D, 5, 4),
        ];
        for (f, r, n) in cases {
            let rs = build_root_system(f, r).unwrap();
            assert_eq!(basic_root_count(&rs).unwrap(), n, "{f}{r}");
        }
    }

    #[test]
    fn doc_roundtrip() {
        let rs = build_root_system(Family::C, 3).unwrap();
        let doc = rs.to_doc();
        let s = serde_json::to_string(&doc).unwrap();
        let back: RootSystemDoc = serde_json::from_str(&s).unwrap();
        assert_eq!(doc, back);
    }

    #[test]
    fn rational_parse() {
        assert_eq!(parse_rational("1/2"), Some(Rational::new(1, 2)));
        assert_eq!(parse_rational("-3"), Some(Rational::from_integer(-3)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(format_rational(&Rational::new(-1, 2)), "-1/2");
    }
}
