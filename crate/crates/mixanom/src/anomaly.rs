//! Obstruction cocycles for strong/weak symmetry superoperators.
//!
//! A symmetry element acts on density matrices as rho -> U(k g) rho U(g)^dag;
//! we stored the two unitaries as the `left` and `right` components of a
//! [`SymmetrySuperoperator`]. Restricting every element to a region M and
//! multiplying restrictions produces boundary obstructions W(g1, g2); their
//! further restriction to the two boundary components yields factors whose
//! associativity defect is a pure phase. The table of those phases (left
//! action minus right action) is the anomaly cocycle; gauge-invariant
//! indicator products and an exact coboundary-triviality solver decide the
//! class.

use crate::pauli::OperatorSum;
use crate::phasepoly::{mask_sites, PhasePolyUnitary, Region};
use crate::scalar::Scalar;
use crate::{Error, Result};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Ordered pair of unitaries (left action U(k g), right action U(g)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetrySuperoperator {
    pub left: PhasePolyUnitary,
    pub right: PhasePolyUnitary,
}

impl SymmetrySuperoperator {
    pub fn identity(m: u32) -> Self {
        SymmetrySuperoperator {
            left: PhasePolyUnitary::identity(m),
            right: PhasePolyUnitary::identity(m),
        }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(SymmetrySuperoperator {
            left: self.left.compose(&other.left)?,
            right: self.right.compose(&other.right)?,
        })
    }

    pub fn invert(&self) -> Self {
        SymmetrySuperoperator { left: self.left.invert(), right: self.right.invert() }
    }

    pub fn is_identity(&self) -> bool {
        self.left.is_identity() && self.right.is_identity()
    }

    /// Applies the superoperator to an exact density operator:
    /// rho -> left rho right^dag.
    pub fn apply(&self, rho: &OperatorSum) -> Result<OperatorSum> {
        let n = rho.n_sites();
        let l = self.left.to_operator_sum(n)?;
        let r_dag = self.right.to_operator_sum(n)?.dagger();
        l.mul(rho)?.mul(&r_dag)
    }
}

/// Finite symmetry group of product form K x G with its superoperator
/// representation on the full lattice.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    strong: Vec<usize>,
    weak: Vec<usize>,
    /// index into `weak` giving the G-component of each element
    weak_component: Vec<usize>,
    rep: Vec<SymmetrySuperoperator>,
}

impl GroupSpec {
    /// Validates the table (associativity, identity, inverses), the unique
    /// k.g factorization, and that the representation is a homomorphism up to
    /// a global phase in both components.
    pub fn new(
        labels: Vec<String>,
        table: Vec<Vec<usize>>,
        strong_labels: &[&str],
        weak_labels: &[&str],
        rep: Vec<SymmetrySuperoperator>,
    ) -> Result<GroupSpec> {
        let n = labels.len();
        if table.len() != n || table.iter().any(|r| r.len() != n) || rep.len() != n {
            return Err(Error::Group("table/rep size mismatch".into()));
        }
        for row in &table {
            if row.iter().any(|&x| x >= n) {
                return Err(Error::Group("table entry out of range".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::Group(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::Group("no identity element".into()))?;
        for a in 0..n {
            if !(0..n).any(|b| table[a][b] == identity) {
                return Err(Error::Group(format!("no inverse for element {a}")));
            }
        }
        let index_of = |label: &str| -> Result<usize> {
            labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::Group(format!("unknown label {label}")))
        };
        let strong: Vec<usize> = strong_labels
            .iter()
            .map(|l| index_of(l))
            .collect::<Result<_>>()?;
        let weak: Vec<usize> = weak_labels
            .iter()
            .map(|l| index_of(l))
            .collect::<Result<_>>()?;
        for (part, name) in [(&strong, "strong"), (&weak, "weak")] {
            if !part.contains(&identity) {
                return Err(Error::Group(format!("{name} part misses the identity")));
            }
            for &a in part.iter() {
                for &b in part.iter() {
                    if !part.contains(&table[a][b]) {
                        return Err(Error::Group(format!("{name} part is not a subgroup")));
                    }
                }
            }
        }
        // unique factorization gamma = k . g
        let mut weak_component = vec![usize::MAX; n];
        for gamma in 0..n {
            let mut found = None;
            for &k in strong.iter() {
                for (gi, &g) in weak.iter().enumerate() {
                    if table[k][g] == gamma {
                        if found.is_some() && found != Some(gi) {
                            return Err(Error::Group(format!(
                                "element {} does not factor uniquely",
                                labels[gamma]
                            )));
                        }
                        found = Some(gi);
                    }
                }
            }
            weak_component[gamma] = found.ok_or_else(|| {
                Error::Group(format!("element {} has no k.g factorization", labels[gamma]))
            })?;
        }
        let group = GroupSpec { labels, table, identity, strong, weak, weak_component, rep };
        group.check_rep_homomorphism()?;
        Ok(group)
    }

    fn check_rep_homomorphism(&self) -> Result<()> {
        for a in 0..self.order() {
            for b in 0..self.order() {
                let prod = self.rep[a].compose(&self.rep[b])?;
                let expect = &self.rep[self.table[a][b]];
                for (x, y) in [(&prod.left, &expect.left), (&prod.right, &expect.right)] {
                    let defect = x.compose(&y.invert())?;
                    if defect.as_scalar().is_none() {
                        return Err(Error::Group(format!(
                            "rep is not a homomorphism (up to phase) at ({}, {})",
                            self.labels[a], self.labels[b]
                        )));
                    }
                }
            }
        }
        // right component must depend only on the weak part
        for gamma in 0..self.order() {
            let g = self.weak[self.weak_component[gamma]];
            let (eq, _) = self.rep[gamma].right.canonical_equal(&self.rep[g].right);
            if !eq {
                return Err(Error::Group(format!(
                    "right action of {} differs from its weak component",
                    self.labels[gamma]
                )));
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn rep(&self, gamma: usize) -> &SymmetrySuperoperator {
        &self.rep[gamma]
    }

    pub fn strong_indices(&self) -> &[usize] {
        &self.strong
    }

    pub fn weak_indices(&self) -> &[usize] {
        &self.weak
    }

    /// Index into `weak_indices()` of the G-component of `gamma`.
    pub fn weak_component(&self, gamma: usize) -> usize {
        self.weak_component[gamma]
    }

    pub fn modulus_log2(&self) -> u32 {
        self.rep[self.identity].left.modulus_log2()
    }

    /// Canonical restriction of every element's superoperator to the region.
    pub fn restrict(&self, region: &Region) -> Vec<SymmetrySuperoperator> {
        self.rep
            .iter()
            .map(|s| SymmetrySuperoperator {
                left: s.left.restrict(region),
                right: s.right.restrict(region),
            })
            .collect()
    }

    pub fn to_json(&self) -> GroupSpecJson {
        GroupSpecJson {
            elements: self.labels.clone(),
            table: self.table.clone(),
            strong: self.strong.iter().map(|&i| self.labels[i].clone()).collect(),
            weak: self.weak.iter().map(|&i| self.labels[i].clone()).collect(),
            rep: self
                .labels
                .iter()
                .zip(self.rep.iter())
                .map(|(l, s)| {
                    (l.clone(), RepJson { left: s.left.to_text(), right: s.right.to_text() })
                })
                .collect(),
        }
    }

    pub fn from_json(doc: &GroupSpecJson) -> Result<GroupSpec> {
        let rep = doc
            .elements
            .iter()
            .map(|l| {
                let r = doc
                    .rep
                    .get(l)
                    .ok_or_else(|| Error::Group(format!("missing rep for {l}")))?;
                Ok(SymmetrySuperoperator {
                    left: PhasePolyUnitary::parse(&r.left)?,
                    right: PhasePolyUnitary::parse(&r.right)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        GroupSpec::new(
            doc.elements.clone(),
            doc.table.clone(),
            &doc.strong.iter().map(String::as_str).collect::<Vec<_>>(),
            &doc.weak.iter().map(String::as_str).collect::<Vec<_>>(),
            rep,
        )
    }
}

/// JSON document form of a group specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSpecJson {
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
    pub strong: Vec<String>,
    pub weak: Vec<String>,
    pub rep: BTreeMap<String, RepJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepJson {
    pub left: String,
    pub right: String,
}

/// Largest ordered-position span of any monomial of the restricted
/// representation; the "operator range" of the group on this region.
fn operator_range(rep: &[SymmetrySuperoperator], region: &Region) -> usize {
    let pos: BTreeMap<usize, usize> = region
        .sites()
        .iter()
        .enumerate()
        .map(|(p, &s)| (s, p))
        .collect();
    let mut range = 0usize;
    for s in rep {
        for u in [&s.left, &s.right] {
            for &mask in u.poly().keys() {
                let sites = mask_sites(mask);
                let ps: Vec<usize> = sites.iter().filter_map(|s| pos.get(s).copied()).collect();
                if ps.len() == sites.len() && !ps.is_empty() {
                    let span = ps.iter().max().unwrap() - ps.iter().min().unwrap();
                    range = range.max(span);
                }
            }
        }
    }
    range
}

/// W(g1, g2) = U_M(g1) U_M(g2) U_M(g1 g2)^{-1}, componentwise, with its
/// support confined to the declared boundary components.
pub fn boundary_obstruction(
    g1: usize,
    g2: usize,
    group: &GroupSpec,
    region: &Region,
) -> Result<SymmetrySuperoperator> {
    let rep = group.restrict(region);
    boundary_obstruction_in(g1, g2, group, &rep, region)
}

/// Same as [`boundary_obstruction`] but with explicit restricted operators
/// (any valid gauge choice of U_M).
pub fn boundary_obstruction_in(
    g1: usize,
    g2: usize,
    group: &GroupSpec,
    rep: &[SymmetrySuperoperator],
    region: &Region,
) -> Result<SymmetrySuperoperator> {
    let w = rep[g1]
        .compose(&rep[g2])?
        .compose(&rep[group.mul(g1, g2)].invert())?;
    let boundary = region.boundary_mask();
    for u in [&w.left, &w.right] {
        let leak = u.support() & !boundary;
        if leak != 0 {
            return Err(Error::SupportLeak(mask_sites(leak)));
        }
    }
    Ok(w)
}

/// Splits a boundary obstruction into its left- and right-component factors.
/// The global phase is assigned to the left factor.
pub fn split_boundary(
    w: &SymmetrySuperoperator,
    region: &Region,
) -> Result<(SymmetrySuperoperator, SymmetrySuperoperator)> {
    let split_one = |u: &PhasePolyUnitary| -> Result<(PhasePolyUnitary, PhasePolyUnitary)> {
        let m = u.modulus_log2();
        let mut l = PhasePolyUnitary::identity(m);
        let mut r = PhasePolyUnitary::identity(m);
        let lmask = region.components()[0].1;
        let rmask = region.components()[1].1;
        let xl = u.x_layer() & lmask;
        let xr = u.x_layer() & rmask;
        if xl | xr != u.x_layer() {
            return Err(Error::SupportLeak(mask_sites(u.x_layer() & !(lmask | rmask))));
        }
        l = l.compose(&PhasePolyUnitary::x_flips(m, xl))?;
        r = r.compose(&PhasePolyUnitary::x_flips(m, xr))?;
        for (&mask, &c) in u.poly().iter() {
            if mask == 0 {
                l.add_monomial(0, c as i64);
            } else if mask & !lmask == 0 {
                l.add_monomial(mask, c as i64);
            } else if mask & !rmask == 0 {
                r.add_monomial(mask, c as i64);
            } else {
                return Err(Error::StraddlingMonomial(mask_sites(mask)));
            }
        }
        Ok((l, r))
    };
    let (ll, lr) = split_one(&w.left)?;
    let (rl, rr) = split_one(&w.right)?;
    Ok((
        SymmetrySuperoperator { left: ll, right: rl },
        SymmetrySuperoperator { left: lr, right: rr },
    ))
}

/// Anomaly cocycle table: group-element triples -> phase exponents mod 2^m.
#[derive(Debug, Clone)]
pub struct CocycleTable {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    weak_component: Vec<usize>,
    weak_order: usize,
    m: u32,
    values: Vec<u8>,
}

impl CocycleTable {
    fn idx(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.order() + b) * self.order() + c
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn modulus_log2(&self) -> u32 {
        self.m
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn value(&self, a: usize, b: usize, c: usize) -> u8 {
        self.values[self.idx(a, b, c)]
    }

    /// Phase exp(2 pi i e / 2^m) as an exact scalar (quarter-turn exponents
    /// only, which covers every value occurring in the catalog).
    pub fn phase(&self, a: usize, b: usize, c: usize) -> Result<Scalar> {
        exponent_phase(self.value(a, b, c), self.m)
    }

    /// Checks the 3-cocycle identity on every quadruple.
    pub fn check_cocycle_condition(&self) -> Result<()> {
        let n = self.order();
        let modulus = 1i64 << self.m;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let ab = self.table[a][b];
                        let bc = self.table[b][c];
                        let cd = self.table[c][d];
                        let v = self.value(b, c, d) as i64 - self.value(ab, c, d) as i64
                            + self.value(a, bc, d) as i64
                            - self.value(a, b, cd) as i64
                            + self.value(a, b, c) as i64;
                        if v.rem_euclid(modulus) != 0 {
                            return Err(Error::CocycleViolation(
                                self.labels[a].clone(),
                                self.labels[b].clone(),
                                self.labels[c].clone(),
                                self.labels[d].clone(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Gauge-invariant product for a Z2 x Z2 subgroup generated by (a, b):
    /// value(a,b,b) + value(ab,a,b) + value(ab,ab,a) + value(a,e,a) mod 2^m.
    pub fn indicator(&self, a: usize, b: usize) -> Result<u8> {
        let e = self.identity;
        if a == e || b == e || a == b {
            return Err(Error::Group("indicator needs two distinct non-identity generators".into()));
        }
        if self.table[a][a] != e || self.table[b][b] != e {
            return Err(Error::Group("indicator generators must square to identity".into()));
        }
        if self.table[a][b] != self.table[b][a] {
            return Err(Error::Group("indicator generators must commute".into()));
        }
        let ab = self.table[a][b];
        let sum = self.value(a, b, b) as u32
            + self.value(ab, a, b) as u32
            + self.value(ab, ab, a) as u32
            + self.value(a, e, a) as u32;
        Ok((sum % (1 << self.m)) as u8)
    }

    /// Indicator as an exact phase.
    pub fn indicator_phase(&self, a: usize, b: usize) -> Result<Scalar> {
        exponent_phase(self.indicator(a, b)?, self.m)
    }

    /// Applies the left-factor redefinition shift: value += d(beta) with
    /// beta an arbitrary exponent function on Gamma x Gamma.
    pub fn coboundary_shift(&self, beta: &[Vec<i64>]) -> CocycleTable {
        let n = self.order();
        let modulus = 1i64 << self.m;
        let mut out = self.clone();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let ab = self.table[a][b];
                    let bc = self.table[b][c];
                    let shift = beta[a][b] + beta[ab][c] - beta[b][c] - beta[a][bc];
                    let idx = self.idx(a, b, c);
                    out.values[idx] =
                        ((out.values[idx] as i64 + shift).rem_euclid(modulus)) as u8;
                }
            }
        }
        out
    }

    /// Applies the weak-sector equivalence shift: value -= d(beta') pulled
    /// back through the G-component projection.
    pub fn weak_coboundary_shift(&self, beta_weak: &[Vec<i64>]) -> CocycleTable {
        let n = self.order();
        let modulus = 1i64 << self.m;
        // weak-component multiplication table
        let wc = &self.weak_component;
        let mut out = self.clone();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (ga, gb, gc) = (wc[a], wc[b], wc[c]);
                    let gab = wc[self.table[a][b]];
                    let gbc = wc[self.table[b][c]];
                    let shift =
                        beta_weak[ga][gb] + beta_weak[gab][gc] - beta_weak[gb][gc] - beta_weak[ga][gbc];
                    let idx = self.idx(a, b, c);
                    out.values[idx] =
                        ((out.values[idx] as i64 - shift).rem_euclid(modulus)) as u8;
                }
            }
        }
        out
    }

    /// Decides whether the table is a pure gauge artifact, i.e. equals
    /// d(beta) - d(beta' o proj) for exponent functions beta on Gamma^2 and
    /// beta' on G^2, by exact elimination mod 2^m. Returns the witness.
    pub fn is_trivial_class(&self) -> Result<TrivialityVerdict> {
        let n = self.order();
        let cap = 16;
        if n > cap {
            return Err(Error::CapExceeded(n, cap));
        }
        let w = self.weak_order;
        let nvars = n * n + w * w;
        let bvar = |a: usize, b: usize| a * n + b;
        let wvar = |a: usize, b: usize| n * n + a * w + b;
        let mut rows: Vec<Vec<i64>> = Vec::with_capacity(n * n * n);
        let mut rhs: Vec<i64> = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut row = vec![0i64; nvars];
                    let ab = self.table[a][b];
                    let bc = self.table[b][c];
                    row[bvar(a, b)] += 1;
                    row[bvar(ab, c)] += 1;
                    row[bvar(b, c)] -= 1;
                    row[bvar(a, bc)] -= 1;
                    let (ga, gb, gc) = (
                        self.weak_component[a],
                        self.weak_component[b],
                        self.weak_component[c],
                    );
                    let gab = self.weak_component[ab];
                    let gbc = self.weak_component[bc];
                    row[wvar(ga, gb)] -= 1;
                    row[wvar(gab, gc)] -= 1;
                    row[wvar(gb, gc)] += 1;
                    row[wvar(ga, gbc)] += 1;
                    rows.push(row);
                    rhs.push(self.value(a, b, c) as i64);
                }
            }
        }
        match solve_mod_pow2(&rows, &rhs, self.m) {
            Some(solution) => {
                let beta: Vec<Vec<i64>> = (0..n)
                    .map(|a| (0..n).map(|b| solution[bvar(a, b)] as i64).collect())
                    .collect();
                let beta_weak: Vec<Vec<i64>> = (0..w)
                    .map(|a| (0..w).map(|b| solution[wvar(a, b)] as i64).collect())
                    .collect();
                Ok(TrivialityVerdict::Trivial { beta, beta_weak })
            }
            None => Ok(TrivialityVerdict::Nontrivial),
        }
    }

    pub fn to_json(&self) -> CocycleTableJson {
        let n = self.order();
        let mut entries = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    entries.push(CocycleEntryJson {
                        triple: [
                            self.labels[a].clone(),
                            self.labels[b].clone(),
                            self.labels[c].clone(),
                        ],
                        exponent: self.value(a, b, c),
                    });
                }
            }
        }
        CocycleTableJson { elements: self.labels.clone(), modulus_log2: self.m, entries }
    }
}

/// Outcome of the coboundary-triviality decision.
#[derive(Debug, Clone)]
pub enum TrivialityVerdict {
    Trivial { beta: Vec<Vec<i64>>, beta_weak: Vec<Vec<i64>> },
    Nontrivial,
}

impl TrivialityVerdict {
    pub fn is_trivial(&self) -> bool {
        matches!(self, TrivialityVerdict::Trivial { .. })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocycleTableJson {
    pub elements: Vec<String>,
    pub modulus_log2: u32,
    pub entries: Vec<CocycleEntryJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocycleEntryJson {
    pub triple: [String; 3],
    pub exponent: u8,
}

fn exponent_phase(e: u8, m: u32) -> Result<Scalar> {
    let quarter = 1u8 << (m - 2);
    if e % quarter != 0 {
        return Err(Error::NonGaussianPhase(e));
    }
    Ok(Scalar::i_pow((e / quarter) % 4))
}

/// Computes the full anomaly cocycle table on a region using the canonical
/// truncation of the group's representation.
pub fn cocycle(group: &GroupSpec, region: &Region) -> Result<CocycleTable> {
    let rep = group.restrict(region);
    cocycle_in(group, &rep, region)
}

/// Computes the cocycle from explicitly restricted operators (any gauge).
pub fn cocycle_in(
    group: &GroupSpec,
    rep: &[SymmetrySuperoperator],
    region: &Region,
) -> Result<CocycleTable> {
    let range = operator_range(rep, region);
    if region.len() < 2 * range + 4 {
        return Err(Error::Region(format!(
            "region of {} sites is below the minimum 2*range+4 = {}",
            region.len(),
            2 * range + 4
        )));
    }
    for (_, comp) in region.components() {
        if (comp.count_ones() as usize) < range + 1 {
            return Err(Error::Region(format!(
                "boundary component narrower than operator range {range}"
            )));
        }
    }
    let n = group.order();
    // left factors of all boundary obstructions
    let mut wl = vec![vec![SymmetrySuperoperator::identity(group.modulus_log2()); n]; n];
    for a in 0..n {
        for b in 0..n {
            let w = boundary_obstruction_in(a, b, group, rep, region)?;
            let (l, r) = split_boundary(&w, region)?;
            // reconstruction sanity: the split must recompose to w
            let back = l.compose(&r)?;
            debug_assert!(back.left.canonical_equal(&w.left).0);
            debug_assert!(back.right.canonical_equal(&w.right).0);
            wl[a][b] = l;
        }
    }
    let modulus = 1i64 << group.modulus_log2();
    let values: Vec<std::result::Result<u8, Error>> = (0..n * n * n)
        .into_par_iter()
        .map(|idx| {
            let a = idx / (n * n);
            let b = (idx / n) % n;
            let c = idx % n;
            let ab = group.mul(a, b);
            let bc = group.mul(b, c);
            let scalar_of = |u: &PhasePolyUnitary,
                             conj: &PhasePolyUnitary,
                             lhs1: &PhasePolyUnitary,
                             lhs2: &PhasePolyUnitary,
                             rhs2: &PhasePolyUnitary|
             -> Result<i64> {
                // lhs1 lhs2 = omega * (conj u conj^{-1}) rhs2
                let lhs = lhs1.compose(lhs2)?;
                let conjugated = conj.conjugate(u)?;
                let rhs = conjugated.compose(rhs2)?;
                let residue = lhs.compose(&rhs.invert())?;
                residue.as_scalar().map(|e| e as i64).ok_or_else(|| {
                    Error::NonScalarResidue(
                        group.labels()[a].clone(),
                        group.labels()[b].clone(),
                        group.labels()[c].clone(),
                    )
                })
            };
            let e_left = scalar_of(
                &wl[b][c].left,
                &rep[a].left,
                &wl[a][b].left,
                &wl[ab][c].left,
                &wl[a][bc].left,
            )?;
            let e_right = scalar_of(
                &wl[b][c].right,
                &rep[a].right,
                &wl[a][b].right,
                &wl[ab][c].right,
                &wl[a][bc].right,
            )?;
            Ok(((e_left - e_right).rem_euclid(modulus)) as u8)
        })
        .collect();
    let values = values.into_iter().collect::<std::result::Result<Vec<u8>, _>>()?;
    let table = CocycleTable {
        labels: group.labels().to_vec(),
        table: (0..n).map(|a| (0..n).map(|b| group.mul(a, b)).collect()).collect(),
        identity: group.identity_index(),
        weak_component: (0..n).map(|g| group.weak_component(g)).collect(),
        weak_order: group.weak_indices().len(),
        m: group.modulus_log2(),
        values,
    };
    table.check_cocycle_condition()?;
    Ok(table)
}

/// Solves A x = rhs mod 2^m by Gaussian elimination with minimum
/// 2-adic-valuation pivoting (valid over the local ring Z_{2^m}).
fn solve_mod_pow2(rows: &[Vec<i64>], rhs: &[i64], m: u32) -> Option<Vec<u8>> {
    let modulus: i64 = 1 << m;
    let nrows = rows.len();
    let ncols = if nrows == 0 { 0 } else { rows[0].len() };
    let mut a: Vec<Vec<i64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(modulus)).collect())
        .collect();
    let mut b: Vec<i64> = rhs.iter().map(|&x| x.rem_euclid(modulus)).collect();
    let val = |x: i64| -> u32 {
        if x == 0 {
            m
        } else {
            (x.trailing_zeros()).min(m)
        }
    };
    let inv_odd = |x: i64| -> i64 {
        // inverse of an odd residue mod 2^m by Newton iteration
        let mut inv = 1i64;
        for _ in 0..6 {
            inv = (inv * (2 - ((x * inv).rem_euclid(modulus)))).rem_euclid(modulus);
        }
        inv
    };
    let mut pivot_cols: Vec<(usize, usize, u32)> = Vec::new(); // (row, col, valuation)
    let mut used_rows = vec![false; nrows];
    for col in 0..ncols {
        // best pivot: unused row with minimal valuation in this column
        let mut best: Option<(usize, u32)> = None;
        for r in 0..nrows {
            if used_rows[r] || a[r][col] == 0 {
                continue;
            }
            let v = val(a[r][col]);
            if best.map_or(true, |(_, bv)| v < bv) {
                best = Some((r, v));
            }
        }
        let Some((prow, pval)) = best else { continue };
        if pval >= m {
            continue;
        }
        used_rows[prow] = true;
        pivot_cols.push((prow, col, pval));
        // normalize pivot to 2^pval
        let unit = a[prow][col] >> pval;
        let unit_inv = inv_odd(unit);
        for x in a[prow].iter_mut() {
            *x = (*x * unit_inv).rem_euclid(modulus);
        }
        b[prow] = (b[prow] * unit_inv).rem_euclid(modulus);
        // eliminate below/above where divisible
        for r in 0..nrows {
            if r == prow || a[r][col] == 0 {
                continue;
            }
            if val(a[r][col]) < pval {
                continue; // cannot eliminate with a weaker pivot; a later pivot handles it
            }
            let factor = (a[r][col] >> pval).rem_euclid(modulus);
            for cidx in 0..ncols {
                a[r][cidx] = (a[r][cidx] - factor * a[prow][cidx]).rem_euclid(modulus);
            }
            b[r] = (b[r] - factor * b[prow]).rem_euclid(modulus);
        }
    }
    // consistency: every unused row must have zero rhs
    for r in 0..nrows {
        if !used_rows[r] {
            if a[r].iter().any(|&x| x != 0) {
                // a row that still has entries but no pivot was usable: its
                // entries all have valuation >= m only if zero; otherwise the
                // pivot search above would have used it
                return None;
            }
            if b[r] != 0 {
                return None;
            }
        }
    }
    // back-substitute (pivots processed in reverse order)
    let mut x = vec![0i64; ncols];
    for &(prow, pcol, pval) in pivot_cols.iter().rev() {
        let mut acc = b[prow];
        for c in 0..ncols {
            if c != pcol {
                acc = (acc - a[prow][c] * x[c]).rem_euclid(modulus);
            }
        }
        // pivot entry is 2^pval; solvable iff 2^pval | acc
        if acc % (1 << pval) != 0 {
            return None;
        }
        x[pcol] = (acc >> pval).rem_euclid(modulus >> pval);
    }
    Some(x.into_iter().map(|v| v as u8).collect())
}

/// Report from the defect-charge fractionalization check.
#[derive(Debug, Clone, Serialize)]
pub struct DefectChargeReport {
    pub charge_before: String,
    pub charge_after: String,
    pub delta: String,
    pub delta_float: f64,
    pub defect_count: usize,
    pub per_defect: f64,
}

/// Measures the change of the strong charge when a weak-symmetry string is
/// applied to a state: rho -> S rho S^dag.
pub fn defect_charge_check(
    rho: &OperatorSum,
    charge: &OperatorSum,
    string_op: &OperatorSum,
    defect_count: usize,
) -> Result<DefectChargeReport> {
    let expectation = |state: &OperatorSum| -> Result<Scalar> {
        let tr = state.trace();
        if tr.is_zero() {
            return Err(Error::ZeroTrace);
        }
        let num = charge.mul(state)?.trace();
        // states and charge are Hermitian here; the ratio is real and the
        // trace is a positive rational
        let ratio = Scalar::from_parts(
            num.re / tr.re.clone(),
            num.im / tr.re,
        );
        Ok(ratio)
    };
    let before = expectation(rho)?;
    let flipped = string_op.mul(rho)?.mul(&string_op.dagger())?;
    let after = expectation(&flipped)?;
    let delta = after.clone() - before.clone();
    let delta_float = delta.to_complex64().re;
    Ok(DefectChargeReport {
        charge_before: before.to_exact_string(),
        charge_after: after.to_exact_string(),
        delta: delta.to_exact_string(),
        delta_float,
        defect_count,
        per_defect: if defect_count > 0 { delta_float / defect_count as f64 } else { 0.0 },
    })
}

/// Random exponent function on Gamma x Gamma for invariance tests.
pub fn random_beta(order: usize, m: u32, rng: &mut StdRng) -> Vec<Vec<i64>> {
    (0..order)
        .map(|_| (0..order).map(|_| rng.random_range(0..(1i64 << m))).collect())
        .collect()
}

/// Deterministic RNG for the randomized checks.
pub fn seeded_rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
