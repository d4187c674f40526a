//! Closed symbolic algebra for X-flip layers composed with diagonal
//! exponentials of phase polynomials in the occupation variables
//! n_i = (1 - sigma^z_i)/2.
//!
//! An element is  U = X_a * D_P  with X_a a product of single-site sigma^x
//! flips and D_P = exp(2 pi i / 2^m * P(n)), P an integer-coefficient
//! multilinear polynomial reduced mod 2^m. The empty monomial of P carries
//! the global phase. Every symmetry operator handled by this crate (Z layers,
//! CZ and CCZ products, domain-wall counters, spin flips) lives in this
//! algebra, and the algebra is closed under products, inverses, restriction
//! to a region and conjugation.

use crate::pauli::{OperatorSum, PauliWord};
use crate::scalar::Scalar;
use crate::{Error, Result, MAX_SITES};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Default modulus exponent: phases live in Z_8, unit 2 pi / 8 = pi / 4.
pub const DEFAULT_MODULUS_LOG2: u32 = 3;

/// Expansion cap (support size) for conversion to a Pauli sum.
pub const DEFAULT_EXPANSION_CAP: usize = 16;

/// X-flip layer times a diagonal phase-polynomial exponential.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhasePolyUnitary {
    x_layer: u64,
    /// monomial site mask -> coefficient mod 2^m; no zero coefficients;
    /// mask 0 is the global phase
    poly: BTreeMap<u64, u8>,
    m: u32,
}

impl PhasePolyUnitary {
    pub fn identity(m: u32) -> Self {
        PhasePolyUnitary { x_layer: 0, poly: BTreeMap::new(), m }
    }

    pub fn modulus_log2(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u16 {
        1u16 << self.m
    }

    pub fn x_layer(&self) -> u64 {
        self.x_layer
    }

    pub fn poly(&self) -> &BTreeMap<u64, u8> {
        &self.poly
    }

    pub fn is_identity(&self) -> bool {
        self.x_layer == 0 && self.poly.is_empty()
    }

    /// Scalar elements have no flips and no non-constant monomials; returns
    /// the global-phase exponent.
    pub fn as_scalar(&self) -> Option<u8> {
        if self.x_layer != 0 {
            return None;
        }
        if self.poly.keys().any(|&mask| mask != 0) {
            return None;
        }
        Some(self.poly.get(&0).copied().unwrap_or(0))
    }

    pub fn support(&self) -> u64 {
        self.poly.keys().fold(self.x_layer, |acc, &mask| acc | mask)
    }

    /// Phase exponent P(config) mod 2^m of a diagonal element on a Z-basis
    /// configuration (bit i set means n_i = 1). Panics on non-diagonal input.
    pub fn eval_diagonal(&self, config: u64) -> u8 {
        assert_eq!(self.x_layer, 0, "eval_diagonal on an element with flips");
        let mut acc: u16 = 0;
        for (&mask, &c) in self.poly.iter() {
            if mask & !config == 0 {
                acc += c as u16;
            }
        }
        (acc % (1 << self.m)) as u8
    }

    fn reduce(&self, v: i64) -> u8 {
        v.rem_euclid(1i64 << self.m) as u8
    }

    pub fn add_monomial(&mut self, mask: u64, coeff: i64) {
        let new = self.reduce(self.poly.get(&mask).copied().unwrap_or(0) as i64 + coeff);
        if new == 0 {
            self.poly.remove(&mask);
        } else {
            self.poly.insert(mask, new);
        }
    }

    /// Builds a diagonal element from monomial terms.
    pub fn diagonal(m: u32, terms: &[(&[usize], i64)]) -> Self {
        let mut u = Self::identity(m);
        for (sites, c) in terms {
            let mut mask = 0u64;
            for &s in *sites {
                assert!(s < MAX_SITES);
                mask |= 1u64 << s;
            }
            u.add_monomial(mask, *c);
        }
        u
    }

    /// sigma^z_i  =  exp(i pi n_i).
    pub fn sigma_z(m: u32, i: usize) -> Self {
        Self::diagonal(m, &[(&[i], 1i64 << (m - 1))])
    }

    /// CZ_{ij}  =  exp(i pi n_i n_j).
    pub fn cz(m: u32, i: usize, j: usize) -> Self {
        assert_ne!(i, j);
        Self::diagonal(m, &[(&[i, j], 1i64 << (m - 1))])
    }

    /// CCZ_{ijk}  =  exp(i pi n_i n_j n_k).
    pub fn ccz(m: u32, i: usize, j: usize, k: usize) -> Self {
        assert!(i != j && j != k && i != k);
        Self::diagonal(m, &[(&[i, j, k], 1i64 << (m - 1))])
    }

    /// exp[i pi/4 (1 - sigma^z_i sigma^z_j)]  =  one domain-wall bond factor
    /// (requires m >= 3 so that the pi/2 linear pieces are representable).
    pub fn dw_bond(m: u32, i: usize, j: usize) -> Self {
        assert!(m >= 3);
        let quarter = 1i64 << (m - 2);
        Self::diagonal(m, &[(&[i], quarter), (&[j], quarter), (&[i, j], -2 * quarter)])
    }

    /// Product of sigma^x over the mask.
    pub fn x_flips(m: u32, mask: u64) -> Self {
        PhasePolyUnitary { x_layer: mask, poly: BTreeMap::new(), m }
    }

    /// Global phase exp(2 pi i k / 2^m).
    pub fn global_phase(m: u32, k: i64) -> Self {
        let mut u = Self::identity(m);
        u.add_monomial(0, k);
        u
    }

    /// Substitutes n_i -> 1 - n_i for every site in `flips`, expanding by
    /// inclusion-exclusion.
    fn poly_flip(&self, flips: u64) -> BTreeMap<u64, u8> {
        let mut out: BTreeMap<u64, i64> = BTreeMap::new();
        for (&mask, &c) in self.poly.iter() {
            let f = mask & flips;
            let rest = mask & !flips;
            if f == 0 {
                *out.entry(mask).or_insert(0) += c as i64;
                continue;
            }
            // product over i in f of (1 - n_i): sum over subsets T of f
            let bits: Vec<u64> = (0..MAX_SITES as u64)
                .filter(|b| f & (1u64 << b) != 0)
                .map(|b| 1u64 << b)
                .collect();
            for t in 0..(1usize << bits.len()) {
                let mut tmask = 0u64;
                let mut parity = 0u32;
                for (bi, bit) in bits.iter().enumerate() {
                    if t & (1 << bi) != 0 {
                        tmask |= bit;
                        parity += 1;
                    }
                }
                let sign = if parity % 2 == 0 { 1i64 } else { -1i64 };
                *out.entry(rest | tmask).or_insert(0) += sign * c as i64;
            }
        }
        let modulus = 1i64 << self.m;
        out.into_iter()
            .filter_map(|(mask, c)| {
                let r = c.rem_euclid(modulus) as u8;
                (r != 0).then_some((mask, r))
            })
            .collect()
    }

    /// Canonical operator product self * other.
    pub fn compose(&self, other: &PhasePolyUnitary) -> Result<PhasePolyUnitary> {
        if self.m != other.m {
            return Err(Error::ModulusMismatch(self.m, other.m));
        }
        // X_a D_P X_b D_Q = X_{a xor b} D_{P o flip_b + Q}
        let mut poly = self.poly_flip(other.x_layer);
        for (&mask, &c) in other.poly.iter() {
            let cur = poly.get(&mask).copied().unwrap_or(0);
            let new = ((cur as u16 + c as u16) % (1 << self.m)) as u8;
            if new == 0 {
                poly.remove(&mask);
            } else {
                poly.insert(mask, new);
            }
        }
        Ok(PhasePolyUnitary { x_layer: self.x_layer ^ other.x_layer, poly, m: self.m })
    }

    pub fn invert(&self) -> PhasePolyUnitary {
        // (X_a D_P)^{-1} = X_a D_{-P o flip_a}
        let modulus = 1u16 << self.m;
        let negated = PhasePolyUnitary {
            x_layer: 0,
            poly: self
                .poly
                .iter()
                .map(|(&mask, &c)| (mask, ((modulus - c as u16) % modulus) as u8))
                .filter(|&(_, c)| c != 0)
                .collect(),
            m: self.m,
        };
        let poly = negated.poly_flip(self.x_layer);
        PhasePolyUnitary { x_layer: self.x_layer, poly, m: self.m }
    }

    /// U V U^{-1}.
    pub fn conjugate(&self, v: &PhasePolyUnitary) -> Result<PhasePolyUnitary> {
        self.compose(v)?.compose(&self.invert())
    }

    /// Canonical truncation: keeps X-layer sites in the region and poly
    /// monomials fully contained in it.
    pub fn restrict(&self, region: &Region) -> PhasePolyUnitary {
        self.restrict_mask(region.mask())
    }

    /// Keeps only monomials/flips fully inside `mask` (low-level variant).
    pub fn restrict_mask(&self, mask: u64) -> PhasePolyUnitary {
        PhasePolyUnitary {
            x_layer: self.x_layer & mask,
            poly: self
                .poly
                .iter()
                .filter(|(&mono, _)| mono & !mask == 0)
                .map(|(&mono, &c)| (mono, c))
                .collect(),
            m: self.m,
        }
    }

    /// Exact Pauli-sum expansion on `n_sites` sites.
    ///
    /// Requires every coefficient (including the global phase) to be a
    /// multiple of 2^{m-2}, i.e. the diagonal must live in the pi/2 phase
    /// lattice; other elements leave the Gaussian-rational ring.
    pub fn to_operator_sum(&self, n_sites: usize) -> Result<OperatorSum> {
        let support_size = self.support().count_ones() as usize;
        if support_size > DEFAULT_EXPANSION_CAP {
            return Err(Error::CapExceeded(support_size, DEFAULT_EXPANSION_CAP));
        }
        assert!(self.m >= 2);
        let quarter_unit = 1u8 << (self.m - 2);
        let mut acc = OperatorSum::identity(n_sites);
        for (&mask, &c) in self.poly.iter() {
            if c % quarter_unit != 0 {
                return Err(Error::NonGaussianPhase(c));
            }
            let k = (c / quarter_unit) % 4; // quarter turns
            let factor = if mask == 0 {
                OperatorSum::identity(n_sites).scale(&Scalar::i_pow(k))
            } else {
                // exp(i pi/2 k prod n) = I + (i^k - 1) prod_{i in S} (I - Z_i)/2
                let sites: Vec<usize> =
                    (0..MAX_SITES).filter(|&i| mask & (1u64 << i) != 0).collect();
                let mut proj = OperatorSum::identity(n_sites);
                let half = Scalar::from_ratio(1, 2);
                for &s in &sites {
                    let f = OperatorSum::identity(n_sites)
                        .sub(&OperatorSum::single(n_sites, s, crate::pauli::Axis::Z))
                        .unwrap();
                    proj = proj.mul(&f.scale(&half)).unwrap();
                }
                let amp = Scalar::i_pow(k) - Scalar::one();
                OperatorSum::identity(n_sites).add(&proj.scale(&amp)).unwrap()
            };
            acc = acc.mul(&factor)?;
        }
        if self.x_layer != 0 {
            let word = PauliWord { x: self.x_layer, z: 0 };
            let flips = OperatorSum::from_word(n_sites, word, Scalar::one());
            acc = flips.mul(&acc)?; // X_a on the left of the diagonal
        }
        Ok(acc)
    }

    /// U w U^{-1} for a Pauli word, as an exact Pauli sum. Stays cheap for the
    /// generators used here (the diagonal remainder has lower degree).
    pub fn conjugate_word(&self, word: PauliWord, n_sites: usize) -> Result<OperatorSum> {
        // U (i^d X^x Z^z) U^{-1}
        //   = (-1)^{|z & a|} i^d X^x Z^z D_{(P o flip_x - P) o flip_a}
        let sign_flips = (word.z & self.x_layer).count_ones() % 2;
        let mut q = PhasePolyUnitary { x_layer: 0, poly: self.poly_flip(word.x), m: self.m };
        for (&mask, &c) in self.poly.iter() {
            q.add_monomial(mask, -(c as i64));
        }
        let q = PhasePolyUnitary { x_layer: 0, poly: q.poly_flip(self.x_layer), m: self.m };
        let diag = q.to_operator_sum(n_sites)?;
        let mut w = OperatorSum::from_word(n_sites, word, Scalar::one());
        if sign_flips == 1 {
            w = w.scale(&-Scalar::one());
        }
        w.mul(&diag)
    }

    /// Conjugates an entire Pauli sum.
    pub fn conjugate_sum(&self, sum: &OperatorSum) -> Result<OperatorSum> {
        let mut out = OperatorSum::zero(sum.n_sites());
        for (w, c) in sum.terms() {
            out = out.add(&self.conjugate_word(*w, sum.n_sites())?.scale(c))?;
        }
        Ok(out)
    }

    /// Structural equality with a discrepancy report.
    pub fn canonical_equal(&self, other: &PhasePolyUnitary) -> (bool, Vec<String>) {
        let mut report = Vec::new();
        if self.m != other.m {
            report.push(format!("modulus differs: 2^{} vs 2^{}", self.m, other.m));
        }
        if self.x_layer != other.x_layer {
            report.push(format!(
                "x_layer differs: {:?} vs {:?}",
                mask_sites(self.x_layer),
                mask_sites(other.x_layer)
            ));
        }
        let keys: BTreeSet<u64> = self.poly.keys().chain(other.poly.keys()).copied().collect();
        for mask in keys {
            let a = self.poly.get(&mask).copied().unwrap_or(0);
            let b = other.poly.get(&mask).copied().unwrap_or(0);
            if a != b {
                report.push(format!(
                    "monomial {:?}: coefficient {} vs {}",
                    mask_sites(mask),
                    a,
                    b
                ));
            }
        }
        (report.is_empty(), report)
    }

    /// Textual form "X{3,4} ; P: {1}:2 {1,2}:-4 ; m=3".
    pub fn to_text(&self) -> String {
        let xs = mask_sites(self.x_layer)
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let ps = self
            .poly
            .iter()
            .map(|(&mask, &c)| {
                let sites = mask_sites(mask)
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                format!("{{{}}}:{}", sites, c)
            })
            .collect::<Vec<_>>()
            .join(" ");
        format!("X{{{}}} ; P: {} ; m={}", xs, ps, self.m)
    }

    pub fn parse(text: &str) -> Result<PhasePolyUnitary> {
        let mut x_layer = 0u64;
        let mut poly: Vec<(u64, i64)> = Vec::new();
        let mut m = DEFAULT_MODULUS_LOG2;
        for part in text.split(';') {
            let part = part.trim();
            if let Some(body) = part.strip_prefix("X{") {
                let body = body
                    .strip_suffix('}')
                    .ok_or_else(|| Error::Parse(format!("bad X layer in: {text}")))?;
                for tok in body.split(',').filter(|t| !t.trim().is_empty()) {
                    let site: usize = tok
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad site in: {text}")))?;
                    if site >= MAX_SITES {
                        return Err(Error::SiteOutOfRange(site, MAX_SITES));
                    }
                    x_layer |= 1u64 << site;
                }
            } else if let Some(body) = part.strip_prefix("P:") {
                for tok in body.split_whitespace() {
                    let (sites, coeff) = tok
                        .rsplit_once(':')
                        .ok_or_else(|| Error::Parse(format!("bad monomial: {tok}")))?;
                    let sites = sites
                        .strip_prefix('{')
                        .and_then(|s| s.strip_suffix('}'))
                        .ok_or_else(|| Error::Parse(format!("bad monomial: {tok}")))?;
                    let mut mask = 0u64;
                    for s in sites.split(',').filter(|t| !t.trim().is_empty()) {
                        let site: usize = s
                            .trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad site in: {tok}")))?;
                        if site >= MAX_SITES {
                            return Err(Error::SiteOutOfRange(site, MAX_SITES));
                        }
                        mask |= 1u64 << site;
                    }
                    let c: i64 = coeff
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad coefficient: {tok}")))?;
                    poly.push((mask, c));
                }
            } else if let Some(body) = part.strip_prefix("m=") {
                m = body
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad modulus in: {text}")))?;
            } else if !part.is_empty() {
                return Err(Error::Parse(format!("unrecognized part: {part}")));
            }
        }
        let mut u = PhasePolyUnitary::identity(m);
        u.x_layer = x_layer;
        for (mask, c) in poly {
            u.add_monomial(mask, c);
        }
        Ok(u)
    }
}

impl fmt::Display for PhasePolyUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

pub fn mask_sites(mask: u64) -> Vec<usize> {
    (0..MAX_SITES).filter(|&i| mask & (1u64 << i) != 0).collect()
}

/// Ordered site set with labeled boundary components.
#[derive(Debug, Clone)]
pub struct Region {
    sites: Vec<usize>,
    mask: u64,
    components: Vec<(String, u64)>,
}

impl Region {
    /// A contiguous chain segment [lo, hi] with boundary components of
    /// `width` sites at each end.
    pub fn chain_segment(lo: usize, hi: usize, width: usize) -> Result<Region> {
        if hi >= MAX_SITES || lo > hi {
            return Err(Error::Region(format!("bad segment [{lo}, {hi}]")));
        }
        let sites: Vec<usize> = (lo..=hi).collect();
        Region::from_ordered_sites(&sites, width)
    }

    /// Builds a region from an explicitly ordered site list (e.g. an arc of a
    /// boundary loop); the first and last `width` sites form the left and
    /// right boundary components.
    pub fn from_ordered_sites(sites: &[usize], width: usize) -> Result<Region> {
        if sites.len() < 2 * width + 2 {
            return Err(Error::Region(format!(
                "{} sites cannot hold two width-{width} separated components",
                sites.len()
            )));
        }
        let mut mask = 0u64;
        for &s in sites {
            if s >= MAX_SITES {
                return Err(Error::SiteOutOfRange(s, MAX_SITES));
            }
            if mask & (1u64 << s) != 0 {
                return Err(Error::Region(format!("site {s} repeated")));
            }
            mask |= 1u64 << s;
        }
        let left = sites[..width].iter().fold(0u64, |acc, &s| acc | (1u64 << s));
        let right = sites[sites.len() - width..]
            .iter()
            .fold(0u64, |acc, &s| acc | (1u64 << s));
        Ok(Region {
            sites: sites.to_vec(),
            mask,
            components: vec![("left".into(), left), ("right".into(), right)],
        })
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn components(&self) -> &[(String, u64)] {
        &self.components
    }

    pub fn boundary_mask(&self) -> u64 {
        self.components.iter().fold(0, |acc, (_, m)| acc | m)
    }

    /// Component index containing the whole mask, if any single one does.
    pub fn component_of(&self, mask: u64) -> Option<usize> {
        self.components.iter().position(|(_, cm)| mask & !cm == 0)
    }
}

/// Linear combination of phase-poly unitaries with exact coefficients.
///
/// Canonical keys fold global phases that are multiples of a quarter turn
/// into the coefficient; `is_zero_canonical` is therefore a sufficient (not
/// necessary) condition for being the zero operator, which is what the
/// steady-state cancellation checks need.
#[derive(Debug, Clone)]
pub struct PhasePolySum {
    m: u32,
    terms: BTreeMap<PhasePolyUnitary, Scalar>,
}

impl PhasePolySum {
    pub fn zero(m: u32) -> Self {
        PhasePolySum { m, terms: BTreeMap::new() }
    }

    pub fn from_unitary(u: &PhasePolyUnitary, coeff: Scalar) -> Self {
        let mut s = PhasePolySum::zero(u.m);
        s.add_term(u.clone(), coeff);
        s
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PhasePolyUnitary, &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, mut u: PhasePolyUnitary, mut coeff: Scalar) {
        assert_eq!(u.m, self.m);
        // fold quarter-turn multiples of the global phase into the coefficient
        let quarter = 1u8 << (self.m - 2);
        if let Some(&g) = u.poly.get(&0) {
            let turns = g / quarter;
            let residue = g % quarter;
            coeff *= Scalar::i_pow(turns % 4);
            if residue == 0 {
                u.poly.remove(&0);
            } else {
                u.poly.insert(0, residue);
            }
        }
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(u) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
        }
    }

    pub fn add(&self, other: &PhasePolySum) -> PhasePolySum {
        let mut out = self.clone();
        for (u, c) in other.terms.iter() {
            out.add_term(u.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> PhasePolySum {
        let mut out = PhasePolySum::zero(self.m);
        if c.is_zero() {
            return out;
        }
        for (u, a) in self.terms.iter() {
            out.add_term(u.clone(), a * c);
        }
        out
    }

    pub fn mul(&self, other: &PhasePolySum) -> Result<PhasePolySum> {
        let mut out = PhasePolySum::zero(self.m);
        for (ua, ca) in self.terms.iter() {
            for (ub, cb) in other.terms.iter() {
                out.add_term(ua.compose(ub)?, ca * cb);
            }
        }
        Ok(out)
    }

    /// Hermitian conjugate: unitary terms invert, coefficients conjugate.
    pub fn dagger(&self) -> PhasePolySum {
        let mut out = PhasePolySum::zero(self.m);
        for (u, c) in self.terms.iter() {
            out.add_term(u.invert(), c.conj());
        }
        out
    }

    /// True when the canonical form has collapsed to zero. Sufficient but not
    /// necessary for operator equality to zero: distinct diagonal phase
    /// hierarchies are not always linearly independent.
    pub fn is_zero_canonical(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_operator_sum(&self, n_sites: usize) -> Result<OperatorSum> {
        let mut acc = OperatorSum::zero(n_sites);
        for (u, c) in self.terms.iter() {
            acc = acc.add(&u.to_operator_sum(n_sites)?.scale(c))?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Axis;
    use proptest::prelude::*;

    const M: u32 = DEFAULT_MODULUS_LOG2;

    /// Domain-wall phase restricted to bonds [lo, hi-1]: the bond-sum
    /// truncation exp[i pi/4 sum_{i=lo}^{hi-1} (1 - z_i z_{i+1})].
    fn dw_over_bonds(lo: usize, hi: usize) -> PhasePolyUnitary {
        let mut u = PhasePolyUnitary::identity(M);
        for i in lo..hi {
            u = u.compose(&PhasePolyUnitary::dw_bond(M, i, i + 1)).unwrap();
        }
        u
    }

    fn cz_over_bonds(lo: usize, hi: usize) -> PhasePolyUnitary {
        let mut u = PhasePolyUnitary::identity(M);
        for i in lo..hi {
            u = u.compose(&PhasePolyUnitary::cz(M, i, i + 1)).unwrap();
        }
        u
    }

    fn x_segment(lo: usize, hi: usize) -> PhasePolyUnitary {
        let mut mask = 0u64;
        for i in lo..=hi {
            mask |= 1 << i;
        }
        PhasePolyUnitary::x_flips(M, mask)
    }

    #[test]
    fn cz_is_involution() {
        let cz = PhasePolyUnitary::cz(M, 1, 2);
        assert!(cz.compose(&cz).unwrap().is_identity());
    }

    #[test]
    fn truncated_dw_squares_to_boundary_zz() {
        // (U_M)^2 = z_j z_k for the bond-sum truncation on M = [j, k]
        let (j, k) = (2, 6);
        let um = dw_over_bonds(j, k);
        let sq = um.compose(&um).unwrap();
        let want = PhasePolyUnitary::sigma_z(M, j)
            .compose(&PhasePolyUnitary::sigma_z(M, k))
            .unwrap();
        let (eq, report) = sq.canonical_equal(&want);
        assert!(eq, "{report:?}");
    }

    #[test]
    fn cz_segment_commutes_with_flips_up_to_boundary_zz() {
        // U_M X_M = (-1)^{k-j} z_j z_k X_M U_M for the CZ bond product
        let (j, k) = (1, 5);
        let ucz = cz_over_bonds(j, k);
        let xm = x_segment(j, k);
        let lhs = ucz.compose(&xm).unwrap();
        let mut rhs = PhasePolyUnitary::global_phase(M, (((k - j) % 2) as i64) * 4);
        rhs = rhs
            .compose(&PhasePolyUnitary::sigma_z(M, j))
            .unwrap()
            .compose(&PhasePolyUnitary::sigma_z(M, k))
            .unwrap()
            .compose(&xm)
            .unwrap()
            .compose(&ucz)
            .unwrap();
        let (eq, report) = lhs.canonical_equal(&rhs);
        assert!(eq, "{report:?}");
    }

    #[test]
    fn invert_round_trips() {
        let cases = vec![
            PhasePolyUnitary::identity(M),
            PhasePolyUnitary::sigma_z(M, 3),
            PhasePolyUnitary::dw_bond(M, 0, 1),
            PhasePolyUnitary::ccz(M, 0, 1, 2),
            x_segment(0, 4).compose(&dw_over_bonds(0, 4)).unwrap(),
        ];
        for u in cases {
            assert!(u.compose(&u.invert()).unwrap().is_identity(), "{u}");
            assert!(u.invert().compose(&u).unwrap().is_identity(), "{u}");
        }
        // self-inverse generator
        let z = PhasePolyUnitary::sigma_z(M, 1);
        let (eq, _) = z.invert().canonical_equal(&z);
        assert!(eq);
        // the dw bond inverts by negating coefficients mod 8
        let b = PhasePolyUnitary::dw_bond(M, 0, 1);
        let inv = b.invert();
        for (mask, c) in b.poly().iter() {
            assert_eq!((c + inv.poly()[mask]) % 8, 0);
        }
    }

    #[test]
    fn restrict_keeps_contained_monomials() {
        let region = Region::chain_segment(2, 7, 2).unwrap();
        // global spin flip restricts to the segment
        let full = PhasePolyUnitary::x_flips(M, (1 << 10) - 1);
        let got = full.restrict(&region);
        let (eq, _) = got.canonical_equal(&x_segment(2, 7));
        assert!(eq);
        // identity restricts to identity
        assert!(PhasePolyUnitary::identity(M).restrict(&region).is_identity());
        // canonical truncation of the periodic domain-wall operator keeps the
        // merged coefficients (full linear weight at the segment edges)
        let mut dw_full = PhasePolyUnitary::identity(M);
        for i in 0..10 {
            dw_full = dw_full
                .compose(&PhasePolyUnitary::dw_bond(M, i, (i + 1) % 10))
                .unwrap();
        }
        let got = dw_full.restrict(&region);
        for i in 2..=7 {
            assert_eq!(got.poly()[&(1u64 << i)], 4, "site {i}");
        }
        for i in 2..7 {
            assert_eq!(got.poly()[&((1u64 << i) | (1u64 << (i + 1)))], 4);
        }
        // idempotence
        let (eq, _) = got.restrict(&region).canonical_equal(&got);
        assert!(eq);
    }

    #[test]
    fn expansion_matches_pauli_algebra() {
        // CZ = (I + Z0 + Z1 - Z0 Z1)/2
        let cz = PhasePolyUnitary::cz(M, 0, 1).to_operator_sum(2).unwrap();
        let half = Scalar::from_ratio(1, 2);
        let z0 = OperatorSum::single(2, 0, Axis::Z);
        let z1 = OperatorSum::single(2, 1, Axis::Z);
        let want = OperatorSum::identity(2)
            .add(&z0)
            .unwrap()
            .add(&z1)
            .unwrap()
            .sub(&z0.mul(&z1).unwrap())
            .unwrap()
            .scale(&half);
        assert_eq!(cz, want);

        let z = PhasePolyUnitary::sigma_z(M, 1).to_operator_sum(2).unwrap();
        assert_eq!(z, OperatorSum::single(2, 1, Axis::Z));

        let ph = PhasePolyUnitary::global_phase(M, 2).to_operator_sum(1).unwrap();
        assert_eq!(ph, OperatorSum::identity(1).scale(&Scalar::i()));
    }

    #[test]
    fn odd_phase_rejected() {
        let t_gate = PhasePolyUnitary::diagonal(M, &[(&[0], 1)]);
        assert!(matches!(t_gate.to_operator_sum(1), Err(Error::NonGaussianPhase(_))));
    }

    #[test]
    fn conjugate_word_matches_dense() {
        let n = 4;
        let u = x_segment(0, 2)
            .compose(&cz_over_bonds(0, 3))
            .unwrap()
            .compose(&PhasePolyUnitary::ccz(M, 0, 1, 2))
            .unwrap();
        let ud = u.to_operator_sum(n).unwrap().to_dense().unwrap();
        let udag = u.invert().to_operator_sum(n).unwrap().to_dense().unwrap();
        for word in [
            PauliWord::single(1, Axis::X),
            PauliWord::single(0, Axis::Z),
            PauliWord::single(2, Axis::Y),
            PauliWord::parse("X1 Z2").unwrap(),
        ] {
            let got = u.conjugate_word(word, n).unwrap().to_dense().unwrap();
            let w = OperatorSum::from_word(n, word, Scalar::one()).to_dense().unwrap();
            let want = ud.matmul(&w).matmul(&udag);
            assert!(got.sub(&want).max_abs() < 1e-12, "word {word}");
        }
    }

    #[test]
    fn conjugation_drops_one_degree() {
        // conjugating a flip through CCZ leaves a CZ-type remainder,
        // and through CZ leaves a Z-type remainder
        let ccz = PhasePolyUnitary::ccz(M, 0, 1, 2);
        let flip = PhasePolyUnitary::x_flips(M, 1 << 0);
        let conj = ccz.conjugate(&flip).unwrap();
        let remainder = conj.compose(&flip.invert()).unwrap();
        assert_eq!(remainder.x_layer(), 0);
        let max_deg = remainder.poly().keys().map(|m| m.count_ones()).max().unwrap_or(0);
        assert_eq!(max_deg, 2);

        let cz = PhasePolyUnitary::cz(M, 0, 1);
        let rem = cz.conjugate(&flip).unwrap().compose(&flip.invert()).unwrap();
        let max_deg = rem.poly().keys().map(|m| m.count_ones()).max().unwrap_or(0);
        assert_eq!(max_deg, 1);
    }

    #[test]
    fn text_round_trip() {
        let u = x_segment(3, 4)
            .compose(&PhasePolyUnitary::diagonal(M, &[(&[1], 2), (&[1, 2], -4)]))
            .unwrap();
        let text = u.to_text();
        assert_eq!(text, "X{3,4} ; P: {1}:2 {1,2}:4 ; m=3");
        let back = PhasePolyUnitary::parse(&text).unwrap();
        let (eq, report) = back.canonical_equal(&u);
        assert!(eq, "{report:?}");
    }

    #[test]
    fn phase_poly_sum_cancels_stabilizer_products() {
        // (1 - g)(1 + g) = 0 canonically for a CCZ-dressed flip g
        let g = PhasePolyUnitary::ccz(M, 0, 1, 2)
            .conjugate(&PhasePolyUnitary::x_flips(M, 1 << 0))
            .unwrap();
        let one = PhasePolySum::from_unitary(&PhasePolyUnitary::identity(M), Scalar::one());
        let plus = one.add(&PhasePolySum::from_unitary(&g, Scalar::one()));
        let minus = one.add(&PhasePolySum::from_unitary(&g, -Scalar::one()));
        assert!(minus.mul(&plus).unwrap().is_zero_canonical());
    }

    // random diagonal built from the catalog generators
    fn arb_diag() -> impl Strategy<Value = PhasePolyUnitary> {
        proptest::collection::vec((0usize..4, 0usize..4, 0usize..4, 0u8..4), 0..4).prop_map(
            |gens| {
                let mut u = PhasePolyUnitary::identity(M);
                for (a, b, c, kind) in gens {
                    let g = match kind {
                        0 => PhasePolyUnitary::sigma_z(M, a),
                        1 if a != b => PhasePolyUnitary::cz(M, a, b),
                        2 if a != b && b != c && a != c => PhasePolyUnitary::ccz(M, a, b, c),
                        _ => PhasePolyUnitary::dw_bond(M, a, (a + 1) % 5),
                    };
                    u = u.compose(&g).unwrap();
                }
                u
            },
        )
    }

    fn arb_ppu() -> impl Strategy<Value = PhasePolyUnitary> {
        (arb_diag(), 0u64..32)
            .prop_map(|(d, mask)| PhasePolyUnitary::x_flips(M, mask).compose(&d).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn compose_then_expand_is_expand_then_multiply(u in arb_ppu(), v in arb_ppu()) {
            let n = 5;
            let lhs = u.compose(&v).unwrap().to_operator_sum(n).unwrap();
            let rhs = u.to_operator_sum(n).unwrap().mul(&v.to_operator_sum(n).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn compose_with_invert_is_identity(u in arb_ppu()) {
            prop_assert!(u.compose(&u.invert()).unwrap().is_identity());
        }

        #[test]
        fn commuting_diagonals_compose_in_any_order(a in arb_diag(), b in arb_diag()) {
            let ab = a.compose(&b).unwrap();
            let ba = b.compose(&a).unwrap();
            let (eq, report) = ab.canonical_equal(&ba);
            prop_assert!(eq, "{:?}", report);
        }
    }
}
