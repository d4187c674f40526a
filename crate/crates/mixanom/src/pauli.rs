//! Exact algebra of Pauli strings and weighted sums of Pauli strings.
//!
//! A `PauliWord` is the Hermitian word  i^{|x & z|} X^x Z^z  stored as a pair
//! of bit masks (site i carries X when bit i of `x` is set, Z when bit i of
//! `z` is set, Y when both are). `OperatorSum` maps phase-normalized words to
//! exact Gaussian-rational coefficients; it represents observables,
//! Hamiltonians, jump operators and (unnormalized) density matrices alike.

use crate::linalg::CMat;
use crate::scalar::Scalar;
use crate::{Error, Result, MAX_SITES};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// Single-site Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Phase-normalized Hermitian Pauli word on up to 64 sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliWord {
    pub x: u64,
    pub z: u64,
}

impl PauliWord {
    pub const IDENTITY: PauliWord = PauliWord { x: 0, z: 0 };

    pub fn single(site: usize, axis: Axis) -> PauliWord {
        assert!(site < MAX_SITES);
        let bit = 1u64 << site;
        match axis {
            Axis::X => PauliWord { x: bit, z: 0 },
            Axis::Y => PauliWord { x: bit, z: bit },
            Axis::Z => PauliWord { x: 0, z: bit },
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn letters(&self) -> impl Iterator<Item = (usize, Axis)> + '_ {
        let supp = self.support();
        (0..MAX_SITES).filter_map(move |i| {
            let bit = 1u64 << i;
            if supp & bit == 0 {
                return None;
            }
            let axis = match (self.x & bit != 0, self.z & bit != 0) {
                (true, false) => Axis::X,
                (true, true) => Axis::Y,
                (false, true) => Axis::Z,
                (false, false) => unreachable!(),
            };
            Some((i, axis))
        })
    }

    /// Product of Hermitian words: self * other = i^k * word.
    pub fn mul(&self, other: &PauliWord) -> (PauliWord, u8) {
        let x3 = self.x ^ other.x;
        let z3 = self.z ^ other.z;
        let k = (self.x & self.z).count_ones() as i32
            + (other.x & other.z).count_ones() as i32
            + 2 * (self.z & other.x).count_ones() as i32
            - (x3 & z3).count_ones() as i32;
        (PauliWord { x: x3, z: z3 }, k.rem_euclid(4) as u8)
    }

    pub fn commutes_with(&self, other: &PauliWord) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Textual form "X3 Z4" ("I" for the identity word).
    pub fn to_text(&self) -> String {
        if self.is_identity() {
            return "I".to_string();
        }
        self.letters()
            .map(|(i, a)| format!("{}{}", match a { Axis::X => 'X', Axis::Y => 'Y', Axis::Z => 'Z' }, i))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse(text: &str) -> Result<PauliWord> {
        let mut w = PauliWord::IDENTITY;
        for token in text.split_whitespace() {
            if token == "I" {
                continue;
            }
            let (letter, idx) = token.split_at(1);
            let site: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad pauli token: {token}")))?;
            if site >= MAX_SITES {
                return Err(Error::SiteOutOfRange(site, MAX_SITES));
            }
            let axis = match letter {
                "X" => Axis::X,
                "Y" => Axis::Y,
                "Z" => Axis::Z,
                _ => return Err(Error::Parse(format!("bad pauli token: {token}"))),
            };
            let single = PauliWord::single(site, axis);
            if w.support() & single.support() != 0 {
                return Err(Error::Parse(format!("site repeated in: {text}")));
            }
            w = PauliWord { x: w.x | single.x, z: w.z | single.z };
        }
        Ok(w)
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Pauli word together with a phase in {1, i, -1, -i}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliString {
    pub word: PauliWord,
    /// phase = i^phase_pow
    pub phase_pow: u8,
}

impl PauliString {
    pub fn new(word: PauliWord) -> Self {
        PauliString { word, phase_pow: 0 }
    }

    pub fn mul(&self, other: &PauliString) -> PauliString {
        let (word, k) = self.word.mul(&other.word);
        PauliString { word, phase_pow: (self.phase_pow + other.phase_pow + k) % 4 }
    }

    pub fn phase(&self) -> Scalar {
        Scalar::i_pow(self.phase_pow)
    }
}

/// Canonical weighted sum of Pauli words with exact coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum {
    n_sites: usize,
    terms: BTreeMap<PauliWord, Scalar>,
}

impl OperatorSum {
    pub fn zero(n_sites: usize) -> Self {
        assert!(n_sites <= MAX_SITES, "site count beyond mask width");
        OperatorSum { n_sites, terms: BTreeMap::new() }
    }

    pub fn identity(n_sites: usize) -> Self {
        let mut s = Self::zero(n_sites);
        s.add_term(PauliWord::IDENTITY, Scalar::one());
        s
    }

    pub fn from_word(n_sites: usize, word: PauliWord, coeff: Scalar) -> Self {
        let mut s = Self::zero(n_sites);
        s.add_term(word, coeff);
        s
    }

    pub fn single(n_sites: usize, site: usize, axis: Axis) -> Self {
        assert!(site < n_sites, "site outside context");
        Self::from_word(n_sites, PauliWord::single(site, axis), Scalar::one())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliWord, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, word: &PauliWord) -> Scalar {
        self.terms.get(word).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, word: PauliWord, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        debug_assert!(word.support() < (1u64 << self.n_sites) || self.n_sites == 64);
        match self.terms.entry(word) {
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

    fn check_context(&self, other: &OperatorSum) -> Result<()> {
        if self.n_sites != other.n_sites {
            return Err(Error::SiteContextMismatch(self.n_sites, other.n_sites));
        }
        Ok(())
    }

    pub fn add(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.check_context(other)?;
        let mut out = self.clone();
        for (w, c) in other.terms.iter() {
            out.add_term(*w, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.check_context(other)?;
        let mut out = self.clone();
        for (w, c) in other.terms.iter() {
            out.add_term(*w, -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> OperatorSum {
        let mut out = OperatorSum::zero(self.n_sites);
        if c.is_zero() {
            return out;
        }
        for (w, a) in self.terms.iter() {
            out.terms.insert(*w, a * c);
        }
        out
    }

    /// Operator product, canonical.
    pub fn mul(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.check_context(other)?;
        let mut out = OperatorSum::zero(self.n_sites);
        for (wa, ca) in self.terms.iter() {
            for (wb, cb) in other.terms.iter() {
                let (w, k) = wa.mul(wb);
                out.add_term(w, &(ca * cb) * &Scalar::i_pow(k));
            }
        }
        Ok(out)
    }

    /// ab - ba, or ab + ba when `anti` is set.
    pub fn commutator(&self, other: &OperatorSum, anti: bool) -> Result<OperatorSum> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        if anti {
            ab.add(&ba)
        } else {
            ab.sub(&ba)
        }
    }

    /// Hermitian conjugate (words are Hermitian, so conjugate coefficients).
    pub fn dagger(&self) -> OperatorSum {
        let mut out = OperatorSum::zero(self.n_sites);
        for (w, c) in self.terms.iter() {
            out.terms.insert(*w, c.conj());
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    pub fn hermitize(&self) -> OperatorSum {
        let half = Scalar::from_ratio(1, 2);
        self.add(&self.dagger()).unwrap().scale(&half)
    }

    /// Tr(self) = 2^N * identity coefficient.
    pub fn trace(&self) -> Scalar {
        self.coeff(&PauliWord::IDENTITY).scale_pow2(self.n_sites as i32)
    }

    /// Tr(a^dagger b), exact, from matching Pauli words.
    pub fn trace_inner(&self, other: &OperatorSum) -> Result<Scalar> {
        self.check_context(other)?;
        let mut acc = Scalar::zero();
        for (w, ca) in self.terms.iter() {
            if let Some(cb) = other.terms.get(w) {
                acc += &ca.conj() * cb;
            }
        }
        Ok(acc.scale_pow2(self.n_sites as i32))
    }

    /// Tr(a b), exact (words are Hermitian and square to +1).
    pub fn trace_product(&self, other: &OperatorSum) -> Result<Scalar> {
        self.check_context(other)?;
        let mut acc = Scalar::zero();
        for (w, ca) in self.terms.iter() {
            if let Some(cb) = other.terms.get(w) {
                acc += ca * cb;
            }
        }
        Ok(acc.scale_pow2(self.n_sites as i32))
    }

    /// Partial trace onto `keep` (ascending site list). Sites are relabeled
    /// 0..keep.len() in ascending order of the original indices.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<OperatorSum> {
        let mut keep_mask = 0u64;
        for &s in keep {
            if s >= self.n_sites {
                return Err(Error::SiteOutOfRange(s, self.n_sites));
            }
            keep_mask |= 1u64 << s;
        }
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let dropped = self.n_sites - sorted.len();
        let mut out = OperatorSum::zero(sorted.len());
        let relabel = |mask: u64| -> u64 {
            let mut m = 0u64;
            for (new, &old) in sorted.iter().enumerate() {
                if mask & (1u64 << old) != 0 {
                    m |= 1u64 << new;
                }
            }
            m
        };
        for (w, c) in self.terms.iter() {
            if w.support() & !keep_mask != 0 {
                continue; // traced Pauli letter kills the term
            }
            let word = PauliWord { x: relabel(w.x), z: relabel(w.z) };
            out.add_term(word, c.scale_pow2(dropped as i32));
        }
        Ok(out)
    }

    /// Dense matrix in the computational Z basis (bit i of the basis index is
    /// site i; 0 means spin up, sigma^z = +1).
    pub fn to_dense(&self) -> Result<CMat> {
        let cap = crate::dense_cap();
        if self.n_sites > cap {
            return Err(Error::CapExceeded(self.n_sites, cap));
        }
        let dim = 1usize << self.n_sites;
        let mut m = CMat::zeros(dim, dim);
        for (w, c) in self.terms.iter() {
            let phase = Scalar::i_pow((w.x & w.z).count_ones() as u8 % 4);
            let base = (c * &phase).to_complex64();
            for col in 0..dim {
                let row = col ^ (w.x as usize);
                let sign = if ((w.z as usize & col).count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
                m[(row, col)] += base * sign;
            }
        }
        Ok(m)
    }

    /// Floating-point view for numeric hand-off.
    pub fn to_float(&self) -> FloatOperatorSum {
        FloatOperatorSum {
            n_sites: self.n_sites,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (*w, c.to_complex64()))
                .collect(),
        }
    }

    /// All distinct Z-basis diagonal entries evaluate through this when the
    /// sum is diagonal; panics if a word has an X component.
    pub fn diagonal_value(&self, config: u64) -> Scalar {
        let mut acc = Scalar::zero();
        for (w, c) in self.terms.iter() {
            assert_eq!(w.x, 0, "diagonal_value on non-diagonal operator");
            let sign = ((w.z & config).count_ones()) % 2 == 0;
            acc += if sign { c.clone() } else { -c.clone() };
        }
        acc
    }
}

/// Pauli decomposition with f64 coefficients, for numeric results.
#[derive(Debug, Clone)]
pub struct FloatOperatorSum {
    pub n_sites: usize,
    pub terms: BTreeMap<PauliWord, Complex64>,
}

impl FloatOperatorSum {
    /// Decomposes a dense matrix: coeff(W) = Tr(W M) / 2^N.
    pub fn from_dense(m: &CMat, n_sites: usize, tol: f64) -> FloatOperatorSum {
        let dim = 1usize << n_sites;
        assert_eq!(m.nrows, dim);
        let mut terms = BTreeMap::new();
        let words: Vec<PauliWord> = (0..dim as u64)
            .flat_map(|x| (0..dim as u64).map(move |z| PauliWord { x, z }))
            .collect();
        for w in words {
            // Tr(W M): W[col ^ x, col] entries again
            let phase = Complex64::i().powu(((w.x & w.z).count_ones() % 4) as u32);
            let mut acc = Complex64::ZERO;
            for col in 0..dim {
                // (W M)[col, col] = W[col, row] M[row, col] with row = col ^ x,
                // and W[col, row] is the entry of W in column `row`.
                let row = col ^ (w.x as usize);
                let sign = if ((w.z as usize & row).count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
                acc += phase * sign * m[(row, col)];
            }
            let c = acc / dim as f64;
            if c.norm() > tol {
                terms.insert(w, c);
            }
        }
        FloatOperatorSum { n_sites, terms }
    }

    pub fn to_exact_dyadic(&self, bits: u32) -> OperatorSum {
        let mut out = OperatorSum::zero(self.n_sites);
        for (w, c) in self.terms.iter() {
            out.add_term(*w, Scalar::from_complex64_dyadic(*c, bits));
        }
        out
    }
}

/// Serialized operator sum: exact or float coefficients, declared per file.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct OperatorSumJson {
    pub n_sites: usize,
    /// "exact" (strings "a/b+c/d i") or "float" (decimal)
    pub coefficients: String,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct TermJson {
    pub word: String,
    pub coeff: String,
}

impl OperatorSum {
    pub fn to_json(&self) -> OperatorSumJson {
        OperatorSumJson {
            n_sites: self.n_sites,
            coefficients: "exact".into(),
            terms: self
                .terms
                .iter()
                .map(|(w, c)| TermJson { word: w.to_text(), coeff: c.to_exact_string() })
                .collect(),
        }
    }

    pub fn from_json(doc: &OperatorSumJson) -> Result<OperatorSum> {
        let mut out = OperatorSum::zero(doc.n_sites);
        for t in &doc.terms {
            let term = parse_term(&t.coeff, &t.word, doc.n_sites)?;
            out = out.add(&term)?;
        }
        Ok(out)
    }
}

impl FloatOperatorSum {
    pub fn to_json(&self) -> OperatorSumJson {
        OperatorSumJson {
            n_sites: self.n_sites,
            coefficients: "float".into(),
            terms: self
                .terms
                .iter()
                .map(|(w, c)| {
                    let coeff = if c.im.abs() < 1e-15 {
                        format!("{}", c.re)
                    } else {
                        format!("{}+{} i", c.re, c.im)
                    };
                    TermJson { word: w.to_text(), coeff }
                })
                .collect(),
        }
    }
}

/// Parses "coefficient * word" lines of the form used in model files:
/// the word text is "X3 Z4" and the coefficient an exact or float scalar.
pub fn parse_term(coeff: &str, word: &str, n_sites: usize) -> Result<OperatorSum> {
    let c = Scalar::parse(coeff)?;
    let w = PauliWord::parse(word)?;
    if w.support() >> n_sites != 0 {
        return Err(Error::SiteOutOfRange(
            63 - w.support().leading_zeros() as usize,
            n_sites,
        ));
    }
    Ok(OperatorSum::from_word(n_sites, w, c))
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| format!("({}) {}", c.to_exact_string(), w.to_text()))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn rational_expect(s: &Scalar) -> BigRational {
    assert!(s.im.is_zero(), "expected a real scalar, got {s}");
    s.re.clone()
}

pub fn big_zero() -> BigRational {
    BigRational::zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use proptest::prelude::*;

    fn z(n: usize, i: usize) -> OperatorSum {
        OperatorSum::single(n, i, Axis::Z)
    }

    fn x(n: usize, i: usize) -> OperatorSum {
        OperatorSum::single(n, i, Axis::X)
    }

    fn x_global(n: usize) -> OperatorSum {
        let mut w = PauliWord::IDENTITY;
        for i in 0..n {
            w.x |= 1 << i;
        }
        OperatorSum::from_word(n, w, Scalar::one())
    }

    #[test]
    fn pauli_involution() {
        let a = z(2, 0);
        assert_eq!(a.mul(&a).unwrap(), OperatorSum::identity(2));
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let prod = x(1, 0).mul(&z(1, 0)).unwrap();
        let expected = OperatorSum::single(1, 0, Axis::Y).scale(&(-Scalar::i()));
        assert_eq!(prod, expected);
    }

    #[test]
    fn global_flip_commutes_with_zz() {
        // two sign flips cancel
        let n = 6;
        let zz = z(n, 0).mul(&z(n, n - 1)).unwrap();
        let a = OperatorSum::identity(n).add(&x_global(n)).unwrap();
        assert_eq!(a.mul(&zz).unwrap(), zz.mul(&a).unwrap());
    }

    #[test]
    fn commutator_disjoint_support_vanishes() {
        let c = z(3, 0).commutator(&z(3, 1), false).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn global_flip_anticommutes_with_z() {
        let n = 4;
        let ac = x_global(n).commutator(&z(n, 0), true).unwrap();
        assert!(ac.is_zero());
    }

    #[test]
    fn domain_wall_counter_commutes_with_z() {
        // Q = 1/4 sum_i (1 - z_i z_{i+1}) on a ring
        let n = 4;
        let mut q = OperatorSum::zero(n);
        let quarter = Scalar::from_ratio(1, 4);
        for i in 0..n {
            q.add_term(PauliWord::IDENTITY, quarter.clone());
            let (w, k) = PauliWord::single(i, Axis::Z).mul(&PauliWord::single((i + 1) % n, Axis::Z));
            assert_eq!(k, 0);
            q.add_term(w, -quarter.clone());
        }
        assert!(q.commutator(&z(n, 0), false).unwrap().is_zero());
    }

    #[test]
    fn trace_inner_examples() {
        let id2 = OperatorSum::identity(2);
        assert_eq!(id2.trace_inner(&id2).unwrap(), Scalar::from_int(4));
        let z1 = z(2, 0);
        assert_eq!(z1.trace_inner(&z1).unwrap(), Scalar::from_int(4));
        let n = 4;
        let a = OperatorSum::identity(n).add(&x_global(n)).unwrap();
        assert_eq!(a.trace_inner(&a).unwrap(), Scalar::from_int(32));
    }

    #[test]
    fn partial_trace_identity_and_dropped_letters() {
        let id3 = OperatorSum::identity(3);
        let reduced = id3.partial_trace(&[1]).unwrap();
        assert_eq!(reduced, OperatorSum::identity(1).scale(&Scalar::from_int(4)));

        let zz = z(2, 0).mul(&z(2, 1)).unwrap();
        assert!(zz.partial_trace(&[0]).unwrap().is_zero());
    }

    #[test]
    fn dense_single_site() {
        let m = x(1, 0).to_dense().unwrap();
        assert_eq!(m[(0, 1)], Complex64::ONE);
        assert_eq!(m[(1, 0)], Complex64::ONE);
        assert_eq!(m[(0, 0)], Complex64::ZERO);
        let m = z(1, 0).to_dense().unwrap();
        assert_eq!(m[(0, 0)], Complex64::ONE);
        assert_eq!(m[(1, 1)], -Complex64::ONE);
    }

    #[test]
    fn dense_cz_word() {
        // CZ = (I + Z0 + Z1 - Z0 Z1) / 2 = diag(1, 1, 1, -1)
        let half = Scalar::from_ratio(1, 2);
        let z0 = z(2, 0);
        let z1 = z(2, 1);
        let zz = z0.mul(&z1).unwrap();
        let cz = OperatorSum::identity(2)
            .add(&z0)
            .unwrap()
            .add(&z1)
            .unwrap()
            .sub(&zz)
            .unwrap()
            .scale(&half);
        let m = cz.to_dense().unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i != j {
                    Complex64::ZERO
                } else if i == 3 {
                    -Complex64::ONE
                } else {
                    Complex64::ONE
                };
                assert_eq!(m[(i, j)], want, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn float_round_trip_is_exact_for_dyadic() {
        let n = 3;
        let mut a = OperatorSum::identity(n).scale(&Scalar::from_ratio(3, 8));
        a.add_term(PauliWord::single(1, Axis::Y), Scalar::from_ratio(-5, 4));
        let (w, _) = PauliWord::single(0, Axis::X).mul(&PauliWord::single(2, Axis::Z));
        a.add_term(w, Scalar::from_ratio(7, 16));
        let dense = a.to_dense().unwrap();
        let back = FloatOperatorSum::from_dense(&dense, n, 1e-14);
        assert_eq!(back.terms.len(), a.num_terms());
        for (word, c) in a.terms() {
            assert_eq!(back.terms[word], c.to_complex64(), "coefficient of {word}");
        }
    }

    #[test]
    fn word_text_round_trip() {
        let w = PauliWord::parse("X3 Z4").unwrap();
        assert_eq!(w.to_text(), "X3 Z4");
        let y = PauliWord::parse("Y2").unwrap();
        assert_eq!(y, PauliWord::single(2, Axis::Y));
        assert_eq!(PauliWord::parse("I").unwrap(), PauliWord::IDENTITY);
    }

    // --- randomized properties ---

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        (-4i64..=4, -4i64..=4, 1i64..=4).prop_map(|(a, b, d)| {
            Scalar::from_parts(
                BigRational::new(a.into(), d.into()),
                BigRational::new(b.into(), d.into()),
            )
        })
    }

    fn arb_opsum(n: usize) -> impl Strategy<Value = OperatorSum> {
        let word = (0u64..(1 << n), 0u64..(1 << n)).prop_map(|(x, z)| PauliWord { x, z });
        proptest::collection::vec((word, arb_scalar()), 0..5).prop_map(move |terms| {
            let mut s = OperatorSum::zero(n);
            for (w, c) in terms {
                s.add_term(w, c);
            }
            s
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn mul_is_associative(a in arb_opsum(4), b in arb_opsum(4), c in arb_opsum(4)) {
            let left = a.mul(&b).unwrap().mul(&c).unwrap();
            let right = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn mul_distributes(a in arb_opsum(4), b in arb_opsum(4), c in arb_opsum(4)) {
            let left = a.mul(&b.add(&c).unwrap()).unwrap();
            let right = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn trace_is_cyclic(a in arb_opsum(4), b in arb_opsum(4)) {
            let ab = a.mul(&b).unwrap().trace();
            let ba = b.mul(&a).unwrap().trace();
            prop_assert_eq!(ab, ba);
        }

        #[test]
        fn dense_is_ring_homomorphism(a in arb_opsum(3), b in arb_opsum(3)) {
            let lhs = a.mul(&b).unwrap().to_dense().unwrap();
            let rhs = a.to_dense().unwrap().matmul(&b.to_dense().unwrap());
            prop_assert!(lhs.sub(&rhs).max_abs() < 1e-12);
        }

        #[test]
        fn partial_trace_matches_dense_oracle(a in arb_opsum(4)) {
            // trace out sites 1 and 3, keep {0, 2}
            let keep = [0usize, 2];
            let reduced = a.partial_trace(&keep).unwrap();
            let dense = a.to_dense().unwrap();
            // dense oracle: sum over traced bits
            let mut oracle = CMat::zeros(4, 4);
            for r in 0..4usize {
                for c in 0..4usize {
                    let mut acc = Complex64::ZERO;
                    for t in 0..4usize {
                        // assemble full indices: bit0 <- keep bit0, bit2 <- keep bit1, bits 1,3 <- t
                        let assemble = |k: usize| {
                            (k & 1)
                                | (((k >> 1) & 1) << 2)
                                | ((t & 1) << 1)
                                | (((t >> 1) & 1) << 3)
                        };
                        acc += dense[(assemble(r), assemble(c))];
                    }
                    oracle[(r, c)] = acc;
                }
            }
            prop_assert!(reduced.to_dense().unwrap().sub(&oracle).max_abs() < 1e-12);
        }

        #[test]
        fn hermitian_iff_real_spectrum(a in arb_opsum(3)) {
            let h = a.hermitize();
            prop_assert!(h.is_hermitian());
            let (vals, _) = crate::linalg::eig_general(&h.to_dense().unwrap()).unwrap();
            for v in vals {
                prop_assert!(v.im.abs() < 1e-12);
            }
        }
    }
}
