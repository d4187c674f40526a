//! Expectation values and correlation diagnostics on exact states.

use crate::pauli::{OperatorSum, PauliWord};
use crate::scalar::Scalar;
use crate::{Error, Result};
use num_rational::BigRational;
use serde::Serialize;

/// Exact correlator with its connected part and the normalization used.
#[derive(Debug, Clone)]
pub struct CorrelatorReport {
    pub value: Scalar,
    pub connected: Scalar,
    /// trace (or purity) the values were normalized by
    pub normalization: Scalar,
}

impl CorrelatorReport {
    pub fn csv_row(&self, name: &str) -> String {
        format!(
            "{},{},{},{}",
            name,
            self.value.to_exact_string(),
            self.connected.to_exact_string(),
            self.normalization.to_exact_string()
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelatorJson {
    pub observable: String,
    pub value: String,
    pub value_float: f64,
    pub connected: String,
    pub connected_float: f64,
}

impl CorrelatorReport {
    pub fn to_json(&self, observable: &str) -> CorrelatorJson {
        CorrelatorJson {
            observable: observable.to_string(),
            value: self.value.to_exact_string(),
            value_float: self.value.to_complex64().re,
            connected: self.connected.to_exact_string(),
            connected_float: self.connected.to_complex64().re,
        }
    }
}

fn divide(num: &Scalar, den: &Scalar) -> Scalar {
    use num_traits::Zero;
    let d = den.norm_sqr();
    assert!(!d.is_zero(), "division by zero scalar");
    let prod = num * &den.conj();
    Scalar::from_parts(prod.re / d.clone(), prod.im / d)
}

/// Tr(O rho) / Tr(rho), exact.
pub fn expectation(rho: &OperatorSum, obs: &OperatorSum) -> Result<Scalar> {
    let tr = rho.trace();
    if tr.is_zero() {
        return Err(Error::ZeroTrace);
    }
    let num = obs.trace_product(rho)?;
    Ok(divide(&num, &tr))
}

/// <A B> - <A><B>, all parts exact.
pub fn connected_correlator(
    rho: &OperatorSum,
    a: &OperatorSum,
    b: &OperatorSum,
) -> Result<CorrelatorReport> {
    let tr = rho.trace();
    if tr.is_zero() {
        return Err(Error::ZeroTrace);
    }
    let ab = expectation(rho, &a.mul(b)?)?;
    let ea = expectation(rho, a)?;
    let eb = expectation(rho, b)?;
    let connected = ab.clone() - &ea * &eb;
    Ok(CorrelatorReport { value: ab, connected, normalization: tr })
}

/// Two-replica boundary correlator:
///   value     = Tr(rho Ol Or rho Ol2 Or2) / Tr(rho^2),
///   connected = value - [Tr(rho Ol rho Ol2)/Tr(rho^2)] [Tr(rho Or rho Or2)/Tr(rho^2)].
pub fn renyi2_correlator(
    rho: &OperatorSum,
    ol: &OperatorSum,
    or_: &OperatorSum,
    ol2: &OperatorSum,
    or2: &OperatorSum,
) -> Result<CorrelatorReport> {
    let purity = rho.trace_product(rho)?;
    if purity.is_zero() {
        return Err(Error::ZeroTrace);
    }
    let two_sided = rho
        .mul(ol)?
        .mul(or_)?
        .trace_product(&rho.mul(ol2)?.mul(or2)?)?;
    let value = divide(&two_sided, &purity);
    let left = divide(&rho.mul(ol)?.trace_product(&rho.mul(ol2)?)?, &purity);
    let right = divide(&rho.mul(or_)?.trace_product(&rho.mul(or2)?)?, &purity);
    let connected = value.clone() - &left * &right;
    Ok(CorrelatorReport { value, connected, normalization: purity })
}

/// Expectation of the dressed string tau^z (prod sigma^x) tau^z on a
/// two-sublattice chain. Indices follow the convention of the cluster model
/// builder: tau spins sit on 0-indexed even sites, sigma spins on odd sites;
/// `j < k` index the sigma spins the string covers (1-based pairs), i.e. the
/// operator is Z_{2j-2} X_{2j-1} X_{2j+1} ... X_{2k-1} Z_{2k}.
pub fn string_order(rho: &OperatorSum, j: usize, k: usize) -> Result<Scalar> {
    let n = rho.n_sites();
    if j < 1 || j >= k {
        return Err(Error::InvalidSector(format!("bad string indices ({j}, {k})")));
    }
    if 2 * k >= n {
        return Err(Error::InvalidSector(format!(
            "string endpoint {} outside the {n}-site chain",
            2 * k
        )));
    }
    let mut word = PauliWord::IDENTITY;
    word.z |= 1u64 << (2 * j - 2);
    word.z |= 1u64 << (2 * k);
    for i in j..=k {
        word.x |= 1u64 << (2 * i - 1);
    }
    let obs = OperatorSum::from_word(n, word, Scalar::one());
    let report = expectation(rho, &obs)?;
    // Pauli-word expectations are bounded by one
    let norm = report.norm_sqr();
    debug_assert!(norm <= BigRational::from_integer(1.into()), "|<string>| > 1");
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Axis;
    use proptest::prelude::*;

    fn all_up(n: usize) -> OperatorSum {
        let half = Scalar::from_ratio(1, 2);
        let mut rho = OperatorSum::identity(n);
        for i in 0..n {
            let f = OperatorSum::identity(n)
                .add(&OperatorSum::single(n, i, Axis::Z))
                .unwrap()
                .scale(&half);
            rho = rho.mul(&f).unwrap();
        }
        rho
    }

    fn ghz_mixture(n: usize) -> OperatorSum {
        let half = Scalar::from_ratio(1, 2);
        let mut up = OperatorSum::identity(n);
        let mut down = OperatorSum::identity(n);
        for i in 0..n {
            let z = OperatorSum::single(n, i, Axis::Z);
            up = up
                .mul(&OperatorSum::identity(n).add(&z).unwrap().scale(&half))
                .unwrap();
            down = down
                .mul(&OperatorSum::identity(n).sub(&z).unwrap().scale(&half))
                .unwrap();
        }
        up.add(&down).unwrap().scale(&half)
    }

    #[test]
    fn maximally_mixed_has_no_magnetization() {
        let rho = OperatorSum::identity(3);
        let z = OperatorSum::single(3, 0, Axis::Z);
        assert!(expectation(&rho, &z).unwrap().is_zero());
        assert_eq!(expectation(&rho, &OperatorSum::identity(3)).unwrap(), Scalar::one());
    }

    #[test]
    fn ghz_mixture_has_long_range_order() {
        let n = 6;
        let rho = ghz_mixture(n);
        let a = OperatorSum::single(n, 0, Axis::Z);
        let b = OperatorSum::single(n, n - 1, Axis::Z);
        let rep = connected_correlator(&rho, &a, &b).unwrap();
        assert_eq!(rep.connected, Scalar::one());
        assert_eq!(rep.value, Scalar::one());
    }

    #[test]
    fn product_state_is_uncorrelated() {
        let n = 4;
        let rho = all_up(n);
        let a = OperatorSum::single(n, 0, Axis::X);
        let b = OperatorSum::single(n, 3, Axis::Z);
        let rep = connected_correlator(&rho, &a, &b).unwrap();
        assert!(rep.connected.is_zero());
    }

    #[test]
    fn renyi2_connected_vanishes_on_maximally_mixed() {
        let n = 4;
        let rho = OperatorSum::identity(n);
        let zl = OperatorSum::single(n, 0, Axis::Z);
        let zr = OperatorSum::single(n, 3, Axis::Z);
        let rep = renyi2_correlator(&rho, &zl, &zr, &zl, &zr).unwrap();
        assert!(rep.connected.is_zero());
        // (Zl Zr)^2 = I, so the raw value is 1 and the factors cancel it
        assert_eq!(rep.value, Scalar::one());
    }

    #[test]
    fn zero_trace_is_rejected() {
        let z = OperatorSum::single(2, 0, Axis::Z);
        assert!(matches!(
            expectation(&z, &OperatorSum::identity(2)),
            Err(Error::ZeroTrace)
        ));
    }

    #[test]
    fn string_order_trivial_cases() {
        // tau spins on even sites maximally mixed, sigma spins on odd sites
        // pointing along +x: the dressed string with tau^z endpoints averages
        // to zero; the bare sigma^x string gives one
        let n = 8;
        let half = Scalar::from_ratio(1, 2);
        let mut rho = OperatorSum::identity(n);
        for i in (1..n).step_by(2) {
            let f = OperatorSum::identity(n)
                .add(&OperatorSum::single(n, i, Axis::X))
                .unwrap()
                .scale(&half);
            rho = rho.mul(&f).unwrap();
        }
        assert!(string_order(&rho, 1, 3).unwrap().is_zero());
        let mut bare = PauliWord::IDENTITY;
        for i in 1..=3 {
            bare.x |= 1u64 << (2 * i - 1);
        }
        let obs = OperatorSum::from_word(n, bare, Scalar::one());
        assert_eq!(expectation(&rho, &obs).unwrap(), Scalar::one());
    }

    // exact rank-1 states from random stabilizer projectors
    fn stabilizer_pure_state(n: usize, words: &[(PauliWord, bool)]) -> Option<OperatorSum> {
        // require commuting independent words
        for (i, (a, _)) in words.iter().enumerate() {
            for (b, _) in words.iter().skip(i + 1) {
                if !a.commutes_with(b) {
                    return None;
                }
            }
        }
        let half = Scalar::from_ratio(1, 2);
        let mut rho = OperatorSum::identity(n);
        for (w, sign) in words {
            let mut s = OperatorSum::from_word(n, *w, Scalar::one());
            if *sign {
                s = s.scale(&-Scalar::one());
            }
            rho = rho
                .mul(&OperatorSum::identity(n).add(&s).unwrap().scale(&half))
                .unwrap();
        }
        // purity check: Tr(rho^2) == Tr(rho) and rank 1 iff Tr(rho) == 1...
        let tr = rho.trace();
        if tr != Scalar::one() {
            return None; // dependent stabilizers: projector of rank > 1
        }
        Some(rho)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn renyi2_factorizes_on_pure_states(
            xs in proptest::collection::vec((0u64..8, 0u64..8, any::<bool>()), 3),
            wa in (0u64..8, 0u64..8),
            wb in (0u64..8, 0u64..8),
        ) {
            let n = 3;
            let words: Vec<(PauliWord, bool)> = xs
                .iter()
                .map(|&(x, z, s)| (PauliWord { x, z }, s))
                .collect();
            if let Some(rho) = stabilizer_pure_state(n, &words) {
                let a = OperatorSum::from_word(n, PauliWord { x: wa.0, z: wa.1 }, Scalar::one());
                let b = OperatorSum::from_word(n, PauliWord { x: wb.0, z: wb.1 }, Scalar::one());
                let id = OperatorSum::identity(n);
                let rep = renyi2_correlator(&rho, &a, &id, &b, &id).unwrap();
                let want = &expectation(&rho, &a).unwrap() * &expectation(&rho, &b).unwrap();
                prop_assert_eq!(rep.value, want);
            }
        }

        #[test]
        fn hermitian_expectations_are_real(
            xs in proptest::collection::vec((0u64..8, 0u64..8, any::<bool>()), 2),
            wa in (0u64..8, 0u64..8),
        ) {
            let n = 3;
            let words: Vec<(PauliWord, bool)> = xs
                .iter()
                .map(|&(x, z, s)| (PauliWord { x, z }, s))
                .collect();
            if let Some(rho) = stabilizer_pure_state(n, &words) {
                let a = OperatorSum::from_word(n, PauliWord { x: wa.0, z: wa.1 }, Scalar::one());
                let e = expectation(&rho, &a).unwrap();
                prop_assert!(e.is_real());
            }
        }
    }
}
