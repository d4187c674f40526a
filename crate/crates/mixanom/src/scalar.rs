//! Exact complex scalars with Gaussian-rational entries.
//!
//! Every coefficient in the symbolic layer is a + b·i with a, b rational.
//! This is closed under all operations used here (Pauli products, phase-poly
//! expansions with phases in the pi/2 lattice, partial traces) and makes
//! "is exactly zero" a meaningful question.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// Exact Gaussian-rational complex number.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Scalar { re: BigRational::one(), im: BigRational::zero() }
    }

    pub fn i() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar { re: BigRational::from_integer(n.into()), im: BigRational::zero() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar {
            re: BigRational::new(num.into(), den.into()),
            im: BigRational::zero(),
        }
    }

    pub fn from_parts(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    /// i^k for k mod 4.
    pub fn i_pow(k: u8) -> Self {
        match k % 4 {
            0 => Scalar::one(),
            1 => Scalar::i(),
            2 => -Scalar::one(),
            _ => -Scalar::i(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale_pow2(&self, exp: i32) -> Self {
        let factor = if exp >= 0 {
            BigRational::from_integer(BigInt::from(2).pow(exp as u32))
        } else {
            BigRational::new(BigInt::one(), BigInt::from(2).pow((-exp) as u32))
        };
        Scalar { re: &self.re * &factor, im: &self.im * &factor }
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Nearest dyadic rational with denominator 2^bits, per component.
    pub fn from_complex64_dyadic(z: Complex64, bits: u32) -> Self {
        let q = |x: f64| {
            let scaled = (x * (1u64 << bits) as f64).round();
            BigRational::new(
                BigInt::from_f64(scaled).unwrap_or_else(BigInt::zero),
                BigInt::from(1u64 << bits),
            )
        };
        Scalar { re: q(z.re), im: q(z.im) }
    }

    /// Exact text form "a/b+c/d i" (imaginary part omitted when zero).
    pub fn to_exact_string(&self) -> String {
        fn rat(r: &BigRational) -> String {
            if r.denom().is_one() {
                format!("{}", r.numer())
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        if self.im.is_zero() {
            rat(&self.re)
        } else if self.re.is_zero() {
            format!("{} i", rat(&self.im))
        } else if self.im.is_negative() {
            format!("{}{} i", rat(&self.re), rat(&self.im))
        } else {
            format!("{}+{} i", rat(&self.re), rat(&self.im))
        }
    }

    /// Parses "a/b", "a/b+c/d i", "c/d i", or a plain decimal float.
    pub fn parse(text: &str) -> crate::Result<Self> {
        let t = text.trim();
        fn rat(s: &str) -> Option<BigRational> {
            let s = s.trim();
            if let Some((n, d)) = s.split_once('/') {
                let n: BigInt = n.trim().parse().ok()?;
                let d: BigInt = d.trim().parse().ok()?;
                if d.is_zero() {
                    return None;
                }
                Some(BigRational::new(n, d))
            } else if let Ok(n) = s.parse::<BigInt>() {
                Some(BigRational::from_integer(n))
            } else {
                let f: f64 = s.parse().ok()?;
                BigRational::from_f64(f)
            }
        }
        if let Some(body) = t.strip_suffix('i') {
            let body = body.trim_end();
            // split re/im on the last +/- that is not a leading sign or inside "/"
            let bytes = body.as_bytes();
            let mut split = None;
            for idx in (1..bytes.len()).rev() {
                if (bytes[idx] == b'+' || bytes[idx] == b'-')
                    && bytes[idx - 1] != b'/'
                    && bytes[idx - 1] != b'e'
                    && bytes[idx - 1] != b'E'
                {
                    split = Some(idx);
                    break;
                }
            }
            match split {
                Some(idx) => {
                    let re = rat(&body[..idx]);
                    let im = rat(&body[idx..]);
                    match (re, im) {
                        (Some(re), Some(im)) => Ok(Scalar { re, im }),
                        _ => Err(crate::Error::Parse(format!("bad scalar: {text}"))),
                    }
                }
                None => match rat(body) {
                    Some(im) => Ok(Scalar { re: BigRational::zero(), im }),
                    None => Err(crate::Error::Parse(format!("bad scalar: {text}"))),
                },
            }
        } else {
            match rat(t) {
                Some(re) => Ok(Scalar { re, im: BigRational::zero() }),
                None => Err(crate::Error::Parse(format!("bad scalar: {text}"))),
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_exact_string())
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        self.re -= rhs.re;
        self.im -= rhs.im;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re, im: -self.im }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl MulAssign for Scalar {
    fn mul_assign(&mut self, rhs: Scalar) {
        *self = &*self * &rhs;
    }
}
