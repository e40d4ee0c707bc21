//! Scalar and ring contracts shared by every exact and floating computation.
//!
//! [`Scalar`] is the coefficient field (exact Gaussian rationals or complex
//! floats). [`Ring`] is the minimal contract a formal series needs from its
//! coefficients, which may be scalars, operator-algebra elements or matrices.

use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex32, Complex64};
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::GaussianRational;

/// The fixed positive integer level `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level(u32);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("level must be a positive integer, got {0}")]
pub struct LevelError(pub i64);

impl Level {
    pub fn new(k: i64) -> Result<Self, LevelError> {
        if k >= 1 && k <= u32::MAX as i64 {
            Ok(Level(k as u32))
        } else {
            Err(LevelError(k))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_i64(self) -> i64 {
        self.0 as i64
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Coefficient field: complex numbers over an exact or floating base.
pub trait Scalar:
    Clone + fmt::Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_i64(n: i64) -> Self;
    fn imag_unit() -> Self;
    fn to_c64(&self) -> Complex64;
    /// Whether equality tests on this scalar are exact.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn from_bigint(n: &BigInt) -> Self;

    fn conj(&self) -> Self;

    /// `(i k)^n` with sign `±`.
    fn ik_pow(k: Level, sign: i64, n: u32) -> Self {
        let base = Self::imag_unit() * Self::from_i64(sign * k.as_i64());
        pow(&base, n)
    }
}

pub fn pow<S: Scalar>(base: &S, n: u32) -> S {
    let mut acc = S::one();
    for _ in 0..n {
        acc = acc * base.clone();
    }
    acc
}

impl Scalar for GaussianRational {
    const EXACT: bool = true;

    fn from_i64(n: i64) -> Self {
        Complex::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    fn imag_unit() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn from_bigint(n: &BigInt) -> Self {
        Complex::new(BigRational::from_integer(n.clone()), BigRational::zero())
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn imag_unit() -> Self {
        Complex64::i()
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn from_bigint(n: &BigInt) -> Self {
        Complex64::new(n.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }
}

impl Scalar for Complex32 {
    const EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        Complex32::new(n as f32, 0.0)
    }

    fn imag_unit() -> Self {
        Complex32::i()
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re as f64, self.im as f64)
    }

    fn from_bigint(n: &BigInt) -> Self {
        Complex32::new(n.to_f32().unwrap_or(f32::NAN), 0.0)
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }
}

/// Minimal ring contract for series coefficients.
///
/// Elements carry enough context (level, matrix size) to build their own
/// zero and one, so a ring is identified by any one of its elements.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn vanishes(&self) -> bool;

    fn minus(&self, rhs: &Self) -> Self {
        self.plus(&rhs.negated())
    }

    /// `n · self` by repeated doubling.
    fn int_multiple(&self, n: i64) -> Self {
        let mut acc = self.zero_like();
        let mut base = if n < 0 { self.negated() } else { self.clone() };
        let mut m = n.unsigned_abs();
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.plus(&base);
            }
            base = base.plus(&base);
            m >>= 1;
        }
        acc
    }

    /// Whether two elements belong to the same ring instance.
    fn same_ring(&self, _other: &Self) -> bool {
        true
    }
}

/// A ring that is also a module over the scalar `S`.
pub trait Module<S>: Ring {
    fn scaled(&self, c: &S) -> Self;
}

impl<S: Scalar> Ring for S {
    fn zero_like(&self) -> Self {
        S::zero()
    }
    fn one_like(&self) -> Self {
        S::one()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.clone() + rhs.clone()
    }
    fn negated(&self) -> Self {
        -self.clone()
    }
    fn times(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
}

impl<S: Scalar> Module<S> for S {
    fn scaled(&self, c: &S) -> Self {
        c.clone() * self.clone()
    }
}

pub fn gq_int(n: i64) -> GaussianRational {
    GaussianRational::from_i64(n)
}

/// `re_num/re_den + (im_num/im_den) i`.
pub fn gq(re: (i64, i64), im: (i64, i64)) -> GaussianRational {
    Complex::new(
        BigRational::new(re.0.into(), re.1.into()),
        BigRational::new(im.0.into(), im.1.into()),
    )
}

pub fn gq_i() -> GaussianRational {
    GaussianRational::imag_unit()
}

pub fn rational_to_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Canonical text form `a/b+c/d*i` (denominators always written).
pub fn gq_to_string(z: &GaussianRational) -> String {
    let sign = if z.im.is_negative() { '-' } else { '+' };
    format!(
        "{}{}{}*i",
        rational_to_string(&z.re),
        sign,
        rational_to_string(&z.im.abs())
    )
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed Gaussian rational {0:?}")]
pub struct ParseGqError(pub String);

fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n = BigInt::from_str(n.trim()).ok()?;
    let d = BigInt::from_str(d.trim()).ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// Inverse of [`gq_to_string`].
pub fn parse_gq(s: &str) -> Result<GaussianRational, ParseGqError> {
    let err = || ParseGqError(s.to_string());
    let t = s.trim();
    let body = t.strip_suffix("*i").ok_or_else(err)?;
    // the split point is the last sign that is not the leading one
    let pos = body
        .char_indices()
        .skip(1)
        .filter(|(_, c)| *c == '+' || *c == '-')
        .map(|(i, _)| i)
        .last()
        .ok_or_else(err)?;
    let re = parse_rational(&body[..pos]).ok_or_else(err)?;
    let im = parse_rational(body[pos..].trim_start_matches('+')).ok_or_else(err)?;
    Ok(Complex::new(re, im))
}
