//! Truncated power series in the formal variable `1/s`.
//!
//! A series of truncation order `L` stores the coefficients of
//! `s^0, s^-1, ..., s^-L`; anything beyond `L` is unrepresented. Binary
//! operations truncate to the smaller of the two orders.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{Level, Module, Ring, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("a series needs at least one coefficient")]
    Empty,
    #[error("coefficients belong to different rings")]
    MismatchedRings,
    #[error("series has no multiplicative inverse: constant term vanishes")]
    NotInvertible,
    #[error("exponential needs a vanishing constant term")]
    NonzeroConstant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormalSeries<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> FormalSeries<R> {
    pub fn new(coeffs: Vec<R>) -> Result<Self, SeriesError> {
        let first = coeffs.first().ok_or(SeriesError::Empty)?;
        if coeffs.iter().any(|c| !c.same_ring(first)) {
            return Err(SeriesError::MismatchedRings);
        }
        Ok(FormalSeries { coeffs })
    }

    /// Zero series of order `order` in the ring of `proto`.
    pub fn zero(proto: &R, order: usize) -> Self {
        FormalSeries {
            coeffs: vec![proto.zero_like(); order + 1],
        }
    }

    pub fn one(proto: &R, order: usize) -> Self {
        let mut s = Self::zero(proto, order);
        s.coeffs[0] = proto.one_like();
        s
    }

    /// `c * s^-degree`, truncated at `order`.
    pub fn monomial(c: R, degree: usize, order: usize) -> Self {
        let mut s = Self::zero(&c, order);
        if degree <= order {
            s.coeffs[degree] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, degree: usize) -> Option<&R> {
        self.coeffs.get(degree)
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order()) + 1;
        FormalSeries {
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    fn check(&self, other: &Self) -> Result<(), SeriesError> {
        if self.coeffs[0].same_ring(&other.coeffs[0]) {
            Ok(())
        } else {
            Err(SeriesError::MismatchedRings)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.plus(b))
            .collect();
        Ok(FormalSeries { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        FormalSeries {
            coeffs: self.coeffs.iter().map(Ring::negated).collect(),
        }
    }

    /// Cauchy product; coefficient products keep the factor from `self` on the left.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|n| {
                (0..=n).fold(self.coeffs[0].zero_like(), |acc, j| {
                    acc.plus(&self.coeffs[j].times(&other.coeffs[n - j]))
                })
            })
            .collect();
        Ok(FormalSeries { coeffs })
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.coeffs[0], self.order());
        for _ in 0..n {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Degree-wise map into another ring.
    pub fn map<T: Ring>(&self, f: impl FnMut(&R) -> T) -> FormalSeries<T> {
        FormalSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Product of a scalar series with this one.
    pub fn scale_by_series<S: Scalar>(&self, scalars: &FormalSeries<S>) -> Self
    where
        R: Module<S>,
    {
        let order = self.order().min(scalars.order());
        let coeffs = (0..=order)
            .map(|n| {
                (0..=n).fold(self.coeffs[0].zero_like(), |acc, j| {
                    acc.plus(&self.coeffs[n - j].scaled(&scalars.coeffs[j]))
                })
            })
            .collect();
        FormalSeries { coeffs }
    }

    pub fn scaled<S>(&self, c: &S) -> Self
    where
        R: Module<S>,
    {
        FormalSeries {
            coeffs: self.coeffs.iter().map(|x| x.scaled(c)).collect(),
        }
    }

    /// Index of the first nonzero coefficient, if any.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.vanishes())
    }

    pub fn is_zero(&self) -> bool {
        self.first_nonzero().is_none()
    }
}

impl<S: Scalar> FormalSeries<S> {
    pub fn from_scalars(coeffs: Vec<S>) -> Result<Self, SeriesError> {
        Self::new(coeffs)
    }

    pub fn scalar_zero(order: usize) -> Self {
        Self::zero(&S::zero(), order)
    }

    pub fn scalar_one(order: usize) -> Self {
        Self::one(&S::one(), order)
    }

    /// Multiplicative inverse; needs an invertible constant term.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let mut inv: Vec<S> = Vec::with_capacity(self.coeffs.len());
        inv.push(S::one() / a0.clone());
        for n in 1..self.coeffs.len() {
            let acc = (1..=n).fold(S::zero(), |acc, j| {
                acc + self.coeffs[j].clone() * inv[n - j].clone()
            });
            inv.push(-(acc / a0.clone()));
        }
        Ok(FormalSeries { coeffs: inv })
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        self.mul(&other.inverse()?)
    }

    /// `exp` of a series with vanishing constant term, by summing `x^n / n!`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstant);
        }
        let order = self.order();
        let mut result = Self::scalar_one(order);
        let mut term = Self::scalar_one(order);
        for n in 1..=order {
            term = term
                .mul(self)?
                .scaled(&(S::one() / S::from_i64(n as i64)));
            result = result.add(&term)?;
        }
        Ok(result)
    }

    /// Multiplies by `t = k + i s` (or `t̄ = k - i s`): scale by `k` plus a
    /// shift by one degree. The top degree becomes unrepresentable.
    pub fn mul_by_t(&self, k: Level, conjugate: bool) -> Self {
        let sign = if conjugate { -1 } else { 1 };
        let ik = S::imag_unit() * S::from_i64(sign);
        let kk = S::from_i64(k.as_i64());
        let n = self.coeffs.len();
        let coeffs: Vec<S> = (0..n.saturating_sub(1).max(1))
            .map(|j| {
                let shifted = self.coeffs.get(j + 1).cloned().unwrap_or_else(S::zero);
                let scaled = if j < n { kk.clone() * self.coeffs[j].clone() } else { S::zero() };
                scaled + ik.clone() * shifted
            })
            .collect();
        FormalSeries { coeffs }
    }
}

/// `1/t = -(1/k) sum_{n>=1} (ik/s)^n`.
pub fn inv_t_series<S: Scalar>(k: Level, order: usize) -> FormalSeries<S> {
    inv_t_signed(k, order, 1)
}

/// `1/t̄ = -(1/k) sum_{n>=1} (-ik/s)^n`.
pub fn inv_tbar_series<S: Scalar>(k: Level, order: usize) -> FormalSeries<S> {
    inv_t_signed(k, order, -1)
}

fn inv_t_signed<S: Scalar>(k: Level, order: usize, sign: i64) -> FormalSeries<S> {
    let minus_inv_k = -(S::one() / S::from_i64(k.as_i64()));
    let coeffs = (0..=order)
        .map(|n| {
            if n == 0 {
                S::zero()
            } else {
                minus_inv_k.clone() * S::ik_pow(k, sign, n as u32)
            }
        })
        .collect();
    FormalSeries { coeffs }
}

/// The gauge parameter `r` with `e^{4kr} = -t̄/t`, expanded at `s = ∞`:
/// `r = (1/2k) sum_n (ik)^{2n+1}/(2n+1) s^{-2n-1}`.
pub fn r_series<S: Scalar>(k: Level, order: usize) -> FormalSeries<S> {
    let two_k = S::from_i64(2 * k.as_i64());
    let coeffs = (0..=order)
        .map(|d| {
            if d % 2 == 0 {
                S::zero()
            } else {
                S::ik_pow(k, 1, d as u32) / (two_k.clone() * S::from_i64(d as i64))
            }
        })
        .collect();
    FormalSeries { coeffs }
}

/// `rho(s) = sum_m (ik)^{2m}/(2m+1) s^{-2m-1}`, so that `r = (i/2) rho`.
pub fn rho_series<S: Scalar>(k: Level, order: usize) -> FormalSeries<S> {
    let coeffs = (0..=order)
        .map(|d| {
            if d % 2 == 0 {
                S::zero()
            } else {
                S::ik_pow(k, 1, (d - 1) as u32) / S::from_i64(d as i64)
            }
        })
        .collect();
    FormalSeries { coeffs }
}

/// `[s^-l] rho(s)^n`.
pub fn rho_power_coefficient<S: Scalar>(k: Level, l: usize, n: u32) -> S {
    if l < n as usize || (l - n as usize) % 2 == 1 {
        return S::zero();
    }
    rho_series::<S>(k, l).pow(n).coeffs[l].clone()
}

/// Taylor coefficients (variable `z`) of `(±ik) z (e^{±2ikz}+1)/(e^{±2ikz}-1)`.
///
/// Computed as `((e^w + 1)/2) / ((e^w - 1)/w)` with `w = ±2ikz`, both
/// factors having exact exponential Taylor coefficients.
pub fn phi_taylor_signed<S: Scalar>(k: Level, order: usize, sign: i64) -> FormalSeries<S> {
    let w = S::imag_unit() * S::from_i64(2 * sign * k.as_i64());
    let mut w_pow = S::one();
    let mut fact = S::one();
    let mut numer = Vec::with_capacity(order + 1);
    let mut denom = Vec::with_capacity(order + 1);
    for n in 0..=order {
        if n > 0 {
            w_pow = w_pow * w.clone();
            fact = fact * S::from_i64(n as i64);
        }
        // (e^w + 1)/2: constant 1, then w^n/(2 n!)
        let e_n = w_pow.clone() / fact.clone();
        numer.push(if n == 0 { S::one() } else { e_n / S::from_i64(2) });
        // (e^w - 1)/w = sum w^n/(n+1)!
        denom.push(w_pow.clone() / (fact.clone() * S::from_i64(n as i64 + 1)));
    }
    let numer = FormalSeries { coeffs: numer };
    let denom = FormalSeries { coeffs: denom };
    numer.div(&denom).expect("denominator has constant term 1")
}

pub fn phi_taylor<S: Scalar>(k: Level, order: usize) -> FormalSeries<S> {
    phi_taylor_signed(k, order, 1)
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

pub fn binomial(n: u32, r: u32) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(r) * factorial(n - r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gq, gq_int};
    use crate::GaussianRational as Gq;
    use num_complex::Complex64;

    fn lvl(k: i64) -> Level {
        Level::new(k).unwrap()
    }

    fn series(v: Vec<Gq>) -> FormalSeries<Gq> {
        FormalSeries::new(v).unwrap()
    }

    #[test]
    fn add_examples() {
        let a = series(vec![gq_int(1), gq_int(2)]);
        let b = series(vec![gq_int(0), gq_int(3)]);
        assert_eq!(a.add(&b).unwrap(), series(vec![gq_int(1), gq_int(5)]));
        let z = FormalSeries::scalar_zero(1);
        assert_eq!(a.add(&z).unwrap(), a);
        let l2 = FormalSeries::<Gq>::scalar_one(2);
        let l5 = FormalSeries::<Gq>::scalar_one(5);
        assert_eq!(l2.add(&l5).unwrap().order(), 2);
    }

    #[test]
    fn empty_series_rejected() {
        assert_eq!(FormalSeries::<Gq>::new(vec![]), Err(SeriesError::Empty));
    }

    #[test]
    fn mul_central_example() {
        // (1 + x/s)(1 - x/s) = 1 - x^2/s^2 with x = 3
        let a = series(vec![gq_int(1), gq_int(3), gq_int(0)]);
        let b = series(vec![gq_int(1), gq_int(-3), gq_int(0)]);
        assert_eq!(
            a.mul(&b).unwrap(),
            series(vec![gq_int(1), gq_int(0), gq_int(-9)])
        );
        assert_eq!(a.mul(&FormalSeries::scalar_one(2)).unwrap(), a);
    }

    #[test]
    fn inv_t_examples() {
        let s: FormalSeries<Gq> = inv_t_series(lvl(1), 3);
        assert_eq!(
            s.coeffs(),
            &[gq_int(0), gq((0, 1), (-1, 1)), gq_int(1), gq((0, 1), (1, 1))]
        );
        let c: FormalSeries<Gq> = inv_tbar_series(lvl(1), 2);
        assert_eq!(c.coeffs(), &[gq_int(0), gq((0, 1), (1, 1)), gq_int(1)]);
    }

    #[test]
    fn inv_t_times_t_is_one() {
        for k in 1..=5 {
            for order in 1..=12 {
                for conj in [false, true] {
                    let inv: FormalSeries<Gq> = if conj {
                        inv_tbar_series(lvl(k), order)
                    } else {
                        inv_t_series(lvl(k), order)
                    };
                    let prod = inv.mul_by_t(lvl(k), conj);
                    assert_eq!(prod.order(), order - 1);
                    assert_eq!(prod, FormalSeries::scalar_one(order - 1), "k={k} L={order}");
                }
            }
        }
    }

    #[test]
    fn r_series_examples() {
        let r: FormalSeries<Gq> = r_series(lvl(1), 5);
        assert_eq!(
            r.coeffs(),
            &[
                gq_int(0),
                gq((0, 1), (1, 2)),
                gq_int(0),
                gq((0, 1), (-1, 6)),
                gq_int(0),
                gq((0, 1), (1, 10))
            ]
        );
        let r2: FormalSeries<Gq> = r_series(lvl(2), 3);
        assert_eq!(r2.coeffs()[1], gq((0, 1), (1, 2)));
    }

    #[test]
    fn exp_4kr_relation() {
        // e^{4kr} (1 - ik/s) = 1 + ik/s
        for k in 1..=4 {
            for order in 1..=10 {
                let r: FormalSeries<Gq> = r_series(lvl(k), order);
                let e = r.scaled(&gq_int(4 * k)).exp().unwrap();
                let ik = gq((0, 1), (k, 1));
                let minus = FormalSeries::monomial(-ik.clone(), 1, order)
                    .add(&FormalSeries::scalar_one(order))
                    .unwrap();
                let plus = FormalSeries::monomial(ik, 1, order)
                    .add(&FormalSeries::scalar_one(order))
                    .unwrap();
                assert_eq!(e.mul(&minus).unwrap(), plus, "k={k} L={order}");
            }
        }
    }

    #[test]
    fn parity_of_r_and_phi() {
        for k in 1..=3 {
            let r: FormalSeries<Gq> = r_series(lvl(k), 11);
            let phi: FormalSeries<Gq> = phi_taylor(lvl(k), 11);
            for d in 0..=11 {
                if d % 2 == 0 {
                    assert!(r.coeffs()[d] == gq_int(0));
                } else {
                    assert!(phi.coeffs()[d] == gq_int(0));
                }
            }
        }
    }

    #[test]
    fn phi_examples() {
        let phi: FormalSeries<Gq> = phi_taylor(lvl(1), 4);
        assert_eq!(
            phi.coeffs(),
            &[gq_int(1), gq_int(0), gq((-1, 3), (0, 1)), gq_int(0), gq((-1, 45), (0, 1))]
        );
        for k in 1..=3 {
            let p: FormalSeries<Gq> = phi_taylor_signed(lvl(k), 10, 1);
            let m: FormalSeries<Gq> = phi_taylor_signed(lvl(k), 10, -1);
            assert_eq!(p, m);
        }
    }

    #[test]
    fn phi_float_agrees_with_exact() {
        let exact: FormalSeries<Gq> = phi_taylor(lvl(2), 8);
        let float: FormalSeries<Complex64> = phi_taylor(lvl(2), 8);
        for (a, b) in exact.coeffs().iter().zip(float.coeffs()) {
            assert!((a.to_c64() - b).norm() < 1e-9 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn rho_power_examples() {
        assert_eq!(rho_power_coefficient::<Gq>(lvl(1), 1, 1), gq_int(1));
        for k in 1..=4 {
            assert_eq!(
                rho_power_coefficient::<Gq>(lvl(k), 3, 1),
                gq((-k * k, 3), (0, 1))
            );
        }
        assert_eq!(rho_power_coefficient::<Gq>(lvl(2), 2, 3), gq_int(0));
        assert_eq!(rho_power_coefficient::<Gq>(lvl(1), 5, 3), gq_int(-1));
    }

    #[test]
    fn inverse_and_division() {
        let a = series(vec![gq_int(2), gq_int(1), gq((1, 3), (0, 1))]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), FormalSeries::scalar_one(2));
        assert_eq!(
            series(vec![gq_int(0), gq_int(1)]).inverse(),
            Err(SeriesError::NotInvertible)
        );
    }

    #[test]
    fn noncommutative_product_order() {
        use crate::forms::DenseMatrix;
        let a = DenseMatrix::<Gq>::from_ints(2, &[0, 1, 0, 0]);
        let b = DenseMatrix::<Gq>::from_ints(2, &[0, 0, 1, 0]);
        let one = a.one_like();
        let zero = a.zero_like();
        let sa = FormalSeries::new(vec![one.clone(), a.clone(), zero.clone()]).unwrap();
        let sb = FormalSeries::new(vec![one, b.clone(), zero]).unwrap();
        let p = sa.mul(&sb).unwrap();
        assert_eq!(p.coeffs()[1], a.plus(&b));
        assert_eq!(p.coeffs()[2], a.times(&b));
        assert_ne!(a.times(&b), b.times(&a));
    }

    #[test]
    fn mismatched_rings() {
        use crate::forms::DenseMatrix;
        let a = FormalSeries::new(vec![DenseMatrix::<Gq>::identity(2)]).unwrap();
        let b = FormalSeries::new(vec![DenseMatrix::<Gq>::identity(3)]).unwrap();
        assert_eq!(a.add(&b), Err(SeriesError::MismatchedRings));
        assert_eq!(a.mul(&b), Err(SeriesError::MismatchedRings));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_gq() -> impl Strategy<Value = Gq> {
            (-5i64..=5, 1i64..=4, -5i64..=5, 1i64..=4)
                .prop_map(|(a, b, c, d)| gq((a, b), (c, d)))
        }

        fn small_series() -> impl Strategy<Value = FormalSeries<Gq>> {
            prop::collection::vec(small_gq(), 5).prop_map(|v| FormalSeries::new(v).unwrap())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn mul_associative(a in small_series(), b in small_series(), c in small_series()) {
                let l = a.mul(&b).unwrap().mul(&c).unwrap();
                let r = a.mul(&b.mul(&c).unwrap()).unwrap();
                prop_assert_eq!(l, r);
            }

            #[test]
            fn mul_distributes(a in small_series(), b in small_series(), c in small_series()) {
                let l = a.mul(&b.add(&c).unwrap()).unwrap();
                let r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
                prop_assert_eq!(l, r);
            }
        }
    }
}
