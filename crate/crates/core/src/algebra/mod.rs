//! Normal-ordered algebra generated by `Δ`, `b`, `b̄`, a central `c = [b, b̄]`
//! and a free symbol `D`, at a fixed level `k`.
//!
//! Relations: `bΔ = Δb + 4k b`, `b̄Δ = Δb̄ − 4k b̄`, `b̄b = bb̄ − c`. Nothing
//! commutes past `D` except `c`, so a normal word is a list of monomials
//! `Δ^a b^p b̄^q` separated by `D`, followed by a single power of `c`.

mod identities;
mod rewrite;
mod text;

pub use identities::*;
pub use rewrite::{letters_product, random_letters, reduce_letters, Letter, Strategy};
pub use text::ParseElementError;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::scalar::{Level, Module, Ring, Scalar};
use crate::series::{binomial, factorial};
use crate::GaussianRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("elements have levels {0} and {1}")]
    MismatchedLevel(Level, Level),
    #[error("d_T is only defined on words in Δ, D and c; got {0}")]
    OutsideDerivationDomain(String),
    #[error("identity violated, residual {0}")]
    IdentityViolated(String),
    #[error("coefficient table is missing row {0}")]
    MissingRow(usize),
    #[error(transparent)]
    Series(#[from] crate::series::SeriesError),
}

/// `Δ^delta b^b b̄^bbar`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub delta: u32,
    pub b: u32,
    pub bbar: u32,
}

impl Mono {
    pub const ONE: Mono = Mono { delta: 0, b: 0, bbar: 0 };

    pub fn new(delta: u32, b: u32, bbar: u32) -> Self {
        Mono { delta, b, bbar }
    }
}

/// A normal word: `segments[0] D segments[1] D ... segments[n] c^c`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    segments: Vec<Mono>,
    c: u32,
}

impl Word {
    pub fn new(segments: Vec<Mono>, c: u32) -> Self {
        assert!(!segments.is_empty(), "a word has at least one segment");
        Word { segments, c }
    }

    pub fn unit() -> Self {
        Word::new(vec![Mono::ONE], 0)
    }

    pub fn mono(m: Mono) -> Self {
        Word::new(vec![m], 0)
    }

    pub fn segments(&self) -> &[Mono] {
        &self.segments
    }

    pub fn c_power(&self) -> u32 {
        self.c
    }

    pub fn d_count(&self) -> usize {
        self.segments.len() - 1
    }

    pub fn has_b(&self) -> bool {
        self.segments.iter().any(|m| m.b > 0 || m.bbar > 0)
    }

    /// Total number of generator letters, `c` included.
    pub fn len(&self) -> u32 {
        self.segments
            .iter()
            .map(|m| m.delta + m.b + m.bbar)
            .sum::<u32>()
            + self.d_count() as u32
            + self.c
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Product of two normal monomials as `(monomial, c-power, coefficient)`.
///
/// `b^p b̄^q Δ = (Δ + 4k(p−q)) b^p b̄^q` and `b̄^q b^p' = Σ_j j! C(q,j) C(p',j) (−c)^j b^{p'−j} b̄^{q−j}`.
pub fn mono_product(k: Level, x: Mono, y: Mono) -> Vec<(Mono, u32, BigInt)> {
    let shift = BigInt::from(4 * k.as_i64() * (x.b as i64 - x.bbar as i64));
    let mut out = Vec::new();
    for i in 0..=y.delta {
        let e = y.delta - i;
        let delta_coeff = binomial(y.delta, i) * num_traits::pow(shift.clone(), e as usize);
        if delta_coeff.is_zero() {
            continue;
        }
        for j in 0..=x.bbar.min(y.b) {
            let mut coeff = &delta_coeff * factorial(j) * binomial(x.bbar, j) * binomial(y.b, j);
            if j % 2 == 1 {
                coeff = -coeff;
            }
            let m = Mono::new(x.delta + i, x.b + y.b - j, x.bbar + y.bbar - j);
            out.push((m, j, coeff));
        }
    }
    out
}

fn word_product(k: Level, u: &Word, v: &Word) -> Vec<(Word, BigInt)> {
    let (head, last) = u.segments.split_at(u.segments.len() - 1);
    let (first, tail) = v.segments.split_first().expect("nonempty");
    mono_product(k, last[0], *first)
        .into_iter()
        .map(|(m, j, coeff)| {
            let mut segments = Vec::with_capacity(u.segments.len() + v.segments.len() - 1);
            segments.extend_from_slice(head);
            segments.push(m);
            segments.extend_from_slice(tail);
            (Word::new(segments, u.c + v.c + j), coeff)
        })
        .collect()
}

/// Finite linear combination of normal words.
#[derive(Clone, PartialEq)]
pub struct AlgebraElement<S = GaussianRational> {
    k: Level,
    terms: BTreeMap<Word, S>,
}

impl<S: Scalar> AlgebraElement<S> {
    pub fn zero(k: Level) -> Self {
        AlgebraElement {
            k,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(k: Level) -> Self {
        Self::term(k, Word::unit(), S::one())
    }

    pub fn scalar(k: Level, z: S) -> Self {
        Self::term(k, Word::unit(), z)
    }

    pub fn term(k: Level, word: Word, coeff: S) -> Self {
        let mut e = Self::zero(k);
        e.add_term(word, coeff);
        e
    }

    pub fn from_terms(k: Level, terms: impl IntoIterator<Item = (Word, S)>) -> Self {
        let mut e = Self::zero(k);
        for (w, z) in terms {
            e.add_term(w, z);
        }
        e
    }

    pub fn mono(k: Level, m: Mono) -> Self {
        Self::term(k, Word::mono(m), S::one())
    }

    pub fn delta(k: Level) -> Self {
        Self::mono(k, Mono::new(1, 0, 0))
    }

    pub fn delta_pow(k: Level, n: u32) -> Self {
        Self::mono(k, Mono::new(n, 0, 0))
    }

    pub fn b(k: Level) -> Self {
        Self::mono(k, Mono::new(0, 1, 0))
    }

    pub fn bbar(k: Level) -> Self {
        Self::mono(k, Mono::new(0, 0, 1))
    }

    pub fn c(k: Level) -> Self {
        Self::term(k, Word::new(vec![Mono::ONE], 1), S::one())
    }

    /// The free symbol `D`.
    pub fn d(k: Level) -> Self {
        Self::term(k, Word::new(vec![Mono::ONE, Mono::ONE], 0), S::one())
    }

    /// `b + sign·b̄`.
    pub fn b_combo(k: Level, sign: i64) -> Self {
        Self::b(k).add(&Self::bbar(k).scale(&S::from_i64(sign)))
    }

    pub fn level(&self) -> Level {
        self.k
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> S {
        self.terms.get(w).cloned().unwrap_or_else(S::zero)
    }

    fn add_term(&mut self, w: Word, z: S) {
        if z.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(acc) => {
                *acc = acc.clone() + z;
                if acc.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, z);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.k == other.k {
            Ok(())
        } else {
            Err(AlgebraError::MismatchedLevel(self.k, other.k))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, z) in &other.terms {
            out.add_term(w.clone(), z.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut out = Self::zero(self.k);
        for (u, x) in &self.terms {
            for (v, y) in &other.terms {
                let xy = x.clone() * y.clone();
                for (w, n) in word_product(self.k, u, v) {
                    out.add_term(w, xy.clone() * S::from_bigint(&n));
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("levels agree")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("levels agree")
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn scale(&self, z: &S) -> Self {
        let mut out = Self::zero(self.k);
        for (w, x) in &self.terms {
            out.add_term(w.clone(), z.clone() * x.clone());
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(self.k), |acc, _| acc.mul(self))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self, AlgebraError> {
        Ok(self.try_mul(other)?.sub(&other.mul(self)))
    }

    /// Words carrying a given number of `D` symbols.
    pub fn d_degree_part(&self, n: usize) -> Self {
        Self::from_terms(
            self.k,
            self.terms
                .iter()
                .filter(|(w, _)| w.d_count() == n)
                .map(|(w, z)| (w.clone(), z.clone())),
        )
    }

    /// Replaces every `D` by `e`, left to right.
    pub fn substitute_d(&self, e: &Self) -> Self {
        let mut out = Self::zero(self.k);
        for (w, z) in &self.terms {
            let mut acc = Self::mono(self.k, w.segments[0]);
            for m in &w.segments[1..] {
                acc = acc.mul(e).mul(&Self::mono(self.k, *m));
            }
            let tail = Self::term(self.k, Word::new(vec![Mono::ONE], w.c), z.clone());
            out = out.add(&acc.mul(&tail));
        }
        out
    }
}

impl<S: Scalar> fmt::Debug for AlgebraElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraElement(k={}, ", self.k)?;
        f.debug_map().entries(self.terms.iter()).finish()?;
        write!(f, ")")
    }
}

impl<S: Scalar> Ring for AlgebraElement<S> {
    fn zero_like(&self) -> Self {
        Self::zero(self.k)
    }
    fn one_like(&self) -> Self {
        Self::one(self.k)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn times(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn same_ring(&self, other: &Self) -> bool {
        self.k == other.k
    }
}

impl<S: Scalar> Module<S> for AlgebraElement<S> {
    fn scaled(&self, c: &S) -> Self {
        self.scale(c)
    }
}
