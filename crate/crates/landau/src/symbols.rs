//! Polynomial-coefficient differential operators in `∇_x, ∇_y` and their symbols.
//!
//! [`DiffOp`] stores the normal-ordered form `Σ c_{ij}(x, y) ∇_x^i ∇_y^j`, using
//! `[∇_y, ∇_x] = ik` and `[∇_a, f] = ∂_a f`. [`PolyOp`] stores `Σ ∇ⁿ_{T_n}`,
//! where `∇ⁿ_T = T^{a₁…aₙ}∇_{a₁}⋯∇_{aₙ}` for a totally symmetric `T`.

use std::collections::{BTreeMap, HashMap};

use hwconn_core::series::binomial;
use hwconn_core::{Level, Scalar};
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::geometry::GeometryData;
use crate::poly::Poly2;

fn int<S: Scalar>(n: i64) -> S {
    S::from_i64(n)
}

fn binom<S: Scalar>(n: u32, k: u32) -> S {
    S::from_bigint(&binomial(n, k))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffOp<S: Scalar> {
    k: Level,
    terms: BTreeMap<(u32, u32), Poly2<S>>,
}

impl<S: Scalar> DiffOp<S> {
    pub fn zero(k: Level) -> Self {
        DiffOp {
            k,
            terms: BTreeMap::new(),
        }
    }

    /// `c ∇_x^i ∇_y^j`.
    pub fn term(k: Level, c: Poly2<S>, i: u32, j: u32) -> Self {
        let mut d = Self::zero(k);
        d.add_term((i, j), c);
        d
    }

    pub fn multiplication(k: Level, f: Poly2<S>) -> Self {
        Self::term(k, f, 0, 0)
    }

    pub fn scalar(k: Level, c: S) -> Self {
        Self::multiplication(k, Poly2::constant(c))
    }

    pub fn nabla_x(k: Level) -> Self {
        Self::term(k, Poly2::constant(S::one()), 1, 0)
    }

    pub fn nabla_y(k: Level) -> Self {
        Self::term(k, Poly2::constant(S::one()), 0, 1)
    }

    /// `T^{ab}∇_a∇_b` for a constant symmetric tensor.
    pub fn second_order(k: Level, t: [[S; 2]; 2]) -> Self {
        let x = Self::nabla_x(k);
        let y = Self::nabla_y(k);
        let c = |s: &S| Self::scalar(k, s.clone());
        c(&t[0][0])
            .mul(&x.mul(&x))
            .add(&c(&t[0][1]).mul(&x.mul(&y)))
            .add(&c(&t[1][0]).mul(&y.mul(&x)))
            .add(&c(&t[1][1]).mul(&y.mul(&y)))
    }

    fn add_term(&mut self, e: (u32, u32), c: Poly2<S>) {
        let slot = self.terms.entry(e).or_insert_with(Poly2::zero);
        *slot = slot.add(&c);
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn level(&self) -> Level {
        self.k
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), Poly2<S>> {
        &self.terms
    }

    pub fn coeff(&self, i: u32, j: u32) -> Poly2<S> {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Poly2::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Differential order; `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.k, other.k, "levels differ");
        let mut d = self.clone();
        for (&e, c) in &other.terms {
            d.add_term(e, c.clone());
        }
        d
    }

    pub fn scale(&self, z: &S) -> Self {
        let mut d = Self::zero(self.k);
        for (&e, c) in &self.terms {
            d.add_term(e, c.scale(z));
        }
        d
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.k, other.k, "levels differ");
        let ik = S::imag_unit() * int::<S>(self.k.as_i64());
        let mut out = Self::zero(self.k);
        for (&(i, j), c) in &self.terms {
            for (&(p, q), d) in &other.terms {
                // ∇_y^j d = Σ_m C(j,m) (∂_y^m d) ∇_y^{j−m}
                for m in 0..=j {
                    let dm = d.derivative(0, m);
                    if dm.is_zero() {
                        continue;
                    }
                    // ∇_y^{j−m} ∇_x^p = Σ_n C(j−m,n) C(p,n) n! (ik)^n ∇_x^{p−n} ∇_y^{j−m−n}
                    for n in 0..=(j - m).min(p) {
                        let weyl = binom::<S>(j - m, n)
                            * binom::<S>(p, n)
                            * S::from_bigint(&hwconn_core::series::factorial(n))
                            * hwconn_core::scalar::pow(&ik, n);
                        // ∇_x^i e = Σ_r C(i,r) (∂_x^r e) ∇_x^{i−r}
                        for r in 0..=i {
                            let e = dm.derivative(r, 0);
                            if e.is_zero() {
                                continue;
                            }
                            let w = binom::<S>(j, m) * weyl.clone() * binom::<S>(i, r);
                            out.add_term((i - r + p - n, j - m - n + q), c.mul(&e).scale(&w));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> DiffOp<T> {
        let mut d = DiffOp::zero(self.k);
        for (&e, c) in &self.terms {
            d.add_term(e, c.map(f));
        }
        d
    }
}

/// A totally symmetric contravariant tensor with polynomial entries, stored by
/// its `n + 1` independent components: `comps[j]` is the entry with `j`
/// indices equal to `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor<S: Scalar> {
    comps: Vec<Poly2<S>>,
}

impl<S: Scalar> SymTensor<S> {
    pub fn new(comps: Vec<Poly2<S>>) -> Self {
        assert!(!comps.is_empty(), "a tensor of order n has n + 1 components");
        SymTensor { comps }
    }

    pub fn zero(order: u32) -> Self {
        Self::new(vec![Poly2::zero(); order as usize + 1])
    }

    pub fn scalar(f: Poly2<S>) -> Self {
        Self::new(vec![f])
    }

    /// A constant symmetric 2-tensor.
    pub fn from_matrix(t: &[[S; 2]; 2]) -> Self {
        Self::new(vec![
            Poly2::constant(t[0][0].clone()),
            Poly2::constant(t[0][1].clone()),
            Poly2::constant(t[1][1].clone()),
        ])
    }

    pub fn order(&self) -> u32 {
        (self.comps.len() - 1) as u32
    }

    pub fn components(&self) -> &[Poly2<S>] {
        &self.comps
    }

    /// The entry at an arbitrary index tuple (`0 = x`, `1 = y`).
    pub fn entry(&self, idx: &[usize]) -> &Poly2<S> {
        &self.comps[idx.iter().filter(|&&a| a == 1).count()]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly2::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order(), other.order(), "orders differ");
        Self::new(self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect())
    }
}

/// `Σ_n ∇ⁿ_{T_n}`; several entries may share an order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyOp<S: Scalar> {
    k: Level,
    terms: Vec<SymTensor<S>>,
}

impl<S: Scalar> PolyOp<S> {
    pub fn new(k: Level, terms: Vec<SymTensor<S>>) -> Self {
        PolyOp { k, terms }
    }

    pub fn level(&self) -> Level {
        self.k
    }

    pub fn terms(&self) -> &[SymTensor<S>] {
        &self.terms
    }

    pub fn to_diffop(&self) -> DiffOp<S> {
        let mut words = SymmetricWords::new(self.k);
        self.terms
            .iter()
            .fold(DiffOp::zero(self.k), |acc, t| acc.add(&words.nabla_power(t)))
    }

    /// Equality as operators.
    pub fn same_operator(&self, other: &Self) -> bool {
        self.k == other.k && self.to_diffop() == other.to_diffop()
    }
}

/// Memoized sums `Σ_{words with j y's} ∇_{a₁}⋯∇_{aₙ}` in normal order.
struct SymmetricWords<S: Scalar> {
    k: Level,
    memo: HashMap<(u32, u32), DiffOp<S>>,
}

impl<S: Scalar> SymmetricWords<S> {
    fn new(k: Level) -> Self {
        SymmetricWords {
            k,
            memo: HashMap::new(),
        }
    }

    fn get(&mut self, n: u32, j: u32) -> DiffOp<S> {
        if let Some(d) = self.memo.get(&(n, j)) {
            return d.clone();
        }
        let d = if n == 0 {
            DiffOp::scalar(self.k, S::one())
        } else {
            let mut d = DiffOp::zero(self.k);
            if j < n {
                d = d.add(&DiffOp::nabla_x(self.k).mul(&self.get(n - 1, j)));
            }
            if j > 0 {
                d = d.add(&DiffOp::nabla_y(self.k).mul(&self.get(n - 1, j - 1)));
            }
            d
        };
        self.memo.insert((n, j), d.clone());
        d
    }

    fn nabla_power(&mut self, t: &SymTensor<S>) -> DiffOp<S> {
        let n = t.order();
        let mut out = DiffOp::zero(self.k);
        for (j, c) in t.components().iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&DiffOp::multiplication(self.k, c.clone()).mul(&self.get(n, j as u32)));
            }
        }
        out
    }
}

/// `∇ⁿ_T` as a normal-ordered operator.
pub fn nabla_power<S: Scalar>(k: Level, t: &SymTensor<S>) -> DiffOp<S> {
    SymmetricWords::new(k).nabla_power(t)
}

/// Symbols `σ_0, …, σ_n` of `d`, highest order peeled first.
pub fn symbol_decompose<S: Scalar>(d: &DiffOp<S>) -> Vec<SymTensor<S>> {
    let Some(top) = d.order() else {
        return vec![SymTensor::zero(0)];
    };
    let mut words = SymmetricWords::new(d.level());
    let mut rest = d.clone();
    let mut symbols = vec![SymTensor::zero(0); top as usize + 1];
    for n in (0..=top).rev() {
        let comps = (0..=n)
            .map(|j| rest.coeff(n - j, j).scale(&(S::one() / binom::<S>(n, j))))
            .collect();
        let t = SymTensor::new(comps);
        rest = rest.sub(&words.nabla_power(&t));
        symbols[n as usize] = t;
    }
    debug_assert!(rest.is_zero());
    symbols
}

pub fn from_symbols<S: Scalar>(k: Level, symbols: &[SymTensor<S>]) -> PolyOp<S> {
    PolyOp::new(k, symbols.iter().filter(|t| !t.is_zero()).cloned().collect())
}

/// `|T|_g` at one point, contracting every index pair with `g`.
fn tensor_norm(t: &SymTensor<C64>, g: &[[f64; 2]; 2], x: f64, y: f64) -> f64 {
    let n = t.order() as usize;
    let tuples: Vec<Vec<usize>> = (0..1usize << n)
        .map(|bits| (0..n).map(|p| (bits >> p) & 1).collect())
        .collect();
    let vals: Vec<C64> = tuples.iter().map(|a| t.entry(a).eval(x, y)).collect();
    let mut acc = C64::default();
    for (a, ta) in tuples.iter().zip(&vals) {
        for (b, tb) in tuples.iter().zip(&vals) {
            let w: f64 = a.iter().zip(b).map(|(&p, &q)| g[p][q]).product();
            acc += ta * tb.conj() * w;
        }
    }
    acc.re.max(0.0).sqrt()
}

/// `Σ_n sup_{[−R,R]²} |σ_n(D)|_g`, the sup taken over a uniform grid that
/// contains the corners.
pub fn symbol_norm<S: Scalar>(d: &DiffOp<S>, geom: &GeometryData, radius: f64) -> f64 {
    const GRID: usize = 32;
    let g = geom.g();
    let symbols = symbol_decompose(&d.map(|c| c.to_c64()));
    let pts: Vec<f64> = (0..=GRID)
        .map(|i| -radius + 2.0 * radius * i as f64 / GRID as f64)
        .collect();
    symbols
        .iter()
        .map(|t| {
            pts.iter()
                .flat_map(|&x| pts.iter().map(move |&y| (x, y)))
                .map(|(x, y)| tensor_norm(t, &g, x, y))
                .fold(0.0, f64::max)
        })
        .sum()
}

/// A random polynomial of degree `≤ max_degree` with small Gaussian-integer
/// over small-denominator coefficients.
pub fn random_poly<S: Scalar, R: Rng>(rng: &mut R, max_degree: u32) -> Poly2<S> {
    let mut p = Poly2::zero();
    for d in 0..=max_degree {
        for i in 0..=d {
            if rng.gen_bool(0.5) {
                let re = S::from_ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3));
                let im = S::from_ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3));
                p = p.add(&Poly2::monomial(re + im * S::imag_unit(), i, d - i));
            }
        }
    }
    p
}

pub fn random_polyop<S: Scalar, R: Rng>(rng: &mut R, k: Level, max_order: u32, max_degree: u32) -> PolyOp<S> {
    let count = rng.gen_range(1..=4);
    let terms = (0..count)
        .map(|_| {
            let n = rng.gen_range(0..=max_order);
            SymTensor::new((0..=n).map(|_| random_poly(rng, max_degree)).collect())
        })
        .collect();
    PolyOp::new(k, terms)
}
