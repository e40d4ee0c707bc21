//! Operator-valued differential forms on a parameter space `R^m` with
//! polynomial parameter dependence.
//!
//! A `p`-form stores one coefficient per strictly increasing index tuple.
//! The bracket is `[φ∧ψ] = Σ [φ_I, ψ_J] dx^I ∧ dx^J`.

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

use crate::scalar::{Module, Ring, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormsError {
    #[error("degree {degree} exceeds parameter dimension {dim}")]
    DegreeTooLarge { degree: usize, dim: usize },
    #[error("index tuple {0:?} is not strictly increasing or out of range")]
    BadIndices(Vec<usize>),
    #[error("forms live on parameter spaces of dimension {0} and {1}")]
    MismatchedDimension(usize, usize),
    #[error("coefficient rings differ")]
    MismatchedRings,
}

/// Polynomial in `nvars` commuting parameters with coefficients in `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<R> {
    nvars: usize,
    zero: R,
    terms: BTreeMap<Vec<u32>, R>,
}

impl<R: Ring> Poly<R> {
    pub fn zero(nvars: usize, proto: &R) -> Self {
        Poly {
            nvars,
            zero: proto.zero_like(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: R) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    /// `c · x^exps`.
    pub fn monomial(exps: Vec<u32>, c: R) -> Self {
        let mut p = Poly::zero(exps.len(), &c);
        p.add_term(exps, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &R)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn proto(&self) -> &R {
        &self.zero
    }

    fn add_term(&mut self, exps: Vec<u32>, c: R) {
        if c.vanishes() {
            return;
        }
        let next = match self.terms.remove(&exps) {
            Some(prev) => prev.plus(&c),
            None => c,
        };
        if !next.vanishes() {
            self.terms.insert(exps, next);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Poly {
            nvars: self.nvars,
            zero: self.zero.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.negated())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Product with coefficient order preserved (`self` on the left).
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Poly::zero(self.nvars, &self.zero);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.times(c2));
            }
        }
        out
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Poly::zero(self.nvars, &self.zero);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c.int_multiple(e[var] as i64));
        }
        out
    }

    pub fn scaled<S>(&self, z: &S) -> Self
    where
        R: Module<S>,
    {
        let mut out = Poly::zero(self.nvars, &self.zero);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.scaled(z));
        }
        out
    }
}

/// Sign of the permutation sorting `idx`, or `None` if an index repeats.
fn sort_sign(idx: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorForm<R> {
    degree: usize,
    dim: usize,
    zero: R,
    coeffs: BTreeMap<Vec<usize>, Poly<R>>,
}

impl<R: Ring> OperatorForm<R> {
    /// Zero form; degrees above `dim` are allowed here and stay zero.
    pub fn zero(degree: usize, dim: usize, proto: &R) -> Self {
        OperatorForm {
            degree,
            dim,
            zero: proto.zero_like(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn new(degree: usize, dim: usize, proto: &R) -> Result<Self, FormsError> {
        if degree > dim {
            return Err(FormsError::DegreeTooLarge { degree, dim });
        }
        Ok(Self::zero(degree, dim, proto))
    }

    /// 0-form with the given coefficient.
    pub fn function(dim: usize, p: Poly<R>) -> Self {
        let mut f = Self::zero(0, dim, p.proto());
        f.insert(Vec::new(), p);
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly<R>)> {
        self.coeffs.iter()
    }

    /// Coefficient on `dx^{i_1} ∧ … ∧ dx^{i_p}` for any index order.
    pub fn component(&self, idx: &[usize]) -> Poly<R> {
        let zero = Poly::zero(self.dim, &self.zero);
        match sort_sign(idx) {
            Some((sorted, sign)) => match self.coeffs.get(&sorted) {
                Some(p) if sign > 0 => p.clone(),
                Some(p) => p.neg(),
                None => zero,
            },
            None => zero,
        }
    }

    /// Sets the coefficient on a strictly increasing tuple.
    pub fn set(&mut self, idx: Vec<usize>, p: Poly<R>) -> Result<(), FormsError> {
        let ok = idx.len() == self.degree
            && idx.windows(2).all(|w| w[0] < w[1])
            && idx.iter().all(|&i| i < self.dim);
        if !ok {
            return Err(FormsError::BadIndices(idx));
        }
        self.coeffs.remove(&idx);
        self.insert(idx, p);
        Ok(())
    }

    fn insert(&mut self, idx: Vec<usize>, p: Poly<R>) {
        let next = match self.coeffs.remove(&idx) {
            Some(prev) => prev.add(&p),
            None => p,
        };
        if !next.is_zero() {
            self.coeffs.insert(idx, next);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check(&self, other: &Self) -> Result<(), FormsError> {
        if self.dim != other.dim {
            return Err(FormsError::MismatchedDimension(self.dim, other.dim));
        }
        if !self.zero.same_ring(&other.zero) {
            return Err(FormsError::MismatchedRings);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, FormsError> {
        self.check(other)?;
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (i, p) in &other.coeffs {
            out.insert(i.clone(), p.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.degree, self.dim, &self.zero);
        for (i, p) in &self.coeffs {
            out.insert(i.clone(), p.neg());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FormsError> {
        self.add(&other.neg())
    }

    pub fn scaled<S>(&self, z: &S) -> Self
    where
        R: Module<S>,
    {
        let mut out = Self::zero(self.degree, self.dim, &self.zero);
        for (i, p) in &self.coeffs {
            out.insert(i.clone(), p.scaled(z));
        }
        out
    }

    pub fn int_multiple(&self, n: i64) -> Self {
        let mut out = Self::zero(self.degree, self.dim, &self.zero);
        for (i, p) in &self.coeffs {
            let mut q = Poly::zero(self.dim, &self.zero);
            for (e, c) in p.terms() {
                q.add_term(e.clone(), c.int_multiple(n));
            }
            out.insert(i.clone(), q);
        }
        out
    }

    /// Applies a map to every coefficient.
    pub fn map_coeffs(&self, mut f: impl FnMut(&R) -> R) -> Self {
        let mut out = Self::zero(self.degree, self.dim, &self.zero);
        for (i, p) in &self.coeffs {
            let mut q = Poly::zero(self.dim, &self.zero);
            for (e, c) in p.terms() {
                q.add_term(e.clone(), f(c));
            }
            out.insert(i.clone(), q);
        }
        out
    }
}

/// `[φ∧ψ]`; of degree `a + b`, zero when that exceeds the dimension.
pub fn wedge_bracket<R: Ring>(
    phi: &OperatorForm<R>,
    psi: &OperatorForm<R>,
) -> Result<OperatorForm<R>, FormsError> {
    phi.check(psi)?;
    let mut out = OperatorForm::zero(phi.degree + psi.degree, phi.dim, &phi.zero);
    if out.degree > out.dim {
        return Ok(out);
    }
    for (i, p) in &phi.coeffs {
        for (j, q) in &psi.coeffs {
            let joined: Vec<usize> = i.iter().chain(j).copied().collect();
            if let Some((sorted, sign)) = sort_sign(&joined) {
                let c = p.commutator(q);
                out.insert(sorted, if sign > 0 { c } else { c.neg() });
            }
        }
    }
    Ok(out)
}

/// Exterior differential with respect to the parameters.
pub fn exterior_d<R: Ring>(phi: &OperatorForm<R>) -> OperatorForm<R> {
    let mut out = OperatorForm::zero(phi.degree + 1, phi.dim, &phi.zero);
    if out.degree > out.dim {
        return out;
    }
    for (i, p) in &phi.coeffs {
        for j in 0..phi.dim {
            if i.contains(&j) {
                continue;
            }
            let pos = i.iter().filter(|&&x| x < j).count();
            let mut sorted = i.clone();
            sorted.insert(pos, j);
            let dp = p.derivative(j);
            out.insert(sorted, if pos % 2 == 0 { dp } else { dp.neg() });
        }
    }
    out
}

/// `d^A φ = dφ + [A∧φ]` for a connection 1-form `A`.
pub fn twisted_d<R: Ring>(
    phi: &OperatorForm<R>,
    a: &OperatorForm<R>,
) -> Result<OperatorForm<R>, FormsError> {
    assert_eq!(a.degree, 1, "twisting form must be a 1-form");
    exterior_d(phi).add(&wedge_bracket(a, phi)?)
}

fn parity(n: usize) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `(−1)^{ac}[φ∧[ψ∧ρ]] + (−1)^{ba}[ψ∧[ρ∧φ]] + (−1)^{cb}[ρ∧[φ∧ψ]]`.
pub fn jacobi_check<R: Ring>(
    phi: &OperatorForm<R>,
    psi: &OperatorForm<R>,
    rho: &OperatorForm<R>,
) -> Result<OperatorForm<R>, FormsError> {
    let (a, b, c) = (phi.degree, psi.degree, rho.degree);
    let t1 = wedge_bracket(phi, &wedge_bracket(psi, rho)?)?.int_multiple(parity(a * c));
    let t2 = wedge_bracket(psi, &wedge_bracket(rho, phi)?)?.int_multiple(parity(b * a));
    let t3 = wedge_bracket(rho, &wedge_bracket(phi, psi)?)?.int_multiple(parity(c * b));
    t1.add(&t2)?.add(&t3)
}

/// Residual of `d[φ∧ψ] = [dφ∧ψ] + (−1)^a [φ∧dψ]`, optionally twisted by `A`.
pub fn leibniz_residual<R: Ring>(
    phi: &OperatorForm<R>,
    psi: &OperatorForm<R>,
    a: Option<&OperatorForm<R>>,
) -> Result<OperatorForm<R>, FormsError> {
    let d = |f: &OperatorForm<R>| match a {
        Some(a) => twisted_d(f, a),
        None => Ok(exterior_d(f)),
    };
    let lhs = d(&wedge_bracket(phi, psi)?)?;
    let r1 = wedge_bracket(&d(phi)?, psi)?;
    let r2 = wedge_bracket(phi, &d(psi)?)?.int_multiple(parity(phi.degree));
    lhs.sub(&r1.add(&r2)?)
}

/// Residual of `[φ∧ψ] + (−1)^{ab}[ψ∧φ]`.
pub fn antisymmetry_residual<R: Ring>(
    phi: &OperatorForm<R>,
    psi: &OperatorForm<R>,
) -> Result<OperatorForm<R>, FormsError> {
    let l = wedge_bracket(phi, psi)?;
    let r = wedge_bracket(psi, phi)?.int_multiple(parity(phi.degree * psi.degree));
    l.add(&r)
}

/// Square matrix over a scalar field, as a ring.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    /// Row-major integer entries.
    pub fn from_ints(n: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), n * n, "need n² entries");
        DenseMatrix {
            n,
            data: entries.iter().map(|&x| S::from_i64(x)).collect(),
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        DenseMatrix { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }
}

impl<S: Scalar> Ring for DenseMatrix<S> {
    fn zero_like(&self) -> Self {
        Self::zeros(self.n)
    }
    fn one_like(&self) -> Self {
        Self::identity(self.n)
    }
    fn plus(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "matrix sizes differ");
        DenseMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
    fn negated(&self) -> Self {
        DenseMatrix {
            n: self.n,
            data: self.data.iter().map(|a| -a.clone()).collect(),
        }
    }
    fn times(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "matrix sizes differ");
        let n = self.n;
        Self::from_fn(n, |i, j| {
            (0..n).fold(S::zero(), |acc, l| acc + self.get(i, l).clone() * rhs.get(l, j).clone())
        })
    }
    fn vanishes(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
    fn same_ring(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl<S: Scalar> Module<S> for DenseMatrix<S> {
    fn scaled(&self, c: &S) -> Self {
        DenseMatrix {
            n: self.n,
            data: self.data.iter().map(|a| c.clone() * a.clone()).collect(),
        }
    }
}

/// Random `p`-form on `R^dim` with `n×n` integer-matrix coefficients and
/// polynomial dependence of total degree at most `max_deg`.
pub fn random_matrix_form<S: Scalar, G: Rng>(
    rng: &mut G,
    degree: usize,
    dim: usize,
    n: usize,
    max_deg: u32,
) -> OperatorForm<DenseMatrix<S>> {
    let proto = DenseMatrix::<S>::zeros(n);
    let mut form = OperatorForm::new(degree, dim, &proto).expect("degree fits");
    for idx in increasing_tuples(dim, degree) {
        let mut p = Poly::zero(dim, &proto);
        for _ in 0..rng.gen_range(1..=3) {
            let mut exps = vec![0u32; dim];
            let total = rng.gen_range(0..=max_deg);
            for _ in 0..total {
                exps[rng.gen_range(0..dim)] += 1;
            }
            let m = DenseMatrix::from_fn(n, |_, _| S::from_i64(rng.gen_range(-3..=3)));
            p = p.add(&Poly::monomial(exps, m));
        }
        form.set(idx, p).expect("valid tuple");
    }
    form
}

/// All strictly increasing tuples of length `p` from `0..dim`.
pub fn increasing_tuples(dim: usize, p: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, dim: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            go(i + 1, dim, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, dim, p, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GaussianRational as Gq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = DenseMatrix<Gq>;

    fn const_form(degree: usize, dim: usize, entries: &[(Vec<usize>, M)]) -> OperatorForm<M> {
        let mut f = OperatorForm::new(degree, dim, &M::zeros(2)).unwrap();
        for (i, m) in entries {
            f.set(i.clone(), Poly::constant(dim, m.clone())).unwrap();
        }
        f
    }

    #[test]
    fn zero_forms_bracket_is_commutator() {
        let a = M::from_ints(2, &[0, 1, 0, 0]);
        let b = M::from_ints(2, &[0, 0, 1, 0]);
        let fa = OperatorForm::function(2, Poly::constant(2, a.clone()));
        let fb = OperatorForm::function(2, Poly::constant(2, b.clone()));
        let br = wedge_bracket(&fa, &fb).unwrap();
        let expect = a.times(&b).minus(&b.times(&a));
        assert_eq!(br.component(&[]), Poly::constant(2, expect));
    }

    #[test]
    fn central_one_form_squares_to_zero() {
        let c = M::identity(2).int_multiple(3);
        let f = const_form(1, 2, &[(vec![0], c.clone()), (vec![1], c)]);
        assert!(wedge_bracket(&f, &f).unwrap().is_zero());
    }

    #[test]
    fn overflow_gives_zero() {
        let a = M::from_ints(2, &[1, 2, 3, 4]);
        let f = const_form(1, 1, &[(vec![0], a)]);
        let g = wedge_bracket(&f, &f).unwrap();
        assert_eq!(g.degree(), 2);
        assert!(g.is_zero());
        assert!(matches!(
            OperatorForm::new(3, 2, &M::zeros(2)),
            Err(FormsError::DegreeTooLarge { .. })
        ));
    }

    #[test]
    fn bad_indices_rejected() {
        let mut f = OperatorForm::new(2, 3, &M::zeros(2)).unwrap();
        assert!(f.set(vec![1, 0], Poly::constant(3, M::identity(2))).is_err());
        assert!(f.set(vec![0, 3], Poly::constant(3, M::identity(2))).is_err());
    }

    #[test]
    fn d_of_constant_and_d_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = const_form(1, 3, &[(vec![2], M::from_ints(2, &[1, 0, 0, 1]))]);
        assert!(exterior_d(&c).is_zero());
        for p in 0..=2 {
            for _ in 0..20 {
                let f = random_matrix_form::<Gq, _>(&mut rng, p, 3, 2, 3);
                assert!(exterior_d(&exterior_d(&f)).is_zero());
            }
        }
    }

    #[test]
    fn d_of_xy() {
        // d(xy · A) = y A dx + x A dy
        let a = M::from_ints(2, &[1, 2, 0, 1]);
        let f = OperatorForm::function(2, Poly::monomial(vec![1, 1], a.clone()));
        let df = exterior_d(&f);
        assert_eq!(df.component(&[0]), Poly::monomial(vec![0, 1], a.clone()));
        assert_eq!(df.component(&[1]), Poly::monomial(vec![1, 0], a));
    }

    #[test]
    fn lemma_identities_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (a, b, c, dim) in [(1, 1, 0, 2), (1, 1, 1, 3), (0, 1, 2, 3), (0, 0, 0, 1)] {
            for _ in 0..10 {
                let f = random_matrix_form::<Gq, _>(&mut rng, a, dim, 2, 2);
                let g = random_matrix_form::<Gq, _>(&mut rng, b, dim, 2, 2);
                let h = random_matrix_form::<Gq, _>(&mut rng, c, dim, 2, 2);
                let conn = random_matrix_form::<Gq, _>(&mut rng, 1, dim.max(1), 2, 1);
                assert!(antisymmetry_residual(&f, &g).unwrap().is_zero());
                assert!(leibniz_residual(&f, &g, None).unwrap().is_zero());
                assert!(leibniz_residual(&f, &g, Some(&conn)).unwrap().is_zero());
                assert!(jacobi_check(&f, &g, &h).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn mismatched_dimensions() {
        let f = OperatorForm::<M>::zero(1, 2, &M::zeros(2));
        let g = OperatorForm::<M>::zero(1, 3, &M::zeros(2));
        assert!(matches!(wedge_bracket(&f, &g), Err(FormsError::MismatchedDimension(2, 3))));
        let h = OperatorForm::<M>::zero(1, 2, &M::zeros(3));
        assert!(matches!(wedge_bracket(&f, &h), Err(FormsError::MismatchedRings)));
    }
}
