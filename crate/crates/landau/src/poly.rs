//! Polynomials in the plane coordinates `x, y`.

use std::collections::BTreeMap;
use std::fmt;

use hwconn_core::Scalar;
use num_complex::Complex64 as C64;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("cannot parse polynomial term {0:?}")]
    Parse(String),
    #[error("degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: u32, max: u32 },
}

/// `Σ c_{ij} x^i y^j`, keyed by `(i, j)`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly2<S> {
    terms: BTreeMap<(u32, u32), S>,
}

impl<S: Scalar> Poly2<S> {
    pub fn zero() -> Self {
        Poly2 {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: S) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: S, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term((i, j), c);
        p
    }

    pub fn x() -> Self {
        Self::monomial(S::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(S::one(), 0, 1)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), S)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: (u32, u32), c: S) {
        let slot = self.terms.entry(e).or_insert_with(S::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), S> {
        &self.terms
    }

    pub fn coeff(&self, i: u32, j: u32) -> S {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (&e, c) in &other.terms {
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, z: &S) -> Self {
        Self::from_terms(self.terms.iter().map(|(&e, c)| (e, c.clone() * z.clone())))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (&(i, j), a) in &self.terms {
            for (&(u, v), b) in &other.terms {
                p.add_term((i + u, j + v), a.clone() * b.clone());
            }
        }
        p
    }

    /// `∂_x^a ∂_y^b`.
    pub fn derivative(&self, a: u32, b: u32) -> Self {
        Self::from_terms(self.terms.iter().filter(|((i, j), _)| *i >= a && *j >= b).map(|(&(i, j), c)| {
            let f = falling(i, a) * falling(j, b);
            ((i - a, j - b), c.clone() * S::from_i64(f))
        }))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly2<T> {
        Poly2::from_terms(self.terms.iter().map(|(&e, c)| (e, f(c))))
    }

    pub fn to_c64(&self) -> Poly2<C64> {
        self.map(|c| c.to_c64())
    }

    pub fn eval(&self, x: f64, y: f64) -> C64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| c.to_c64() * x.powi(i as i32) * y.powi(j as i32))
            .sum()
    }
}

fn falling(n: u32, k: u32) -> i64 {
    (0..k).map(|t| (n - t) as i64).product()
}

impl Poly2<C64> {
    /// Parses sums of terms such as `2*x^2*y`, `-0.5*y`, `3`, `x*y`, `(1+2i)*x`.
    pub fn parse(text: &str) -> Result<Self, PolyError> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(PolyError::Parse(text.into()));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let mut depth = 0;
        let bytes: Vec<char> = cleaned.chars().collect();
        for (pos, &ch) in bytes.iter().enumerate() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '+' | '-' if depth == 0 && pos > start && bytes[pos - 1] != '^' && bytes[pos - 1] != 'e' => {
                    terms.push(bytes[start..pos].iter().collect::<String>());
                    start = pos;
                }
                _ => {}
            }
        }
        terms.push(bytes[start..].iter().collect());
        let mut p = Poly2::zero();
        for t in terms {
            let (e, c) = parse_term(&t).ok_or_else(|| PolyError::Parse(t.clone()))?;
            p.add_term(e, c);
        }
        Ok(p)
    }
}

fn parse_term(t: &str) -> Option<((u32, u32), C64)> {
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.strip_prefix('+').unwrap_or(t)),
    };
    let mut coeff = C64::new(sign, 0.0);
    let (mut i, mut j) = (0, 0);
    for factor in body.split('*') {
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (b, e.parse::<u32>().ok()?),
            None => (factor, 1),
        };
        match base {
            "x" => i += exp,
            "y" => j += exp,
            "" => return None,
            _ => coeff *= parse_number(base)?.powu(exp),
        }
    }
    Some(((i, j), coeff))
}

fn parse_number(s: &str) -> Option<C64> {
    let s = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(s);
    if let Ok(v) = s.parse::<f64>() {
        return Some(C64::new(v, 0.0));
    }
    s.parse::<C64>().ok()
}

impl<S: Scalar> fmt::Debug for Poly2<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(i, j), c)| format!("({:?})*x^{i}*y^{j}", c.to_c64()))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
