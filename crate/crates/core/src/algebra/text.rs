//! Canonical text form of exact elements.
//!
//! Terms appear in word order as `(a/b+c/d*i)*word`, joined by ` + `. A word
//! is `*`-separated letters `Delta`, `b`, `bbar`, `D`, `c` with optional
//! `^n` exponents, or `1` when empty. The zero element is `0`.

use std::fmt;

use thiserror::Error;

use super::{AlgebraElement, Mono, Word};
use crate::scalar::{gq_to_string, parse_gq, Level};
use crate::GaussianRational;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot parse algebra element: {0}")]
pub struct ParseElementError(pub String);

fn push_letter(out: &mut Vec<String>, name: &str, n: u32) {
    match n {
        0 => {}
        1 => out.push(name.to_string()),
        _ => out.push(format!("{name}^{n}")),
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, m) in self.segments.iter().enumerate() {
            if i > 0 {
                parts.push("D".to_string());
            }
            push_letter(&mut parts, "Delta", m.delta);
            push_letter(&mut parts, "b", m.b);
            push_letter(&mut parts, "bbar", m.bbar);
        }
        push_letter(&mut parts, "c", self.c);
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

fn parse_word(s: &str) -> Option<Word> {
    let mut segments = vec![Mono::ONE];
    let mut c = 0;
    if s == "1" {
        return Some(Word::new(segments, c));
    }
    for tok in s.split('*') {
        let (name, n) = match tok.split_once('^') {
            Some((name, n)) => (name, n.parse::<u32>().ok()?),
            None => (tok, 1),
        };
        let m = segments.last_mut()?;
        match name {
            "Delta" => m.delta += n,
            "b" => m.b += n,
            "bbar" => m.bbar += n,
            "c" => c += n,
            "D" => {
                for _ in 0..n {
                    segments.push(Mono::ONE);
                }
            }
            _ => return None,
        }
    }
    Some(Word::new(segments, c))
}

impl AlgebraElement<GaussianRational> {
    pub fn to_canonical_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(w, z)| format!("({})*{}", gq_to_string(z), w))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn parse(k: Level, s: &str) -> Result<Self, ParseElementError> {
        let err = || ParseElementError(s.to_string());
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero(k));
        }
        let mut out = Self::zero(k);
        for term in s.split(" + ") {
            let rest = term.strip_prefix('(').ok_or_else(err)?;
            let (coeff, word) = rest.split_once(")*").ok_or_else(err)?;
            let z = parse_gq(coeff).map_err(|_| err())?;
            let w = parse_word(word).ok_or_else(err)?;
            out = out.add(&Self::term(k, w, z));
        }
        Ok(out)
    }
}

impl fmt::Display for AlgebraElement<GaussianRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gq, gq_int};

    type E = AlgebraElement<GaussianRational>;

    #[test]
    fn golden_strings() {
        let k = Level::new(1).unwrap();
        let x = E::bbar(k).mul(&E::b(k)).mul(&E::b(k));
        assert_eq!(
            x.to_canonical_string(),
            "(-2/1+0/1*i)*b*c + (1/1+0/1*i)*b^2*bbar"
        );
        assert_eq!(E::zero(k).to_canonical_string(), "0");
        assert_eq!(E::one(k).to_canonical_string(), "(1/1+0/1*i)*1");
        let y = E::delta(k).mul(&E::d(k)).mul(&E::delta(k)).scale(&gq((1, 2), (-1, 3)));
        assert_eq!(y.to_canonical_string(), "(1/2-1/3*i)*Delta*D*Delta");
    }

    #[test]
    fn round_trip() {
        let k = Level::new(2).unwrap();
        let x = E::delta(k)
            .mul(&E::d(k))
            .mul(&E::b_combo(k, -1))
            .add(&E::c(k).scale(&gq_int(5)))
            .mul(&E::delta(k).pow(2));
        let s = x.to_canonical_string();
        assert_eq!(E::parse(k, &s).unwrap(), x);
        assert!(E::parse(k, "(1/1+0/1*i)*q").is_err());
        assert!(E::parse(k, "garbage").is_err());
    }
}
