//! Letter-level string rewriting, independent of the closed-form product.
//!
//! Used as an oracle: reducing a raw word with different redex choices must
//! land on the same normal form as multiplying its letters.

use std::collections::BTreeMap;

use rand::Rng;

use super::{AlgebraElement, Mono, Word};
use crate::scalar::{Level, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Delta,
    B,
    Bbar,
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

/// Right-hand side of the rule for the pair `(x, y)`, if any: a list of
/// `(replacement, coefficient)` with the coefficient an integer multiple of `k`
/// or a sign.
fn rule(k: i64, x: Letter, y: Letter) -> Option<Vec<(Vec<Letter>, i64)>> {
    use Letter::*;
    match (x, y) {
        (B, Delta) => Some(vec![(vec![Delta, B], 1), (vec![B], 4 * k)]),
        (Bbar, Delta) => Some(vec![(vec![Delta, Bbar], 1), (vec![Bbar], -4 * k)]),
        (Bbar, B) => Some(vec![(vec![B, Bbar], 1), (vec![C], -1)]),
        (C, y) if y != C => Some(vec![(vec![y, C], 1)]),
        _ => None,
    }
}

fn find_redex(k: i64, w: &[Letter], strategy: Strategy) -> Option<usize> {
    let mut positions = (0..w.len().saturating_sub(1)).filter(|&i| rule(k, w[i], w[i + 1]).is_some());
    match strategy {
        Strategy::Leftmost => positions.next(),
        Strategy::Rightmost => positions.next_back(),
    }
}

fn to_word(w: &[Letter]) -> Word {
    let mut segments = vec![Mono::ONE];
    let mut c = 0;
    for l in w {
        let m = segments.last_mut().expect("nonempty");
        match l {
            Letter::Delta => m.delta += 1,
            Letter::B => m.b += 1,
            Letter::Bbar => m.bbar += 1,
            Letter::C => c += 1,
            Letter::D => segments.push(Mono::ONE),
        }
    }
    Word::new(segments, c)
}

/// Normal form of `coeff * w` by exhaustive rewriting with the given strategy.
pub fn reduce_letters<S: Scalar>(
    k: Level,
    w: &[Letter],
    coeff: S,
    strategy: Strategy,
) -> AlgebraElement<S> {
    let kk = k.as_i64();
    let mut pending: BTreeMap<Vec<Letter>, S> = BTreeMap::new();
    pending.insert(w.to_vec(), coeff);
    let mut done = AlgebraElement::zero(k);
    while let Some((word, z)) = pending.pop_first() {
        if z.is_zero() {
            continue;
        }
        match find_redex(kk, &word, strategy) {
            None => done = done.add(&AlgebraElement::term(k, to_word(&word), z)),
            Some(i) => {
                for (rep, n) in rule(kk, word[i], word[i + 1]).expect("redex") {
                    let mut next = word[..i].to_vec();
                    next.extend(rep);
                    next.extend_from_slice(&word[i + 2..]);
                    let add = z.clone() * S::from_i64(n);
                    let slot = pending.entry(next).or_insert_with(S::zero);
                    *slot = slot.clone() + add;
                }
            }
        }
    }
    done
}

/// Product of the single-letter elements, via the closed-form multiplication.
pub fn letters_product<S: Scalar>(k: Level, w: &[Letter]) -> AlgebraElement<S> {
    w.iter().fold(AlgebraElement::one(k), |acc, l| {
        let x = match l {
            Letter::Delta => AlgebraElement::delta(k),
            Letter::B => AlgebraElement::b(k),
            Letter::Bbar => AlgebraElement::bbar(k),
            Letter::C => AlgebraElement::c(k),
            Letter::D => AlgebraElement::d(k),
        };
        acc.mul(&x)
    })
}

pub fn random_letters<R: Rng>(rng: &mut R, max_len: usize) -> Vec<Letter> {
    use Letter::*;
    const ALL: [Letter; 5] = [Delta, B, Bbar, C, D];
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| ALL[rng.gen_range(0..ALL.len())]).collect()
}
