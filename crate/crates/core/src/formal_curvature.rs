//! Flatness of the formal connection, checked with algebra-valued forms.
//!
//! Two parameter directions `x, y` carry `b(∂_y) = i b(∂_x)` and
//! `b̄(∂_y) = −i b̄(∂_x)`, so `[b∧b]` and `[b̄∧b̄]` vanish and
//! `[b∧b̄](∂_x, ∂_y) = −2i c`. Flatness of the exact connection supplies
//! `db = [b∧b̄]/(4k) = −db̄`. The degree-`l` curvature coefficient is
//!
//! `−((ik)^l/2k) d(b − (−1)^l b̄) + ((ik)^l/8k²) Σ_{n+m=l} [(b − (−1)^n b̄)∧(b − (−1)^m b̄)]`.

use crate::algebra::{AlgebraElement, AlgebraError};
use crate::forms::{wedge_bracket, FormsError, OperatorForm, Poly};
use crate::scalar::{Level, Scalar};

#[derive(Debug, thiserror::Error)]
pub enum CurvatureError {
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn one_form<S: Scalar>(k: Level, x: AlgebraElement<S>, y: AlgebraElement<S>) -> OperatorForm<AlgebraElement<S>> {
    let proto = AlgebraElement::zero(k);
    let mut f = OperatorForm::new(1, 2, &proto).expect("1 ≤ 2");
    f.set(vec![0], Poly::constant(2, x)).expect("valid");
    f.set(vec![1], Poly::constant(2, y)).expect("valid");
    f
}

/// The 1-forms `b` and `b̄` on the two-direction parameter space.
pub fn b_forms<S: Scalar>(k: Level) -> (OperatorForm<AlgebraElement<S>>, OperatorForm<AlgebraElement<S>>) {
    let i = S::imag_unit();
    let b = AlgebraElement::b(k);
    let bb = AlgebraElement::bbar(k);
    (
        one_form(k, b.clone(), b.scale(&i)),
        one_form(k, bb.clone(), bb.scale(&-i)),
    )
}

fn parity(n: u32) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// The degree-`l` curvature 2-form.
pub fn curvature_coefficient<S: Scalar>(
    k: Level,
    l: u32,
) -> Result<OperatorForm<AlgebraElement<S>>, CurvatureError> {
    let (b, bb) = b_forms::<S>(k);
    let beta = |n: u32| b.add(&bb.int_multiple(-parity(n)));
    let bracket = wedge_bracket(&b, &bb)?;
    let kk = S::from_i64(k.as_i64());
    let db = bracket.scaled(&(S::one() / (S::from_i64(4) * kk.clone())));
    let dbb = db.neg();
    let ik_l = S::ik_pow(k, 1, l);
    let linear = db
        .add(&dbb.int_multiple(-parity(l)))?
        .scaled(&(-(ik_l.clone() / (S::from_i64(2) * kk.clone()))));
    let mut quad = OperatorForm::zero(2, 2, &AlgebraElement::zero(k));
    for n in 1..l {
        quad = quad.add(&wedge_bracket(&beta(n)?, &beta(l - n)?)?)?;
    }
    let quad = quad.scaled(&(ik_l / (S::from_i64(8) * kk.clone() * kk)));
    Ok(linear.add(&quad)?)
}

/// Outcome of the check at one degree.
#[derive(Debug, Clone)]
pub struct CurvatureCheck<S: Scalar> {
    pub degree: u32,
    /// The `(x, y)` component of the curvature 2-form.
    pub element: AlgebraElement<S>,
    /// Its commutator with the free symbol `D`.
    pub action_on_d: AlgebraElement<S>,
}

impl<S: Scalar> CurvatureCheck<S> {
    pub fn is_flat(&self) -> bool {
        self.element.is_zero() && self.action_on_d.is_zero()
    }
}

pub fn check_flatness<S: Scalar>(k: Level, l: u32) -> Result<CurvatureCheck<S>, CurvatureError> {
    let form = curvature_coefficient::<S>(k, l)?;
    let comp = form.component(&[0, 1]);
    let mut element = AlgebraElement::zero(k);
    for (_, c) in comp.terms() {
        element = element.add(c);
    }
    let action_on_d = element.commutator(&AlgebraElement::d(k))?;
    Ok(CurvatureCheck {
        degree: l,
        element,
        action_on_d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::gq;
    use crate::GaussianRational as Gq;

    #[test]
    fn like_type_brackets_vanish() {
        let k = Level::new(2).unwrap();
        let (b, bb) = b_forms::<Gq>(k);
        assert!(wedge_bracket(&b, &b).unwrap().is_zero());
        assert!(wedge_bracket(&bb, &bb).unwrap().is_zero());
        let mixed = wedge_bracket(&b, &bb).unwrap().component(&[0, 1]);
        let expect = Poly::constant(2, AlgebraElement::c(k).scale(&gq((0, 1), (-2, 1))));
        assert_eq!(mixed, expect);
    }

    #[test]
    fn flat_in_low_degrees() {
        for kk in 1..=3 {
            let k = Level::new(kk).unwrap();
            for l in 1..=6 {
                let r = check_flatness::<Gq>(k, l).unwrap();
                assert!(r.is_flat(), "k={kk} l={l}: {:?}", r.element);
            }
        }
    }
}
