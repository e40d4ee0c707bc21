use super::{AlgebraElement, AlgebraError, Mono, Word};
use crate::recursion::CoeffTable;
use crate::scalar::{Level, Scalar};
use crate::series::{binomial, factorial, inv_t_series, inv_tbar_series, r_series, FormalSeries};

fn int<S: Scalar>(n: i64) -> S {
    S::from_i64(n)
}

fn frac<S: Scalar>(num: i64, den: i64) -> S {
    S::from_i64(num) / S::from_i64(den)
}

fn sign_pow(n: u32) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn fail<S: Scalar>(residual: &AlgebraElement<S>) -> AlgebraError {
    AlgebraError::IdentityViolated(format!("{residual:?}"))
}

/// `[b + sign·b̄, Δ^n]`, checked against the closed sum
/// `Σ_{l=1}^n C(n,l) (4k)^l Δ^{n−l} (b + sign·(−1)^l b̄)`.
pub fn delta_power_commutator<S: Scalar>(
    k: Level,
    sign: i64,
    n: u32,
) -> Result<AlgebraElement<S>, AlgebraError> {
    let lhs = AlgebraElement::b_combo(k, sign).commutator(&AlgebraElement::delta_pow(k, n))?;
    let mut rhs = AlgebraElement::zero(k);
    for l in 1..=n {
        let coeff = S::from_bigint(&binomial(n, l)) * crate::scalar::pow(&int(4 * k.as_i64()), l);
        let term = AlgebraElement::delta_pow(k, n - l)
            .mul(&AlgebraElement::b_combo(k, sign * sign_pow(l)))
            .scale(&coeff);
        rhs = rhs.add(&term);
    }
    let residual = lhs.sub(&rhs);
    if residual.is_zero() {
        Ok(lhs)
    } else {
        Err(fail(&residual))
    }
}

/// The derivation with `d_T Δ = −(b + b̄)`, `d_T D = 0`, `d_T c = 0`.
pub fn d_t<S: Scalar>(e: &AlgebraElement<S>) -> Result<AlgebraElement<S>, AlgebraError> {
    let k = e.level();
    let d_delta = AlgebraElement::b_combo(k, 1).neg();
    let mut out = AlgebraElement::zero(k);
    for (w, z) in e.terms() {
        if w.has_b() {
            return Err(AlgebraError::OutsideDerivationDomain(format!("{w:?}")));
        }
        let segs = w.segments();
        for (i, m) in segs.iter().enumerate() {
            for j in 0..m.delta {
                let mut left: Vec<Mono> = segs[..i].to_vec();
                left.push(Mono::new(j, 0, 0));
                let mut right = vec![Mono::new(m.delta - 1 - j, 0, 0)];
                right.extend_from_slice(&segs[i + 1..]);
                let l = AlgebraElement::term(k, Word::new(left, 0), z.clone());
                let r = AlgebraElement::term(k, Word::new(right, w.c_power()), S::one());
                out = out.add(&l.mul(&d_delta).mul(&r));
            }
        }
    }
    Ok(out)
}

/// `a = −(i/2) Δ`.
pub fn a_element<S: Scalar>(k: Level) -> AlgebraElement<S> {
    AlgebraElement::delta(k).scale(&(-S::imag_unit() / int(2)))
}

/// `P^(l)(D) = ad_a^l(D) / l!`.
pub fn p_op<S: Scalar>(k: Level, l: u32) -> AlgebraElement<S> {
    p_ops(k, l).pop().expect("nonempty")
}

/// `P^(0)(D), …, P^(l)(D)`.
pub fn p_ops<S: Scalar>(k: Level, l: u32) -> Vec<AlgebraElement<S>> {
    let a = a_element::<S>(k);
    let mut out = vec![AlgebraElement::d(k)];
    for j in 1..=l {
        let prev = out.last().expect("nonempty");
        let next = a.commutator(prev).expect("same level").scale(&frac(1, j as i64));
        out.push(next);
    }
    out
}

/// `ad_Δ^n(D)`.
pub fn ad_delta_power<S: Scalar>(k: Level, n: u32) -> AlgebraElement<S> {
    let delta = AlgebraElement::delta(k);
    (0..n).fold(AlgebraElement::d(k), |acc, _| delta.commutator(&acc).expect("same level"))
}

/// Residual of `d_T P^(l)(D) = Σ_{n=1}^{l} (2ik)^n/(4k·n!) [b − (−1)^n b̄, P^(l−n)(D)]`.
pub fn verify_adiff<S: Scalar>(k: Level, l: u32) -> Result<AlgebraElement<S>, AlgebraError> {
    let p = p_ops::<S>(k, l);
    let lhs = d_t(&p[l as usize])?;
    let mut rhs = AlgebraElement::zero(k);
    for n in 1..=l {
        let coeff = S::ik_pow(k, 1, n) * int(1 << n)
            / (int::<S>(4 * k.as_i64()) * S::from_bigint(&factorial(n)));
        let bracket = AlgebraElement::b_combo(k, -sign_pow(n)).commutator(&p[(l - n) as usize])?;
        rhs = rhs.add(&bracket.scale(&coeff));
    }
    Ok(lhs.sub(&rhs))
}

/// `S^(l)(D) = Σ_r C_r^l P^(l−r)(D)`.
pub fn s_op<S: Scalar>(table: &CoeffTable<S>, l: usize) -> Result<AlgebraElement<S>, AlgebraError> {
    let k = table.level();
    let row = table.row(l).ok_or(AlgebraError::MissingRow(l))?;
    let p = p_ops::<S>(k, l as u32);
    let mut out = AlgebraElement::zero(k);
    for (r, c) in row.iter().enumerate() {
        out = out.add(&p[l - r].scale(c));
    }
    Ok(out)
}

/// Residual of `d_T S^(l) = (1/2k) Σ_{n=1}^{l} (ik)^n [b − (−1)^n b̄, S^(l−n)]`.
pub fn verify_recursion<S: Scalar>(
    l: usize,
    table: &CoeffTable<S>,
) -> Result<AlgebraElement<S>, AlgebraError> {
    let k = table.level();
    let s: Vec<AlgebraElement<S>> = (0..=l).map(|j| s_op(table, j)).collect::<Result<_, _>>()?;
    let lhs = d_t(&s[l])?;
    let mut rhs = AlgebraElement::zero(k);
    for n in 1..=l {
        let coeff = S::ik_pow(k, 1, n as u32) / int(2 * k.as_i64());
        let bracket = AlgebraElement::b_combo(k, -sign_pow(n as u32)).commutator(&s[l - n])?;
        rhs = rhs.add(&bracket.scale(&coeff));
    }
    Ok(lhs.sub(&rhs))
}

fn constant<S: Scalar>(e: AlgebraElement<S>, order: usize) -> FormalSeries<AlgebraElement<S>> {
    FormalSeries::monomial(e, 0, order)
}

/// `Σ_n (r^n / n!) x_n` for a family of algebra elements `x_n`, with `r` the
/// gauge series (or its negative).
fn r_exponential<S: Scalar>(
    k: Level,
    order: usize,
    r: &FormalSeries<S>,
    mut x: impl FnMut(u32) -> Result<AlgebraElement<S>, AlgebraError>,
) -> Result<FormalSeries<AlgebraElement<S>>, AlgebraError> {
    let mut total = FormalSeries::zero(&AlgebraElement::zero(k), order);
    let mut r_n = FormalSeries::<S>::scalar_one(order);
    for n in 0..=order as u32 {
        let weight = r_n.scaled(&(S::one() / S::from_bigint(&factorial(n))));
        total = total.add(&constant(x(n)?, order).scale_by_series(&weight))?;
        r_n = r_n.mul(r)?;
    }
    Ok(total)
}

/// `d_T exp(rΔ) − exp(rΔ)((1/2t) b − (1/2t̄) b̄)` as a series in `1/s`.
pub fn trivialisation_series_check<S: Scalar>(
    k: Level,
    order: usize,
) -> Result<FormalSeries<AlgebraElement<S>>, AlgebraError> {
    let r = r_series::<S>(k, order);
    let lhs = r_exponential(k, order, &r, |n| d_t(&AlgebraElement::delta_pow(k, n)))?;
    let exp_r = r_exponential(k, order, &r, |n| Ok(AlgebraElement::delta_pow(k, n)))?;
    let half = frac::<S>(1, 2);
    let x = constant(AlgebraElement::b(k), order)
        .scale_by_series(&inv_t_series::<S>(k, order).scaled(&half))
        .sub(
            &constant(AlgebraElement::bbar(k), order)
                .scale_by_series(&inv_tbar_series::<S>(k, order).scaled(&half)),
        )?;
    let rhs = exp_r.mul(&x)?;
    Ok(lhs.sub(&rhs)?)
}

/// `exp(−rΔ) D exp(rΔ) = Σ_n (−r ad_Δ)^n(D)/n!`, re-expanded in `1/s`.
pub fn bch_solution<S: Scalar>(
    k: Level,
    order: usize,
) -> Result<FormalSeries<AlgebraElement<S>>, AlgebraError> {
    let minus_r = r_series::<S>(k, order).neg();
    r_exponential(k, order, &minus_r, |n| Ok(ad_delta_power(k, n)))
}

/// `∇̂^(l)(e) = −((ik)^l / 2k) [b − (−1)^l b̄, e]`.
pub fn formal_connection_coefficient<S: Scalar>(
    l: u32,
    e: &AlgebraElement<S>,
) -> Result<AlgebraElement<S>, AlgebraError> {
    let k = e.level();
    let coeff = -(S::ik_pow(k, 1, l) / int(2 * k.as_i64()));
    Ok(AlgebraElement::b_combo(k, -sign_pow(l)).commutator(e)?.scale(&coeff))
}
