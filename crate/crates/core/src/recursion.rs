//! The numeric recursion on the ansatz coefficients `C_r^l`.
//!
//! Row `l` of a table is `(C_0^l, …, C_l^l)`. Given row `l−1`, the first `l`
//! entries of row `l` solve the lower-triangular Toeplitz system
//! `L·T = R·X`, equivalently `T = φ(N)·X` for the nilpotent shift `N`; the
//! last entry `C_l^l` is free.

use thiserror::Error;

use crate::scalar::{gq_to_string, Level, Scalar};
use crate::series::{factorial, phi_taylor_signed, rho_series, FormalSeries};
use crate::GaussianRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecursionError {
    #[error("row {0} has {1} entries, expected {2}")]
    RowLength(usize, usize, usize),
    #[error("C_0^0 must be 1")]
    BadSeed,
    #[error("table has no row {0}")]
    MissingRow(usize),
    #[error("index m={m} out of range for l={l}")]
    BadIndex { m: usize, l: usize },
    #[error("triangular system is singular")]
    Singular,
    #[error("the two sign branches disagree at row {0}")]
    SignBranchesDisagree(usize),
    #[error("expected {expected} free diagonal entries, got {got}")]
    FreeCount { expected: usize, got: usize },
    #[error("rescaling series must start with 1")]
    BadRescale,
    #[error("rescaled table differs from the solution with the same diagonal at row {0}")]
    RescaleMismatch(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable<S> {
    k: Level,
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> CoeffTable<S> {
    pub fn new(k: Level, rows: Vec<Vec<S>>) -> Result<Self, RecursionError> {
        for (l, row) in rows.iter().enumerate() {
            if row.len() != l + 1 {
                return Err(RecursionError::RowLength(l, row.len(), l + 1));
            }
        }
        match rows.first() {
            Some(r) if r[0] == S::one() => Ok(CoeffTable { k, rows }),
            _ => Err(RecursionError::BadSeed),
        }
    }

    pub fn level(&self) -> Level {
        self.k
    }

    pub fn max_order(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn row(&self, l: usize) -> Option<&[S]> {
        self.rows.get(l).map(Vec::as_slice)
    }

    /// `C_r^l`.
    pub fn get(&self, r: usize, l: usize) -> Option<&S> {
        self.rows.get(l)?.get(r)
    }

    pub fn diagonal(&self) -> Vec<S> {
        self.rows.iter().enumerate().map(|(l, row)| row[l].clone()).collect()
    }

    /// Copy with `C_r^l` replaced, bypassing validity; for perturbation tests.
    pub fn with_entry(&self, l: usize, r: usize, value: S) -> Self {
        let mut out = self.clone();
        out.rows[l][r] = value;
        out
    }
}

impl CoeffTable<GaussianRational> {
    /// CSV with columns `l,r,re,im`, rationals written `p/q`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,r,re,im\n");
        for (l, row) in self.rows.iter().enumerate() {
            for (r, c) in row.iter().enumerate() {
                let s = gq_to_string(c);
                let (re, im) = split_gq(&s);
                out.push_str(&format!("{l},{r},{re},{im}\n"));
            }
        }
        out
    }
}

fn split_gq(s: &str) -> (String, String) {
    let body = s.strip_suffix("*i").unwrap_or(s);
    let pos = body
        .char_indices()
        .skip(1)
        .filter(|(_, c)| *c == '+' || *c == '-')
        .map(|(i, _)| i)
        .last()
        .unwrap_or(body.len());
    let re = body[..pos].to_string();
    let im = body[pos..].trim_start_matches('+').to_string();
    (re, im)
}

/// Toeplitz lower-triangular pair; entry `(m, ρ)` depends on `m − ρ` only.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularSystem<S> {
    sign: i64,
    lhs: Vec<S>,
    rhs: Vec<S>,
}

impl<S: Scalar> TriangularSystem<S> {
    pub fn size(&self) -> usize {
        self.lhs.len()
    }

    pub fn sign(&self) -> i64 {
        self.sign
    }

    /// `L` entry at offset `n`: `(±2ik)^{n+1} / (2 (n+1)!)`.
    pub fn l_offset(&self, n: usize) -> &S {
        &self.lhs[n]
    }

    /// `R` entry at offset `n`: `±ik` for `n = 0`, `±ik (±2ik)^n / (2 n!)` after.
    pub fn r_offset(&self, n: usize) -> &S {
        &self.rhs[n]
    }

    pub fn l_matrix(&self) -> Vec<Vec<S>> {
        toeplitz(&self.lhs)
    }

    pub fn r_matrix(&self) -> Vec<Vec<S>> {
        toeplitz(&self.rhs)
    }

    /// Forward substitution for `L·T = R·x`.
    pub fn solve(&self, x: &[S]) -> Result<Vec<S>, RecursionError> {
        let n = self.size();
        assert_eq!(x.len(), n, "right-hand side has the system size");
        let d = &self.lhs[0];
        if d.is_zero() {
            return Err(RecursionError::Singular);
        }
        let mut t: Vec<S> = Vec::with_capacity(n);
        for m in 0..n {
            let mut acc = (0..=m).fold(S::zero(), |acc, rho| {
                acc + self.rhs[m - rho].clone() * x[rho].clone()
            });
            for (rho, t_rho) in t.iter().enumerate() {
                acc = acc - self.lhs[m - rho].clone() * t_rho.clone();
            }
            t.push(acc / d.clone());
        }
        Ok(t)
    }
}

fn toeplitz<S: Scalar>(offsets: &[S]) -> Vec<Vec<S>> {
    let n = offsets.len();
    (0..n)
        .map(|m| {
            (0..n)
                .map(|rho| if rho <= m { offsets[m - rho].clone() } else { S::zero() })
                .collect()
        })
        .collect()
}

pub fn build_system<S: Scalar>(k: Level, l: usize, sign: i64) -> TriangularSystem<S> {
    let two_ik = S::imag_unit() * S::from_i64(2 * sign * k.as_i64());
    let ik = S::imag_unit() * S::from_i64(sign * k.as_i64());
    let two = S::from_i64(2);
    let mut lhs = Vec::with_capacity(l);
    let mut rhs = Vec::with_capacity(l);
    let mut p = S::one();
    for n in 0..l {
        let fact_n = S::from_bigint(&factorial(n as u32));
        let fact_n1 = fact_n.clone() * S::from_i64(n as i64 + 1);
        rhs.push(if n == 0 {
            ik.clone()
        } else {
            ik.clone() * p.clone() / (two.clone() * fact_n)
        });
        p = p * two_ik.clone();
        lhs.push(p.clone() / (two.clone() * fact_n1));
    }
    TriangularSystem { sign, lhs, rhs }
}

/// Row `l` from row `l−1` and the free entry `C_l^l`, using the `sign` system.
pub fn solve_step<S: Scalar>(
    k: Level,
    prev: &[S],
    free: S,
    sign: i64,
) -> Result<Vec<S>, RecursionError> {
    let system = build_system::<S>(k, prev.len(), sign);
    let mut row = system.solve(prev)?;
    row.push(free);
    Ok(row)
}

/// `T = φ(N)·x`, the first `l` entries of row `l`.
pub fn phi_apply<S: Scalar>(k: Level, prev: &[S], sign: i64) -> Vec<S> {
    let l = prev.len();
    let phi = phi_taylor_signed::<S>(k, l.saturating_sub(1), sign);
    let phi = phi.coeffs();
    (0..l)
        .map(|m| {
            (0..=m).fold(S::zero(), |acc, j| acc + phi[j].clone() * prev[m - j].clone())
        })
        .collect()
}

fn branches_agree<S: Scalar>(a: &[S], b: &[S]) -> bool {
    if S::EXACT {
        a == b
    } else {
        a.iter().zip(b).all(|(x, y)| {
            let (x, y) = (x.to_c64(), y.to_c64());
            (x - y).norm() <= 1e-9 * (1.0 + x.norm().max(y.norm()))
        })
    }
}

/// Table of rows `0..=order` with the given free diagonal `C_1^1, …, C_order^order`.
///
/// Both sign branches are solved at every row and must agree.
pub fn solve_table<S: Scalar>(
    k: Level,
    order: usize,
    free: &[S],
) -> Result<CoeffTable<S>, RecursionError> {
    if free.len() != order {
        return Err(RecursionError::FreeCount {
            expected: order,
            got: free.len(),
        });
    }
    let mut rows = vec![vec![S::one()]];
    for l in 1..=order {
        let prev = &rows[l - 1];
        let plus = solve_step(k, prev, free[l - 1].clone(), 1)?;
        let minus = solve_step(k, prev, free[l - 1].clone(), -1)?;
        if !branches_agree(&plus, &minus) {
            return Err(RecursionError::SignBranchesDisagree(l));
        }
        rows.push(plus);
    }
    CoeffTable::new(k, rows)
}

/// `E^±_{m,l} = Σ_{r<m} ((±2ik)^{m−r}/(2(m−r)!) C_r^l − (±ik)^{m−r} C_r^{l−m+r})`.
pub fn check_e<S: Scalar>(
    table: &CoeffTable<S>,
    m: usize,
    l: usize,
    sign: i64,
) -> Result<S, RecursionError> {
    if m < 1 || m > l {
        return Err(RecursionError::BadIndex { m, l });
    }
    let k = table.level();
    let row_l = table.row(l).ok_or(RecursionError::MissingRow(l))?;
    let mut acc = S::zero();
    for r in 0..m {
        let n = (m - r) as u32;
        let a = crate::scalar::pow(&(S::imag_unit() * S::from_i64(2 * sign * k.as_i64())), n)
            / (S::from_i64(2) * S::from_bigint(&factorial(n)));
        let lower = table
            .get(r, l - m + r)
            .ok_or(RecursionError::MissingRow(l - m + r))?;
        acc = acc + a * row_l[r].clone() - S::ik_pow(k, sign, n) * lower.clone();
    }
    Ok(acc)
}

/// Every `E^±_{m,l}` for `1 ≤ m ≤ l ≤ max order`, as `(m, l, sign, value)`
/// for the nonzero ones.
pub fn violations<S: Scalar>(table: &CoeffTable<S>) -> Vec<(usize, usize, i64, S)> {
    let mut out = Vec::new();
    for l in 1..=table.max_order() {
        for m in 1..=l {
            for sign in [1, -1] {
                let e = check_e(table, m, l, sign).expect("rows present");
                let bad = if S::EXACT {
                    !e.is_zero()
                } else {
                    e.to_c64().norm() > 1e-9
                };
                if bad {
                    out.push((m, l, sign, e));
                }
            }
        }
    }
    out
}

/// `C_r^l = [s^{−l}] ρ(s)^{l−r}`: the branch with zero free diagonal.
pub fn closed_form_table<S: Scalar>(k: Level, order: usize) -> CoeffTable<S> {
    let rho = rho_series::<S>(k, order);
    let mut powers = vec![FormalSeries::<S>::scalar_one(order)];
    for n in 1..=order {
        let next = powers[n - 1].mul(&rho).expect("scalar ring");
        powers.push(next);
    }
    let rows = (0..=order)
        .map(|l| (0..=l).map(|r| powers[l - r].coeffs()[l].clone()).collect())
        .collect();
    CoeffTable::new(k, rows).expect("valid shape")
}

/// The table of `(Σ α_l s^{−l})·R_0`: `C_r^l = Σ_{i≤r} α_i C0_{r−i}^{l−i}`.
///
/// The result is checked against [`solve_table`] with its own diagonal.
pub fn rescale_table<S: Scalar>(
    table0: &CoeffTable<S>,
    alpha: &[S],
) -> Result<CoeffTable<S>, RecursionError> {
    if alpha.first() != Some(&S::one()) {
        return Err(RecursionError::BadRescale);
    }
    let alpha_at = |i: usize| alpha.get(i).cloned().unwrap_or_else(S::zero);
    let order = table0.max_order();
    let rows: Vec<Vec<S>> = (0..=order)
        .map(|l| {
            (0..=l)
                .map(|r| {
                    (0..=r).fold(S::zero(), |acc, i| {
                        acc + alpha_at(i) * table0.rows[l - i][r - i].clone()
                    })
                })
                .collect()
        })
        .collect();
    let out = CoeffTable::new(table0.level(), rows)?;
    let reference = solve_table(table0.level(), order, &out.diagonal()[1..])?;
    for l in 0..=order {
        if !branches_agree(&out.rows[l], &reference.rows[l]) {
            return Err(RecursionError::RescaleMismatch(l));
        }
    }
    Ok(out)
}
