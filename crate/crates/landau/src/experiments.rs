//! Numerical checks of the connection on the truncated model.
//!
//! Every operator identity is measured with the largest singular value on the
//! halo subspace; section-level quantities use the Euclidean norm of `Dψ`.

use hwconn_core::{CoeffTable, Level, Scalar};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Complex2, GeometryData, GeometryError};
use crate::operators::{relative_residual, Model, OperatorError, OperatorMatrix};
use crate::poly::Poly2;
use crate::sparse::norm;
use crate::symbols::{from_symbols, random_polyop, symbol_decompose, DiffOp, PolyOp};

/// Norms below this are treated as exact zeros when fitting slopes.
pub const VANISHING: f64 = 1e-13;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ExperimentError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("s = 0 puts -conj(t)/t on the branch cut of the logarithm")]
    BranchPoint,
    #[error("coefficient table has {have} rows, {need} needed")]
    ShortTable { have: usize, need: usize },
    #[error("test vector |{0},{1}> lies outside the basis")]
    BadSection(u32, u32),
    #[error("need at least two points for a slope fit")]
    TooFewPoints,
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<f64, ExperimentError> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return Err(ExperimentError::TooFewPoints);
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

// ---------------------------------------------------------------- commutation

#[derive(Debug, Clone, PartialEq)]
pub struct CommutationReport {
    /// `[∇_x, ∇_y] + ik`, relative.
    pub curvature: f64,
    /// `[b, Δ] − 4kb`, relative.
    pub b_delta: f64,
    /// `[b̄, Δ] + 4kb̄`, relative.
    pub bbar_delta: f64,
    /// `[M_f, M_g]` for two fixed polynomials, absolute.
    pub multiplication: f64,
    /// Best multiple `λ` with `[b, b̄] ≈ λΔ`.
    pub b_bbar_multiple: C64,
    /// `‖[b, b̄] − λΔ‖ / ‖[b, b̄]‖`.
    pub b_bbar_residual: f64,
}

impl CommutationReport {
    pub fn worst_structural(&self) -> f64 {
        self.curvature.max(self.b_delta).max(self.bbar_delta)
    }
}

pub fn commutation(model: &Model, geom: &GeometryData, v: C64) -> Result<CommutationReport, ExperimentError> {
    let k = model.level().as_i64() as f64;
    let four_k = c(4.0 * k);
    let (d, b, bb) = (model.delta(geom), model.b(geom, v), model.bbar(geom, v));
    let curvature = relative_residual(
        &model.nabla(0).commutator(model.nabla(1)),
        &model.identity().scale(C64::new(0.0, -k)),
    );
    let b_delta = relative_residual(&b.commutator(&d), &b.scale(four_k));
    let bbar_delta = relative_residual(&bb.commutator(&d), &bb.scale(-four_k));
    let f = model.curve(&Poly2::parse("x^2 + x*y").expect("literal"))?;
    let g = model.curve(&Poly2::parse("y^3 - 2*x").expect("literal"))?;
    let multiplication = f.commutator(&g).norm_on_halo(5);

    let bracket = b.commutator(&bb);
    let support = model.basis().halo_support(bracket.order());
    let lambda = d.matrix().inner_on(bracket.matrix(), &support) / d.matrix().inner_on(d.matrix(), &support);
    let rest = bracket.sub(&d.scale(lambda));
    let scale = bracket.norm();
    Ok(CommutationReport {
        curvature,
        b_delta,
        bbar_delta,
        multiplication,
        b_bbar_multiple: lambda,
        b_bbar_residual: if scale > 0.0 { rest.norm() / scale } else { 0.0 },
    })
}

// -------------------------------------------------------------------- d_T Δ

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdResidual {
    pub absolute: f64,
    /// `absolute / ‖b(V) + b̄(V)‖`; the absolute value grows with the cutoff.
    pub relative: f64,
}

/// `‖(Δ(σ+hV) − Δ(σ−hV))/2h + b(V) + b̄(V)‖` on the halo subspace.
pub fn dt_delta_check(model: &Model, geom: &GeometryData, v: C64, h: f64) -> Result<FdResidual, ExperimentError> {
    let plus = model.delta(&geom.shifted(v, h)?);
    let minus = model.delta(&geom.shifted(v, -h)?);
    let fd = plus.sub(&minus).scale(c(0.5 / h));
    let target = model.b(geom, v).add(&model.bbar(geom, v));
    let absolute = fd.add(&target).norm();
    let scale = target.norm();
    Ok(FdResidual {
        absolute,
        relative: if scale > 0.0 { absolute / scale } else { absolute },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Observed order; `None` when every residual is below [`VANISHING`].
    pub order: Option<f64>,
}

fn convergence(steps: &[f64], residuals: Vec<f64>) -> Result<ConvergenceReport, ExperimentError> {
    let order = if residuals.iter().all(|&r| r < VANISHING) {
        None
    } else {
        Some(fit_slope(steps, &residuals)?)
    };
    Ok(ConvergenceReport {
        steps: steps.to_vec(),
        residuals,
        order,
    })
}

pub fn dt_delta_order(
    model: &Model,
    geom: &GeometryData,
    v: C64,
    steps: &[f64],
) -> Result<ConvergenceReport, ExperimentError> {
    let residuals = steps
        .iter()
        .map(|&h| dt_delta_check(model, geom, v, h).map(|r| r.relative))
        .collect::<Result<Vec<_>, _>>()?;
    convergence(steps, residuals)
}

// --------------------------------------------------------------- first step

/// `‖S¹(f) − [−(i/2)Δ, M_f]‖` with `S¹(f) = −(i/2)(2∇_{g̃·df} + M_{Δf})`.
pub fn first_step_check(model: &Model, geom: &GeometryData, f: &Poly2<C64>) -> Result<f64, ExperimentError> {
    let gt = geom.g_tilde();
    let df = [f.derivative(1, 0), f.derivative(0, 1)];
    let field: [Poly2<C64>; 2] = std::array::from_fn(|b| {
        (0..2).fold(Poly2::zero(), |acc, a| acc.add(&df[a].scale(&c(gt[a][b]))))
    });
    let mut lap = Poly2::zero();
    for a in 0..2 {
        for b in 0..2 {
            let mut e = [0, 0];
            e[a] += 1;
            e[b] += 1;
            lap = lap.add(&f.derivative(e[0], e[1]).scale(&c(gt[a][b])));
        }
    }
    let half_i = C64::new(0.0, -0.5);
    let s1 = model
        .first_order(&field)?
        .scale(c(2.0))
        .add(&model.curve(&lap)?)
        .scale(half_i);
    let direct = model.delta(geom).scale(half_i).commutator(&model.curve(f)?);
    let halo = direct.order().max(s1.order());
    Ok(s1.sub(&direct).norm_on_halo(halo))
}

// -------------------------------------------------------- covariant derivative

/// `V[D] + (1/2t)[b(V), D] − (1/2t̄)[b̄(V), D]`, with `V[D]` by central differences.
pub fn hwc_derivative<F>(
    model: &Model,
    family: F,
    geom: &GeometryData,
    v: C64,
    t: C64,
    h: f64,
) -> Result<OperatorMatrix, ExperimentError>
where
    F: Fn(&GeometryData) -> OperatorMatrix,
{
    let fd = family(&geom.shifted(v, h)?)
        .sub(&family(&geom.shifted(v, -h)?))
        .scale(c(0.5 / h));
    let d = family(geom);
    Ok(fd.add(&model.beta(geom, v, t).commutator(&d)))
}

// -------------------------------------------------------------------- decay

#[derive(Debug, Clone, PartialEq)]
pub struct DecayParams {
    pub f: Poly2<C64>,
    pub max_order: usize,
    pub s_grid: Vec<f64>,
    pub sigma: C64,
    pub direction: C64,
    /// Test section `|m, n⟩`.
    pub section: (u32, u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub s_grid: Vec<f64>,
    pub norms: Vec<f64>,
    /// `None` when the truncated covariant derivative vanishes identically.
    pub slope: Option<f64>,
}

impl DecayReport {
    pub fn passes(&self, max_order: usize) -> bool {
        self.slope.is_none_or(|m| m <= -(max_order as f64 + 1.0) + 0.15)
    }
}

/// `‖∇̂_V(Σ_{l≤L} S^(l)(f) s^{−l})ψ‖` over the grid, with
/// `S^(l) = Σ_r C_r^l P^(l−r)(M_f)` and `P^(j) = ad_a^j / j!`, `a = −(i/2)Δ`.
pub fn decay_experiment<S: Scalar>(
    model: &Model,
    table: &CoeffTable<S>,
    params: &DecayParams,
) -> Result<DecayReport, ExperimentError> {
    let big_l = params.max_order;
    if table.max_order() < big_l {
        return Err(ExperimentError::ShortTable {
            have: table.max_order(),
            need: big_l,
        });
    }
    let geom = GeometryData::new(params.sigma)?;
    let v = params.direction;
    let (b, bb) = (model.b(&geom, v), model.bbar(&geom, v));
    let a = model.delta(&geom).scale(C64::new(0.0, -0.5));
    let va = b.add(&bb).scale(C64::new(0.0, 0.5));

    let mut p = vec![model.curve(&params.f)?];
    let mut dp = vec![OperatorMatrix::zero(model.level(), model.basis().clone())];
    for j in 1..=big_l {
        let inv = c(1.0 / j as f64);
        let next = a.commutator(&p[j - 1]).scale(inv);
        let dnext = va.commutator(&p[j - 1]).add(&a.commutator(&dp[j - 1])).scale(inv);
        p.push(next);
        dp.push(dnext);
    }

    let (m, n) = params.section;
    let psi = model.basis().unit(m, n).ok_or(ExperimentError::BadSection(m, n))?;
    let (b_psi, bb_psi) = (b.apply(&psi), bb.apply(&psi));
    let mut pieces = Vec::with_capacity(big_l + 1);
    for l in 0..=big_l {
        let coeff = |r: usize| table.get(r, l).expect("row present").to_c64();
        let combine = |ops: &[OperatorMatrix], x: &[C64]| {
            let mut out = vec![C64::default(); x.len()];
            for r in 0..=l {
                let z = coeff(r);
                if z != C64::default() {
                    for (o, y) in out.iter_mut().zip(ops[l - r].apply(x)) {
                        *o += z * y;
                    }
                }
            }
            out
        };
        let u = combine(&dp, &psi);
        let s_psi = combine(&p, &psi);
        let pl: Vec<C64> = b.apply(&s_psi).iter().zip(combine(&p, &b_psi)).map(|(x, y)| x - y).collect();
        let ql: Vec<C64> = bb.apply(&s_psi).iter().zip(combine(&p, &bb_psi)).map(|(x, y)| x - y).collect();
        pieces.push((u, pl, ql));
    }

    let k = model.level().as_i64() as f64;
    let norms: Vec<f64> = params
        .s_grid
        .iter()
        .map(|&s| {
            let t = C64::new(k, s);
            let (wb, wbb) = (c(0.5) / t, c(0.5) / t.conj());
            let mut total = vec![C64::default(); psi.len()];
            for (l, (u, pl, ql)) in pieces.iter().enumerate() {
                let w = s.powi(-(l as i32));
                for (i, o) in total.iter_mut().enumerate() {
                    *o += (u[i] + wb * pl[i] - wbb * ql[i]) * w;
                }
            }
            norm(&total)
        })
        .collect();
    let kept: Vec<(f64, f64)> = params
        .s_grid
        .iter()
        .zip(&norms)
        .filter(|(_, &n)| n >= VANISHING)
        .map(|(&s, &n)| (s, n))
        .collect();
    let slope = if kept.len() < 2 {
        None
    } else {
        let (xs, ys): (Vec<f64>, Vec<f64>) = kept.into_iter().unzip();
        Some(fit_slope(&xs, &ys)?)
    };
    Ok(DecayReport {
        s_grid: params.s_grid.clone(),
        norms,
        slope,
    })
}

// ----------------------------------------------------------------- flatness

#[derive(Debug, Clone, PartialEq)]
pub struct FlatnessReport {
    /// Norm of the curvature applied to the test operator.
    pub residual: f64,
    /// The same divided by the largest of its three constituent terms.
    pub relative: f64,
}

/// Curvature of `∇̂` on a constant operator `T`, for constant directions `V, W`:
/// `[V[β_W] − W[β_V], T] + [β_V, [β_W, T]] − [β_W, [β_V, T]]`.
pub fn flatness_check(
    model: &Model,
    geom: &GeometryData,
    v: C64,
    w: C64,
    t: C64,
    h: f64,
    test: &OperatorMatrix,
) -> Result<FlatnessReport, ExperimentError> {
    let beta = |g: &GeometryData, dir: C64| model.beta(g, dir, t);
    let dv_bw = beta(&geom.shifted(v, h)?, w).sub(&beta(&geom.shifted(v, -h)?, w));
    let dw_bv = beta(&geom.shifted(w, h)?, v).sub(&beta(&geom.shifted(w, -h)?, v));
    let linear = dv_bw.sub(&dw_bv).scale(c(0.5 / h)).commutator(test);
    let (bv, bw) = (beta(geom, v), beta(geom, w));
    let q1 = bv.commutator(&bw.commutator(test));
    let q2 = bw.commutator(&bv.commutator(test));
    let total = linear.add(&q1).sub(&q2);
    let halo = total.order();
    let residual = total.norm_on_halo(halo);
    let scale = [&linear, &q1, &q2]
        .iter()
        .map(|m| m.norm_on_halo(halo))
        .fold(0.0, f64::max);
    Ok(FlatnessReport {
        residual,
        relative: if scale > 0.0 { residual / scale } else { residual },
    })
}

pub fn flatness_order(
    model: &Model,
    geom: &GeometryData,
    v: C64,
    w: C64,
    t: C64,
    steps: &[f64],
    test: &OperatorMatrix,
) -> Result<ConvergenceReport, ExperimentError> {
    let residuals = steps
        .iter()
        .map(|&h| flatness_check(model, geom, v, w, t, h, test).map(|r| r.relative))
        .collect::<Result<Vec<_>, _>>()?;
    convergence(steps, residuals)
}

// ----------------------------------------------------------- trivialisation

/// `r = log(−t̄/t)/(4k)` on the principal branch.
pub fn gauge_parameter(k: Level, t: C64) -> Result<C64, ExperimentError> {
    if t.im == 0.0 {
        return Err(ExperimentError::BranchPoint);
    }
    Ok((-t.conj() / t).ln() / (4.0 * k.as_i64() as f64))
}

/// `exp(zA)v` by a sub-stepped Taylor series.
pub fn expm_apply(a: &OperatorMatrix, z: C64, v: &[C64]) -> Vec<C64> {
    let one_norm = (0..a.matrix().dim())
        .map(|j| a.matrix().column(j).iter().map(|(_, x)| x.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let steps = ((z.norm() * one_norm) / 0.5).ceil().max(1.0) as usize;
    let dz = z / steps as f64;
    let mut x = v.to_vec();
    for _ in 0..steps {
        let mut term = x.clone();
        let mut sum = x.clone();
        for n in 1..60 {
            term = a.apply(&term).into_iter().map(|y| y * dz / n as f64).collect();
            for (s, t) in sum.iter_mut().zip(&term) {
                *s += t;
            }
            if norm(&term) <= 1e-18 * norm(&sum) {
                break;
            }
        }
        x = sum;
    }
    x
}

fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrivialisationReport {
    pub r: C64,
    pub steps: usize,
    /// `‖ψ_path − ψ_gauge‖ / ‖ψ_gauge‖`.
    pub discrepancy: f64,
}

/// Transports `|0,0⟩` from `σ₀` to `σ₁` along the straight path by RK4 on
/// `dψ/dτ = −β(σ(τ); σ₁ − σ₀)ψ`, and compares with `e^{−rΔ(σ₁)} e^{rΔ(σ₀)} ψ`.
pub fn trivialisation_check(
    model: &Model,
    sigma0: C64,
    sigma1: C64,
    t: C64,
    step: f64,
) -> Result<TrivialisationReport, ExperimentError> {
    let r = gauge_parameter(model.level(), t)?;
    let g0 = GeometryData::new(sigma0)?;
    let g1 = GeometryData::new(sigma1)?;
    let dir = sigma1 - sigma0;
    let psi0 = model.basis().unit(0, 0).expect("ground state");
    let steps = if dir == C64::default() {
        0
    } else {
        (1.0 / step).round().max(1.0) as usize
    };
    let dt = 1.0 / steps.max(1) as f64;
    let rhs = |tau: f64, x: &[C64]| -> Result<Vec<C64>, ExperimentError> {
        let g = GeometryData::new(sigma0 + dir * tau)?;
        Ok(model.beta(&g, dir, t).apply(x).into_iter().map(|y| -y).collect())
    };
    let mut psi = psi0.clone();
    for n in 0..steps {
        let tau = n as f64 * dt;
        let axpy = |x: &[C64], k: &[C64], w: f64| -> Vec<C64> { x.iter().zip(k).map(|(a, b)| a + b * w).collect() };
        let k1 = rhs(tau, &psi)?;
        let k2 = rhs(tau + dt / 2.0, &axpy(&psi, &k1, dt / 2.0))?;
        let k3 = rhs(tau + dt / 2.0, &axpy(&psi, &k2, dt / 2.0))?;
        let k4 = rhs(tau + dt, &axpy(&psi, &k3, dt))?;
        for i in 0..psi.len() {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
    let gauge = expm_apply(&model.delta(&g1), -r, &expm_apply(&model.delta(&g0), r, &psi0));
    Ok(TrivialisationReport {
        r,
        steps,
        discrepancy: norm(&sub(&psi, &gauge)) / norm(&gauge),
    })
}

/// `‖(U(σ+hV) − U(σ−hV))ψ/2h − U(σ)β(V)ψ‖` for `U = e^{rΔ}` and `ψ = |0,0⟩`.
pub fn gauge_derivative_check(
    model: &Model,
    geom: &GeometryData,
    v: C64,
    t: C64,
    h: f64,
) -> Result<f64, ExperimentError> {
    let r = gauge_parameter(model.level(), t)?;
    let psi = model.basis().unit(0, 0).expect("ground state");
    let u = |g: &GeometryData, x: &[C64]| expm_apply(&model.delta(g), r, x);
    let plus = u(&geom.shifted(v, h)?, &psi);
    let minus = u(&geom.shifted(v, -h)?, &psi);
    let fd: Vec<C64> = sub(&plus, &minus).into_iter().map(|z| z / (2.0 * h)).collect();
    let exact = u(geom, &model.beta(geom, v, t).apply(&psi));
    Ok(norm(&sub(&fd, &exact)))
}

// -------------------------------------------------------------- obstruction

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionReport {
    /// `d_F[β, M_f]` against `(1/4|t|²)[[b∧b̄], M_f]`; relative when the
    /// right side is not negligible.
    pub identity_residual: f64,
    pub rhs_norm: f64,
    /// `‖[[b∧b̄](V, W), M_f]‖`.
    pub witness: f64,
    /// First symbol of the witness from operator algebra, as `(T^x, T^y)`.
    pub symbol_direct: [Poly2<C64>; 2],
    /// `8k·(d_T G)(V, W)·df` with `d_T G` by finite differences.
    pub symbol_from_g: [Poly2<C64>; 2],
    /// Relative coefficient-wise disagreement of the two symbols.
    pub symbol_agreement: f64,
}

fn wedge<T>(bv: &T, bbw: &T, bw: &T, bbv: &T, comm: impl Fn(&T, &T) -> T, sub: impl Fn(&T, &T) -> T) -> T {
    sub(&comm(bv, bbw), &comm(bw, bbv))
}

#[allow(clippy::too_many_arguments)]
pub fn t_obstruction_check(
    model: &Model,
    geom: &GeometryData,
    v: C64,
    w: C64,
    t: C64,
    f: &Poly2<C64>,
    h: f64,
) -> Result<ObstructionReport, ExperimentError> {
    let mf = model.curve(f)?;
    let x = |g: &GeometryData, dir: C64| model.beta(g, dir, t).commutator(&mf);
    let dv_xw = x(&geom.shifted(v, h)?, w).sub(&x(&geom.shifted(v, -h)?, w));
    let dw_xv = x(&geom.shifted(w, h)?, v).sub(&x(&geom.shifted(w, -h)?, v));
    let lhs = dv_xw.sub(&dw_xv).scale(c(0.5 / h));

    let (bv, bbv, bw, bbw) = (model.b(geom, v), model.bbar(geom, v), model.b(geom, w), model.bbar(geom, w));
    let bracket = wedge(&bv, &bbw, &bw, &bbv, |a, b| a.commutator(b), |a, b| a.sub(b));
    let witness_op = bracket.commutator(&mf);
    let rhs = witness_op.scale(c(0.25 / t.norm_sqr()));
    let halo = lhs.order().max(rhs.order());
    let diff = lhs.sub(&rhs).norm_on_halo(halo);
    let rhs_norm = rhs.norm_on_halo(halo);
    let identity_residual = if rhs_norm > 1e-12 { diff / rhs_norm } else { diff };

    let k = model.level();
    let sym = |m: &Complex2| DiffOp::second_order(k, *m);
    let (sv, sbv, sw, sbw) = (sym(&geom.big_g(v)), sym(&geom.big_g_bar(v)), sym(&geom.big_g(w)), sym(&geom.big_g_bar(w)));
    let sb = wedge(&sv, &sbw, &sw, &sbv, |a, b| a.commutator(b), |a, b| a.sub(b));
    let symbols = symbol_decompose(&sb.commutator(&DiffOp::multiplication(k, f.clone())));
    let symbol_direct: [Poly2<C64>; 2] = match symbols.get(1) {
        Some(s1) => [s1.components()[0].clone(), s1.components()[1].clone()],
        None => [Poly2::zero(), Poly2::zero()],
    };

    let dg = |dir: C64, along: C64| -> Result<Complex2, ExperimentError> {
        let (p, m) = (geom.shifted(along, h)?.big_g(dir), geom.shifted(along, -h)?.big_g(dir));
        Ok(std::array::from_fn(|a| std::array::from_fn(|b| (p[a][b] - m[a][b]) / (2.0 * h))))
    };
    let (gw_v, gv_w) = (dg(w, v)?, dg(v, w)?);
    let theta: Complex2 = std::array::from_fn(|a| std::array::from_fn(|b| gw_v[a][b] - gv_w[a][b]));
    let df = [f.derivative(1, 0), f.derivative(0, 1)];
    let eight_k = c(8.0 * k.as_i64() as f64);
    let symbol_from_g: [Poly2<C64>; 2] =
        std::array::from_fn(|b| (0..2).fold(Poly2::zero(), |acc, a| acc.add(&df[a].scale(&(theta[a][b] * eight_k)))));

    let mut worst = 0.0f64;
    let mut size = 0.0f64;
    for b in 0..2 {
        let d = symbol_direct[b].sub(&symbol_from_g[b]);
        worst = d.terms().values().map(|z| z.norm()).fold(worst, f64::max);
        size = symbol_direct[b].terms().values().map(|z| z.norm()).fold(size, f64::max);
    }
    Ok(ObstructionReport {
        identity_residual,
        rhs_norm,
        witness: witness_op.norm_on_halo(witness_op.order()),
        symbol_direct,
        symbol_from_g,
        symbol_agreement: if size > 0.0 { worst / size } else { worst },
    })
}

// ------------------------------------------------------------------ symbols

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolReport {
    pub samples: usize,
    pub failures: usize,
}

/// Round-trips random exact operators of order `≤ max_order` through their symbols.
pub fn symbol_round_trip<S: Scalar>(
    k: Level,
    samples: usize,
    max_order: u32,
    max_degree: u32,
    seed: u64,
) -> SymbolReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let failures = (0..samples)
        .filter(|_| {
            let p: PolyOp<S> = random_polyop(&mut rng, k, max_order, max_degree);
            let symbols = symbol_decompose(&p.to_diffop());
            let symmetric_ok = symbols.iter().enumerate().all(|(n, t)| t.order() as usize == n || t.is_zero());
            !(symmetric_ok && from_symbols(k, &symbols).same_operator(&p))
        })
        .count();
    SymbolReport { samples, failures }
}
