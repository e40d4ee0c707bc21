//! One function per subcommand; each returns a [`Report`] whose contracts
//! decide the exit status.

use hwconn_core::algebra::{
    delta_power_commutator, letters_product, random_letters, reduce_letters, trivialisation_series_check,
    verify_adiff, verify_recursion, Letter, Strategy,
};
use hwconn_core::formal_curvature::{check_flatness, CurvatureError};
use hwconn_core::forms::{
    antisymmetry_residual, jacobi_check, leibniz_residual, random_matrix_form, FormsError, OperatorForm,
};
use hwconn_core::recursion::{closed_form_table, solve_table, violations};
use hwconn_core::scalar::{gq_to_string, rational_to_string};
use hwconn_core::series::r_series;
use hwconn_core::{
    AlgebraError, DenseMatrix, ExactCoeffTable, FormalSeries, GaussianRational as Gq, Level, RecursionError,
    Scalar, SeriesError,
};
use hwconn_landau::experiments::{
    commutation, decay_experiment, dt_delta_check, dt_delta_order, first_step_check, flatness_check,
    flatness_order, gauge_derivative_check, symbol_round_trip, t_obstruction_check, trivialisation_check,
    ConvergenceReport, DecayParams, ExperimentError,
};
use hwconn_landau::{GeometryData, Model, OperatorError, Poly2};
use num_complex::Complex64 as C64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    parse_complex, AlgebraArgs, CoeffsArgs, ConfigError, Diagonal, Experiment, FormsArgs, LandauArgs, PolySpec,
    RecursionArgs, TrivialisationArgs,
};
use crate::report::{sci, Csv, Report};

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Recursion(#[from] RecursionError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
}

/// Steps used for every observed-order fit.
pub const ORDER_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Width of the accepted band around an expected convergence order or slope.
pub const ORDER_BAND: f64 = 0.2;

fn level(k: i64) -> Result<Level, ConfigError> {
    Level::new(k).map_err(|e| ConfigError::Invalid {
        key: "k",
        detail: e.to_string(),
    })
}

fn config<A: Serialize>(args: &A, seed: u64) -> Value {
    json!({ "seed": seed, "args": args })
}

/// Exact scalar as `p/q`, or `a/b+c/d*i` when not real.
pub fn exact_string(z: &Gq) -> String {
    if z.im.is_zero() {
        rational_to_string(&z.re)
    } else {
        gq_to_string(z)
    }
}

/// Small random Gaussian rational.
pub fn random_gq<R: Rng>(rng: &mut R) -> Gq {
    let mut part = || {
        let n = rng.gen_range(-6..=6i64);
        let d = rng.gen_range(1..=5i64);
        (n, d)
    };
    hwconn_core::scalar::gq(part(), part())
}

fn wide_table(table: &ExactCoeffTable) -> Csv {
    let cols = table.max_order() + 1;
    let mut header = vec!["l".to_string()];
    header.extend((0..cols).map(|r| format!("C_{r}")));
    let mut csv = Csv {
        header,
        rows: Vec::new(),
    };
    for (l, row) in table.rows().iter().enumerate() {
        let mut cells = vec![l.to_string()];
        cells.extend(row.iter().map(exact_string));
        csv.push(cells);
    }
    csv
}

// ------------------------------------------------------------------ coeffs

pub fn coeffs(a: &CoeffsArgs, seed: u64) -> Result<Report, SuiteError> {
    let k = level(a.k)?;
    let mut report = Report::new("coeffs", config(a, seed));
    let free: Vec<Gq> = match a.diagonal {
        Diagonal::Zero => vec![Gq::zero(); a.max_order],
        Diagonal::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..a.max_order).map(|_| random_gq(&mut rng)).collect()
        }
    };
    let table = solve_table(k, a.max_order, &free)?;
    if a.diagonal == Diagonal::Zero {
        let closed = closed_form_table::<Gq>(k, a.max_order);
        report.exact("closed form equals recursion", format!("{} rows", a.max_order + 1), closed == table);
    }
    let bad = violations(&table);
    report.exact("E equations", format!("{} nonzero", bad.len()), bad.is_empty());
    report.result(
        "diagonal",
        free.iter().map(exact_string).collect::<Vec<_>>(),
    );
    report.table = Some(wide_table(&table));
    Ok(report)
}

// ---------------------------------------------------------- verify-algebra

pub fn verify_algebra(a: &AlgebraArgs, seed: u64) -> Result<Report, SuiteError> {
    let k = level(a.k)?;
    let mut report = Report::new("verify-algebra", config(a, seed));
    let mut bad_powers = Vec::new();
    for n in 1..=a.max_power {
        for sign in [1, -1] {
            if delta_power_commutator::<Gq>(k, sign, n).is_err() {
                bad_powers.push(json!({ "n": n, "sign": sign }));
            }
        }
    }
    report.exact(
        "delta power commutators",
        format!("{} of {} fail", bad_powers.len(), 2 * a.max_power),
        bad_powers.is_empty(),
    );
    report.result("delta_power_failures", bad_powers);

    let mut bad_adiff = Vec::new();
    for l in 0..=a.max_adiff {
        if !verify_adiff::<Gq>(k, l)?.is_zero() {
            bad_adiff.push(l);
        }
    }
    report.exact(
        "adiff",
        format!("{} of {} fail", bad_adiff.len(), a.max_adiff + 1),
        bad_adiff.is_empty(),
    );
    report.result("adiff_failures", bad_adiff);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = 0usize;
    for _ in 0..a.words {
        let w: Vec<Letter> = random_letters(&mut rng, 8);
        let left = reduce_letters(k, &w, Gq::one(), Strategy::Leftmost);
        let right = reduce_letters(k, &w, Gq::one(), Strategy::Rightmost);
        if left != right || left != letters_product::<Gq>(k, &w) {
            split += 1;
        }
    }
    report.exact("rewriting confluence", format!("{split} of {} words split", a.words), split == 0);
    Ok(report)
}

// -------------------------------------------------------- verify-recursion

pub fn verify_recursion_suite(a: &RecursionArgs, seed: u64) -> Result<Report, SuiteError> {
    let k = level(a.k)?;
    let mut report = Report::new("verify-recursion", config(a, seed));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut diagonals = vec![vec![Gq::zero(); a.max_order]];
    for _ in 0..a.random_diagonals {
        diagonals.push((0..a.max_order).map(|_| random_gq(&mut rng)).collect());
    }
    let mut table_csv = Csv::new(&["table", "l", "residual_terms", "e_violations"]);
    for (i, free) in diagonals.iter().enumerate() {
        let table = solve_table(k, a.max_order, free)?;
        let bad = violations(&table);
        for l in 0..=a.max_order {
            let residual = verify_recursion(l, &table)?;
            report.exact(format!("table {i} row {l}"), format!("{} residual terms", residual.len()), residual.is_zero());
            table_csv.push(vec![i.to_string(), l.to_string(), residual.len().to_string(), bad.len().to_string()]);
        }
        report.exact(format!("table {i} E equations"), format!("{} nonzero", bad.len()), bad.is_empty());
    }
    let closed = closed_form_table::<Gq>(k, a.max_order);
    report.exact(
        "closed form equals recursion",
        format!("{} rows", a.max_order + 1),
        closed == solve_table(k, a.max_order, &diagonals[0])?,
    );
    report.table = Some(table_csv);
    Ok(report)
}

// --------------------------------------------------- verify-trivialisation

/// `e^{4kr}(1 − ik/s) − (1 + ik/s)` together with the `e^{4kr}` coefficients.
pub fn exp_4kr_residual(k: Level, order: usize) -> Result<(FormalSeries<Gq>, FormalSeries<Gq>), SeriesError> {
    let r: FormalSeries<Gq> = r_series(k, order);
    let e = r.scaled(&Gq::from_i64(4 * k.as_i64())).exp()?;
    let ik = Gq::imag_unit() * Gq::from_i64(k.as_i64());
    let one = FormalSeries::scalar_one(order);
    let minus = FormalSeries::monomial(-ik.clone(), 1, order).add(&one)?;
    let plus = FormalSeries::monomial(ik, 1, order).add(&one)?;
    let residual = e.mul(&minus)?.sub(&plus)?;
    Ok((e, residual))
}

pub fn verify_trivialisation(a: &TrivialisationArgs, seed: u64) -> Result<Report, SuiteError> {
    let k = level(a.k)?;
    let mut report = Report::new("verify-trivialisation", config(a, seed));
    if a.numeric {
        let (s0, s1) = (parse_complex("sigma", &a.sigma)?, parse_complex("sigma1", &a.sigma1)?);
        let t = C64::new(a.k as f64, a.s);
        let model = Model::new(k, a.n);
        let tr = trivialisation_check(&model, s0, s1, t, a.step)?;
        report.below("path transport against gauge", tr.discrepancy, 1e-4);
        let g0 = GeometryData::new(s0).map_err(ExperimentError::from)?;
        let dg = gauge_derivative_check(&model, &g0, s1 - s0, t, 1e-4)?;
        report.below("gauge derivative", dg, 1e-5);
        report.result("r", json!([sci(tr.r.re), sci(tr.r.im)]));
        report.result("steps", tr.steps);
        report.result("discrepancy", sci(tr.discrepancy));
        report.result("gauge_derivative_residual", sci(dg));
        return Ok(report);
    }
    let mut table = Csv::new(&["L", "residual_terms"]);
    for l in 1..=a.order {
        let res = trivialisation_series_check::<Gq>(k, l)?;
        let terms: usize = res.coeffs().iter().map(|e| e.len()).sum();
        report.exact(format!("gauge series order {l}"), format!("{terms} residual terms"), res.is_zero());
        table.push(vec![l.to_string(), terms.to_string()]);
    }
    let (e, residual) = exp_4kr_residual(k, 10)?;
    report.exact(
        "exp(4kr)(1 - ik/s) = 1 + ik/s",
        "to order 10".to_string(),
        residual.coeffs().iter().all(|z| z.is_zero()),
    );
    let mut series = Csv::new(&["n", "exp_4kr", "residual"]);
    for (n, (c, r)) in e.coeffs().iter().zip(residual.coeffs()).enumerate() {
        series.push(vec![n.to_string(), exact_string(c), exact_string(r)]);
    }
    report.table = Some(table);
    report.series = Some(series);
    Ok(report)
}

// ------------------------------------------------------------ verify-forms

/// Degree triples `(a, b, c)` of the random forms `φ, ψ, ρ` on `R³`.
pub const DEGREE_PROFILES: [(usize, usize, usize); 6] = [(0, 0, 0), (0, 1, 1), (1, 1, 1), (1, 2, 0), (0, 1, 2), (2, 1, 0)];

type MatForm = OperatorForm<DenseMatrix<Gq>>;

/// Whether antisymmetry, Leibniz, twisted Leibniz and Jacobi hold on one random triple.
pub fn forms_trial<R: Rng>(rng: &mut R, profile: (usize, usize, usize)) -> Result<[bool; 4], FormsError> {
    let (a, b, c) = profile;
    let gen = |rng: &mut R, p: usize| -> MatForm { random_matrix_form::<Gq, _>(rng, p, 3, 2, 2) };
    let (phi, psi, rho, conn) = (gen(rng, a), gen(rng, b), gen(rng, c), gen(rng, 1));
    Ok([
        antisymmetry_residual(&phi, &psi)?.is_zero(),
        leibniz_residual(&phi, &psi, None)?.is_zero(),
        leibniz_residual(&phi, &psi, Some(&conn))?.is_zero(),
        jacobi_check(&phi, &psi, &rho)?.is_zero(),
    ])
}

pub fn verify_forms(a: &FormsArgs, seed: u64) -> Result<Report, SuiteError> {
    let k = level(a.k)?;
    let mut report = Report::new("verify-forms", config(a, seed));
    let names = ["antisymmetry", "leibniz", "twisted leibniz", "jacobi"];
    let mut table = Csv::new(&["profile", "identity", "samples", "failures"]);
    for (p, profile) in DEGREE_PROFILES.into_iter().enumerate() {
        // one independent stream per trial keeps the result thread-count independent
        let outcomes = (0..a.samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((p * a.samples + i) as u64);
                forms_trial(&mut rng, profile)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut failures = [0usize; 4];
        for trial in outcomes {
            for (f, ok) in failures.iter_mut().zip(trial) {
                *f += usize::from(!ok);
            }
        }
        let tag = format!("{}{}{}", profile.0, profile.1, profile.2);
        for (name, f) in names.iter().zip(failures) {
            report.exact(format!("{name} on degrees {tag}"), format!("{f} of {} fail", a.samples), f == 0);
            table.push(vec![tag.clone(), name.to_string(), a.samples.to_string(), f.to_string()]);
        }
    }
    for l in 1..=a.max_degree {
        let r = check_flatness::<Gq>(k, l)?;
        report.exact(format!("formal curvature degree {l}"), format!("{} terms", r.element.len()), r.is_flat());
    }
    report.table = Some(table);
    Ok(report)
}

// ------------------------------------------------------------------ landau

fn convergence_json(r: &ConvergenceReport) -> Value {
    json!({
        "steps": r.steps.iter().map(|&h| sci(h)).collect::<Vec<_>>(),
        "residuals": r.residuals.iter().map(|&x| sci(x)).collect::<Vec<_>>(),
        "order": r.order.map(sci),
    })
}

fn order_contract(report: &mut Report, name: &str, r: &ConvergenceReport) {
    match r.order {
        Some(p) => report.contract(
            name,
            sci(p),
            format!("2 ± {ORDER_BAND}"),
            (p - 2.0).abs() <= ORDER_BAND,
        ),
        None => report.contract(name, "exact".into(), format!("2 ± {ORDER_BAND}"), true),
    }
}

fn poly_json(p: &Poly2<C64>) -> Value {
    Value::Array(
        p.terms()
            .iter()
            .map(|(&(i, j), z)| json!([i, j, sci(z.re), sci(z.im)]))
            .collect(),
    )
}

pub fn landau(a: &LandauArgs, f: Option<&PolySpec>, seed: u64) -> Result<Report, SuiteError> {
    let k = level(a.k)?;
    let mut cfg = config(a, seed);
    if let Some(spec) = f {
        cfg["args"]["f"] = serde_json::to_value(spec).expect("serializable");
    }
    let poly = match f {
        Some(spec) => spec.to_poly()?,
        None => PolySpec::Expr(a.f.clone()).to_poly()?,
    };
    let sigma = parse_complex("sigma", &a.sigma)?;
    let v = parse_complex("direction", &a.direction)?;
    let w = parse_complex("direction2", &a.direction2)?;
    let geom = GeometryData::new(sigma).map_err(|e| ConfigError::Invalid {
        key: "sigma",
        detail: e.to_string(),
    })?;
    let t = C64::new(a.k as f64, a.s);
    let model = Model::new(k, a.n);
    let name = match a.experiment {
        Experiment::Commutation => "commutation",
        Experiment::Dtdelta => "dtdelta",
        Experiment::FirstStep => "first-step",
        Experiment::Decay => "decay",
        Experiment::Flatness => "flatness",
        Experiment::Trivialisation => "trivialisation",
        Experiment::Obstruction => "obstruction",
        Experiment::Symbols => "symbols",
    };
    let h = a.h.unwrap_or(if a.experiment == Experiment::Dtdelta { 1e-4 } else { 1e-3 });
    let mut report = Report::new(&format!("landau {name}"), cfg);
    match a.experiment {
        Experiment::Commutation => {
            let r = commutation(&model, &geom, v)?;
            report.below("[nabla_x, nabla_y] + ik", r.curvature, 1e-8);
            report.below("[b, Delta] - 4kb", r.b_delta, 1e-8);
            report.below("[bbar, Delta] + 4kbbar", r.bbar_delta, 1e-8);
            report.below("multiplication operators commute", r.multiplication, 1e-9);
            report.result("b_bbar_multiple", json!([sci(r.b_bbar_multiple.re), sci(r.b_bbar_multiple.im)]));
            report.result("b_bbar_residual", sci(r.b_bbar_residual));
        }
        Experiment::Dtdelta => {
            let at_h = dt_delta_check(&model, &geom, v, h)?;
            report.below("dT Delta + b + bbar, relative", at_h.relative, 1e-6);
            let conv = dt_delta_order(&model, &geom, v, &ORDER_STEPS)?;
            order_contract(&mut report, "observed order", &conv);
            let mut table = Csv::new(&["h", "residual"]);
            for (h, r) in conv.steps.iter().zip(&conv.residuals) {
                table.push(vec![sci(*h), sci(*r)]);
            }
            report.table = Some(table);
            report.result("absolute", sci(at_h.absolute));
            report.result("relative", sci(at_h.relative));
            report.result("convergence", convergence_json(&conv));
        }
        Experiment::FirstStep => {
            let r = first_step_check(&model, &geom, &poly)?;
            report.below("first-order solution", r, 1e-8);
            report.result("residual", sci(r));
            report.result("f", poly_json(&poly));
        }
        Experiment::Decay => {
            let table = closed_form_table::<Gq>(k, a.l);
            let params = DecayParams {
                f: poly.clone(),
                max_order: a.l,
                s_grid: a.s_grid.clone(),
                sigma,
                direction: v,
                section: (1, 0),
            };
            let r = decay_experiment(&model, &table, &params)?;
            let bound = -(a.l as f64 + 1.0) + 0.15;
            match r.slope {
                Some(m) => report.contract("log-log slope", sci(m), format!("<= {}", sci(bound)), r.passes(a.l)),
                None => report.contract("log-log slope", "vanishing".into(), format!("<= {}", sci(bound)), true),
            }
            let mut series = Csv::new(&["s", "norm"]);
            for (s, n) in r.s_grid.iter().zip(&r.norms) {
                series.push(vec![sci(*s), sci(*n)]);
            }
            report.series = Some(series);
            report.result("slope", r.slope.map(sci));
            report.result("norms", r.norms.iter().map(|&x| sci(x)).collect::<Vec<_>>());
        }
        Experiment::Flatness => {
            let test = model.curve(&poly)?;
            let r = flatness_check(&model, &geom, v, w, t, h, &test)?;
            report.below("curvature on M_f", r.residual, 1e-4);
            let conv = flatness_order(&model, &geom, v, w, t, &ORDER_STEPS, &test)?;
            order_contract(&mut report, "observed order", &conv);
            let mut table = Csv::new(&["h", "relative_residual"]);
            for (h, x) in conv.steps.iter().zip(&conv.residuals) {
                table.push(vec![sci(*h), sci(*x)]);
            }
            report.table = Some(table);
            report.result("residual", sci(r.residual));
            report.result("relative", sci(r.relative));
            report.result("convergence", convergence_json(&conv));
        }
        Experiment::Trivialisation => {
            let tr = trivialisation_check(&model, sigma, sigma + v, t, 1e-2)?;
            report.below("path transport against gauge", tr.discrepancy, 1e-4);
            let dg = gauge_derivative_check(&model, &geom, v, t, 1e-4)?;
            report.below("gauge derivative", dg, 1e-5);
            report.result("r", json!([sci(tr.r.re), sci(tr.r.im)]));
            report.result("discrepancy", sci(tr.discrepancy));
            report.result("gauge_derivative_residual", sci(dg));
        }
        Experiment::Obstruction => {
            let r = t_obstruction_check(&model, &geom, v, w, t, &poly, h)?;
            report.below("d[beta, M_f] identity", r.identity_residual, 1e-4);
            report.below("witness symbol assemblies agree", r.symbol_agreement, 1e-5);
            report.result("witness", sci(r.witness));
            report.result("rhs_norm", sci(r.rhs_norm));
            report.result("symbol_direct", json!([poly_json(&r.symbol_direct[0]), poly_json(&r.symbol_direct[1])]));
            report.result("symbol_from_g", json!([poly_json(&r.symbol_from_g[0]), poly_json(&r.symbol_from_g[1])]));
        }
        Experiment::Symbols => {
            let r = symbol_round_trip::<Gq>(k, a.samples, 4, 3, seed);
            report.exact("symbol round trip", format!("{} of {} fail", r.failures, r.samples), r.failures == 0);
        }
    }
    Ok(report)
}
