//! The acceptance suite: every criterion at its stated tolerance, one
//! PASS/FAIL line each. Runs without the libtest harness so the lines are
//! always shown; exits nonzero if any criterion fails.

use std::time::Instant;

use hwconn_cli::suites::{exp_4kr_residual, forms_trial, random_gq, DEGREE_PROFILES, ORDER_BAND, ORDER_STEPS};
use hwconn_core::algebra::{
    delta_power_commutator, letters_product, random_letters, reduce_letters, trivialisation_series_check,
    verify_adiff, verify_recursion, Strategy,
};
use hwconn_core::formal_curvature::check_flatness;
use hwconn_core::recursion::{check_e, closed_form_table, phi_apply, rescale_table, solve_step, solve_table, violations};
use hwconn_core::{GaussianRational as Gq, Level, Scalar};
use hwconn_landau::experiments::{
    commutation, decay_experiment, dt_delta_check, dt_delta_order, first_step_check, flatness_check,
    flatness_order, symbol_round_trip, t_obstruction_check, trivialisation_check, DecayParams,
};
use hwconn_landau::{GeometryData, Model, Poly2};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_611;
const I: C64 = C64 { re: 0.0, im: 1.0 };

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn lvl(k: i64) -> Level {
    Level::new(k).unwrap()
}

fn geo(s: C64) -> GeometryData {
    GeometryData::new(s).unwrap()
}

fn zeros(n: usize) -> Vec<Gq> {
    vec![Gq::from_i64(0); n]
}

fn sigmas() -> [C64; 2] {
    [I, C64::new(0.3, 1.2)]
}

fn recursion_symbolic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = 0;
    let mut tables = 0;
    for k in 1..=3 {
        let mut diagonals = vec![zeros(6)];
        diagonals.extend((0..3).map(|_| (0..6).map(|_| random_gq(&mut rng)).collect::<Vec<_>>()));
        for free in diagonals {
            let table = solve_table(lvl(k), 6, &free).unwrap();
            tables += 1;
            failures += (0..=6).filter(|&l| !verify_recursion(l, &table).unwrap().is_zero()).count();
        }
    }
    (failures == 0, format!("{tables} tables, rows 0..=6, {failures} nonzero residuals"))
}

fn coefficient_oracles() -> Outcome {
    let mut bad = Vec::new();
    for k in 1..=3 {
        let closed = closed_form_table::<Gq>(lvl(k), 20);
        let iterated = solve_table(lvl(k), 20, &zeros(20)).unwrap();
        if closed != iterated {
            bad.push(format!("k={k} closed form"));
        }
        for l in 1..=20 {
            let prev = iterated.row(l - 1).unwrap();
            for sign in [1, -1] {
                let step = solve_step(lvl(k), prev, Gq::from_i64(0), sign).unwrap();
                if step[..l] != phi_apply(lvl(k), prev, sign)[..] {
                    bad.push(format!("k={k} l={l} sign={sign} phi"));
                }
            }
        }
        let v = violations(&closed);
        if !v.is_empty() {
            bad.push(format!("k={k} {} E violations", v.len()));
        }
    }
    (bad.is_empty(), format!("rows <= 20, k in 1..=3; failures: {bad:?}"))
}

fn uniqueness_and_rescaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut missed = 0;
    for _ in 0..200 {
        let k = rng.gen_range(1..=3);
        let order = 8;
        let free: Vec<Gq> = if rng.gen_bool(0.5) {
            zeros(order)
        } else {
            (0..order).map(|_| random_gq(&mut rng)).collect()
        };
        let table = solve_table(lvl(k), order, &free).unwrap();
        let l = rng.gen_range(1..=order);
        let r = rng.gen_range(0..l);
        let mut delta = random_gq(&mut rng);
        while delta == Gq::from_i64(0) {
            delta = random_gq(&mut rng);
        }
        let bumped = table.with_entry(l, r, table.get(r, l).unwrap().clone() + delta);
        let hit = (1..=l).any(|m| [1, -1].iter().any(|&s| check_e(&bumped, m, l, s).unwrap() != Gq::from_i64(0)));
        missed += usize::from(!hit);
    }
    let mut rescale_bad = 0;
    for k in 1..=3 {
        let t0 = closed_form_table::<Gq>(lvl(k), 12);
        let mut alpha = vec![Gq::from_i64(1)];
        alpha.extend((0..12).map(|_| random_gq(&mut rng)));
        let t = rescale_table(&t0, &alpha).unwrap();
        rescale_bad += violations(&t).len();
        for l in 0..=12 {
            for r in 0..=l {
                let expect = (0..=r).fold(Gq::from_i64(0), |acc, i| acc + alpha[i].clone() * t0.get(r - i, l - i).unwrap().clone());
                rescale_bad += usize::from(*t.get(r, l).unwrap() != expect);
            }
        }
    }
    (
        missed == 0 && rescale_bad == 0,
        format!("{missed} of 200 perturbations undetected; {rescale_bad} rescaling defects to order 12"),
    )
}

fn trivialisation_symbolic() -> Outcome {
    let mut bad = Vec::new();
    for k in 1..=3 {
        for order in 1..=6 {
            if !trivialisation_series_check::<Gq>(lvl(k), order).unwrap().is_zero() {
                bad.push(format!("k={k} L={order}"));
            }
        }
        let (_, residual) = exp_4kr_residual(lvl(k), 10).unwrap();
        if residual.coeffs().iter().any(|z| *z != Gq::from_i64(0)) {
            bad.push(format!("k={k} exp(4kr) relation"));
        }
    }
    (bad.is_empty(), format!("L <= 6, k in 1..=3, exp(4kr) to order 10; failures: {bad:?}"))
}

fn algebraic_identities() -> Outcome {
    let mut bad = Vec::new();
    for k in 1..=3 {
        for n in 1..=12 {
            for sign in [1, -1] {
                if delta_power_commutator::<Gq>(lvl(k), sign, n).is_err() {
                    bad.push(format!("k={k} delta^{n} sign {sign}"));
                }
            }
        }
        for l in 0..=8 {
            if !verify_adiff::<Gq>(lvl(k), l).unwrap().is_zero() {
                bad.push(format!("k={k} adiff l={l}"));
            }
        }
        for l in 1..=6 {
            if !check_flatness::<Gq>(lvl(k), l).unwrap().is_flat() {
                bad.push(format!("k={k} curvature degree {l}"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut split = 0;
    for _ in 0..10_000 {
        let k = lvl(rng.gen_range(1..=3));
        let w = random_letters(&mut rng, 8);
        let left = reduce_letters(k, &w, Gq::from_i64(1), Strategy::Leftmost);
        let right = reduce_letters(k, &w, Gq::from_i64(1), Strategy::Rightmost);
        split += usize::from(left != right || left != letters_product::<Gq>(k, &w));
    }
    if split > 0 {
        bad.push(format!("{split} words not confluent"));
    }
    let mut form_failures = 0;
    for profile in DEGREE_PROFILES {
        for _ in 0..500 {
            form_failures += forms_trial(&mut rng, profile).unwrap().iter().filter(|ok| !**ok).count();
        }
    }
    if form_failures > 0 {
        bad.push(format!("{form_failures} form identities fail"));
    }
    (
        bad.is_empty(),
        format!("10^4 words, 500 forms x {} profiles; failures: {bad:?}", DEGREE_PROFILES.len()),
    )
}

fn model_structural() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in [1, 2, 4] {
        let m = Model::new(lvl(k), 50);
        for s in sigmas() {
            let r = commutation(&m, &geo(s), C64::new(0.5, 1.5)).unwrap();
            worst = worst.max(r.worst_structural());
        }
    }
    let m = Model::new(lvl(1), 50);
    let (mut dt_worst, mut dt_abs): (f64, f64) = (0.0, 0.0);
    let mut orders = Vec::new();
    for s in sigmas() {
        for v in [I, C64::new(1.0, 1.0)] {
            let r = dt_delta_check(&m, &geo(s), v, 1e-4).unwrap();
            dt_worst = dt_worst.max(r.relative);
            dt_abs = dt_abs.max(r.absolute);
            orders.push(dt_delta_order(&m, &geo(s), v, &ORDER_STEPS).unwrap().order.unwrap());
        }
    }
    let orders_ok = orders.iter().all(|p| (p - 2.0).abs() <= ORDER_BAND);
    (
        worst < 1e-8 && dt_worst < 1e-6 && orders_ok,
        format!("structural {worst:e} (< 1e-8); d_T Delta at h=1e-4 relative {dt_worst:e} (< 1e-6), absolute {dt_abs:e}; orders {orders:.3?}"),
    )
}

fn first_step() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in [1, 2] {
        let m = Model::new(lvl(k), 40);
        for s in sigmas() {
            for f in ["x", "y", "x^2", "x^2 + y^2", "x*y"] {
                worst = worst.max(first_step_check(&m, &geo(s), &Poly2::parse(f).unwrap()).unwrap());
            }
        }
    }
    (worst < 1e-8, format!("worst {worst:e} (< 1e-8)"))
}

fn decay() -> Outcome {
    let m = Model::new(lvl(1), 60);
    let table = closed_form_table::<Gq>(lvl(1), 2);
    let mut ok = true;
    let mut lines = Vec::new();
    for f in ["x", "x^2 + y^2"] {
        for s in sigmas() {
            for l in 0..=2 {
                let params = DecayParams {
                    f: Poly2::parse(f).unwrap(),
                    max_order: l,
                    s_grid: vec![16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0],
                    sigma: s,
                    direction: C64::new(1.0, 0.5),
                    section: (1, 0),
                };
                let r = decay_experiment(&m, &table, &params).unwrap();
                ok &= r.passes(l);
                let slope = r.slope.map_or("vanishing".to_string(), |p| format!("{p:.3}"));
                lines.push(format!("f={f} sigma={s} L={l}: {slope}"));
            }
        }
    }
    (ok, format!("slopes <= -(L+1)+0.15: [{}]", lines.join("; ")))
}

fn flatness_and_trivialisation() -> Outcome {
    let m = Model::new(lvl(1), 40);
    let t = C64::new(1.0, 5.0);
    let (v, w) = (C64::new(1.0, 0.0), I);
    let mut flat: f64 = 0.0;
    let mut orders = Vec::new();
    for s in sigmas() {
        for f in ["x", "x^2 + y^2"] {
            let test = m.curve(&Poly2::parse(f).unwrap()).unwrap();
            flat = flat.max(flatness_check(&m, &geo(s), v, w, t, 1e-3, &test).unwrap().residual);
            orders.push(flatness_order(&m, &geo(s), v, w, t, &ORDER_STEPS, &test).unwrap().order.unwrap());
        }
    }
    let orders_ok = orders.iter().all(|p| (p - 2.0).abs() <= ORDER_BAND);
    let m60 = Model::new(lvl(1), 60);
    let tr = trivialisation_check(&m60, I, C64::new(1.0, 1.0), C64::new(1.0, 4.0), 1e-2).unwrap();
    (
        flat < 1e-4 && orders_ok && tr.discrepancy < 1e-4,
        format!(
            "flatness {flat:e} (< 1e-4), orders {orders:.3?}; transport at N=60 {:e} (< 1e-4)",
            tr.discrepancy
        ),
    )
}

fn obstruction() -> Outcome {
    let (v, w) = (C64::new(1.0, 0.0), I);
    let mut identity: f64 = 0.0;
    let mut agreement: f64 = 0.0;
    let mut witnesses = Vec::new();
    for k in [1, 2] {
        let m = Model::new(lvl(k), 40);
        for s in sigmas() {
            for f in ["x", "x^2 + y^2"] {
                let t = C64::new(k as f64, 3.0);
                let r = t_obstruction_check(&m, &geo(s), v, w, t, &Poly2::parse(f).unwrap(), 1e-3).unwrap();
                identity = identity.max(r.identity_residual);
                agreement = agreement.max(r.symbol_agreement);
                witnesses.push(format!("k={k} sigma={s} f={f}: {:.4e}", r.witness));
            }
        }
    }
    (
        identity < 1e-4 && agreement < 1e-5,
        format!(
            "identity {identity:e} (< 1e-4), symbol agreement {agreement:e} (< 1e-5); witness [{}]",
            witnesses.join("; ")
        ),
    )
}

fn symbols() -> Outcome {
    let r = symbol_round_trip::<Gq>(lvl(2), 100, 4, 3, SEED);
    (r.failures == 0, format!("{} of {} round trips fail", r.failures, r.samples))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("symbolic recursion", recursion_symbolic),
        ("coefficient oracle equivalence", coefficient_oracles),
        ("uniqueness and rescaling", uniqueness_and_rescaling),
        ("symbolic trivialisation", trivialisation_symbolic),
        ("algebraic identities", algebraic_identities),
        ("numerical model structure", model_structural),
        ("first-step solution", first_step),
        ("asymptotic decay", decay),
        ("numeric flatness and trivialisation", flatness_and_trivialisation),
        ("t, tbar obstruction", obstruction),
        ("symbol calculus", symbols),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = run();
        all &= pass;
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag} [{:>2}] {name} ({:.1}s): {detail}", i + 1, start.elapsed().as_secs_f64());
    }
    if !all {
        std::process::exit(1);
    }
}
