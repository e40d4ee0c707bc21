use hwconn_core::recursion::closed_form_table;
use hwconn_core::{GaussianRational as Gq, Level};
use hwconn_landau::experiments::{
    commutation, decay_experiment, dt_delta_order, first_step_check, flatness_order, symbol_round_trip,
    t_obstruction_check, trivialisation_check, DecayParams,
};
use hwconn_landau::{GeometryData, Model, Poly2};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

fn lvl(k: i64) -> Level {
    Level::new(k).unwrap()
}

fn geo(s: C64) -> GeometryData {
    GeometryData::new(s).unwrap()
}

#[test]
fn structural_relations_on_two_cutoffs() {
    for n in [30, 50] {
        for k in [1, 2, 4] {
            let m = Model::new(lvl(k), n);
            let r = commutation(&m, &geo(C64::new(-0.4, 0.9)), C64::new(0.5, 1.5)).unwrap();
            assert!(r.worst_structural() < 1e-8, "N={n} k={k}: {r:?}");
            assert!(r.multiplication < 1e-9);
        }
    }
}

#[test]
fn b_bbar_is_a_multiple_of_delta_at_i() {
    let m = Model::new(lvl(3), 30);
    let r = commutation(&m, &geo(I), ONE).unwrap();
    assert!((r.b_bbar_multiple - C64::new(6.0, 0.0)).norm() < 1e-10);
    assert!(r.b_bbar_residual < 1e-10);
}

#[test]
fn delta_variation_is_second_order() {
    let m = Model::new(lvl(1), 40);
    let r = dt_delta_order(&m, &geo(I), I, &[1e-2, 5e-3, 2.5e-3]).unwrap();
    let order = r.order.unwrap();
    assert!((order - 2.0).abs() < 0.2, "{r:?}");
}

#[test]
fn first_step_at_two_points() {
    let m = Model::new(lvl(2), 30);
    for s in [I, C64::new(0.3, 1.2)] {
        for f in ["x", "x^2 + y^2", "x*y - 3*y^2"] {
            let r = first_step_check(&m, &geo(s), &Poly2::parse(f).unwrap()).unwrap();
            assert!(r < 1e-9, "{f} at {s}: {r}");
        }
    }
}

#[test]
fn decay_improves_with_order() {
    let m = Model::new(lvl(1), 30);
    let table = closed_form_table::<Gq>(lvl(1), 2);
    for l in 0..=2 {
        let params = DecayParams {
            f: Poly2::parse("x^2 + y^2").unwrap(),
            max_order: l,
            s_grid: vec![16.0, 32.0, 64.0, 128.0],
            sigma: C64::new(0.3, 1.2),
            direction: C64::new(1.0, 0.5),
            section: (1, 0),
        };
        let r = decay_experiment(&m, &table, &params).unwrap();
        assert!(r.passes(l), "L={l}: {r:?}");
    }
}

#[test]
fn flatness_converges_quadratically() {
    let m = Model::new(lvl(1), 30);
    let test = m.curve(&Poly2::x()).unwrap();
    let r = flatness_order(&m, &geo(I), ONE, I, C64::new(1.0, 5.0), &[1e-2, 5e-3, 2.5e-3], &test).unwrap();
    assert!((r.order.unwrap() - 2.0).abs() < 0.2, "{r:?}");
}

#[test]
fn trivialisation_does_not_degrade_with_cutoff() {
    let t = C64::new(1.0, 4.0);
    let coarse = trivialisation_check(&Model::new(lvl(1), 20), I, ONE + I, t, 1e-2).unwrap();
    let fine = trivialisation_check(&Model::new(lvl(1), 40), I, ONE + I, t, 1e-2).unwrap();
    assert!(fine.discrepancy < 1e-4);
    assert!(fine.discrepancy <= coarse.discrepancy + 1e-9, "{coarse:?} {fine:?}");
}

#[test]
fn obstruction_symbol_for_linear_curve() {
    let m = Model::new(lvl(2), 24);
    let r = t_obstruction_check(&m, &geo(I), ONE, I, C64::new(2.0, 3.0), &Poly2::x(), 1e-3).unwrap();
    assert!(r.identity_residual < 1e-4);
    assert!(r.symbol_agreement < 1e-5);
    // 8k·(d_T G)(∂₁, ∂₂)·dx with d_T G = −i at σ = i
    assert!((r.symbol_direct[0].coeff(0, 0) - C64::new(0.0, -16.0)).norm() < 1e-12);
    assert!(r.witness > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn symbol_round_trip_is_exact(seed in any::<u64>(), k in 1i64..=4) {
        let r = symbol_round_trip::<Gq>(lvl(k), 5, 4, 3, seed);
        prop_assert_eq!(r.failures, 0);
    }
}
