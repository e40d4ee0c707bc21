use hwconn_core::algebra::{
    bch_solution, delta_power_commutator, letters_product, random_letters, reduce_letters, s_op,
    trivialisation_series_check, verify_adiff, verify_recursion, Strategy,
};
use hwconn_core::recursion::{
    check_e, closed_form_table, phi_apply, rescale_table, solve_step, solve_table, violations,
};
use hwconn_core::scalar::{gq, gq_int};
use hwconn_core::series::{r_series, FormalSeries};
use hwconn_core::{ExactAlgebraElement, GaussianRational as Gq, Level};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lvl(k: i64) -> Level {
    Level::new(k).unwrap()
}

fn zeros(n: usize) -> Vec<Gq> {
    vec![gq_int(0); n]
}

#[test]
fn rewriting_is_confluent() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..2000 {
        let k = lvl(1 + i % 3);
        let w = random_letters(&mut rng, 8);
        let left: ExactAlgebraElement = reduce_letters(k, &w, gq_int(1), Strategy::Leftmost);
        let right: ExactAlgebraElement = reduce_letters(k, &w, gq_int(1), Strategy::Rightmost);
        assert_eq!(left, right, "{w:?}");
        assert_eq!(left, letters_product(k, &w), "{w:?}");
    }
}

#[test]
fn delta_power_identity() {
    for k in 1..=3 {
        for n in 1..=12 {
            for sign in [1, -1] {
                delta_power_commutator::<Gq>(lvl(k), sign, n).unwrap();
            }
        }
    }
}

#[test]
fn adiff_through_eight() {
    for k in 1..=3 {
        for l in 1..=8 {
            assert!(verify_adiff::<Gq>(lvl(k), l).unwrap().is_zero(), "k={k} l={l}");
        }
    }
}

#[test]
fn recursion_with_random_diagonals() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    use rand::Rng;
    for k in 1..=3 {
        let mut tables = vec![solve_table(lvl(k), 6, &zeros(6)).unwrap()];
        for _ in 0..2 {
            let free: Vec<Gq> = (0..6)
                .map(|_| gq((rng.gen_range(-5..=5), rng.gen_range(1..=4)), (rng.gen_range(-5..=5), rng.gen_range(1..=4))))
                .collect();
            tables.push(solve_table(lvl(k), 6, &free).unwrap());
        }
        for t in &tables {
            for l in 1..=6 {
                assert!(verify_recursion(l, t).unwrap().is_zero(), "k={k} l={l}");
            }
        }
    }
}

#[test]
fn bch_matches_zero_diagonal_table() {
    for k in 1..=3 {
        let table = closed_form_table::<Gq>(lvl(k), 6);
        let series = bch_solution::<Gq>(lvl(k), 6).unwrap();
        for l in 0..=6 {
            assert_eq!(series.coeffs()[l], s_op(&table, l).unwrap());
        }
    }
}

#[test]
fn trivialisation_through_six() {
    for k in 1..=3 {
        for order in 1..=6 {
            assert!(trivialisation_series_check::<Gq>(lvl(k), order).unwrap().is_zero());
        }
    }
}

#[test]
fn solver_oracles_agree() {
    for k in 1..=3 {
        let t = solve_table(lvl(k), 25, &zeros(25)).unwrap();
        for l in 1..=25 {
            let prev = t.row(l - 1).unwrap();
            for sign in [1, -1] {
                let step = solve_step(lvl(k), prev, gq_int(0), sign).unwrap();
                assert_eq!(step[..l], phi_apply(lvl(k), prev, sign)[..]);
            }
        }
        assert_eq!(closed_form_table::<Gq>(lvl(k), 20), solve_table(lvl(k), 20, &zeros(20)).unwrap());
        let t20 = closed_form_table::<Gq>(lvl(k), 20);
        assert!(violations(&t20).is_empty());
    }
}

#[test]
fn rescaled_tables_are_series_multiples() {
    let k = lvl(2);
    let t0 = closed_form_table::<Gq>(k, 12);
    let alpha = vec![gq_int(1), gq((1, 2), (0, 1)), gq_int(0), gq((0, 1), (-3, 1)), gq_int(2)];
    let t = rescale_table(&t0, &alpha).unwrap();
    assert!(violations(&t).is_empty());
    let a = FormalSeries::new(alpha.iter().cloned().chain(std::iter::repeat(gq_int(0))).take(13).collect()).unwrap();
    for l in 0..=12 {
        for r in 0..=l {
            let expect = (0..=r).fold(gq_int(0), |acc, i| acc + a.coeffs()[i].clone() * t0.get(r - i, l - i).unwrap().clone());
            assert_eq!(*t.get(r, l).unwrap(), expect);
        }
    }
}

#[test]
fn gauge_series_exponential() {
    for k in 1..=4 {
        let r = r_series::<Gq>(lvl(k), 10);
        let e = r.scaled(&gq_int(4 * k)).exp().unwrap();
        let ik = gq((0, 1), (k, 1));
        let minus = FormalSeries::new(vec![gq_int(1), -ik.clone()].into_iter().chain(zeros(9)).collect()).unwrap();
        let plus = FormalSeries::new(vec![gq_int(1), ik].into_iter().chain(zeros(9)).collect()).unwrap();
        assert_eq!(e.mul(&minus).unwrap(), plus);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn off_diagonal_perturbation_breaks_e(k in 1i64..=3, l in 1usize..=10, r_frac in 0.0f64..1.0, num in 1i64..7, den in 1i64..5) {
        let t = closed_form_table::<Gq>(lvl(k), 10);
        let r = ((l as f64) * r_frac) as usize % l;
        let bumped = t.get(r, l).unwrap().clone() + gq((num, den), (0, 1));
        let bad = t.with_entry(l, r, bumped);
        let mut hit = false;
        for m in 1..=l {
            for sign in [1, -1] {
                if !num_traits::Zero::is_zero(&check_e(&bad, m, l, sign).unwrap()) {
                    hit = true;
                }
            }
        }
        prop_assert!(hit);
    }
}
