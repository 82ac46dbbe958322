mod common;

use num_rational::Ratio;
use proptest::prelude::*;
use symlab::besicovitch::{besicovitch_ball_test, besicovitch_db, disagreement_density};
use symlab::density::{to_f64, Schedule};
use symlab::systems::{CircleFraction, SymbolicPoint};

fn random_point(seed: u64) -> SymbolicPoint {
    SymbolicPoint::bernoulli(seed, 2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pseudometric_axioms_per_window(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (random_point(a), random_point(b), random_point(c));
        let schedule = Schedule::dyadic(12);
        let xy = disagreement_density(&x, &y, &schedule).unwrap();
        let yx = disagreement_density(&y, &x, &schedule).unwrap();
        let yz = disagreement_density(&y, &z, &schedule).unwrap();
        let xz = disagreement_density(&x, &z, &schedule).unwrap();
        prop_assert_eq!(&xy.values, &yx.values);
        for k in 0..schedule.ends().len() {
            prop_assert!(xz.values[k] <= xy.values[k] + yz.values[k]);
        }
        let xx = disagreement_density(&x, &x, &schedule).unwrap();
        prop_assert!(xx.values.iter().all(|v| *v == Ratio::new(0, 1)));
    }

    #[test]
    fn shift_compatibility(a in any::<u64>(), t in 0u64..32) {
        let x = SymbolicPoint::from_text("0010110").unwrap();
        let y = random_point(a);
        let schedule = Schedule::dyadic(14);
        let base = disagreement_density(&x, &y, &schedule).unwrap();
        let shifted = disagreement_density(&x.shifted(t), &y.shifted(t), &schedule).unwrap();
        let n_min = schedule.ends()[schedule.ends().len() / 2];
        let diff = (to_f64(base.limsup_est) - to_f64(shifted.limsup_est)).abs();
        prop_assert!(diff <= (t + 1) as f64 / (n_min + 1) as f64);
    }

    #[test]
    fn cantor_zero_iff_symbolic_zero(a in any::<u64>(), flips in prop::collection::vec(0u64..4096, 0..40)) {
        let x = random_point(a);
        let prefix = x.prefix(5000);
        let mut other = prefix[..5000].to_vec();
        for f in flips {
            other[f as usize] ^= 1;
        }
        let y = SymbolicPoint::from_rule(2, "flipped", move |i| other.get(i as usize).copied().unwrap_or(0)).unwrap();
        let est = besicovitch_db(&x, &y, 4000).unwrap();
        let zero = to_f64(est.symbolic_density.limsup_est) == 0.0;
        prop_assert_eq!(est.cantor_db == Ratio::new(0, 1), zero);
    }
}

#[test]
fn examples() {
    let a = SymbolicPoint::from_text("01").unwrap();
    let b = SymbolicPoint::from_text("10").unwrap();
    let est = besicovitch_db(&a, &b, 1 << 12).unwrap();
    assert_eq!(est.cantor_db, Ratio::new(1, 1));
    assert_eq!(est.symbolic_density.limsup_est, Ratio::new(1, 1));
    assert!(!besicovitch_ball_test(&a, &b, Ratio::new(1, 2), 1 << 12).unwrap());

    let same = besicovitch_db(&a, &a, 1 << 12).unwrap();
    assert_eq!(same.cantor_db, Ratio::new(0, 1));
    assert_eq!(same.averaged, Ratio::new(0, 1));
    assert_eq!(same.symbolic_density.limsup_est, Ratio::new(0, 1));
    assert!(besicovitch_ball_test(&a, &a, Ratio::new(1, 1000), 1 << 12).unwrap());
}

#[test]
fn single_one_is_at_distance_zero() {
    let h = 1_000_000;
    let zero = SymbolicPoint::constant(0, 2);
    let one = SymbolicPoint::indicator("single@5", |i| i == 5);
    let est = besicovitch_db(&zero, &one, h).unwrap();
    assert!(to_f64(est.symbolic_density.limsup_est) <= 2.0 / h as f64);
}

#[test]
fn powers_generators_are_at_distance_zero() {
    let x = SymbolicPoint::indicator("1_{2^n}", |i| i >= 2 && i.is_power_of_two());
    let y = SymbolicPoint::indicator("1_{2,8}", |i| i == 2 || i == 8);
    assert!(besicovitch_ball_test(&x, &y, Ratio::new(1, 10), 1 << 20).unwrap());
}

#[test]
fn independent_random_points() {
    let h = 1_000_000;
    let est = besicovitch_db(&random_point(1), &random_point(2), h).unwrap();
    let (a, b) = (random_point(1).prefix(h as usize + 1), random_point(2).prefix(h as usize + 1));
    let direct = (0..=h as usize).filter(|&i| a[i] != b[i]).count() as f64 / (h + 1) as f64;
    assert!((direct - 0.5).abs() < 0.01);
    assert!((to_f64(est.symbolic_density.limsup_est) - 0.5).abs() < 0.01);
}

#[test]
fn sturmian_phase_offset() {
    let h = 1_000_000usize;
    let t = CircleFraction::from_ratio(1, 100).unwrap();
    let alpha = CircleFraction::golden();
    let x = SymbolicPoint::sturmian(alpha, CircleFraction::ZERO).unwrap();
    let y = SymbolicPoint::sturmian(alpha, t).unwrap();
    let est = besicovitch_db(&x, &y, h as u64).unwrap();
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (p, q) = (common::float_coding(g, 0.0, h + 1), common::float_coding(g, 0.01, h + 1));
    let oracle = (0..=h).filter(|&i| p[i] != q[i]).count() as f64 / (h + 1) as f64;
    assert!((oracle - 0.02).abs() < 0.002);
    assert!((to_f64(est.symbolic_density.limsup_est) - oracle).abs() < 0.002);
}

#[test]
fn alphabet_mismatch_is_an_error() {
    let a = SymbolicPoint::constant(0, 2);
    let b = SymbolicPoint::constant(0, 3);
    assert!(besicovitch_db(&a, &b, 100).is_err());
}
