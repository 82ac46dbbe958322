mod common;

use std::collections::BTreeSet;

use num_bigint::BigUint;
use proptest::prelude::*;
use symlab::systems::{
    full_shift, language, periodic_model, powers_subshift, regular_toeplitz_example, single_one_subshift,
    sturmian_model, toeplitz, CircleFraction, SymbolicPoint,
};

const BUDGET: usize = 1 << 22;

#[test]
fn sturmian_agrees_with_160_bit_rotation() {
    let n = 10_000_000;
    let alpha = common::golden_fixed(160);
    let ours = CircleFraction::golden();
    assert_eq!(common::big_to_u128(&(&alpha >> 32u32)), ours.0);
    let reference = common::rotation_coding(&alpha, &BigUint::from(0u32), 160, n);
    let x = SymbolicPoint::sturmian(ours, CircleFraction::ZERO).unwrap();
    let prefix = x.prefix(n);
    let first_mismatch = (0..n).find(|&i| prefix[i] != reference[i]);
    assert_eq!(first_mismatch, None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn random_phases_agree_with_160_bit_rotation(beta_hi in any::<u128>()) {
        let n = 200_000;
        let alpha = common::golden_fixed(160);
        let beta = BigUint::from(beta_hi) << 32u32;
        let reference = common::rotation_coding(&alpha, &beta, 160, n);
        let x = SymbolicPoint::sturmian(CircleFraction::golden(), CircleFraction(beta_hi)).unwrap();
        prop_assert_eq!(&x.prefix(n)[..n], &reference[..]);
    }
}

#[test]
fn sturmian_complexity_is_n_plus_one() {
    let m = sturmian_model(CircleFraction::golden(), CircleFraction::ZERO).unwrap();
    let prefix = m.generators[0].prefix(1_000_000);
    for n in 1..=20 {
        assert_eq!(common::factor_count(&prefix[..1_000_000], n), n + 1);
        assert_eq!(language(&m, n, 1_000_000, BUDGET).unwrap().len(), n + 1);
    }
}

#[test]
fn sturmian_matches_float_coding_on_a_short_prefix() {
    let alpha = CircleFraction::sqrt2_minus_one();
    let x = SymbolicPoint::sturmian(alpha, CircleFraction::ZERO).unwrap();
    let reference = common::float_coding(2f64.sqrt() - 1.0, 0.0, 1000);
    assert_eq!(&x.prefix(1000)[..1000], &reference[..]);
    assert_eq!(x.symbol(0), 0);
}

#[test]
fn rational_rotations_rejected() {
    for text in ["1/2", "3/7", "355/1000"] {
        let a: CircleFraction = text.parse().unwrap();
        assert!(sturmian_model(a, CircleFraction::ZERO).is_err(), "{text}");
    }
}

#[test]
fn toeplitz_matches_direct_fill() {
    let len = 1 << 16;
    let (residues, x) = common::toeplitz_fill(62, len);
    assert!(x.iter().all(|&s| s < 2));
    assert_eq!(&residues[..4], &[0, 1, 3, 7]);
    assert_eq!(toeplitz::j_sequence(residues.len()), residues);
    let ours = SymbolicPoint::toeplitz().prefix(len);
    assert_eq!(&ours[..len], &x[..]);
}

#[test]
fn toeplitz_levels_have_halving_densities() {
    let m = regular_toeplitz_example(1 << 20).unwrap();
    let symlab::systems::SideInfo::Toeplitz { skeleton } = &m.side_info else {
        panic!("toeplitz side info");
    };
    let periods: Vec<u64> = skeleton.progressions.iter().map(|p| p.period).collect();
    let expected: Vec<u64> = (1..=periods.len() as u32).map(|n| 1 << n).collect();
    assert_eq!(periods, expected);
}

#[test]
fn toeplitz_is_regularly_recurrent() {
    let h = 1usize << 20;
    let x = SymbolicPoint::toeplitz().prefix(h + 1);
    for j in 0..=100usize {
        let found = (1..=(1usize << 17)).any(|m| (0..=h / m).all(|i| j + i * m > h || x[j + i * m] == x[j]));
        assert!(found, "no period for {j}");
    }
}

#[test]
fn languages_are_factor_closed_and_extendable() {
    let models = [
        single_one_subshift(),
        powers_subshift(),
        sturmian_model(CircleFraction::golden(), CircleFraction::ZERO).unwrap(),
        regular_toeplitz_example(1 << 14).unwrap(),
        periodic_model(&[0, 0, 1]).unwrap(),
    ];
    let h = 1 << 14;
    for m in &models {
        for n in 2..=8 {
            let big = language(m, n, h, BUDGET).unwrap();
            let small = language(m, n - 1, h, BUDGET).unwrap();
            for w in &big {
                assert!(small.contains(&w[1..]) && small.contains(&w[..n - 1]), "{} {w:?}", m.name);
            }
            let prev = language(m, n - 1, h - 1, BUDGET).unwrap();
            let prefixes: BTreeSet<&[u8]> = big.iter().map(|w| &w[..n - 1]).collect();
            for w in &prev {
                assert!(prefixes.contains(&w[..]), "{} cannot extend {w:?}", m.name);
            }
        }
    }
}

#[test]
fn operation_examples() {
    let s = single_one_subshift();
    assert_eq!(s.accepts(&[0, 0, 1, 0, 0]), Some(true));
    assert_eq!(s.accepts(&[0, 1, 1, 0]), Some(false));
    let two: Vec<Vec<u8>> = language(&s, 2, 1000, BUDGET).unwrap().into_iter().collect();
    assert_eq!(two, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
    assert_eq!(language(&full_shift(2).unwrap(), 3, 100, BUDGET).unwrap().len(), 8);
    let st = sturmian_model(CircleFraction::golden(), CircleFraction::ZERO).unwrap();
    assert_eq!(language(&st, 2, 10_000, BUDGET).unwrap().len(), 3);
}

/// Exhaustive shift search: some `t ≤ 2^20` puts every 1 of `w` on a power
/// of two at least 2.
fn powers_oracle(w: &[u8]) -> bool {
    let ones: Vec<u64> = (0..w.len()).filter(|&i| w[i] == 1).map(|i| i as u64).collect();
    (0..=1u64 << 20).any(|t| ones.iter().all(|&i| (i + t) >= 2 && (i + t).is_power_of_two()))
}

#[test]
fn powers_predicate_matches_shift_search() {
    let m = powers_subshift();
    assert_eq!(m.accepts(&[1, 1]), Some(false));
    assert_eq!(m.accepts(&[1, 0, 1]), Some(true));
    for len in 1..=10usize {
        for bits in 0u32..1 << len {
            let w: Vec<u8> = (0..len).map(|i| (bits >> i & 1) as u8).collect();
            assert_eq!(m.accepts(&w), Some(powers_oracle(&w)), "{w:?}");
        }
    }
    let g = &m.generators[1];
    assert_eq!(g.to_text(10), "0010000010");
}

#[test]
fn text_round_trip() {
    let x = SymbolicPoint::from_text("0110").unwrap();
    assert_eq!(x.to_text(8), "01100110");
    assert!(SymbolicPoint::from_text("").is_err());
}
