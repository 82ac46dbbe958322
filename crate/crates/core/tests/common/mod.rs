//! Reference computations shared by the integration tests. Nothing here
//! calls into the library's algorithms.

#![allow(dead_code)]

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

/// `|{i ≤ n : member(i)}| / (n + 1)` as a float.
pub fn brute_density(n: u64, member: impl Fn(u64) -> bool) -> f64 {
    (0..=n).filter(|&i| member(i)).count() as f64 / (n + 1) as f64
}

/// `⌊2^bits · (√5 − 1)/2⌋`.
pub fn golden_fixed(bits: u32) -> BigUint {
    let root = (BigUint::from(5u32) << (2 * bits)).sqrt();
    (root - (BigUint::one() << bits)) >> 1u32
}

/// Coding of the rotation computed with `bits` fractional bits, by
/// repeated addition.
pub fn rotation_coding(alpha: &BigUint, beta: &BigUint, bits: u32, n: usize) -> Vec<u8> {
    let modulus = BigUint::one() << bits;
    let cut = &modulus - alpha;
    let mut v = beta.clone();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(u8::from(v >= cut));
        v += alpha;
        if v >= modulus {
            v -= &modulus;
        }
    }
    out
}

/// Coding of the rotation by the float `alpha` with phase `beta`.
pub fn float_coding(alpha: f64, beta: f64, n: usize) -> Vec<u8> {
    (0..n)
        .map(|i| {
            let v = (beta + i as f64 * alpha).fract();
            u8::from(v >= 1.0 - alpha)
        })
        .collect()
}

/// Distinct factors of length `len`.
pub fn factor_count(word: &[u8], len: usize) -> usize {
    word.windows(len).collect::<HashSet<_>>().len()
}

/// The Toeplitz point filled level by level: level `n` puts the
/// lexicographic concatenation of all binary words of length `n`,
/// repeated, on the least uncovered residue class mod `2^n`. Returns the
/// residues and the first `len` symbols (positions left uncovered after
/// `levels` levels are `2`).
pub fn toeplitz_fill(levels: u32, len: usize) -> (Vec<u64>, Vec<u8>) {
    let mut x = vec![2u8; len];
    let mut residues = Vec::new();
    for n in 1..=levels {
        let Some(j) = x.iter().position(|&s| s == 2) else { break };
        residues.push(j as u64);
        let word: Vec<u8> = (0..1u32 << n)
            .flat_map(|w| (0..n).rev().map(move |b| ((w >> b) & 1) as u8))
            .collect();
        let period = 1usize << n;
        let mut i = 0;
        let mut pos = j;
        while pos < len {
            assert_eq!(x[pos], 2, "levels overlap at {pos}");
            x[pos] = word[i % word.len()];
            i += 1;
            pos += period;
        }
    }
    (residues, x)
}

pub fn big_to_u128(v: &BigUint) -> u128 {
    v.to_u128().expect("fits")
}

/// Least-squares slope.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}
