//! A regular Toeplitz point whose levels run through every binary word.
//!
//! Level `n` fills the progression `j_n + 2^n ℤ₊` with the symbols of the
//! lexicographic concatenation `w^n` of all binary words of length `n`,
//! repeated. `j_1 = 0` and `j_{n+1}` is the least position missed by levels
//! `1..=n`.

use num_integer::Integer;

use crate::factor::{PeriodicStructure, Progression};

/// Deepest level computed; level 62 already has period 2^62.
pub const MAX_LEVEL: usize = 62;

/// `j_1, ..., j_levels` by the covering recursion.
///
/// The positions missed by the first `n` levels form a union of residue
/// classes modulo `lcm(2, ..., 2^n)`; the recursion tracks those classes.
pub fn j_sequence(levels: usize) -> Vec<u64> {
    assert!(levels <= MAX_LEVEL, "at most {MAX_LEVEL} levels");
    let mut modulus = 1u64;
    let mut uncovered = vec![0u64];
    let mut out = Vec::with_capacity(levels);
    for n in 1..=levels as u32 {
        let j = *uncovered.iter().min().expect("levels never cover everything");
        out.push(j);
        let period = 1u64 << n;
        let lifted = modulus.lcm(&period);
        let copies = lifted / modulus;
        uncovered = uncovered
            .iter()
            .flat_map(|&r| (0..copies).map(move |k| r + k * modulus))
            .filter(|&r| r % period != j % period)
            .collect();
        modulus = lifted;
    }
    out
}

/// Symbol `k` of `w^n`, the concatenation of the length-`n` binary words in
/// lexicographic order.
pub fn concatenation_symbol(n: u32, k: u128) -> u8 {
    let word = k / n as u128;
    let pos = (k % n as u128) as u32;
    ((word >> (n - 1 - pos)) & 1) as u8
}

/// Symbol at `index` given the level starts `j`. Positions outside every
/// listed level read as 0.
pub fn symbol(j: &[u64], index: u64) -> u8 {
    for (level, &start) in j.iter().enumerate() {
        let n = level as u32 + 1;
        if index >= start && (index - start).is_multiple_of(1u64 << n) {
            let i = ((index - start) >> n) as u128;
            return concatenation_symbol(n, i % ((n as u128) << n));
        }
    }
    0
}

/// The first `levels` levels as patterned progressions of period `2^n`.
pub fn skeleton(levels: usize, horizon: u64) -> PeriodicStructure {
    let progressions = j_sequence(levels)
        .into_iter()
        .enumerate()
        .map(|(level, start)| {
            let n = level as u32 + 1;
            let symbols = (0..(n as u128) << n).map(|k| concatenation_symbol(n, k)).collect();
            Progression {
                period: 1 << n,
                residue: start,
                symbols,
            }
        })
        .collect();
    PeriodicStructure::exact(progressions, horizon)
}
