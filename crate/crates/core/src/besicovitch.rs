//! Finite-horizon Besicovitch pseudometric between symbolic points under
//! the Cantor metric `d(x, y) = 2^{-min{i : x_i ≠ y_i}}`.

use num_rational::Ratio;
use serde::Serialize;

use crate::density::{Density, DensityProfile, Schedule, DEFAULT_OSCILLATION_TOLERANCE};
use crate::error::{Error, Result};
use crate::systems::SymbolicPoint;

/// Finest grid value `2^-MAX_RESOLUTION` used for the infimum.
pub const MAX_RESOLUTION: u32 = 30;

#[derive(Clone, Debug, Serialize)]
pub struct BesicovitchEstimate {
    /// Profile of `{i : x_i ≠ y_i}`.
    pub symbolic_density: DensityProfile,
    #[serde(with = "crate::density::ratio_serde")]
    pub cantor_db: Density,
    /// Upper limit of the running averages of `d(σ^i x, σ^i y)`.
    #[serde(with = "crate::density::ratio_serde")]
    pub averaged: Density,
    pub horizon: u64,
}

fn check_alphabets(x: &SymbolicPoint, y: &SymbolicPoint) -> Result<()> {
    if x.alphabet_size() != y.alphabet_size() {
        return Err(Error::AlphabetMismatch {
            left: x.alphabet_size(),
            right: y.alphabet_size(),
        });
    }
    Ok(())
}

/// Profile of `{i : a_i ≠ b_i}` over the schedule; both slices must reach
/// past the last window end.
pub(crate) fn disagreement_profile(a: &[u8], b: &[u8], schedule: &Schedule) -> DensityProfile {
    DensityProfile::from_membership(schedule, &[], DEFAULT_OSCILLATION_TOLERANCE, |i| {
        a[i as usize] != b[i as usize]
    })
}

pub fn disagreement_density(x: &SymbolicPoint, y: &SymbolicPoint, schedule: &Schedule) -> Result<DensityProfile> {
    check_alphabets(x, y)?;
    let n = schedule.last() as usize + 1;
    Ok(disagreement_profile(&x.prefix(n), &y.prefix(n), schedule))
}

/// `k_i = min{k : a_{i+k} ≠ b_{i+k}}` capped at [`MAX_RESOLUTION`], for
/// `i < len`; the slices must have at least `len + MAX_RESOLUTION` symbols.
fn first_disagreements(a: &[u8], b: &[u8], len: usize) -> Vec<u8> {
    let cap = MAX_RESOLUTION as usize;
    let mut out = vec![0u8; len];
    let mut next = usize::MAX;
    for i in (0..len + cap).rev() {
        if a[i] != b[i] {
            next = i;
        }
        if i < len {
            out[i] = next.saturating_sub(i).min(cap) as u8;
        }
    }
    out
}

/// Estimates of `d_b(x, y)` over the times `[0, horizon]`.
///
/// `cantor_db` is the least `δ = 2^-r` (`0 ≤ r ≤ 30`) with
/// `limsup_est(Δ_δ) < δ`, where `Δ_{2^-r} = {i : k_i < r}`; it is reported
/// as 0 when even `Δ_{2^-30}` has zero estimated density.
pub fn besicovitch_db(x: &SymbolicPoint, y: &SymbolicPoint, horizon: u64) -> Result<BesicovitchEstimate> {
    check_alphabets(x, y)?;
    let len = horizon as usize + 1;
    let need = len + MAX_RESOLUTION as usize;
    let (a, b) = (x.prefix(need), y.prefix(need));
    let k = first_disagreements(&a, &b, len);
    let schedule = Schedule::dyadic_upto(horizon);
    let ends = schedule.ends();
    let cap = MAX_RESOLUTION as usize;

    // per window: histogram of k_i and the running sum of 2^{30-k_i}
    let mut hist = vec![0u64; cap + 1];
    let mut counts: Vec<Vec<u64>> = Vec::with_capacity(ends.len());
    let mut sums: Vec<u64> = Vec::with_capacity(ends.len());
    let mut sum = 0u64;
    let mut next = 0usize;
    for &end in ends {
        while next <= end as usize {
            let ki = k[next] as usize;
            hist[ki] += 1;
            if ki < cap {
                sum += 1 << (cap - ki);
            }
            next += 1;
        }
        counts.push(hist.clone());
        sums.push(sum);
    }
    let sizes: Vec<u64> = ends.iter().map(|e| e + 1).collect();
    let delta_profile = |r: usize| {
        let c: Vec<u64> = counts.iter().map(|h| h[..r].iter().sum()).collect();
        DensityProfile::from_counts(ends, &c, &sizes, DEFAULT_OSCILLATION_TOLERANCE)
    };
    let symbolic_density = delta_profile(1);

    let mut cantor_db = Ratio::new(1, 1);
    for r in 1..=cap {
        if delta_profile(r).limsup_est < Ratio::new(1, 1u64 << r) {
            cantor_db = Ratio::new(1, 1u64 << r);
        } else {
            break;
        }
    }
    if cantor_db == Ratio::new(1, 1u64 << cap) && delta_profile(cap).limsup_est == Ratio::new(0, 1) {
        cantor_db = Ratio::new(0, 1);
    }

    let tail_start = *sizes.last().expect("nonempty schedule");
    let averaged = sums
        .iter()
        .zip(&sizes)
        .filter(|(_, &s)| 2 * s >= tail_start)
        .map(|(&total, &s)| Ratio::new(total, s << cap))
        .max()
        .expect("last window is in the tail");

    Ok(BesicovitchEstimate {
        symbolic_density,
        cantor_db,
        averaged,
        horizon,
    })
}

/// Whether `y` lies in the estimated Besicovitch ball of radius `epsilon`
/// around `x`.
pub fn besicovitch_ball_test(x: &SymbolicPoint, y: &SymbolicPoint, epsilon: Density, horizon: u64) -> Result<bool> {
    if epsilon == Ratio::new(0, 1) {
        return Err(crate::error::invalid("epsilon must be positive"));
    }
    Ok(besicovitch_db(x, y, horizon)?.cantor_db <= epsilon)
}
