//! Equicontinuous-factor side information: periodic structures of Toeplitz
//! points and the ambiguity set of Sturmian codings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::density::{to_f64, Density, DensityProfile, Schedule, DEFAULT_OSCILLATION_TOLERANCE};
use crate::error::{invalid, Result};
use crate::probes::Verdict;
use crate::systems::{to_text, CircleFraction, SymbolicPoint};

/// The progression `residue + i·period` (`i ≥ 0`) carrying
/// `symbols[i mod symbols.len()]`; constant when `symbols` has length 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Progression {
    pub period: u64,
    pub residue: u64,
    #[serde(serialize_with = "symbols_as_text")]
    pub symbols: Vec<u8>,
}

fn symbols_as_text<S: Serializer>(s: &[u8], ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&to_text(s))
}

impl Progression {
    pub fn constant(period: u64, residue: u64, symbol: u8) -> Self {
        Progression {
            period,
            residue,
            symbols: vec![symbol],
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= self.residue && (n - self.residue).is_multiple_of(self.period)
    }

    pub fn symbol_at(&self, n: u64) -> Option<u8> {
        self.contains(n).then(|| {
            let i = (n - self.residue) / self.period;
            self.symbols[(i % self.symbols.len() as u64) as usize]
        })
    }

    /// Whether the two progressions share an element.
    pub fn intersects(&self, other: &Progression) -> bool {
        let g = num_integer::gcd(self.period, other.period);
        self.residue % g == other.residue % g
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureSource {
    /// Read off a point prefix; maximality holds up to `max_period`.
    Extracted,
    /// Known in closed form.
    Exact,
}

/// Pairwise disjoint progressions with the sum of their densities.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodicStructure {
    pub progressions: Vec<Progression>,
    #[serde(serialize_with = "big_ratio")]
    pub coverage_sum: BigRational,
    pub max_period: u64,
    pub horizon: u64,
    /// A progression was found with period above `max_period / 2`, so
    /// larger periods may still add coverage.
    pub climbing: bool,
    pub source: StructureSource,
}

fn big_ratio<S: Serializer>(r: &BigRational, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

fn coverage_of(progressions: &[Progression]) -> BigRational {
    progressions
        .iter()
        .map(|p| BigRational::new(BigInt::one(), BigInt::from(p.period)))
        .fold(BigRational::zero(), |a, b| a + b)
}

impl PeriodicStructure {
    pub fn exact(progressions: Vec<Progression>, horizon: u64) -> Self {
        let coverage_sum = coverage_of(&progressions);
        let max_period = progressions.iter().map(|p| p.period).max().unwrap_or(0);
        PeriodicStructure {
            progressions,
            coverage_sum,
            max_period,
            horizon,
            climbing: false,
            source: StructureSource::Exact,
        }
    }

    pub fn covers(&self, n: u64) -> bool {
        self.progressions.iter().any(|p| p.contains(n))
    }

    pub fn coverage_f64(&self) -> f64 {
        self.coverage_sum.to_f64().unwrap_or(f64::NAN)
    }

    /// `1 − coverage_sum`.
    pub fn deficit(&self) -> BigRational {
        BigRational::one() - &self.coverage_sum
    }
}

/// Reads the constant progressions of `x` off its prefix.
///
/// Every position `j < 2·max_period` not yet covered gets its least period
/// `p ≤ max_period` with `x_{j+ip}` constant for all `i ≤ horizon/p`; the
/// progression `j + pℤ₊` is kept unless it meets one already kept.
pub fn extract_periodic_structure(x: &SymbolicPoint, max_period: u64, horizon: u64) -> Result<PeriodicStructure> {
    if max_period == 0 {
        return Err(invalid("max_period must be positive"));
    }
    if horizon < 4 * max_period {
        return Err(invalid(format!("horizon {horizon} below 4·max_period = {}", 4 * max_period)));
    }
    let span = 2 * max_period;
    let prefix = x.prefix((horizon + span + 1) as usize);
    let least_period: Vec<Option<u64>> = (0..span)
        .into_par_iter()
        .map(|j| {
            (1..=max_period).find(|&p| {
                let a = prefix[j as usize];
                (0..=horizon / p).all(|i| prefix[(j + i * p) as usize] == a)
            })
        })
        .collect();
    let mut progressions: Vec<Progression> = Vec::new();
    for j in 0..span {
        let Some(p) = least_period[j as usize] else { continue };
        if progressions.iter().any(|q| q.contains(j)) {
            continue;
        }
        let candidate = Progression::constant(p, j, prefix[j as usize]);
        if progressions.iter().all(|q| !q.intersects(&candidate)) {
            progressions.push(candidate);
        }
    }
    let climbing = progressions.iter().any(|p| 2 * p.period > max_period);
    Ok(PeriodicStructure {
        coverage_sum: coverage_of(&progressions),
        progressions,
        max_period,
        horizon,
        climbing,
        source: StructureSource::Extracted,
    })
}

/// Regularity verdict from the coverage deficit `1 − Σ 1/p`.
///
/// A deficit above tolerance only fails when the structure is not still
/// climbing at its largest probed period.
pub fn regularity_check(ps: &PeriodicStructure, tolerance: Density) -> Verdict {
    let tol = BigRational::new(BigInt::from(*tolerance.numer()), BigInt::from(*tolerance.denom()));
    if ps.deficit() <= tol {
        Verdict::Pass
    } else if ps.climbing {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    }
}

/// Density of the times whose rotation image sits near a discontinuity of
/// the coding.
#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    pub ambiguity_density: DensityProfile,
    pub delta: f64,
    pub horizon: u64,
    pub regular_verdict: Verdict,
}

/// Multiple of `delta` below which the ambiguity density counts as
/// vanishing with the resolution.
pub const FIBER_SLACK: u64 = 5;

/// Times `i ≤ horizon` with `frac(β + iα)` strictly within `delta` of `0`
/// or of `1 − α`.
pub fn sturmian_fiber_ambiguity(
    alpha: CircleFraction,
    beta: CircleFraction,
    delta: CircleFraction,
    horizon: u64,
) -> Result<FiberReport> {
    alpha.check_irrational()?;
    let tenth = CircleFraction::from_ratio(1, 10)?;
    if delta == CircleFraction::ZERO || delta >= tenth {
        return Err(invalid("delta must lie in (0, 0.1)"));
    }
    let cut = alpha.negate();
    let schedule = Schedule::dyadic_upto(horizon);
    let profile = DensityProfile::from_membership(&schedule, &[], DEFAULT_OSCILLATION_TOLERANCE, |i| {
        let v = beta.wrapping_add(alpha.times(i));
        v.circle_distance(CircleFraction::ZERO) < delta || v.circle_distance(cut) < delta
    });
    let bound = delta.to_f64() * FIBER_SLACK as f64;
    let regular_verdict = if to_f64(profile.limsup_est) <= bound {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(FiberReport {
        ambiguity_density: profile,
        delta: delta.to_f64(),
        horizon,
        regular_verdict,
    })
}
