//! Greedy construction of a time sequence along which cylinder covers keep
//! splitting.
//!
//! The sample points are the words of length `max_time + m` of the
//! language: the predicate's when it has at most `budget` of them, plus the
//! factors of the generator prefixes of length `horizon`. A cell is a class
//! of points with equal length-`m` words at every chosen time; cylinder
//! cells are already disjoint, so no closure bookkeeping is needed.

use std::collections::HashMap;

use serde::Serialize;

use super::{ls_slope, PositionSet};
use crate::error::{invalid, Error, Result};
use crate::systems::{language, SubshiftModel};

/// Times searched by default: `[0, 64]`.
pub const DEFAULT_MAX_TIME: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthStep {
    pub time: usize,
    pub cells: u64,
    /// Fraction of the previous cells the chosen time split.
    pub split_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthCurve {
    /// Step 0 (no time chosen, one cell) is implied.
    pub steps: Vec<GrowthStep>,
    /// Slope of `log2 cells` per step over the last half of the steps.
    pub rate_estimate: f64,
    /// No time in range split any cell before `n_steps` were taken.
    pub stalled: bool,
    pub horizon: usize,
}

/// Chooses `s_1, s_2, ...` greedily: each step takes the smallest time in
/// `[0, max_time]` that splits the most current cells, where a cell is
/// split at `g` when two of its points carry different length-`m` words at
/// `g`.
pub fn seqentr_builder(
    model: &SubshiftModel,
    m: usize,
    n_steps: usize,
    horizon: usize,
    max_time: usize,
    budget: usize,
) -> Result<(Option<PositionSet>, GrowthCurve)> {
    if m == 0 || m > 16 {
        return Err(invalid("resolution m must lie in [1, 16]"));
    }
    let span = max_time + m;
    if span > horizon {
        return Err(invalid("max_time + m exceeds the horizon"));
    }
    let base = u64::from(model.alphabet_size);
    let words = match language(model, span, horizon, budget) {
        Ok(w) => w,
        Err(Error::BudgetExceeded { .. }) => {
            let orbits = SubshiftModel {
                predicate: None,
                ..model.clone()
            };
            language(&orbits, span, horizon, budget)?
        }
        Err(e) => return Err(e),
    };
    // codes[i][g] encodes the length-m word at g of sample word i.
    let codes: Vec<Vec<u64>> = words
        .iter()
        .map(|w| {
            (0..=max_time)
                .map(|g| w[g..g + m].iter().fold(0u64, |acc, &a| acc * base + u64::from(a)))
                .collect()
        })
        .collect();
    let mut cell = vec![0u32; codes.len()];
    let mut cells = 1usize;
    let mut chosen: Vec<usize> = Vec::new();
    let mut steps = Vec::new();
    let mut stalled = false;
    const UNSEEN: u64 = u64::MAX;
    for _ in 0..n_steps {
        let mut best: Option<(usize, usize)> = None;
        for g in (0..=max_time).filter(|g| !chosen.contains(g)) {
            let mut first = vec![UNSEEN; cells];
            let mut split = vec![false; cells];
            for (i, code) in codes.iter().enumerate() {
                let c = cell[i] as usize;
                let w = code[g];
                if first[c] == UNSEEN {
                    first[c] = w;
                } else if first[c] != w {
                    split[c] = true;
                }
            }
            let n = split.iter().filter(|&&s| s).count();
            if n > 0 && best.is_none_or(|(_, b)| n > b) {
                best = Some((g, n));
            }
        }
        let Some((g, n_split)) = best else {
            stalled = true;
            break;
        };
        let mut relabel: HashMap<(u32, u64), u32> = HashMap::new();
        for (i, code) in codes.iter().enumerate() {
            let key = (cell[i], code[g]);
            let next = relabel.len() as u32;
            cell[i] = *relabel.entry(key).or_insert(next);
        }
        steps.push(GrowthStep {
            time: g,
            cells: relabel.len() as u64,
            split_fraction: n_split as f64 / cells as f64,
        });
        cells = relabel.len();
        chosen.push(g);
    }
    let rate_estimate = tail_rate(&steps);
    chosen.sort_unstable();
    let positions = if chosen.is_empty() { None } else { Some(PositionSet::new(chosen)?) };
    Ok((
        positions,
        GrowthCurve {
            steps,
            rate_estimate,
            stalled,
            horizon,
        },
    ))
}

fn tail_rate(steps: &[GrowthStep]) -> f64 {
    // Step k has log2 N_k; N_0 = 1 is part of the curve.
    let ys: Vec<f64> = std::iter::once(0.0)
        .chain(steps.iter().map(|s| (s.cells as f64).log2()))
        .collect();
    if ys.len() < 2 {
        return 0.0;
    }
    let first = (ys.len() / 2).min(ys.len() - 2);
    let xs: Vec<f64> = (first..ys.len()).map(|k| k as f64).collect();
    ls_slope(&xs, &ys[first..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{full_shift, single_one_subshift, sturmian_model, CircleFraction};
    use std::collections::HashSet;

    const BUDGET: usize = 1 << 16;

    #[test]
    fn full_shift_doubles() {
        let m = full_shift(2).unwrap();
        let (s, curve) = seqentr_builder(&m, 1, 10, 1 << 14, DEFAULT_MAX_TIME, BUDGET).unwrap();
        let cells: Vec<u64> = curve.steps.iter().map(|s| s.cells).collect();
        assert_eq!(cells, (1..=10).map(|k| 1u64 << k).collect::<Vec<_>>());
        assert!((curve.rate_estimate - 1.0).abs() < 1e-9);
        assert_eq!(s.unwrap().as_slice(), &(0..10).collect::<Vec<_>>()[..]);
    }

    #[test]
    fn single_one_grows_linearly() {
        let m = single_one_subshift();
        let (_, short) = seqentr_builder(&m, 2, 10, 1 << 12, DEFAULT_MAX_TIME, BUDGET).unwrap();
        let (_, long) = seqentr_builder(&m, 2, 30, 1 << 12, DEFAULT_MAX_TIME, BUDGET).unwrap();
        for (k, s) in long.steps.iter().enumerate() {
            assert!(s.cells <= 2 * (k as u64 + 1) + 1, "{long:?}");
        }
        assert!(long.rate_estimate < short.rate_estimate);
        assert!(long.rate_estimate < 0.1);
    }

    /// Distinct tuples of length-`m` words at `times` over the prefix.
    fn tuple_count(prefix: &[u8], times: &[usize], m: usize) -> u64 {
        let reach = times.iter().max().unwrap() + m;
        let set: HashSet<Vec<&[u8]>> = (0..=prefix.len() - reach)
            .map(|t| times.iter().map(|&g| &prefix[t + g..t + g + m]).collect())
            .collect();
        set.len() as u64
    }

    #[test]
    fn sturmian_cells_match_tuple_counts() {
        let m = sturmian_model(CircleFraction::golden(), CircleFraction::ZERO).unwrap();
        let h = 1 << 16;
        let (_, curve) = seqentr_builder(&m, 4, 12, h, DEFAULT_MAX_TIME, BUDGET).unwrap();
        let prefix = m.generators[0].prefix(h);
        let mut times = Vec::new();
        let mut ys = vec![0.0];
        for s in &curve.steps {
            times.push(s.time);
            let n = tuple_count(&prefix, &times, 4);
            assert_eq!(s.cells, n);
            ys.push((n as f64).log2());
        }
        let xs: Vec<f64> = (6..=12).map(|k| k as f64).collect();
        assert!((curve.rate_estimate - ls_slope(&xs, &ys[6..])).abs() < 1e-12);
        assert!(curve.rate_estimate < 0.2);
    }

    #[test]
    fn sturmian_rate_decays() {
        let m = sturmian_model(CircleFraction::golden(), CircleFraction::ZERO).unwrap();
        let (_, curve) = seqentr_builder(&m, 4, 30, 1 << 16, 192, BUDGET).unwrap();
        assert!(curve.rate_estimate <= 0.1, "{curve:?}");
    }

    #[test]
    fn growth_bounds() {
        let m = sturmian_model(CircleFraction::golden(), CircleFraction::ZERO).unwrap();
        let (_, curve) = seqentr_builder(&m, 2, 8, 1 << 14, DEFAULT_MAX_TIME, BUDGET).unwrap();
        let mut prev = 1u64;
        for s in &curve.steps {
            assert!(s.cells >= prev);
            assert!(s.cells as f64 >= (1.0 + s.split_fraction) * prev as f64 - 1.0);
            prev = s.cells;
        }
    }
}
