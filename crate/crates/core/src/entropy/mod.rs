//! Sequence entropy: pattern counts along time sets, empirical partition
//! entropy, independence certificates and the splitting-sequence builder.
//!
//! All covers are the canonical cylinder covers, so the counts here are
//! lower bounds for the topological quantities.

mod builder;
mod independence;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

pub use builder::{seqentr_builder, GrowthCurve, GrowthStep, DEFAULT_MAX_TIME};
pub use independence::{
    independence_search, independence_search_parallel, validate_certificate, IndependenceCertificate,
    IndependenceOutcome, SearchParams, SearchReport,
};

use crate::error::{invalid, Error, Result};
use crate::systems::SubshiftModel;

/// Strictly increasing, nonempty list of times.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PositionSet(Vec<usize>);

impl PositionSet {
    pub fn new(positions: Vec<usize>) -> Result<Self> {
        if positions.is_empty() {
            return Err(invalid("position set must be nonempty"));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("positions must be strictly increasing"));
        }
        Ok(PositionSet(positions))
    }

    /// `{0, 1, ..., n-1}`.
    pub fn contiguous(n: usize) -> Result<Self> {
        PositionSet::new((0..n).collect())
    }

    /// `{2, 4, ..., 2^n}`.
    pub fn powers_of_two(n: u32) -> Result<Self> {
        PositionSet::new((1..=n).map(|k| 1usize << k).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max(&self) -> usize {
        *self.0.last().expect("nonempty")
    }

    /// The first `k` positions.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        PositionSet::new(self.0[..k.min(self.0.len())].to_vec())
    }
}

impl TryFrom<Vec<usize>> for PositionSet {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        PositionSet::new(v)
    }
}

impl From<PositionSet> for Vec<usize> {
    fn from(s: PositionSet) -> Self {
        s.0
    }
}

/// Number of distinct tuples `(x_{s_1}, ..., x_{s_n})` over the words of
/// length `max + 1` in the empirical language at `horizon`.
pub fn pattern_count(model: &SubshiftModel, s: &PositionSet, horizon: usize, budget: usize) -> Result<u64> {
    let span = s.max() + 1;
    if span > horizon {
        return Err(invalid(format!("position {} does not fit the horizon {horizon}", s.max())));
    }
    let mut tuples: HashSet<Vec<u8>> = HashSet::new();
    if let Some(p) = &model.predicate {
        tuples.extend(p.project(s.as_slice(), budget)?.into_keys());
    }
    for g in &model.generators {
        let prefix = g.prefix(horizon);
        for t in 0..=horizon - span {
            let tuple: Vec<u8> = s.as_slice().iter().map(|&q| prefix[t + q]).collect();
            if tuples.insert(tuple) && tuples.len() > budget {
                return Err(Error::BudgetExceeded { budget });
            }
        }
    }
    Ok(tuples.len() as u64)
}

/// Least-squares slope of `ys` against `xs`.
pub(crate) fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyEstimate {
    /// `counts[k-1]` is the pattern count of the first `k` positions.
    pub counts: Vec<u64>,
    /// Bits per added position over the last half of the family.
    pub rate: f64,
    pub horizon: usize,
}

/// Growth rate of pattern counts along the prefixes of `s`: the slope of
/// `log2 pattern_count(s_1..s_k)` in `k` over `k ≥ ⌈n/2⌉`.
pub fn seq_entropy_estimate(model: &SubshiftModel, s: &PositionSet, horizon: usize, budget: usize) -> Result<EntropyEstimate> {
    if s.len() < 4 {
        return Err(invalid("need at least four positions"));
    }
    let counts = (1..=s.len())
        .map(|k| pattern_count(model, &s.prefix(k)?, horizon, budget))
        .collect::<Result<Vec<u64>>>()?;
    let first = s.len().div_ceil(2);
    let xs: Vec<f64> = (first..=s.len()).map(|k| k as f64).collect();
    let ys: Vec<f64> = (first..=s.len()).map(|k| (counts[k - 1] as f64).log2()).collect();
    Ok(EntropyEstimate {
        rate: ls_slope(&xs, &ys),
        counts,
        horizon,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionEntropy {
    pub bits: f64,
    pub distinct_patterns: usize,
    pub samples: u64,
    /// Orbit frequencies are a statistic of the invariant measure only for
    /// uniquely ergodic models.
    pub uniquely_ergodic: bool,
}

/// Shannon entropy (bits) of the frequencies of
/// `(x_{i+s_1}, ..., x_{i+s_n})`, `0 ≤ i ≤ horizon − max`, along one
/// generator orbit.
pub fn empirical_partition_entropy(
    model: &SubshiftModel,
    generator: usize,
    s: &PositionSet,
    horizon: usize,
) -> Result<PartitionEntropy> {
    let g = model
        .generators
        .get(generator)
        .ok_or_else(|| invalid(format!("model has no generator {generator}")))?;
    if horizon < 100 * s.max() {
        return Err(invalid("horizon must be at least 100 times the largest position"));
    }
    let prefix = g.prefix(horizon + 1);
    let mut freq: HashMap<Vec<u8>, u64> = HashMap::new();
    let samples = (horizon - s.max() + 1) as u64;
    for i in 0..=horizon - s.max() {
        let key: Vec<u8> = s.as_slice().iter().map(|&q| prefix[i + q]).collect();
        *freq.entry(key).or_default() += 1;
    }
    let total = samples as f64;
    let bits = -freq
        .values()
        .map(|&c| {
            let p = c as f64 / total;
            p * p.log2()
        })
        .sum::<f64>();
    Ok(PartitionEntropy {
        bits,
        distinct_patterns: freq.len(),
        samples,
        uniquely_ergodic: model.uniquely_ergodic,
    })
}
