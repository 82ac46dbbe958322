//! Finite-horizon verdicts for mean equicontinuity, diam-mean
//! equicontinuity and mean sensitivity.
//!
//! Balls are cylinders: the `2^-m` ball around `x` in the Cantor metric is
//! the set of points sharing `x_0 ... x_{m-1}`. Every verdict records the
//! horizon, budget and seed it was computed with; a pass is evidence at that
//! horizon only.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashSet};
use std::hash::{Hash, Hasher};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::besicovitch::disagreement_profile;
use crate::density::{to_f64, Density, DensityProfile, Schedule, DEFAULT_OSCILLATION_TOLERANCE};
use crate::entropy::IndependenceCertificate;
use crate::error::{invalid, Error, Result};
use crate::seed;
use crate::systems::{to_text, Cylinder, SubshiftModel, SymbolicPoint, WordPredicate};

/// Cylinder lengths tried for the `∃δ` of mean equicontinuity.
pub const DEFAULT_M_SCAN: [usize; 4] = [4, 8, 12, 16];

/// Symbols of each point shown in a pair witness.
const WITNESS_PREFIX: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Pair {
        left: String,
        right: String,
        left_prefix: String,
        right_prefix: String,
        #[serde(with = "crate::density::ratio_serde")]
        density: Density,
    },
    TimeSet {
        members_below_horizon: u64,
        first_members: Vec<u64>,
    },
    Independence {
        certificate: IndependenceCertificate,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeVerdict {
    pub probe: String,
    pub parameters: BTreeMap<String, Value>,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    #[serde(with = "crate::density::ratio_serde")]
    pub statistic: Density,
    pub diagnostics: BTreeMap<String, Value>,
}

/// Shared knobs of the sampling probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sampling {
    /// Times `[0, horizon)` are examined.
    pub horizon: u64,
    /// Neighbors drawn per source (generator shifts, random extensions).
    pub budget: usize,
    pub seed: u64,
}

impl Sampling {
    fn provenance(&self) -> BTreeMap<String, Value> {
        BTreeMap::from([
            ("horizon".into(), json!(self.horizon)),
            ("budget".into(), json!(self.budget)),
            ("seed".into(), json!(self.seed)),
        ])
    }

    fn schedule(&self) -> Result<Schedule> {
        if self.horizon < 2 {
            return Err(invalid("horizon must be at least 2"));
        }
        Ok(Schedule::dyadic_upto(self.horizon - 1))
    }
}

fn ratio_value(r: Density) -> Value {
    json!(format!("{}/{}", r.numer(), r.denom()))
}

fn check_epsilon(epsilon: Density) -> Result<()> {
    if epsilon <= Ratio::new(0, 1) || epsilon >= Ratio::new(1, 1) {
        return Err(invalid("epsilon must lie in (0, 1)"));
    }
    Ok(())
}

/// Where a sampled neighbor comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Source {
    /// `σ^shift` of generator `index`.
    Generator { index: usize, shift: usize },
    /// Random accepted extension number `draw`.
    Extension { draw: u64 },
}

/// Neighbors of a cylinder: generator shifts landing in it and random
/// extensions of the words that realise it.
struct Neighborhood<'a> {
    model: &'a SubshiftModel,
    len: usize,
    seed: u64,
    sources: Vec<Source>,
    prefixes: Vec<Vec<u8>>,
}

/// Accepted words of length `u.end()` lying in `u`.
fn cylinder_prefixes(pred: &dyn WordPredicate, u: &Cylinder, budget: usize) -> Result<Vec<Vec<u8>>> {
    let fillers = if u.offset == 0 {
        vec![Vec::new()]
    } else {
        pred.windows(&[], 0, u.offset, budget)?.into_iter().collect()
    };
    Ok(fillers
        .into_iter()
        .map(|mut f| {
            f.extend_from_slice(&u.word);
            f
        })
        .filter(|w| pred.accepts(w))
        .collect())
}

impl<'a> Neighborhood<'a> {
    fn new(model: &'a SubshiftModel, u: &Cylinder, sampling: &Sampling) -> Result<Self> {
        let len = sampling.horizon as usize;
        let budget = sampling.budget.max(1);
        let mut occurrences = Vec::new();
        for (index, g) in model.generators.iter().enumerate() {
            let prefix = g.prefix(2 * len + u.end() + 64);
            occurrences.extend((0..len).filter(|&t| u.matches_at(&prefix, t)).map(|shift| Source::Generator { index, shift }));
        }
        let mut sources: Vec<Source> = if occurrences.len() > budget {
            (0..budget).map(|k| occurrences[k * occurrences.len() / budget]).collect()
        } else {
            occurrences
        };
        let prefixes = match &model.predicate {
            Some(p) => cylinder_prefixes(p.as_ref(), u, 1 << 20)?,
            None => Vec::new(),
        };
        if !prefixes.is_empty() {
            sources.extend((0..budget as u64).map(|draw| Source::Extension { draw }));
        }
        Ok(Neighborhood {
            model,
            len,
            seed: sampling.seed,
            sources,
            prefixes,
        })
    }

    fn materialize(&self, source: Source) -> Option<Vec<u8>> {
        match source {
            Source::Generator { index, shift } => {
                let prefix = self.model.generators[index].prefix(shift + self.len);
                Some(prefix[shift..shift + self.len].to_vec())
            }
            Source::Extension { draw } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(self.seed, draw));
                let prefix = &self.prefixes[rng.gen_range(0..self.prefixes.len())];
                self.model.predicate.as_ref()?.sample_extension(prefix, self.len, &mut rng)
            }
        }
    }

    fn describe(&self, source: Source) -> String {
        match source {
            Source::Generator { index, shift } => {
                format!("shift {shift} of generator {}", self.model.generators[index].label())
            }
            Source::Extension { draw } => format!("random extension #{draw}"),
        }
    }
}

fn content_hash(seq: &[u8]) -> u64 {
    let mut h = DefaultHasher::new();
    seq.hash(&mut h);
    h.finish()
}

fn pair_witness(left: String, a: &[u8], right: String, b: &[u8], density: Density) -> Witness {
    Witness::Pair {
        left,
        right,
        left_prefix: to_text(&a[..a.len().min(WITNESS_PREFIX)]),
        right_prefix: to_text(&b[..b.len().min(WITNESS_PREFIX)]),
        density,
    }
}

/// Whether `x` looks like a mean equicontinuous point at scale `epsilon`
/// with the ball `B_{2^-m}(x)`: every sampled neighbor must have estimated
/// upper disagreement density at most `epsilon`.
pub fn mean_equicontinuity_probe(
    model: &SubshiftModel,
    x: &SymbolicPoint,
    epsilon: Density,
    m: usize,
    sampling: &Sampling,
) -> Result<ProbeVerdict> {
    check_epsilon(epsilon)?;
    let schedule = sampling.schedule()?;
    let u = Cylinder::at_origin(x.prefix(m.max(1))[..m.max(1)].to_vec())?;
    let hood = Neighborhood::new(model, &u, sampling)?;
    let xs = x.prefix(hood.len);
    let xs = &xs[..hood.len];
    let results: Vec<Option<(Density, u64)>> = hood
        .sources
        .par_iter()
        .map(|&s| {
            hood.materialize(s)
                .map(|y| (disagreement_profile(xs, &y, &schedule).limsup_est, content_hash(&y)))
        })
        .collect();
    let distinct: HashSet<u64> = results.iter().flatten().map(|r| r.1).collect();
    let statistic = results.iter().flatten().map(|r| r.0).max().unwrap_or(Ratio::new(0, 1));

    let mut parameters = sampling.provenance();
    parameters.insert("epsilon".into(), ratio_value(epsilon));
    parameters.insert("m".into(), json!(m));
    parameters.insert("point".into(), json!(x.label()));
    let diagnostics = BTreeMap::from([
        ("neighbors".into(), json!(results.iter().flatten().count())),
        ("distinct_neighbors".into(), json!(distinct.len())),
        ("statistic_value".into(), json!(to_f64(statistic))),
    ]);

    let violating = results
        .iter()
        .zip(&hood.sources)
        .find(|(r, _)| r.is_some_and(|(d, _)| d > epsilon));
    let (verdict, witness) = match violating {
        Some((Some((d, _)), &s)) => {
            let y = hood.materialize(s).expect("materialized before");
            let w = pair_witness(x.label().to_string(), xs, hood.describe(s), &y, *d);
            (Verdict::Fail, Some(w))
        }
        _ if distinct.len() < 2 => (Verdict::Inconclusive, None),
        _ => (Verdict::Pass, None),
    };
    Ok(ProbeVerdict {
        probe: "mean_eq".into(),
        parameters,
        verdict,
        witness,
        statistic,
        diagnostics,
    })
}

/// [`mean_equicontinuity_probe`] over increasing cylinder lengths; the first
/// passing length wins. Without a pass the last failing verdict (or, if
/// none failed, the last inconclusive one) is returned.
pub fn mean_equicontinuity_scan(
    model: &SubshiftModel,
    x: &SymbolicPoint,
    epsilon: Density,
    ms: &[usize],
    sampling: &Sampling,
) -> Result<ProbeVerdict> {
    let mut fallback: Option<ProbeVerdict> = None;
    for &m in ms {
        let mut v = mean_equicontinuity_probe(model, x, epsilon, m, sampling)?;
        v.parameters.insert("m_scan".into(), json!(ms));
        match v.verdict {
            Verdict::Pass => return Ok(v),
            Verdict::Fail => fallback = Some(v),
            Verdict::Inconclusive => {
                if fallback.as_ref().is_none_or(|f| f.verdict != Verdict::Fail) {
                    fallback = Some(v);
                }
            }
        }
    }
    fallback.ok_or_else(|| invalid("empty cylinder-length scan"))
}

/// The times `i < horizon` at which two points of the model sharing the
/// cylinder `u` can differ somewhere in `[i, i + r)`.
///
/// With an exact word predicate this is decided per time from the accepted
/// windows. Otherwise points are the shifts `σ^t g` of the generators with
/// `t ≤ horizon` (at most `budget` of them, earliest first) that land in
/// `u`, and a time is ambiguous when some of them disagrees with the first
/// within `[i, i + r)`.
pub fn ambiguity_indicator(model: &SubshiftModel, u: &Cylinder, r: usize, horizon: u64, budget: usize) -> Result<Vec<bool>> {
    if r == 0 {
        return Err(invalid("resolution r must be positive"));
    }
    let h = horizon as usize;
    if let Some(pred) = &model.predicate {
        let prefixes = cylinder_prefixes(pred.as_ref(), u, budget)?;
        if prefixes.is_empty() {
            return Err(invalid("cylinder is not in the language"));
        }
        return (0..h)
            .into_par_iter()
            .map(|i| {
                let mut seen = std::collections::BTreeSet::new();
                for p in &prefixes {
                    seen.extend(pred.windows(p, i, r, budget)?);
                    if seen.len() >= 2 {
                        return Ok(true);
                    }
                }
                Ok(false)
            })
            .collect();
    }

    let span = h + r;
    let mut occurrences = Vec::new();
    for g in &model.generators {
        let prefix = g.prefix(h + 1 + span + u.end());
        for t in 0..=h {
            if occurrences.len() >= budget.max(1) {
                break;
            }
            if u.matches_at(&prefix, t) {
                occurrences.push((prefix.clone(), t));
            }
        }
    }
    let Some((ref_prefix, t0)) = occurrences.first().cloned() else {
        return Err(invalid("cylinder does not occur in any generator prefix"));
    };
    let reference = &ref_prefix[t0..t0 + span];
    let mut differs = vec![false; span];
    for (prefix, t) in &occurrences[1..] {
        for (d, (a, b)) in differs.iter_mut().zip(prefix[*t..*t + span].iter().zip(reference)) {
            *d |= a != b;
        }
    }
    // dilate: i is ambiguous iff some difference lies in [i, i + r)
    let mut out = vec![false; h];
    let mut in_window = differs[..r].iter().filter(|&&d| d).count();
    for i in 0..h {
        out[i] = in_window > 0;
        in_window += usize::from(differs[i + r]);
        in_window -= usize::from(differs[i]);
    }
    Ok(out)
}

/// Diam-mean equicontinuity at the cylinder `u` and resolution `2^-r`:
/// passes iff the ambiguity set has estimated upper density (lower density
/// when `lower` is set) at most `2^-r`. The coordinates of `u` itself are
/// deleted from the windows.
pub fn diam_mean_probe(
    model: &SubshiftModel,
    u: &Cylinder,
    r: usize,
    horizon: u64,
    budget: usize,
    lower: bool,
) -> Result<ProbeVerdict> {
    if !(1..=62).contains(&r) {
        return Err(invalid("resolution r must lie in 1..=62"));
    }
    if horizon < 2 {
        return Err(invalid("horizon must be at least 2"));
    }
    let threshold = Ratio::new(1, 1u64 << r);
    let parameters = BTreeMap::from([
        ("cylinder".into(), json!(to_text(&u.word))),
        ("offset".into(), json!(u.offset)),
        ("r".into(), json!(r)),
        ("epsilon".into(), ratio_value(threshold)),
        ("horizon".into(), json!(horizon)),
        ("budget".into(), json!(budget)),
        ("lower".into(), json!(lower)),
        ("path".into(), json!(if model.predicate.is_some() { "predicate" } else { "generators" })),
    ]);
    let probe = if lower { "diam_mean_lower" } else { "diam_mean" };
    let ambiguous = match ambiguity_indicator(model, u, r, horizon, budget) {
        Ok(a) => a,
        Err(Error::BudgetExceeded { budget }) => {
            return Ok(ProbeVerdict {
                probe: probe.into(),
                parameters,
                verdict: Verdict::Inconclusive,
                witness: None,
                statistic: Ratio::new(0, 1),
                diagnostics: BTreeMap::from([("budget_exceeded".into(), json!(budget))]),
            })
        }
        Err(e) => return Err(e),
    };
    let schedule = Schedule::dyadic_upto(horizon - 1);
    let excluded: Vec<u64> = (0..u.end() as u64).collect();
    let profile = DensityProfile::from_membership(&schedule, &excluded, DEFAULT_OSCILLATION_TOLERANCE, |i| {
        ambiguous[i as usize]
    });
    let statistic = if lower { profile.liminf_est } else { profile.limsup_est };
    let verdict = if statistic <= threshold { Verdict::Pass } else { Verdict::Fail };
    let witness = (verdict == Verdict::Fail).then(|| {
        let members: Vec<u64> = (u.end()..ambiguous.len()).filter(|&i| ambiguous[i]).map(|i| i as u64).collect();
        Witness::TimeSet {
            members_below_horizon: members.len() as u64,
            first_members: members.into_iter().take(16).collect(),
        }
    });
    let diagnostics = BTreeMap::from([
        ("limsup_est".into(), ratio_value(profile.limsup_est)),
        ("liminf_est".into(), ratio_value(profile.liminf_est)),
        ("statistic_value".into(), json!(to_f64(statistic))),
    ]);
    Ok(ProbeVerdict {
        probe: probe.into(),
        parameters,
        verdict,
        witness,
        statistic,
        diagnostics,
    })
}

/// A pair in one cylinder whose orbits stay apart on a set of positive
/// upper density.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SensitivityWitness {
    pub witness: Witness,
    #[serde(with = "crate::density::ratio_serde")]
    pub density: Density,
    pub horizon: u64,
}

/// Looks for two sampled points of `u` with estimated upper disagreement
/// density above `epsilon`. Every sampled neighbor is compared with the
/// first one; the first violating pair in sampling order is returned.
pub fn mean_sensitivity_witness(
    model: &SubshiftModel,
    epsilon: Density,
    u: &Cylinder,
    sampling: &Sampling,
) -> Result<Option<SensitivityWitness>> {
    check_epsilon(epsilon)?;
    let schedule = sampling.schedule()?;
    let hood = Neighborhood::new(model, u, sampling)?;
    let Some((first, reference)) = hood
        .sources
        .iter()
        .find_map(|&s| hood.materialize(s).map(|y| (s, y)))
    else {
        return Ok(None);
    };
    let densities: Vec<Option<Density>> = hood
        .sources
        .par_iter()
        .map(|&s| {
            if s == first {
                return None;
            }
            hood.materialize(s).map(|y| disagreement_profile(&reference, &y, &schedule).limsup_est)
        })
        .collect();
    let hit = densities
        .iter()
        .zip(&hood.sources)
        .find_map(|(d, &s)| d.filter(|&d| d > epsilon).map(|d| (d, s)));
    Ok(hit.map(|(density, s)| {
        let y = hood.materialize(s).expect("materialized before");
        SensitivityWitness {
            witness: pair_witness(hood.describe(first), &reference, hood.describe(s), &y, density),
            density,
            horizon: sampling.horizon,
        }
    }))
}
