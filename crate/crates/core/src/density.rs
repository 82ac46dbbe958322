//! Upper and lower densities of subsets of the non-negative integers along
//! the windows `F_n = [0, n]`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Exact density value `|S ∩ F_n| / |F_n|`.
pub type Density = Ratio<u64>;

/// Default tolerance of the tail-oscillation test behind
/// [`DensityProfile::converged`].
pub const DEFAULT_OSCILLATION_TOLERANCE: f64 = 1e-3;

/// Largest period used when reducing a union of exact forms to a single
/// eventually periodic pattern.
const PERIOD_CAP: u64 = 1 << 20;

/// Closed description of a time set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExactForm {
    /// `{a + k p : k ≥ 0}`.
    Arithmetic { a: u64, p: u64 },
    Finite { elements: Vec<u64> },
    Union { parts: Vec<ExactForm> },
    Complement { inner: Box<ExactForm> },
}

impl ExactForm {
    pub fn contains(&self, n: u64) -> bool {
        match self {
            ExactForm::Arithmetic { a, p } => n >= *a && (n - a).is_multiple_of(*p),
            ExactForm::Finite { elements } => elements.contains(&n),
            ExactForm::Union { parts } => parts.iter().any(|f| f.contains(n)),
            ExactForm::Complement { inner } => !inner.contains(n),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ExactForm::Arithmetic { p: 0, .. } => Err(invalid("arithmetic progression with p = 0")),
            ExactForm::Arithmetic { .. } | ExactForm::Finite { .. } => Ok(()),
            ExactForm::Union { parts } => parts.iter().try_for_each(ExactForm::validate),
            ExactForm::Complement { inner } => inner.validate(),
        }
    }

    /// `(period, residues)` such that the set agrees with the periodic set
    /// `{n : residues[n mod period]}` outside a finite set.
    fn eventual_pattern(&self) -> Option<(u64, Vec<bool>)> {
        match self {
            ExactForm::Arithmetic { a, p } => {
                let mut r = vec![false; *p as usize];
                r[(a % p) as usize] = true;
                Some((*p, r))
            }
            ExactForm::Finite { .. } => Some((1, vec![false])),
            ExactForm::Complement { inner } => {
                let (p, r) = inner.eventual_pattern()?;
                Some((p, r.into_iter().map(|b| !b).collect()))
            }
            ExactForm::Union { parts } => {
                let pats = parts
                    .iter()
                    .map(ExactForm::eventual_pattern)
                    .collect::<Option<Vec<_>>>()?;
                let mut period = 1u64;
                for (p, _) in &pats {
                    period = period.lcm(p);
                    if period > PERIOD_CAP {
                        return None;
                    }
                }
                let r = (0..period)
                    .map(|n| pats.iter().any(|(p, r)| r[(n % p) as usize]))
                    .collect();
                Some((period, r))
            }
        }
    }

    fn shifted(&self, t: u64) -> Option<ExactForm> {
        match self {
            ExactForm::Arithmetic { a, p } => Some(ExactForm::Arithmetic { a: a + t, p: *p }),
            ExactForm::Finite { elements } => Some(ExactForm::Finite {
                elements: elements.iter().map(|e| e + t).collect(),
            }),
            ExactForm::Union { parts } => Some(ExactForm::Union {
                parts: parts.iter().map(|f| f.shifted(t)).collect::<Option<_>>()?,
            }),
            // t + S^c = (t + S ∪ [0, t))^c
            ExactForm::Complement { inner } => Some(ExactForm::Complement {
                inner: Box::new(ExactForm::Union {
                    parts: vec![inner.shifted(t)?, ExactForm::Finite { elements: (0..t).collect() }],
                }),
            }),
        }
    }
}

type Membership = Arc<dyn Fn(u64) -> bool + Send + Sync>;

/// A subset of ℤ₊ given by a membership rule, optionally with an exact form.
#[derive(Clone)]
pub struct TimeSet {
    membership: Membership,
    exact: Option<ExactForm>,
}

impl fmt::Debug for TimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(form) => f.debug_tuple("TimeSet").field(form).finish(),
            None => f.write_str("TimeSet(<rule>)"),
        }
    }
}

impl TimeSet {
    pub fn from_fn(f: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        TimeSet {
            membership: Arc::new(f),
            exact: None,
        }
    }

    pub fn from_form(form: ExactForm) -> Result<Self> {
        form.validate()?;
        let rule = form.clone();
        Ok(TimeSet {
            membership: Arc::new(move |n| rule.contains(n)),
            exact: Some(form),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        TimeSet::from_form(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Option<String> {
        self.exact.as_ref().map(|f| serde_json::to_string(f).expect("exact forms serialize"))
    }

    pub fn arithmetic(a: u64, p: u64) -> Result<Self> {
        TimeSet::from_form(ExactForm::Arithmetic { a, p })
    }

    pub fn finite(elements: impl IntoIterator<Item = u64>) -> Self {
        let set: BTreeSet<u64> = elements.into_iter().collect();
        let form = ExactForm::Finite {
            elements: set.iter().copied().collect(),
        };
        TimeSet {
            membership: Arc::new(move |n| set.contains(&n)),
            exact: Some(form),
        }
    }

    pub fn evens() -> Self {
        TimeSet::arithmetic(0, 2).expect("p > 0")
    }

    pub fn odds() -> Self {
        TimeSet::arithmetic(1, 2).expect("p > 0")
    }

    pub fn full() -> Self {
        TimeSet::arithmetic(0, 1).expect("p > 0")
    }

    /// Indicator of a finite-horizon computation; indices past the end are
    /// not members.
    pub fn from_indicator(bits: Arc<[bool]>) -> Self {
        TimeSet::from_fn(move |n| bits.get(n as usize).copied().unwrap_or(false))
    }

    pub fn union(parts: Vec<TimeSet>) -> Self {
        let exact = parts
            .iter()
            .map(|s| s.exact.clone())
            .collect::<Option<Vec<_>>>()
            .map(|parts| ExactForm::Union { parts });
        let rules: Vec<Membership> = parts.into_iter().map(|s| s.membership).collect();
        TimeSet {
            membership: Arc::new(move |n| rules.iter().any(|r| r(n))),
            exact,
        }
    }

    pub fn complement(&self) -> Self {
        let rule = self.membership.clone();
        TimeSet {
            membership: Arc::new(move |n| !rule(n)),
            exact: self.exact.clone().map(|f| ExactForm::Complement { inner: Box::new(f) }),
        }
    }

    /// The translate `t + S`.
    pub fn shifted(&self, t: u64) -> Self {
        let rule = self.membership.clone();
        TimeSet {
            membership: Arc::new(move |n| n >= t && rule(n - t)),
            exact: self.exact.as_ref().and_then(|f| f.shifted(t)),
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        (self.membership)(n)
    }

    pub fn exact_form(&self) -> Option<&ExactForm> {
        self.exact.as_ref()
    }

    /// `|S ∩ [0, n]|`.
    pub fn count_upto(&self, n: u64) -> u64 {
        (0..=n).filter(|&i| self.contains(i)).count() as u64
    }
}

/// Strictly increasing, nonempty list of window ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule(Vec<u64>);

impl Schedule {
    pub fn new(ends: Vec<u64>) -> Result<Self> {
        if ends.is_empty() {
            return Err(invalid("empty schedule"));
        }
        if ends.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("schedule must be strictly increasing"));
        }
        Ok(Schedule(ends))
    }

    /// `2^0, 2^1, ..., 2^max_exp`.
    pub fn dyadic(max_exp: u32) -> Self {
        Schedule((0..=max_exp).map(|k| 1u64 << k).collect())
    }

    /// Powers of two below `last`, followed by `last` itself.
    pub fn dyadic_upto(last: u64) -> Self {
        let mut ends: Vec<u64> = (0..64)
            .map(|k| 1u64 << k)
            .take_while(|&e| e < last)
            .collect();
        ends.push(last);
        Schedule(ends)
    }

    pub fn ends(&self) -> &[u64] {
        &self.0
    }

    pub fn last(&self) -> u64 {
        *self.0.last().expect("nonempty")
    }
}

/// Window densities of one set along a schedule, with tail estimates.
///
/// The tail consists of the windows whose size is at least half the size of
/// the largest window; `liminf_est` and `limsup_est` are the minimum and
/// maximum over the tail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub window_ends: Vec<u64>,
    #[serde(with = "ratio_serde::vec")]
    pub values: Vec<Density>,
    #[serde(with = "ratio_serde")]
    pub liminf_est: Density,
    #[serde(with = "ratio_serde")]
    pub limsup_est: Density,
    pub converged: bool,
}

impl DensityProfile {
    /// Builds the profile from member counts and window sizes.
    pub(crate) fn from_counts(
        ends: &[u64],
        counts: &[u64],
        sizes: &[u64],
        tolerance: f64,
    ) -> DensityProfile {
        let values: Vec<Density> = counts
            .iter()
            .zip(sizes)
            .map(|(&c, &s)| Ratio::new(c, s.max(1)))
            .collect();
        let largest = *sizes.last().expect("nonempty schedule");
        let tail: Vec<Density> = values
            .iter()
            .zip(sizes)
            .filter(|(_, &s)| 2 * s >= largest)
            .map(|(v, _)| *v)
            .collect();
        let liminf_est = *tail.iter().min().expect("last window is in the tail");
        let limsup_est = *tail.iter().max().expect("last window is in the tail");
        let converged = to_f64(limsup_est - liminf_est) < tolerance;
        DensityProfile {
            window_ends: ends.to_vec(),
            values,
            liminf_est,
            limsup_est,
            converged,
        }
    }

    /// Profile of the set whose members are reported by `member`, over the
    /// windows `F_n` with the finite set `excluded` (sorted) removed.
    pub(crate) fn from_membership(
        schedule: &Schedule,
        excluded: &[u64],
        tolerance: f64,
        mut member: impl FnMut(u64) -> bool,
    ) -> DensityProfile {
        let mut counts = Vec::with_capacity(schedule.0.len());
        let mut sizes = Vec::with_capacity(schedule.0.len());
        let mut count = 0u64;
        let mut removed = 0u64;
        let mut next = 0u64;
        for &end in &schedule.0 {
            while next <= end {
                if excluded.binary_search(&next).is_ok() {
                    removed += 1;
                } else if member(next) {
                    count += 1;
                }
                next += 1;
            }
            counts.push(count);
            sizes.push(end + 1 - removed);
        }
        DensityProfile::from_counts(&schedule.0, &counts, &sizes, tolerance)
    }

    /// `window_end,value` rows with the value as a decimal.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["window_end", "value"])?;
        for (e, v) in self.window_ends.iter().zip(&self.values) {
            w.write_record([e.to_string(), to_f64(*v).to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

pub fn to_f64(r: Density) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `|S ∩ [0, n]| / (n + 1)`.
pub fn window_density(s: &TimeSet, n: u64) -> Density {
    Ratio::new(s.count_upto(n), n + 1)
}

pub fn density_profile(s: &TimeSet, schedule: &Schedule) -> DensityProfile {
    density_profile_with_tolerance(s, schedule, DEFAULT_OSCILLATION_TOLERANCE)
}

pub fn density_profile_with_tolerance(
    s: &TimeSet,
    schedule: &Schedule,
    tolerance: f64,
) -> DensityProfile {
    DensityProfile::from_membership(schedule, &[], tolerance, |i| s.contains(i))
}

/// Closed-form `(lower, upper)` density of a set carrying an exact form.
///
/// Every exact form is eventually periodic, so lower and upper densities
/// coincide; `None` is returned when the form is absent or a union needs a
/// period above 2^20.
pub fn exact_density(s: &TimeSet) -> Option<(Density, Density)> {
    exact_form_density(s.exact.as_ref()?)
}

fn exact_form_density(form: &ExactForm) -> Option<(Density, Density)> {
    match form {
        ExactForm::Arithmetic { p, .. } => Some((Ratio::new(1, *p), Ratio::new(1, *p))),
        ExactForm::Finite { .. } => Some((Ratio::zero(), Ratio::zero())),
        ExactForm::Complement { inner } => {
            let (lower, upper) = exact_form_density(inner)?;
            Some((Density::one() - upper, Density::one() - lower))
        }
        ExactForm::Union { .. } => {
            let (period, residues) = form.eventual_pattern()?;
            let d = Ratio::new(residues.iter().filter(|&&b| b).count() as u64, period);
            Some((d, d))
        }
    }
}

/// Result of [`pigeonhole_select`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PigeonholeChoice<K> {
    pub time: u64,
    pub subset: Vec<K>,
}

/// Finds a time `i ≤ horizon` lying in the assigned sets of at least
/// `ε|K|/2` keys. Among the times hitting the most keys the smallest is
/// returned; the subset lists those keys in input order.
pub fn pigeonhole_select<K: Clone>(
    assignment: &[(K, TimeSet)],
    epsilon: Density,
    horizon: u64,
) -> Result<PigeonholeChoice<K>> {
    if assignment.is_empty() {
        return Err(invalid("pigeonhole_select needs at least one key"));
    }
    let mut best = (0u64, 0usize);
    for i in 0..=horizon {
        let hits = assignment.iter().filter(|(_, s)| s.contains(i)).count();
        if hits > best.1 {
            best = (i, hits);
            if hits == assignment.len() {
                break;
            }
        }
    }
    let (time, count) = best;
    // count ≥ ε|K|/2  ⇔  2·count·den ≥ num·|K|
    let lhs = 2 * count as u128 * *epsilon.denom() as u128;
    let rhs = *epsilon.numer() as u128 * assignment.len() as u128;
    if count == 0 || lhs < rhs {
        return Err(Error::PigeonholeFailed {
            horizon,
            best_time: time,
            best_count: count,
            keys: assignment.len(),
        });
    }
    let subset = assignment
        .iter()
        .filter(|(_, s)| s.contains(time))
        .map(|(k, _)| k.clone())
        .collect();
    Ok(PigeonholeChoice { time, subset })
}

/// Parses `"n/d"` or `"n"`.
pub fn parse_density(text: &str) -> Result<Density> {
    ratio_serde::parse(text).map_err(invalid)
}

pub(crate) mod ratio_serde {
    use num_rational::Ratio;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(de::Error::custom)
    }

    pub fn parse(text: &str) -> Result<Ratio<u64>, String> {
        let (n, d) = text.split_once('/').unwrap_or((text, "1"));
        let n: u64 = n.trim().parse().map_err(|e| format!("bad numerator: {e}"))?;
        let d: u64 = d.trim().parse().map_err(|e| format!("bad denominator: {e}"))?;
        if d == 0 {
            return Err("zero denominator".into());
        }
        Ok(Ratio::new(n, d))
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Ratio<u64>], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format!("{}/{}", r.numer(), r.denom()))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Ratio<u64>>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|t| parse(t).map_err(de::Error::custom))
                .collect()
        }
    }
}
