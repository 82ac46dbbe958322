//! Symbolic points, subshift models and their empirical languages.

mod predicate;
pub mod sturmian;
pub mod toeplitz;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::Serialize;

pub use predicate::{AllWords, AtMostOneOne, PowersOfTwoSupport, WordPredicate};
pub use sturmian::CircleFraction;

use crate::error::{invalid, Error, Result};
use crate::factor::PeriodicStructure;
use crate::seed;

type Rule = Arc<dyn Fn(u64) -> u8 + Send + Sync>;

/// Prefixes at least this long are filled in parallel.
const PARALLEL_FILL: usize = 1 << 16;

/// A one-sided sequence given by a rule, with a shared growable prefix
/// cache. Clones share the cache.
#[derive(Clone)]
pub struct SymbolicPoint {
    alphabet_size: u8,
    label: String,
    rule: Rule,
    cache: Arc<RwLock<Arc<Vec<u8>>>>,
}

impl fmt::Debug for SymbolicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolicPoint")
            .field("label", &self.label)
            .field("alphabet_size", &self.alphabet_size)
            .finish()
    }
}

impl SymbolicPoint {
    pub fn from_rule(
        alphabet_size: u8,
        label: impl Into<String>,
        rule: impl Fn(u64) -> u8 + Send + Sync + 'static,
    ) -> Result<Self> {
        if alphabet_size < 2 {
            return Err(invalid("alphabet needs at least two symbols"));
        }
        Ok(SymbolicPoint {
            alphabet_size,
            label: label.into(),
            rule: Arc::new(rule),
            cache: Arc::new(RwLock::new(Arc::new(Vec::new()))),
        })
    }

    pub fn constant(symbol: u8, alphabet_size: u8) -> Self {
        SymbolicPoint::from_rule(alphabet_size, format!("{symbol}^inf"), move |_| symbol)
            .expect("binary or larger alphabet")
    }

    /// `word` repeated forever; the alphabet is the smallest containing it.
    pub fn periodic(word: &[u8]) -> Result<Self> {
        if word.is_empty() {
            return Err(invalid("periodic point needs a nonempty word"));
        }
        let k = word.iter().max().map_or(2, |&m| (m + 1).max(2));
        let label = format!("({})^inf", to_text(word));
        let word = word.to_vec();
        SymbolicPoint::from_rule(k, label, move |i| word[(i % word.len() as u64) as usize])
    }

    /// Binary point with 1s exactly on `support`.
    pub fn indicator(label: impl Into<String>, support: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        SymbolicPoint::from_rule(2, label, move |i| u8::from(support(i))).expect("binary alphabet")
    }

    /// Independent uniform symbols, reproducible from `seed`.
    pub fn bernoulli(seed: u64, alphabet_size: u8) -> Result<Self> {
        SymbolicPoint::from_rule(alphabet_size, format!("bernoulli({seed})"), move |i| {
            (seed::derive(seed, i) % alphabet_size as u64) as u8
        })
    }

    /// Point whose prefix is `text` (digits), extended periodically.
    pub fn from_text(text: &str) -> Result<Self> {
        let word = parse_word(text)?;
        SymbolicPoint::periodic(&word)
    }

    pub fn sturmian(alpha: CircleFraction, beta: CircleFraction) -> Result<Self> {
        alpha.check_irrational()?;
        SymbolicPoint::from_rule(2, format!("sturmian({alpha}, {beta})"), move |i| {
            sturmian::sturmian_symbol(alpha, beta, i)
        })
    }

    pub fn toeplitz() -> Self {
        let j: Arc<[u64]> = toeplitz::j_sequence(toeplitz::MAX_LEVEL).into();
        SymbolicPoint::from_rule(2, "toeplitz", move |i| toeplitz::symbol(&j, i)).expect("binary alphabet")
    }

    /// `σ^t x`.
    pub fn shifted(&self, t: u64) -> Self {
        let rule = self.rule.clone();
        SymbolicPoint::from_rule(self.alphabet_size, format!("shift({}, {t})", self.label), move |i| rule(i + t))
            .expect("same alphabet")
    }

    pub fn alphabet_size(&self) -> u8 {
        self.alphabet_size
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn symbol(&self, i: u64) -> u8 {
        let cached = self.cache.read().expect("cache lock");
        match cached.get(i as usize) {
            Some(&a) => a,
            None => (self.rule)(i),
        }
    }

    /// A cached prefix of length at least `n`.
    pub fn prefix(&self, n: usize) -> Arc<Vec<u8>> {
        {
            let cached = self.cache.read().expect("cache lock");
            if cached.len() >= n {
                return cached.clone();
            }
        }
        let mut cached = self.cache.write().expect("cache lock");
        if cached.len() < n {
            let old = cached.len();
            let target = n.max(old + old / 2);
            let mut v = Vec::with_capacity(target);
            v.extend_from_slice(&cached);
            if target - old >= PARALLEL_FILL {
                let rule = &self.rule;
                let mut tail = Vec::new();
                (old..target).into_par_iter().map(|i| rule(i as u64)).collect_into_vec(&mut tail);
                v.extend(tail);
            } else {
                v.extend((old..target).map(|i| (self.rule)(i as u64)));
            }
            *cached = Arc::new(v);
        }
        cached.clone()
    }

    /// First `n` symbols as digits.
    pub fn to_text(&self, n: usize) -> String {
        to_text(&self.prefix(n)[..n])
    }
}

pub fn to_text(word: &[u8]) -> String {
    word.iter()
        .map(|&a| char::from_digit(a as u32, 36).expect("alphabet below 36"))
        .collect()
}

/// Digits `0-9a-z` to symbols; whitespace is ignored.
pub fn parse_word(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| {
            c.to_digit(36)
                .map(|d| d as u8)
                .ok_or_else(|| invalid(format!("`{c}` is not a symbol")))
        })
        .collect()
}

/// The set `{x : x_{offset} ... x_{offset+|word|-1} = word}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cylinder {
    pub word: Vec<u8>,
    pub offset: usize,
}

impl Cylinder {
    pub fn new(word: Vec<u8>, offset: usize) -> Result<Self> {
        if word.is_empty() {
            return Err(invalid("cylinder word must be nonempty"));
        }
        Ok(Cylinder { word, offset })
    }

    pub fn at_origin(word: Vec<u8>) -> Result<Self> {
        Cylinder::new(word, 0)
    }

    /// One past the last constrained coordinate.
    pub fn end(&self) -> usize {
        self.offset + self.word.len()
    }

    /// Whether `σ^t` of the sequence lies in the cylinder.
    pub fn matches_at(&self, seq: &[u8], t: usize) -> bool {
        seq.get(t + self.offset..t + self.end()) == Some(&self.word[..])
    }
}

/// Side information for the families with a computable factor.
#[derive(Clone, Debug)]
pub enum SideInfo {
    None,
    Sturmian { alpha: CircleFraction, beta: CircleFraction },
    Toeplitz { skeleton: PeriodicStructure },
}

/// A named subshift: generating points, an optional exact word test and
/// optional side information.
#[derive(Clone)]
pub struct SubshiftModel {
    pub name: String,
    pub alphabet_size: u8,
    pub generators: Vec<SymbolicPoint>,
    pub predicate: Option<Arc<dyn WordPredicate>>,
    pub side_info: SideInfo,
    /// The frequencies along one generator orbit are the frequencies of
    /// the unique invariant measure.
    pub uniquely_ergodic: bool,
}

impl fmt::Debug for SubshiftModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubshiftModel")
            .field("name", &self.name)
            .field("alphabet_size", &self.alphabet_size)
            .field("generators", &self.generators)
            .field("predicate", &self.predicate.is_some())
            .field("side_info", &self.side_info)
            .finish()
    }
}

impl SubshiftModel {
    pub fn accepts(&self, word: &[u8]) -> Option<bool> {
        self.predicate.as_ref().map(|p| p.accepts(word))
    }

    /// The point probes default to.
    pub fn base_point(&self) -> &SymbolicPoint {
        &self.generators[0]
    }
}

pub fn full_shift(alphabet_size: u8) -> Result<SubshiftModel> {
    Ok(SubshiftModel {
        name: format!("full_shift_{alphabet_size}"),
        alphabet_size,
        generators: vec![SymbolicPoint::bernoulli(0x5eed, alphabet_size)?],
        predicate: Some(Arc::new(AllWords { alphabet_size })),
        side_info: SideInfo::None,
        uniquely_ergodic: false,
    })
}

/// Binary sequences with at most one 1.
pub fn single_one_subshift() -> SubshiftModel {
    SubshiftModel {
        name: "single_one".into(),
        alphabet_size: 2,
        generators: vec![
            SymbolicPoint::constant(0, 2),
            SymbolicPoint::indicator("1 0^inf", |i| i == 0),
        ],
        predicate: Some(Arc::new(AtMostOneOne)),
        side_info: SideInfo::None,
        uniquely_ergodic: true,
    }
}

/// Shift closure of the binary points supported in `{2^n : n ≥ 1}`.
pub fn powers_subshift() -> SubshiftModel {
    let powers = |i: u64| i >= 2 && i.is_power_of_two();
    SubshiftModel {
        name: "powers".into(),
        alphabet_size: 2,
        generators: vec![
            SymbolicPoint::indicator("1_{2^n}", powers),
            SymbolicPoint::indicator("1_{2,8}", |i| i == 2 || i == 8),
            SymbolicPoint::constant(0, 2),
        ],
        predicate: Some(Arc::new(PowersOfTwoSupport)),
        side_info: SideInfo::None,
        uniquely_ergodic: true,
    }
}

/// Levels recorded in the Toeplitz side information.
pub const TOEPLITZ_SKELETON_LEVELS: usize = 12;

/// Orbit closure of the Toeplitz point of [`toeplitz`]; the side
/// information lists its first levels (at most 12, and only levels that
/// start below `horizon`).
pub fn regular_toeplitz_example(horizon: u64) -> Result<SubshiftModel> {
    if horizon < 2 {
        return Err(invalid("horizon must be at least 2"));
    }
    let levels = toeplitz::j_sequence(TOEPLITZ_SKELETON_LEVELS)
        .iter()
        .filter(|&&j| j < horizon)
        .count();
    Ok(SubshiftModel {
        name: "regular_toeplitz".into(),
        alphabet_size: 2,
        generators: vec![SymbolicPoint::toeplitz()],
        predicate: None,
        side_info: SideInfo::Toeplitz {
            skeleton: toeplitz::skeleton(levels, horizon),
        },
        uniquely_ergodic: true,
    })
}

/// Coding of the rotation by `alpha` with phase `beta`.
pub fn sturmian_model(alpha: CircleFraction, beta: CircleFraction) -> Result<SubshiftModel> {
    Ok(SubshiftModel {
        name: "sturmian".into(),
        alphabet_size: 2,
        generators: vec![SymbolicPoint::sturmian(alpha, beta)?],
        predicate: None,
        side_info: SideInfo::Sturmian { alpha, beta },
        uniquely_ergodic: true,
    })
}

/// Orbit of a periodic point.
pub fn periodic_model(word: &[u8]) -> Result<SubshiftModel> {
    let point = SymbolicPoint::periodic(word)?;
    Ok(SubshiftModel {
        name: format!("periodic_{}", to_text(word)),
        alphabet_size: point.alphabet_size(),
        generators: vec![point],
        predicate: None,
        side_info: SideInfo::None,
        uniquely_ergodic: true,
    })
}

/// Words of length `length` seen in some generator prefix of length
/// `horizon`, together with every word the predicate accepts.
///
/// Without a predicate this is an under-approximation of the language.
pub fn language(model: &SubshiftModel, length: usize, horizon: usize, budget: usize) -> Result<BTreeSet<Vec<u8>>> {
    if length > horizon {
        return Err(invalid(format!("word length {length} exceeds horizon {horizon}")));
    }
    let mut words = BTreeSet::new();
    if let Some(p) = &model.predicate {
        words = p.windows(&[], 0, length, budget)?;
    }
    for g in &model.generators {
        let prefix = g.prefix(horizon);
        for w in prefix[..horizon].windows(length.max(1)) {
            if length == 0 {
                break;
            }
            if !words.contains(w) {
                words.insert(w.to_vec());
                if words.len() > budget {
                    return Err(Error::BudgetExceeded { budget });
                }
            }
        }
    }
    if length == 0 {
        words.insert(Vec::new());
    }
    Ok(words)
}
