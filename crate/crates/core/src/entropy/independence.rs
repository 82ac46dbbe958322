//! Branch-and-bound search for independence sets of a pair of cylinders.
//!
//! Independence is hereditary, so every subset of an independence set is
//! one. Visiting position sets in increasing order and only descending
//! into full children therefore explores every independence set.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::PositionSet;
use crate::error::{invalid, Result};
use crate::systems::{parse_word, to_text, SubshiftModel};

/// Positions `S` and, for every pattern `p ∈ {0,1}^|S|`, a word of the
/// language carrying `u` at `s_i` when `p_i = 0` and `v` when `p_i = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceCertificate {
    pub u: String,
    pub v: String,
    pub positions: PositionSet,
    /// Pattern written as a 0/1 string, first position first.
    pub witnesses: BTreeMap<String, String>,
}

impl IndependenceCertificate {
    pub fn size(&self) -> usize {
        self.positions.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum IndependenceOutcome {
    Found { certificate: IndependenceCertificate },
    /// The search finished and no position is independent.
    None,
    /// The node budget ran out; `best` is the largest set seen so far.
    BudgetExhausted { best: Option<IndependenceCertificate> },
}

impl IndependenceOutcome {
    pub fn certificate(&self) -> Option<&IndependenceCertificate> {
        match self {
            IndependenceOutcome::Found { certificate } => Some(certificate),
            IndependenceOutcome::BudgetExhausted { best } => best.as_ref(),
            IndependenceOutcome::None => None,
        }
    }

    /// True when the search was not truncated.
    pub fn exhaustive(&self) -> bool {
        !matches!(self, IndependenceOutcome::BudgetExhausted { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    #[serde(flatten)]
    pub outcome: IndependenceOutcome,
    pub nodes: usize,
    pub horizon: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchParams {
    pub max_k: usize,
    pub horizon: usize,
    /// Candidate sets evaluated before giving up.
    pub node_budget: usize,
    /// Positions range over `[0, max_position]`.
    pub max_position: usize,
    /// Budget passed to the word predicate's enumeration.
    pub enum_budget: usize,
}

impl SearchParams {
    pub fn new(max_k: usize, horizon: usize, node_budget: usize) -> Self {
        SearchParams {
            max_k,
            horizon,
            node_budget,
            max_position: 64,
            enum_budget: 1 << 22,
        }
    }
}

/// Realizable patterns of a candidate set, as a bitset over `{0,1}^k`.
struct PatternSet {
    bits: Vec<u64>,
    count: usize,
}

impl PatternSet {
    fn new(k: usize) -> Self {
        PatternSet {
            bits: vec![0; (1usize << k).div_ceil(64)],
            count: 0,
        }
    }

    fn insert(&mut self, p: usize) -> bool {
        let (w, b) = (p / 64, p % 64);
        let fresh = self.bits[w] & (1 << b) == 0;
        if fresh {
            self.bits[w] |= 1 << b;
            self.count += 1;
        }
        fresh
    }
}

/// Pattern of the two cylinders at each position, read off a word.
fn classify(window: &[u8], u: &[u8], v: &[u8]) -> Option<usize> {
    if window.starts_with(u) {
        Some(0)
    } else if window.starts_with(v) {
        Some(1)
    } else {
        None
    }
}

/// The two ways of evaluating candidate sets.
enum Oracle<'a> {
    /// Projections of the predicate's language.
    Predicate {
        model: &'a SubshiftModel,
        span: usize,
        enum_budget: usize,
    },
    /// Windows of the generator prefixes; `classes[g][t]` is the cylinder
    /// seen at `t`.
    Orbits { prefixes: Vec<std::sync::Arc<Vec<u8>>>, classes: Vec<Vec<u8>>, span: usize },
}

const NO_CLASS: u8 = 2;

impl Oracle<'_> {
    fn count(&self, positions: &[usize], u: &[u8], v: &[u8]) -> Result<usize> {
        let k = positions.len();
        let mut set = PatternSet::new(k);
        match self {
            Oracle::Predicate { model, span, enum_budget } => {
                let expanded = expand(positions, *span);
                let pred = model.predicate.as_ref().expect("predicate oracle");
                for w in pred.project(&expanded, *enum_budget)?.values() {
                    if let Some(p) = pattern_of(w, positions, u, v) {
                        set.insert(p);
                    }
                }
            }
            Oracle::Orbits { classes, span, .. } => {
                let reach = positions[k - 1] + span;
                for cls in classes {
                    if cls.len() + span < reach + 1 {
                        continue;
                    }
                    let last = cls.len() + span - reach;
                    'start: for t in 0..last {
                        let mut p = 0usize;
                        for (i, &q) in positions.iter().enumerate() {
                            let c = cls[t + q];
                            if c == NO_CLASS {
                                continue 'start;
                            }
                            p |= (c as usize) << i;
                        }
                        set.insert(p);
                        if set.count == 1 << k {
                            return Ok(set.count);
                        }
                    }
                }
            }
        }
        Ok(set.count)
    }

    fn witnesses(&self, positions: &[usize], u: &[u8], v: &[u8]) -> Result<HashMap<usize, Vec<u8>>> {
        let mut out = HashMap::new();
        match self {
            Oracle::Predicate { model, span, enum_budget } => {
                let expanded = expand(positions, *span);
                let pred = model.predicate.as_ref().expect("predicate oracle");
                for w in pred.project(&expanded, *enum_budget)?.into_values() {
                    if let Some(p) = pattern_of(&w, positions, u, v) {
                        out.entry(p).or_insert(w);
                    }
                }
            }
            Oracle::Orbits { prefixes, span, .. } => {
                let len = positions[positions.len() - 1] + span;
                for prefix in prefixes {
                    for w in prefix.windows(len) {
                        if let Some(p) = pattern_of(w, positions, u, v) {
                            out.entry(p).or_insert_with(|| w.to_vec());
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

fn expand(positions: &[usize], span: usize) -> Vec<usize> {
    let mut out: Vec<usize> = positions.iter().flat_map(|&s| s..s + span).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn pattern_of(word: &[u8], positions: &[usize], u: &[u8], v: &[u8]) -> Option<usize> {
    positions.iter().enumerate().try_fold(0usize, |acc, (i, &q)| {
        classify(word.get(q..)?, u, v).map(|c| acc | (c << i))
    })
}

fn pattern_string(p: usize, k: usize) -> String {
    (0..k).map(|i| if p >> i & 1 == 1 { '1' } else { '0' }).collect()
}

struct Search<'a> {
    oracle: Oracle<'a>,
    u: Vec<u8>,
    v: Vec<u8>,
    params: SearchParams,
    nodes: &'a AtomicUsize,
    exhausted: &'a AtomicBool,
    /// Largest size found by any branch.
    shared_best: &'a AtomicUsize,
}

struct Branch {
    best: Vec<usize>,
}

impl Search<'_> {
    /// Evaluates `set`; `None` once the node budget is spent.
    fn full(&self, set: &[usize]) -> Result<Option<bool>> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.params.node_budget {
            self.exhausted.store(true, Ordering::Relaxed);
            return Ok(None);
        }
        let count = self.oracle.count(set, &self.u, &self.v)?;
        Ok(Some(count == 1 << set.len()))
    }

    /// Children of `set` in search order: full extensions by a larger
    /// position, most patterns first (all are full, so this is by
    /// position).
    fn dfs(&self, set: &mut Vec<usize>, branch: &mut Branch, strict: bool) -> Result<()> {
        if set.len() > branch.best.len() {
            branch.best = set.clone();
            self.shared_best.fetch_max(set.len(), Ordering::Relaxed);
        }
        if set.len() >= self.params.max_k || self.exhausted.load(Ordering::Relaxed) {
            return Ok(());
        }
        let start = set.last().map_or(0, |&l| l + 1);
        for q in start..=self.params.max_position {
            let bound = set.len() + 1 + (self.params.max_position - q);
            if bound <= branch.best.len() {
                break;
            }
            let global = self.shared_best.load(Ordering::Relaxed);
            if (strict && bound < global) || (!strict && bound <= global) {
                break;
            }
            set.push(q);
            match self.full(set)? {
                None => {
                    set.pop();
                    return Ok(());
                }
                Some(true) => self.dfs(set, branch, strict)?,
                Some(false) => {}
            }
            set.pop();
            if branch.best.len() >= self.params.max_k {
                return Ok(());
            }
        }
        Ok(())
    }
}

fn prepare<'a>(model: &'a SubshiftModel, u: &str, v: &str, params: &SearchParams) -> Result<(Oracle<'a>, Vec<u8>, Vec<u8>)> {
    let uw = parse_word(u)?;
    let vw = parse_word(v)?;
    if uw.is_empty() || vw.is_empty() {
        return Err(invalid("cylinder words must be nonempty"));
    }
    if uw.starts_with(&vw) || vw.starts_with(&uw) {
        return Err(invalid("cylinders must be disjoint: neither word may be a prefix of the other"));
    }
    if params.max_k == 0 || params.max_k > 20 {
        return Err(invalid("max_k must lie in [1, 20]"));
    }
    let span = uw.len().max(vw.len());
    if params.max_position + span > params.horizon {
        return Err(invalid("candidate positions do not fit the horizon"));
    }
    let oracle = if model.predicate.is_some() {
        Oracle::Predicate {
            model,
            span,
            enum_budget: params.enum_budget,
        }
    } else {
        let prefixes: Vec<_> = model.generators.iter().map(|g| g.prefix(params.horizon)).collect();
        let classes = prefixes
            .iter()
            .map(|p| {
                (0..=params.horizon - span)
                    .map(|t| classify(&p[t..], &uw, &vw).map_or(NO_CLASS, |c| c as u8))
                    .collect()
            })
            .collect();
        Oracle::Orbits { prefixes, classes, span }
    };
    Ok((oracle, uw, vw))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    oracle: &Oracle<'_>,
    u: &str,
    v: &str,
    uw: &[u8],
    vw: &[u8],
    best: Vec<usize>,
    complete: bool,
    max_k: usize,
) -> Result<IndependenceOutcome> {
    let certificate = if best.is_empty() {
        None
    } else {
        let found = oracle.witnesses(&best, uw, vw)?;
        let k = best.len();
        let witnesses = (0..1usize << k)
            .map(|p| (pattern_string(p, k), to_text(&found[&p])))
            .collect();
        Some(IndependenceCertificate {
            u: u.to_string(),
            v: v.to_string(),
            positions: PositionSet::new(best)?,
            witnesses,
        })
    };
    let reached_max = certificate.as_ref().is_some_and(|c| c.size() >= max_k);
    Ok(match certificate {
        _ if !complete && !reached_max => IndependenceOutcome::BudgetExhausted { best: certificate },
        Some(certificate) => IndependenceOutcome::Found { certificate },
        None => IndependenceOutcome::None,
    })
}

/// Largest independence set for the cylinders `[u]` and `[v]` with at most
/// `max_k` positions in `[0, max_position]`, judged against the empirical
/// language (the predicate's, when the model has one). Among sets of the
/// largest size the lexicographically first is returned.
pub fn independence_search(model: &SubshiftModel, u: &str, v: &str, params: &SearchParams) -> Result<SearchReport> {
    let (oracle, uw, vw) = prepare(model, u, v, params)?;
    let nodes = AtomicUsize::new(0);
    let exhausted = AtomicBool::new(false);
    let shared_best = AtomicUsize::new(0);
    let search = Search {
        oracle,
        u: uw.clone(),
        v: vw.clone(),
        params: *params,
        nodes: &nodes,
        exhausted: &exhausted,
        shared_best: &shared_best,
    };
    let mut branch = Branch { best: Vec::new() };
    search.dfs(&mut Vec::new(), &mut branch, false)?;
    let complete = !exhausted.load(Ordering::Relaxed);
    let outcome = finish(&search.oracle, u, v, &uw, &vw, branch.best, complete, params.max_k)?;
    Ok(SearchReport {
        outcome,
        nodes: nodes.load(Ordering::Relaxed).min(params.node_budget),
        horizon: params.horizon,
    })
}

/// Same result as [`independence_search`], with the root branches searched
/// in parallel. The branches share only the best size found so far; ties
/// go to the smallest root.
pub fn independence_search_parallel(model: &SubshiftModel, u: &str, v: &str, params: &SearchParams) -> Result<SearchReport> {
    let (oracle, uw, vw) = prepare(model, u, v, params)?;
    let nodes = AtomicUsize::new(0);
    let exhausted = AtomicBool::new(false);
    let shared_best = AtomicUsize::new(0);
    let search = Search {
        oracle,
        u: uw.clone(),
        v: vw.clone(),
        params: *params,
        nodes: &nodes,
        exhausted: &exhausted,
        shared_best: &shared_best,
    };
    let results: Vec<Result<Vec<usize>>> = (0..=params.max_position)
        .into_par_iter()
        .map(|root| {
            let mut branch = Branch { best: Vec::new() };
            let bound = 1 + params.max_position - root;
            if bound < shared_best.load(Ordering::Relaxed) {
                return Ok(branch.best);
            }
            let mut set = vec![root];
            if let Some(true) = search.full(&set)? {
                search.dfs(&mut set, &mut branch, true)?;
            }
            Ok(branch.best)
        })
        .collect();
    let mut best = Vec::new();
    for r in results {
        let b = r?;
        if b.len() > best.len() {
            best = b;
        }
    }
    let complete = !exhausted.load(Ordering::Relaxed);
    let outcome = finish(&search.oracle, u, v, &uw, &vw, best, complete, params.max_k)?;
    Ok(SearchReport {
        outcome,
        nodes: nodes.load(Ordering::Relaxed).min(params.node_budget),
        horizon: params.horizon,
    })
}

/// Re-checks a certificate from scratch: every pattern has a witness, each
/// witness carries the right word at every position, and each witness is
/// in the language (the predicate's, or a factor of a generator prefix of
/// length `horizon`).
pub fn validate_certificate(model: &SubshiftModel, cert: &IndependenceCertificate, horizon: usize) -> bool {
    let (Ok(u), Ok(v)) = (parse_word(&cert.u), parse_word(&cert.v)) else {
        return false;
    };
    let s = cert.positions.as_slice();
    if cert.witnesses.len() != 1 << s.len() {
        return false;
    }
    let prefixes: Vec<_> = model.generators.iter().map(|g| g.prefix(horizon)).collect();
    for mask in 0..1u64 << s.len() {
        let key: String = (0..s.len())
            .map(|i| char::from(b'0' + ((mask >> i) & 1) as u8))
            .collect();
        let Some(text) = cert.witnesses.get(&key) else {
            return false;
        };
        let Ok(word) = parse_word(text) else {
            return false;
        };
        for (i, &pos) in s.iter().enumerate() {
            let want = if (mask >> i) & 1 == 1 { &v } else { &u };
            if word.len() < pos + want.len() || word[pos..pos + want.len()] != want[..] {
                return false;
            }
        }
        let admitted = match &model.predicate {
            Some(p) => p.accepts(&word),
            None => prefixes
                .iter()
                .any(|p| p.len() >= word.len() && (0..=p.len() - word.len()).any(|t| p[t..t + word.len()] == word[..])),
        };
        if !admitted {
            return false;
        }
    }
    true
}
