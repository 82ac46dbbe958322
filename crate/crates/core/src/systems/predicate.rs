//! Exact membership tests for finite words, with the enumeration hooks the
//! probes need.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, RngCore};

use crate::error::{Error, Result};

/// Exact language of a subshift, given as a test on finite words.
///
/// Implementations must describe a factor-closed, extendable language:
/// every factor of an accepted word is accepted and every accepted word has
/// an accepted one-symbol extension. The enumeration methods have generic
/// depth-first defaults; the built-in predicates override them.
pub trait WordPredicate: Send + Sync {
    fn alphabet_size(&self) -> u8;

    fn accepts(&self, word: &[u8]) -> bool;

    /// Distinct contents of `[offset, offset + width)` over the accepted
    /// words of length `max(prefix.len(), offset + width)` that begin with
    /// `prefix`.
    fn windows(
        &self,
        prefix: &[u8],
        offset: usize,
        width: usize,
        budget: usize,
    ) -> Result<BTreeSet<Vec<u8>>> {
        let len = prefix.len().max(offset + width);
        let mut out = BTreeSet::new();
        let mut leaves = 0usize;
        dfs_words(self, prefix.to_vec(), len, &mut |w| {
            leaves += 1;
            if leaves > budget {
                return Err(Error::BudgetExceeded { budget });
            }
            out.insert(w[offset..offset + width].to_vec());
            Ok(())
        })?;
        Ok(out)
    }

    /// Distinct tuples `(w_{s_1}, ..., w_{s_n})` over accepted words `w` of
    /// length `max + 1`, each with one witness word.
    fn project(&self, positions: &[usize], budget: usize) -> Result<BTreeMap<Vec<u8>, Vec<u8>>> {
        let len = positions.iter().max().map_or(0, |m| m + 1);
        let mut out = BTreeMap::new();
        let mut leaves = 0usize;
        dfs_words(self, Vec::new(), len, &mut |w| {
            leaves += 1;
            if leaves > budget {
                return Err(Error::BudgetExceeded { budget });
            }
            let key = positions.iter().map(|&p| w[p]).collect();
            out.entry(key).or_insert_with(|| w.to_vec());
            Ok(())
        })?;
        Ok(out)
    }

    /// A random accepted word of length `len` beginning with `prefix`, or
    /// `None` when `prefix` is not accepted.
    fn sample_extension(&self, prefix: &[u8], len: usize, rng: &mut dyn RngCore) -> Option<Vec<u8>> {
        if !self.accepts(prefix) {
            return None;
        }
        let mut w = prefix.to_vec();
        let k = self.alphabet_size();
        while w.len() < len {
            let start = rng.gen_range(0..k);
            let next = (0..k)
                .map(|d| (start + d) % k)
                .find(|&a| {
                    w.push(a);
                    let ok = self.accepts(&w);
                    w.pop();
                    ok
                })?;
            w.push(next);
        }
        Some(w)
    }
}

fn dfs_words<P: WordPredicate + ?Sized>(
    pred: &P,
    mut word: Vec<u8>,
    len: usize,
    visit: &mut dyn FnMut(&[u8]) -> Result<()>,
) -> Result<()> {
    if !pred.accepts(&word) {
        return Ok(());
    }
    if word.len() >= len {
        return visit(&word);
    }
    for a in 0..pred.alphabet_size() {
        word.push(a);
        if pred.accepts(&word) {
            dfs_words(pred, word.clone(), len, visit)?;
        }
        word.pop();
    }
    Ok(())
}

fn check_budget(count: usize, budget: usize) -> Result<()> {
    if count > budget {
        Err(Error::BudgetExceeded { budget })
    } else {
        Ok(())
    }
}

/// Every word over the alphabet.
#[derive(Clone, Copy, Debug)]
pub struct AllWords {
    pub alphabet_size: u8,
}

impl WordPredicate for AllWords {
    fn alphabet_size(&self) -> u8 {
        self.alphabet_size
    }

    fn accepts(&self, word: &[u8]) -> bool {
        word.iter().all(|&a| a < self.alphabet_size)
    }

    fn windows(&self, prefix: &[u8], offset: usize, width: usize, budget: usize) -> Result<BTreeSet<Vec<u8>>> {
        if !self.accepts(prefix) {
            return Ok(BTreeSet::new());
        }
        let free = (offset..offset + width).filter(|&i| i >= prefix.len()).count();
        let k = self.alphabet_size as usize;
        let total = k.checked_pow(free as u32).unwrap_or(usize::MAX);
        check_budget(total, budget)?;
        let mut out = BTreeSet::new();
        for mut code in 0..total {
            let w = (offset..offset + width)
                .map(|i| {
                    if i < prefix.len() {
                        prefix[i]
                    } else {
                        let a = (code % k) as u8;
                        code /= k;
                        a
                    }
                })
                .collect();
            out.insert(w);
        }
        Ok(out)
    }

    fn project(&self, positions: &[usize], budget: usize) -> Result<BTreeMap<Vec<u8>, Vec<u8>>> {
        let len = positions.iter().max().map_or(0, |m| m + 1);
        let distinct: BTreeSet<usize> = positions.iter().copied().collect();
        let k = self.alphabet_size as usize;
        let total = k.checked_pow(distinct.len() as u32).unwrap_or(usize::MAX);
        check_budget(total, budget)?;
        let mut out = BTreeMap::new();
        for mut code in 0..total {
            let mut w = vec![0u8; len];
            for &p in &distinct {
                w[p] = (code % k) as u8;
                code /= k;
            }
            out.insert(positions.iter().map(|&p| w[p]).collect(), w);
        }
        Ok(out)
    }

    fn sample_extension(&self, prefix: &[u8], len: usize, rng: &mut dyn RngCore) -> Option<Vec<u8>> {
        if !self.accepts(prefix) {
            return None;
        }
        let mut w = prefix.to_vec();
        w.extend((prefix.len()..len).map(|_| rng.gen_range(0..self.alphabet_size)));
        Some(w)
    }
}

/// Binary words with at most one occurrence of 1.
#[derive(Clone, Copy, Debug)]
pub struct AtMostOneOne;

/// Where the 1 of an accepted extension of `prefix` may sit.
enum OnePlacement {
    Rejected,
    Fixed(usize),
    /// Nowhere, or anywhere at or past the end of the prefix.
    Free,
}

impl AtMostOneOne {
    fn placement(prefix: &[u8]) -> OnePlacement {
        if prefix.iter().any(|&a| a > 1) {
            return OnePlacement::Rejected;
        }
        let mut ones = (0..prefix.len()).filter(|&i| prefix[i] == 1);
        match (ones.next(), ones.next()) {
            (None, _) => OnePlacement::Free,
            (Some(p), None) => OnePlacement::Fixed(p),
            _ => OnePlacement::Rejected,
        }
    }
}

impl WordPredicate for AtMostOneOne {
    fn alphabet_size(&self) -> u8 {
        2
    }

    fn accepts(&self, word: &[u8]) -> bool {
        !matches!(Self::placement(word), OnePlacement::Rejected)
    }

    fn windows(&self, prefix: &[u8], offset: usize, width: usize, budget: usize) -> Result<BTreeSet<Vec<u8>>> {
        let window = offset..offset + width;
        let unit = |p: Option<usize>| {
            let mut w = vec![0u8; width];
            if let Some(p) = p.filter(|p| window.contains(p)) {
                w[p - offset] = 1;
            }
            w
        };
        let mut out = BTreeSet::new();
        match Self::placement(prefix) {
            OnePlacement::Rejected => {}
            OnePlacement::Fixed(p) => {
                out.insert(unit(Some(p)));
            }
            OnePlacement::Free => {
                out.insert(unit(None));
                for p in offset.max(prefix.len())..offset + width {
                    out.insert(unit(Some(p)));
                    check_budget(out.len(), budget)?;
                }
            }
        }
        Ok(out)
    }

    fn project(&self, positions: &[usize], budget: usize) -> Result<BTreeMap<Vec<u8>, Vec<u8>>> {
        let len = positions.iter().max().map_or(0, |m| m + 1);
        let mut out = BTreeMap::new();
        for one in std::iter::once(None).chain(positions.iter().copied().map(Some)) {
            let mut w = vec![0u8; len];
            if let Some(p) = one {
                w[p] = 1;
            }
            out.entry(positions.iter().map(|&p| w[p]).collect()).or_insert(w);
            check_budget(out.len(), budget)?;
        }
        Ok(out)
    }

    fn sample_extension(&self, prefix: &[u8], len: usize, rng: &mut dyn RngCore) -> Option<Vec<u8>> {
        let len = len.max(prefix.len());
        let mut w = prefix.to_vec();
        w.resize(len, 0);
        match Self::placement(prefix) {
            OnePlacement::Rejected => return None,
            OnePlacement::Fixed(_) => {}
            OnePlacement::Free => {
                // uniform over "no 1" and each free position
                let choice = rng.gen_range(0..=len - prefix.len());
                if choice > 0 {
                    w[prefix.len() + choice - 1] = 1;
                }
            }
        }
        Some(w)
    }
}

/// Binary words whose 1s can be translated into `{2^n : n ≥ 1}`: a word is
/// accepted iff some `t ≥ 0` maps every 1-position `p` to a power of two
/// `p + t ≥ 2`.
#[derive(Clone, Copy, Debug)]
pub struct PowersOfTwoSupport;

fn is_target(q: u64) -> bool {
    q >= 2 && q.is_power_of_two()
}

impl PowersOfTwoSupport {
    /// Shifts compatible with the 1s of `word`. A word without 1s admits
    /// every shift; then only the shifts moving some position of `relevant`
    /// onto a power of two are listed.
    fn shifts(word: &[u8], relevant: &[usize]) -> Vec<u64> {
        let ones: Vec<u64> = (0..word.len() as u64).filter(|&i| word[i as usize] == 1).collect();
        let anchors: Vec<u64> = match ones.first() {
            None => relevant.iter().map(|&i| i as u64).collect(),
            Some(&p0) => vec![p0],
        };
        let mut out: Vec<u64> = anchors
            .iter()
            .flat_map(|&p| (1..64).map(|n| 1u64 << n).filter(move |&q| q >= p).map(move |q| q - p))
            .filter(|&t| ones.iter().all(|&p| is_target(p + t)))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn free_ones(t: u64, range: std::ops::Range<usize>) -> Vec<usize> {
        range.filter(|&i| is_target(i as u64 + t)).collect()
    }

    fn subsets(free: &[usize], budget: usize) -> Result<impl Iterator<Item = Vec<usize>> + '_> {
        check_budget(1usize.checked_shl(free.len() as u32).unwrap_or(usize::MAX), budget)?;
        Ok((0u64..1 << free.len()).map(move |mask| {
            (0..free.len()).filter(|b| mask >> b & 1 == 1).map(|b| free[b]).collect()
        }))
    }
}

impl WordPredicate for PowersOfTwoSupport {
    fn alphabet_size(&self) -> u8 {
        2
    }

    fn accepts(&self, word: &[u8]) -> bool {
        if word.iter().any(|&a| a > 1) {
            return false;
        }
        !word.contains(&1) || !Self::shifts(word, &[]).is_empty()
    }

    fn windows(&self, prefix: &[u8], offset: usize, width: usize, budget: usize) -> Result<BTreeSet<Vec<u8>>> {
        if !self.accepts(prefix) {
            return Ok(BTreeSet::new());
        }
        let m = prefix.len();
        let free_range = offset.max(m)..offset + width;
        let fixed: Vec<u8> = (offset..offset + width)
            .map(|i| if i < m { prefix[i] } else { 0 })
            .collect();
        let mut out = BTreeSet::new();
        out.insert(fixed.clone());
        let relevant: Vec<usize> = free_range.clone().collect();
        for t in Self::shifts(prefix, &relevant) {
            let free = Self::free_ones(t, free_range.clone());
            for ones in Self::subsets(&free, budget)? {
                let mut w = fixed.clone();
                for i in ones {
                    w[i - offset] = 1;
                }
                out.insert(w);
                check_budget(out.len(), budget)?;
            }
        }
        Ok(out)
    }

    fn project(&self, positions: &[usize], budget: usize) -> Result<BTreeMap<Vec<u8>, Vec<u8>>> {
        let len = positions.iter().max().map_or(0, |m| m + 1);
        let distinct: Vec<usize> = positions.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let mut out = BTreeMap::new();
        let record = |ones: &[usize], out: &mut BTreeMap<Vec<u8>, Vec<u8>>| {
            let mut w = vec![0u8; len];
            for &p in ones {
                w[p] = 1;
            }
            out.entry(positions.iter().map(|&p| w[p]).collect()).or_insert(w);
        };
        record(&[], &mut out);
        for t in Self::shifts(&[], &distinct) {
            let free: Vec<usize> = distinct.iter().copied().filter(|&p| is_target(p as u64 + t)).collect();
            for ones in Self::subsets(&free, budget)? {
                record(&ones, &mut out);
                check_budget(out.len(), budget)?;
            }
        }
        Ok(out)
    }

    fn sample_extension(&self, prefix: &[u8], len: usize, rng: &mut dyn RngCore) -> Option<Vec<u8>> {
        if !self.accepts(prefix) {
            return None;
        }
        let len = len.max(prefix.len());
        let mut w = prefix.to_vec();
        w.resize(len, 0);
        let relevant: Vec<usize> = (prefix.len()..len).collect();
        let shifts = Self::shifts(prefix, &relevant);
        if shifts.is_empty() {
            return Some(w);
        }
        let t = shifts[rng.gen_range(0..shifts.len())];
        for i in Self::free_ones(t, prefix.len()..len) {
            if rng.gen_bool(0.5) {
                w[i] = 1;
            }
        }
        Some(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Plain depth-first enumeration through `accepts` only.
    struct Generic<P>(P);

    impl<P: WordPredicate> WordPredicate for Generic<P> {
        fn alphabet_size(&self) -> u8 {
            self.0.alphabet_size()
        }
        fn accepts(&self, word: &[u8]) -> bool {
            self.0.accepts(word)
        }
    }

    fn bits(s: &str) -> Vec<u8> {
        s.bytes().map(|b| b - b'0').collect()
    }

    /// Shift search straight from the definition, over t ≤ 2^20.
    fn powers_oracle(word: &[u8]) -> bool {
        (0..=1u64 << 20).any(|t| {
            word.iter()
                .enumerate()
                .all(|(p, &a)| a == 0 || is_target(p as u64 + t))
        })
    }

    #[test]
    fn single_one_membership() {
        assert!(AtMostOneOne.accepts(&bits("00100")));
        assert!(!AtMostOneOne.accepts(&bits("0110")));
        let two = AtMostOneOne.windows(&[], 0, 2, 100).unwrap();
        assert_eq!(two, [bits("00"), bits("01"), bits("10")].into_iter().collect());
    }

    #[test]
    fn powers_membership_against_shift_search() {
        assert!(!PowersOfTwoSupport.accepts(&bits("11")));
        assert!(PowersOfTwoSupport.accepts(&bits("101")));
        for len in 1..=9 {
            for code in 0u32..1 << len {
                let w: Vec<u8> = (0..len).map(|i| (code >> i & 1) as u8).collect();
                assert_eq!(PowersOfTwoSupport.accepts(&w), powers_oracle(&w), "{w:?}");
            }
        }
    }

    fn check_specialised<P: WordPredicate + Clone>(p: P) {
        let g = Generic(p.clone());
        for prefix in [vec![], bits("0"), bits("1"), bits("00"), bits("010"), bits("0001")] {
            for offset in 0..6 {
                for width in 1..4 {
                    assert_eq!(
                        p.windows(&prefix, offset, width, 1 << 16).unwrap(),
                        g.windows(&prefix, offset, width, 1 << 16).unwrap(),
                        "prefix {prefix:?} offset {offset} width {width}"
                    );
                }
            }
        }
        for positions in [vec![0], vec![1, 3], vec![2, 4, 8], vec![0, 1, 5, 6]] {
            let fast = p.project(&positions, 1 << 16).unwrap();
            let slow = g.project(&positions, 1 << 16).unwrap();
            assert_eq!(fast.keys().collect::<Vec<_>>(), slow.keys().collect::<Vec<_>>());
            for (tuple, w) in &fast {
                assert!(p.accepts(w));
                assert_eq!(&positions.iter().map(|&q| w[q]).collect::<Vec<_>>(), tuple);
            }
        }
    }

    #[test]
    fn specialised_enumeration_matches_generic() {
        check_specialised(AllWords { alphabet_size: 2 });
        check_specialised(AtMostOneOne);
        check_specialised(PowersOfTwoSupport);
    }

    #[test]
    fn samples_are_accepted_extensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let preds: [&dyn WordPredicate; 3] = [&AllWords { alphabet_size: 3 }, &AtMostOneOne, &PowersOfTwoSupport];
        for p in preds {
            for _ in 0..50 {
                let prefix = [0u8, 0];
                let w = p.sample_extension(&prefix, 40, &mut rng).unwrap();
                assert_eq!(w.len(), 40);
                assert_eq!(&w[..2], &prefix);
                assert!(p.accepts(&w));
            }
        }
        assert!(AtMostOneOne.sample_extension(&[1, 1], 5, &mut rng).is_none());
    }

    #[test]
    fn powers_projection_on_power_positions_is_full() {
        let t = PowersOfTwoSupport.project(&[2, 4, 8], 1 << 10).unwrap();
        assert_eq!(t.len(), 8);
    }

    #[test]
    fn budget_is_enforced() {
        let err = AllWords { alphabet_size: 2 }.windows(&[], 0, 20, 1000).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { budget: 1000 }));
    }
}
