//! Exact surjectivity decision and preimage counting.
//!
//! The decider determinizes the preimage (de Bruijn) automaton; an independent
//! brute-force balance check enumerates images of all long-enough words.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::ca::{checked_pow, FiniteWord, LocalRule};
use crate::error::{CaError, Result};

/// Default cap on explicit word enumeration (`k^(|u|+2r)` candidates).
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 1 << 24;
/// Cap on de Bruijn states before determinization.
pub const MAX_AUTOMATON_STATES: u128 = 1 << 16;
/// Cap on subsets explored by the subset construction.
pub const MAX_EXPLORED_SUBSETS: usize = 1 << 20;

/// De Bruijn automaton whose paths spell the preimages of output words.
///
/// States are words of length `2r`; reading input letter `a` from state `s`
/// emits `f(s a)` and moves to the last `2r` letters of `s a`.
#[derive(Debug, Clone)]
pub struct PreimageAutomaton {
    k: usize,
    states: usize,
    /// `succ[state * k + output]`: successor states reachable while emitting `output`.
    succ: Vec<Vec<u32>>,
}

impl PreimageAutomaton {
    pub fn new(rule: &LocalRule) -> Result<Self> {
        let k = rule.k();
        let needed = checked_pow(k, 2 * rule.radius()).unwrap_or(u128::MAX);
        if needed > MAX_AUTOMATON_STATES {
            return Err(CaError::GuardExceeded {
                what: "preimage automaton states",
                needed,
                limit: MAX_AUTOMATON_STATES,
            });
        }
        let states = needed as usize;
        let mut succ = vec![Vec::new(); states * k];
        for s in 0..states {
            for a in 0..k {
                let window = s * k + a;
                let out = rule.lookup(window) as usize;
                succ[s * k + out].push((window % states) as u32);
            }
        }
        Ok(PreimageAutomaton { k, states, succ })
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn successors(&self, state: usize, output: u8) -> &[u32] {
        &self.succ[state * self.k + output as usize]
    }

    /// One transfer-matrix step: path counts after additionally emitting `output`.
    fn advance(&self, counts: &[u128], output: u8) -> Result<Vec<u128>> {
        let mut next = vec![0u128; self.states];
        for (s, &c) in counts.iter().enumerate().filter(|(_, c)| **c > 0) {
            for &t in self.successors(s, output) {
                let slot = &mut next[t as usize];
                *slot = slot.checked_add(c).ok_or(CaError::GuardExceeded {
                    what: "preimage count (u128)",
                    needed: u128::MAX,
                    limit: u128::MAX,
                })?;
            }
        }
        Ok(next)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionMethod {
    SubsetConstruction,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurjectivityReport {
    pub surjective: bool,
    /// Shortest orphan (word without preimage); present iff not surjective.
    pub witness: Option<FiniteWord>,
    pub method: DecisionMethod,
}

fn enumeration_guard(k: usize, len: usize, limit: u128) -> Result<u128> {
    let needed = checked_pow(k, len).unwrap_or(u128::MAX);
    if needed > limit {
        return Err(CaError::GuardExceeded {
            what: "enumerated words",
            needed,
            limit,
        });
    }
    Ok(needed)
}

/// All words `v` of length `|u| + 2r` whose image is `u`, by explicit enumeration.
pub fn preimages(rule: &LocalRule, u: &FiniteWord) -> Result<Vec<FiniteWord>> {
    preimages_with_limit(rule, u, DEFAULT_ENUMERATION_LIMIT)
}

pub fn preimages_with_limit(rule: &LocalRule, u: &FiniteWord, limit: u128) -> Result<Vec<FiniteWord>> {
    if u.is_empty() {
        return Err(CaError::InvalidParameter("preimages of the empty word".into()));
    }
    rule.alphabet().check_letters(u.letters())?;
    let len = u.len() + 2 * rule.radius();
    let total = enumeration_guard(rule.k(), len, limit)?;
    let mut image = Vec::with_capacity(u.len());
    Ok((0..total)
        .map(|i| FiniteWord::from_index(i, len, rule.k()))
        .filter(|v| {
            rule.step_segment(v.letters(), &mut image);
            image == u.letters()
        })
        .collect())
}

/// Number of preimages of `u`, via a transfer-matrix product over the preimage automaton.
pub fn count_preimages(rule: &LocalRule, u: &FiniteWord) -> Result<u128> {
    if u.is_empty() {
        return Err(CaError::InvalidParameter("preimages of the empty word".into()));
    }
    rule.alphabet().check_letters(u.letters())?;
    let automaton = PreimageAutomaton::new(rule)?;
    count_with(&automaton, u)
}

fn count_with(automaton: &PreimageAutomaton, u: &FiniteWord) -> Result<u128> {
    let mut counts = vec![1u128; automaton.state_count()];
    for &b in u.letters() {
        counts = automaton.advance(&counts, b)?;
    }
    Ok(counts.iter().sum())
}

/// Brute-force balance oracle: every word of length `1..=L` has exactly `k^(2r)` preimages.
///
/// Enumerates all inputs of length `l + 2r` and histograms their images, independently
/// of the preimage automaton.
pub fn is_balanced_up_to(rule: &LocalRule, max_len: usize) -> Result<bool> {
    if max_len == 0 {
        return Err(CaError::InvalidParameter("balance length must be >= 1".into()));
    }
    let k = rule.k();
    let expected = checked_pow(k, 2 * rule.radius()).unwrap_or(u128::MAX);
    for len in 1..=max_len {
        if !image_histogram(rule, len)?.iter().all(|&c| c as u128 == expected) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Counts of images over all inputs of length `len + 2r`, indexed lexicographically by image.
fn image_histogram(rule: &LocalRule, len: usize) -> Result<Vec<u64>> {
    let k = rule.k();
    let total = enumeration_guard(k, len + 2 * rule.radius(), DEFAULT_ENUMERATION_LIMIT)?;
    let mut hist = vec![0u64; checked_pow(k, len).unwrap() as usize];
    let mut image = Vec::with_capacity(len);
    for i in 0..total {
        let v = FiniteWord::from_index(i, len + 2 * rule.radius(), k);
        rule.step_segment(v.letters(), &mut image);
        let idx = image.iter().fold(0usize, |acc, &l| acc * k + l as usize);
        hist[idx] += 1;
    }
    Ok(hist)
}

/// Exact surjectivity decision by subset construction from the full state set.
///
/// The empty subset is reachable iff some word has no preimage; breadth-first
/// search returns the shortest (then lexicographically least) such orphan.
pub fn is_surjective(rule: &LocalRule) -> Result<SurjectivityReport> {
    let automaton = PreimageAutomaton::new(rule)?;
    let k = rule.k();
    let n = automaton.state_count();
    let blocks = n.div_ceil(64);
    let mut full = vec![0u64; blocks];
    for s in 0..n {
        full[s / 64] |= 1 << (s % 64);
    }
    // Parent links: (parent subset index, letter) for witness reconstruction.
    let mut subsets: Vec<Vec<u64>> = vec![full.clone()];
    let mut parent: Vec<Option<(usize, u8)>> = vec![None];
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::from([(full, 0)]);
    let mut queue = VecDeque::from([0usize]);

    while let Some(id) = queue.pop_front() {
        for b in 0..k as u8 {
            let mut next = vec![0u64; blocks];
            for (w, &bits) in subsets[id].iter().enumerate() {
                let mut rest = bits;
                while rest != 0 {
                    let s = w * 64 + rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    for &t in automaton.successors(s, b) {
                        next[t as usize / 64] |= 1 << (t % 64);
                    }
                }
            }
            if next.iter().all(|&w| w == 0) {
                let mut letters = vec![b];
                let mut cur = id;
                while let Some((p, l)) = parent[cur] {
                    letters.push(l);
                    cur = p;
                }
                letters.reverse();
                return Ok(SurjectivityReport {
                    surjective: false,
                    witness: Some(FiniteWord::from_letters(letters)),
                    method: DecisionMethod::SubsetConstruction,
                });
            }
            if !seen.contains_key(&next) {
                if subsets.len() >= MAX_EXPLORED_SUBSETS {
                    return Err(CaError::GuardExceeded {
                        what: "explored subsets",
                        needed: subsets.len() as u128 + 1,
                        limit: MAX_EXPLORED_SUBSETS as u128,
                    });
                }
                let nid = subsets.len();
                seen.insert(next.clone(), nid);
                subsets.push(next);
                parent.push(Some((id, b)));
                queue.push_back(nid);
            }
        }
    }
    Ok(SurjectivityReport {
        surjective: true,
        witness: None,
        method: DecisionMethod::SubsetConstruction,
    })
}

/// Brute-force report: balance up to `max_len`, with the shortest orphan found by enumeration.
///
/// Fails as inconclusive when balance breaks but no orphan of length `<= max_len` exists.
pub fn decide_by_balance(rule: &LocalRule, max_len: usize) -> Result<SurjectivityReport> {
    let k = rule.k();
    let expected = checked_pow(k, 2 * rule.radius()).unwrap_or(u128::MAX);
    let mut balanced = true;
    for len in 1..=max_len.max(1) {
        let hist = image_histogram(rule, len)?;
        if let Some(idx) = hist.iter().position(|&c| c == 0) {
            return Ok(SurjectivityReport {
                surjective: false,
                witness: Some(FiniteWord::from_index(idx as u128, len, k)),
                method: DecisionMethod::BruteForce,
            });
        }
        balanced &= hist.iter().all(|&c| c as u128 == expected);
    }
    if balanced {
        Ok(SurjectivityReport {
            surjective: true,
            witness: None,
            method: DecisionMethod::BruteForce,
        })
    } else {
        Err(CaError::Inconclusive(format!(
            "unbalanced but no orphan of length <= {max_len}"
        )))
    }
}

/// Checks `ν(F^-1[u]) = ν([u])` under the uniform measure for every `|u| <= L`,
/// i.e. `count(u) · k^-(|u|+2r) = k^-|u|`, compared exactly in integers.
pub fn verify_uniform_invariance(rule: &LocalRule, max_len: usize) -> Result<bool> {
    if max_len == 0 {
        return Err(CaError::InvalidParameter("invariance length must be >= 1".into()));
    }
    let k = rule.k();
    let words: u128 = (1..=max_len)
        .map(|l| checked_pow(k, l).unwrap_or(u128::MAX))
        .fold(0u128, |a, b| a.saturating_add(b));
    if words > DEFAULT_ENUMERATION_LIMIT {
        return Err(CaError::GuardExceeded {
            what: "tested cylinders",
            needed: words,
            limit: DEFAULT_ENUMERATION_LIMIT,
        });
    }
    let automaton = PreimageAutomaton::new(rule)?;
    let r = rule.radius();
    // Depth-first over words; each node carries the path counts of its prefix.
    let mut stack = vec![(0usize, vec![1u128; automaton.state_count()])];
    while let Some((depth, counts)) = stack.pop() {
        if depth == max_len {
            continue;
        }
        for b in 0..k as u8 {
            let next = automaton.advance(&counts, b)?;
            let len = depth + 1;
            let count: u128 = next.iter().sum();
            let lhs = count.checked_mul(checked_pow(k, len).unwrap());
            let rhs = checked_pow(k, len + 2 * r);
            if lhs.is_none() || lhs != rhs {
                return Ok(false);
            }
            stack.push((len, next));
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ca::{wolfram_rule, Alphabet};

    fn w(s: &str) -> FiniteWord {
        s.parse().unwrap()
    }

    fn strings(v: Vec<FiniteWord>) -> Vec<String> {
        v.into_iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn preimage_examples() {
        let id = wolfram_rule(204).unwrap();
        assert_eq!(strings(preimages(&id, &w("1")).unwrap()), ["010", "011", "110", "111"]);
        let xor = wolfram_rule(90).unwrap();
        assert_eq!(strings(preimages(&xor, &w("0")).unwrap()), ["000", "010", "101", "111"]);
        assert!(preimages(&wolfram_rule(0).unwrap(), &w("1")).unwrap().is_empty());
        assert!(preimages(&id, &FiniteWord::empty()).is_err());
        assert!(matches!(
            preimages_with_limit(&id, &w("0000000000"), 1 << 8),
            Err(CaError::GuardExceeded { .. })
        ));
    }

    #[test]
    fn count_examples() {
        let xor = wolfram_rule(90).unwrap();
        for len in 1..=8 {
            for u in FiniteWord::all_of_length(len, 2) {
                assert_eq!(count_preimages(&xor, &u).unwrap(), 4);
            }
        }
        assert_eq!(count_preimages(&wolfram_rule(0).unwrap(), &w("1")).unwrap(), 0);
        assert_eq!(count_preimages(&wolfram_rule(204).unwrap(), &w("0110101")).unwrap(), 4);
    }

    #[test]
    fn transfer_matrix_matches_enumeration() {
        for n in [0, 30, 54, 90, 110, 150, 184, 232] {
            let rule = wolfram_rule(n).unwrap();
            for len in 1..=6 {
                for u in FiniteWord::all_of_length(len, 2) {
                    assert_eq!(
                        count_preimages(&rule, &u).unwrap(),
                        preimages(&rule, &u).unwrap().len() as u128,
                        "rule {n} word {u}"
                    );
                }
            }
        }
    }

    #[test]
    fn balance_examples() {
        assert!(is_balanced_up_to(&wolfram_rule(90).unwrap(), 8).unwrap());
        assert!(!is_balanced_up_to(&wolfram_rule(0).unwrap(), 1).unwrap());
        assert!(is_balanced_up_to(&wolfram_rule(170).unwrap(), 8).unwrap());
        assert!(is_balanced_up_to(&wolfram_rule(90).unwrap(), 0).is_err());
    }

    #[test]
    fn surjectivity_examples() {
        assert!(is_surjective(&wolfram_rule(204).unwrap()).unwrap().surjective);
        let zero = is_surjective(&wolfram_rule(0).unwrap()).unwrap();
        assert!(!zero.surjective);
        assert_eq!(zero.witness, Some(w("1")));
        let xor = is_surjective(&wolfram_rule(90).unwrap()).unwrap();
        assert!(xor.surjective && xor.witness.is_none());
        assert_eq!(xor.surjective, is_balanced_up_to(&wolfram_rule(90).unwrap(), 8).unwrap());
    }

    #[test]
    fn witnesses_are_minimal_orphans() {
        for n in 0..256 {
            let rule = wolfram_rule(n).unwrap();
            let report = is_surjective(&rule).unwrap();
            if let Some(orphan) = report.witness {
                assert_eq!(count_preimages(&rule, &orphan).unwrap(), 0, "rule {n}");
                for len in 1..orphan.len() {
                    for u in FiniteWord::all_of_length(len, 2) {
                        assert!(count_preimages(&rule, &u).unwrap() > 0, "rule {n}: shorter orphan {u}");
                    }
                }
            }
        }
    }

    #[test]
    fn brute_force_report_agrees() {
        for n in [0, 30, 90, 110, 204] {
            let rule = wolfram_rule(n).unwrap();
            let exact = is_surjective(&rule).unwrap();
            let brute = decide_by_balance(&rule, 8).unwrap();
            assert_eq!(brute.method, DecisionMethod::BruteForce);
            assert_eq!(exact.surjective, brute.surjective, "rule {n}");
            assert_eq!(exact.witness, brute.witness, "rule {n}");
        }
    }

    #[test]
    fn invariance_examples() {
        assert!(verify_uniform_invariance(&wolfram_rule(90).unwrap(), 6).unwrap());
        assert!(!verify_uniform_invariance(&wolfram_rule(0).unwrap(), 1).unwrap());
        // Radius-0 permutation of a 3-letter alphabet.
        let perm = LocalRule::new(Alphabet::new(3).unwrap(), 0, vec![2, 0, 1]).unwrap();
        assert!(verify_uniform_invariance(&perm, 6).unwrap());
        assert!(is_surjective(&perm).unwrap().surjective);
        let collapse = LocalRule::new(Alphabet::new(3).unwrap(), 0, vec![0, 0, 1]).unwrap();
        let report = is_surjective(&collapse).unwrap();
        assert_eq!(report.witness, Some(w("2")));
    }

    #[test]
    fn automaton_shape() {
        let a = PreimageAutomaton::new(&wolfram_rule(110).unwrap()).unwrap();
        assert_eq!(a.state_count(), 4);
        for s in 0..4 {
            let out_degree: usize = (0..2).map(|b| a.successors(s, b).len()).sum();
            assert_eq!(out_degree, 2);
        }
    }
}
