use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{checked_pow, Alphabet, PeriodicConfig};
use crate::error::{CaError, Result};

/// Largest lookup table a rule may carry (`k^(2r+1)` entries).
pub const MAX_TABLE_LEN: u128 = 1 << 24;

/// A radius-`r` block map `A^(2r+1) -> A`.
///
/// Neighborhoods are indexed lexicographically with the leftmost cell most
/// significant, so for elementary rules `table[4a + 2b + c] = f(a, b, c)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalRule {
    alphabet: Alphabet,
    radius: usize,
    table: Vec<u8>,
}

impl LocalRule {
    pub fn new(alphabet: Alphabet, radius: usize, table: Vec<u8>) -> Result<Self> {
        let expected = table_len(alphabet, radius)?;
        if table.len() != expected {
            return Err(CaError::TableSize {
                expected,
                got: table.len(),
            });
        }
        alphabet.check_letters(&table)?;
        Ok(LocalRule {
            alphabet,
            radius,
            table,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn k(&self) -> usize {
        self.alphabet.size()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn width(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    /// Output for the neighborhood with lexicographic index `idx`.
    #[inline]
    pub fn lookup(&self, idx: usize) -> u8 {
        self.table[idx]
    }

    /// Applies the block map to a window of exactly `2r+1` letters.
    pub fn apply(&self, window: &[u8]) -> u8 {
        debug_assert_eq!(window.len(), self.width());
        let k = self.k();
        let idx = window.iter().fold(0usize, |acc, &l| acc * k + l as usize);
        self.table[idx]
    }

    /// One step on a finite segment: writes `src.len() - 2r` letters into `dst`,
    /// where `dst[i]` is the image of the window `src[i..i+2r+1]`.
    pub fn step_segment(&self, src: &[u8], dst: &mut Vec<u8>) {
        dst.clear();
        let w = self.width();
        if src.len() < w {
            return;
        }
        let k = self.k();
        let high = k.pow((w - 1) as u32);
        let mut idx = src[..w].iter().fold(0usize, |acc, &l| acc * k + l as usize);
        dst.reserve(src.len() - w + 1);
        dst.push(self.table[idx]);
        for i in w..src.len() {
            idx = (idx - src[i - w] as usize * high) * k + src[i] as usize;
            dst.push(self.table[idx]);
        }
    }

    /// Applies `F` to a periodic configuration (indices taken mod `N`).
    pub fn step(&self, x: &PeriodicConfig) -> Result<PeriodicConfig> {
        self.alphabet.ensure_same(x.alphabet())?;
        let mut scratch = Vec::new();
        let mut out = Vec::with_capacity(x.period());
        self.step_cells(x.cells(), &mut scratch, &mut out);
        Ok(PeriodicConfig::from_raw(self.alphabet, out))
    }

    pub(crate) fn step_cells(&self, cells: &[u8], scratch: &mut Vec<u8>, out: &mut Vec<u8>) {
        let n = cells.len() as i64;
        let r = self.radius as i64;
        scratch.clear();
        scratch.extend((-r..n + r).map(|i| cells[i.rem_euclid(n) as usize]));
        self.step_segment(scratch, out);
    }

    /// `F^n(x)`.
    pub fn iterate(&self, x: &PeriodicConfig, n: usize) -> Result<PeriodicConfig> {
        self.alphabet.ensure_same(x.alphabet())?;
        let mut cur = x.cells().to_vec();
        let mut next = Vec::with_capacity(cur.len());
        let mut scratch = Vec::new();
        for _ in 0..n {
            self.step_cells(&cur, &mut scratch, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(PeriodicConfig::from_raw(self.alphabet, cur))
    }

    /// Relative offsets in `[-r, r]` the block map actually depends on.
    pub fn essential_offsets(&self) -> Vec<i64> {
        let k = self.k();
        let w = self.width();
        (0..w)
            .filter(|&pos| {
                let weight = k.pow((w - 1 - pos) as u32);
                (0..self.table.len()).any(|idx| {
                    let digit = (idx / weight) % k;
                    (0..k).any(|d| {
                        let other = idx - digit * weight + d * weight;
                        self.table[other] != self.table[idx]
                    })
                })
            })
            .map(|pos| pos as i64 - self.radius as i64)
            .collect()
    }

    /// Parses the text rule format: `"k r"` then `k^(2r+1)` output letters.
    pub fn parse_table_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let mut next_num = |what: &str| -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| CaError::RuleParse(format!("missing {what}")))?
                .parse::<usize>()
                .map_err(|e| CaError::RuleParse(format!("{what}: {e}")))
        };
        let k = next_num("alphabet size")?;
        let r = next_num("radius")?;
        let alphabet = Alphabet::new(k)?;
        let len = table_len(alphabet, r)?;
        let table = (0..len)
            .map(|i| {
                let v = next_num("table entry")?;
                u8::try_from(v).map_err(|_| CaError::RuleParse(format!("entry {i} = {v}")))
            })
            .collect::<Result<Vec<u8>>>()?;
        if tokens.next().is_some() {
            return Err(CaError::RuleParse("trailing data after table".into()));
        }
        LocalRule::new(alphabet, r, table)
    }

    /// Renders the rule in the text format accepted by [`LocalRule::parse_table_text`].
    pub fn to_table_text(&self) -> String {
        let entries: Vec<String> = self.table.iter().map(|l| l.to_string()).collect();
        format!("{} {}\n{}\n", self.k(), self.radius, entries.join(" "))
    }

    /// Wolfram number when the rule is elementary (`k = 2, r = 1`).
    pub fn wolfram_number(&self) -> Option<u8> {
        if self.k() != 2 || self.radius != 1 {
            return None;
        }
        Some(
            self.table
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | (b << i)),
        )
    }
}

impl fmt::Display for LocalRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.wolfram_number() {
            Some(n) => write!(f, "eca:{n}"),
            None => write!(f, "k{}r{}", self.k(), self.radius),
        }
    }
}

fn table_len(alphabet: Alphabet, radius: usize) -> Result<usize> {
    let needed = checked_pow(alphabet.size(), 2 * radius + 1).unwrap_or(u128::MAX);
    if needed > MAX_TABLE_LEN {
        return Err(CaError::GuardExceeded {
            what: "rule table entries",
            needed,
            limit: MAX_TABLE_LEN,
        });
    }
    Ok(needed as usize)
}

/// Elementary rule `n`: `f(a, b, c)` is bit `4a + 2b + c` of `n`.
pub fn wolfram_rule(n: u32) -> Result<LocalRule> {
    if n > 255 {
        return Err(CaError::WolframOutOfRange(n));
    }
    let table = (0..8).map(|i| ((n >> i) & 1) as u8).collect();
    LocalRule::new(Alphabet::BINARY, 1, table)
}

/// Exact rule for `G ∘ F` (apply `f` first, then `g`), radius `r_f + r_g`.
pub fn compose(f: &LocalRule, g: &LocalRule) -> Result<LocalRule> {
    f.alphabet.ensure_same(g.alphabet)?;
    let alphabet = f.alphabet;
    let k = alphabet.size();
    let radius = f.radius + g.radius;
    let width = 2 * radius + 1;
    let len = table_len(alphabet, radius)?;
    let mut window = vec![0u8; width];
    let mut mid = Vec::with_capacity(g.width());
    let table = (0..len)
        .map(|idx| {
            let mut rest = idx;
            for slot in window.iter_mut().rev() {
                *slot = (rest % k) as u8;
                rest /= k;
            }
            f.step_segment(&window, &mut mid);
            g.apply(&mid)
        })
        .collect();
    LocalRule::new(alphabet, radius, table)
}

/// Resolves a rule reference: `eca:<n>` or a path to a rule file.
pub fn load_rule(spec: &str) -> Result<LocalRule> {
    if let Some(num) = spec.strip_prefix("eca:") {
        let n = num
            .trim()
            .parse::<u32>()
            .map_err(|e| CaError::RuleParse(format!("{spec}: {e}")))?;
        return wolfram_rule(n);
    }
    let text = std::fs::read_to_string(Path::new(spec))
        .map_err(|e| CaError::RuleParse(format!("{spec}: {e}")))?;
    LocalRule::parse_table_text(&text)
}
