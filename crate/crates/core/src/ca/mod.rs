//! Alphabets, local rules, periodic configurations and product measures.

mod config;
mod measure;
mod rule;
mod word;

pub use config::{DyadicDistance, PeriodicConfig};
pub use measure::{BernoulliMeasure, SeedStream};
pub use rule::{compose, load_rule, wolfram_rule, LocalRule, MAX_TABLE_LEN};
pub use word::{Cylinder, FiniteWord};

use serde::{Deserialize, Serialize};

use crate::error::{CaError, Result};

/// Finite alphabet `{0, .., k-1}`.
///
/// Letters are rendered as base-36 digits, which caps `k` at 36.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Alphabet(u8);

impl Alphabet {
    pub const BINARY: Alphabet = Alphabet(2);

    pub fn new(k: usize) -> Result<Self> {
        if (2..=36).contains(&k) {
            Ok(Alphabet(k as u8))
        } else {
            Err(CaError::InvalidAlphabet(k))
        }
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0 as usize
    }

    pub fn check_letter(self, letter: u8) -> Result<()> {
        if (letter as usize) < self.size() {
            Ok(())
        } else {
            Err(CaError::LetterOutOfRange {
                letter,
                k: self.size(),
            })
        }
    }

    pub fn check_letters(self, letters: &[u8]) -> Result<()> {
        letters.iter().try_for_each(|&l| self.check_letter(l))
    }

    pub(crate) fn ensure_same(self, other: Alphabet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(CaError::AlphabetMismatch {
                left: self.size(),
                right: other.size(),
            })
        }
    }
}

impl TryFrom<usize> for Alphabet {
    type Error = CaError;

    fn try_from(k: usize) -> Result<Self> {
        Alphabet::new(k)
    }
}

impl From<Alphabet> for usize {
    fn from(a: Alphabet) -> usize {
        a.size()
    }
}

/// `k^e`, or `None` on overflow.
pub(crate) fn checked_pow(k: usize, e: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(k as u128)?;
    }
    Some(acc)
}

pub(crate) fn letter_char(letter: u8) -> char {
    char::from_digit(letter as u32, 36).unwrap_or('?')
}

pub(crate) fn parse_letter(c: char) -> Option<u8> {
    c.to_digit(36).map(|d| d as u8)
}
