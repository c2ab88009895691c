use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{letter_char, parse_letter, Alphabet};
use crate::error::{CaError, Result};

/// A finite word over an alphabet, serialized as a base-36 letter string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FiniteWord(Vec<u8>);

impl FiniteWord {
    pub fn new(letters: Vec<u8>, alphabet: Alphabet) -> Result<Self> {
        alphabet.check_letters(&letters)?;
        Ok(FiniteWord(letters))
    }

    /// Builds a word without validating it against an alphabet.
    pub fn from_letters(letters: Vec<u8>) -> Self {
        FiniteWord(letters)
    }

    pub fn empty() -> Self {
        FiniteWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<u8> {
        self.0
    }

    pub fn concat(&self, other: &FiniteWord) -> FiniteWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        FiniteWord(v)
    }

    /// Decodes `index` as a word of length `len` in base `k`, most significant letter first.
    pub fn from_index(index: u128, len: usize, k: usize) -> FiniteWord {
        let mut letters = vec![0u8; len];
        let mut rest = index;
        for slot in letters.iter_mut().rev() {
            *slot = (rest % k as u128) as u8;
            rest /= k as u128;
        }
        FiniteWord(letters)
    }

    /// Enumerates all `k^len` words of length `len` in lexicographic order.
    pub fn all_of_length(len: usize, k: usize) -> impl Iterator<Item = FiniteWord> {
        let count = super::checked_pow(k, len).expect("word count overflow");
        (0..count).map(move |i| FiniteWord::from_index(i, len, k))
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|&l| write!(f, "{}", letter_char(l)))
    }
}

impl FromStr for FiniteWord {
    type Err = CaError;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| parse_letter(c).ok_or_else(|| CaError::RuleParse(format!("bad letter {c:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(FiniteWord)
    }
}

impl From<&[u8]> for FiniteWord {
    fn from(v: &[u8]) -> Self {
        FiniteWord(v.to_vec())
    }
}

impl Serialize for FiniteWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FiniteWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The cylinder `[u]_l`: configurations carrying `word` at positions `anchor..anchor+|u|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cylinder {
    pub word: FiniteWord,
    pub anchor: i64,
}

impl Cylinder {
    pub fn new(word: FiniteWord, anchor: i64) -> Self {
        Cylinder { word, anchor }
    }

    /// Half-open index range covered by the cylinder.
    pub fn span(&self) -> (i64, i64) {
        (self.anchor, self.anchor + self.word.len() as i64)
    }

    /// Membership test against a lookup `position -> letter`.
    pub fn contains_with(&self, cell: impl Fn(i64) -> u8) -> bool {
        self.word
            .letters()
            .iter()
            .enumerate()
            .all(|(j, &l)| cell(self.anchor + j as i64) == l)
    }
}
