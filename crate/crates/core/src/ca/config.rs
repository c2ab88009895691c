use serde::{Deserialize, Serialize};

use super::{Alphabet, FiniteWord};
use crate::error::{CaError, Result};

/// A spatially periodic configuration: `x_{i+N} = x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodicConfig {
    alphabet: Alphabet,
    cells: Vec<u8>,
}

/// Exact dyadic distance `2^-n`, or zero when no disagreement was found within the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DyadicDistance {
    Zero,
    /// `2^-n` with the stored exponent `n`.
    Pow2Neg(u32),
}

impl DyadicDistance {
    pub fn value(self) -> f64 {
        match self {
            DyadicDistance::Zero => 0.0,
            DyadicDistance::Pow2Neg(n) => (-(n as f64)).exp2(),
        }
    }

    pub fn exponent(self) -> Option<u32> {
        match self {
            DyadicDistance::Zero => None,
            DyadicDistance::Pow2Neg(n) => Some(n),
        }
    }
}

impl PeriodicConfig {
    pub fn new(alphabet: Alphabet, cells: Vec<u8>) -> Result<Self> {
        if cells.is_empty() {
            return Err(CaError::InvalidParameter("period must be at least 1".into()));
        }
        alphabet.check_letters(&cells)?;
        Ok(PeriodicConfig { alphabet, cells })
    }

    pub(crate) fn from_raw(alphabet: Alphabet, cells: Vec<u8>) -> Self {
        debug_assert!(!cells.is_empty());
        PeriodicConfig { alphabet, cells }
    }

    pub fn constant(alphabet: Alphabet, letter: u8, period: usize) -> Result<Self> {
        PeriodicConfig::new(alphabet, vec![letter; period])
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn period(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    /// `x_i` with `i` taken mod `N`.
    #[inline]
    pub fn at(&self, i: i64) -> u8 {
        self.cells[i.rem_euclid(self.cells.len() as i64) as usize]
    }

    pub fn set(&mut self, i: i64, letter: u8) -> Result<()> {
        self.alphabet.check_letter(letter)?;
        let n = self.cells.len() as i64;
        self.cells[i.rem_euclid(n) as usize] = letter;
        Ok(())
    }

    /// `σ^s(x)`: cell `i` of the result is `x_{i+s}`.
    pub fn shift(&self, s: i64) -> PeriodicConfig {
        let n = self.cells.len() as i64;
        let cells = (0..n).map(|i| self.at(i + s)).collect();
        PeriodicConfig::from_raw(self.alphabet, cells)
    }

    /// The word `x_i .. x_{j-1}` (half-open, indices mod `N`).
    pub fn window(&self, i: i64, j: i64) -> Result<FiniteWord> {
        if i >= j {
            return Err(CaError::InvalidInterval { start: i, end: j });
        }
        Ok(FiniteWord::from_letters(self.segment(i, j)))
    }

    /// Raw letters of `[i, j)`; empty when `i >= j`.
    pub(crate) fn segment(&self, i: i64, j: i64) -> Vec<u8> {
        (i..j).map(|p| self.at(p)).collect()
    }

    /// `d(x, y) = 2^-n` with `n` the least `i >= 0` where `x_i != y_i` or
    /// `x_{-i} != y_{-i}`, searching `i <= cap`.
    pub fn distance(&self, other: &PeriodicConfig, cap: usize) -> Result<DyadicDistance> {
        self.alphabet.ensure_same(other.alphabet)?;
        if self.period() != other.period() {
            return Err(CaError::PeriodMismatch {
                left: self.period(),
                right: other.period(),
            });
        }
        if cap == 0 {
            return Err(CaError::InvalidParameter("distance cap must be >= 1".into()));
        }
        Ok((0..=cap as i64)
            .find(|&i| self.at(i) != other.at(i) || self.at(-i) != other.at(-i))
            .map_or(DyadicDistance::Zero, |n| DyadicDistance::Pow2Neg(n as u32)))
    }
}
