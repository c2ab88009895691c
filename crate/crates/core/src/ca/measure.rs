use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Alphabet, Cylinder, PeriodicConfig};
use crate::error::{CaError, Result};

/// Bernoulli product measure on `A^Z` given by per-letter probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliMeasure {
    alphabet: Alphabet,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
    uniform: bool,
}

impl BernoulliMeasure {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let alphabet = Alphabet::new(probs.len())?;
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(CaError::InvalidMeasure(format!("negative or non-finite probability in {probs:?}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(CaError::InvalidMeasure(format!("probabilities sum to {total}")));
        }
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let uniform = probs.iter().all(|&p| p == probs[0]);
        Ok(BernoulliMeasure {
            alphabet,
            probs,
            cumulative,
            uniform,
        })
    }

    /// The uniform measure: every letter has probability `1/k`.
    pub fn uniform(alphabet: Alphabet) -> Self {
        let k = alphabet.size();
        BernoulliMeasure::new(vec![1.0 / k as f64; k]).expect("uniform probabilities are valid")
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// Expected letter value `Σ a·p_a`.
    pub fn mean_letter(&self) -> f64 {
        self.probs.iter().enumerate().map(|(a, p)| a as f64 * p).sum()
    }

    /// `ν([u]_l)`; the anchor does not matter for a product measure.
    pub fn cylinder_measure(&self, c: &Cylinder) -> f64 {
        c.word.letters().iter().map(|&l| self.probs[l as usize]).product()
    }

    #[inline]
    pub fn sample_letter<R: Rng + ?Sized>(&self, rng: &mut R) -> u8 {
        if self.uniform {
            return rng.random_range(0..self.alphabet.size() as u8);
        }
        let u: f64 = rng.random();
        // The last letter absorbs rounding in the cumulative sum.
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.probs.len() - 1) as u8
    }

    pub fn sample_letters<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<u8> {
        (0..len).map(|_| self.sample_letter(rng)).collect()
    }

    /// Draws a period-`N` configuration with i.i.d. cells.
    pub fn sample_config(&self, period: usize, stream: &SeedStream) -> Result<PeriodicConfig> {
        if period == 0 {
            return Err(CaError::InvalidParameter("period must be at least 1".into()));
        }
        let mut rng = stream.rng();
        Ok(PeriodicConfig::from_raw(
            self.alphabet,
            self.sample_letters(period, &mut rng),
        ))
    }

    /// Keeps `x` on `[i1, i2)` (mod `N`) and redraws every other cell.
    pub fn resample_outside(
        &self,
        x: &PeriodicConfig,
        i1: i64,
        i2: i64,
        stream: &SeedStream,
    ) -> Result<PeriodicConfig> {
        self.alphabet.ensure_same(x.alphabet())?;
        if i1 >= i2 {
            return Err(CaError::InvalidInterval { start: i1, end: i2 });
        }
        let len = (i2 - i1) as usize;
        if len > x.period() {
            return Err(CaError::IntervalTooLong {
                len,
                period: x.period(),
            });
        }
        let mut y = self.sample_config(x.period(), stream)?;
        for i in i1..i2 {
            y.set(i, x.at(i))?;
        }
        Ok(y)
    }
}

/// A reproducible random stream identified by `(master seed, stream id)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedStream {
    pub seed: u64,
    pub stream: u64,
}

impl SeedStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        SeedStream { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Child stream for task `index`. Children of distinct parents or indices are distinct.
    pub fn substream(&self, index: u64) -> SeedStream {
        SeedStream {
            seed: splitmix64(self.seed ^ splitmix64(self.stream.wrapping_add(0x5851_f42d_4c95_7f2d))),
            stream: index,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
