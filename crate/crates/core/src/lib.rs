//! Laboratory for one-dimensional cellular automata.
//!
//! * [`ca`]: alphabets, local rules, periodic configurations, Bernoulli measures.
//! * [`exact`]: exact surjectivity decision and preimage counting.
//! * [`kurka`]: horizon-bounded blocking-word certification and sensitivity probes.
//! * [`gilman`]: Monte Carlo estimates behind the A/B/C measure-theoretic classes.
//! * [`spectral`]: cycle spectra, Wiener-sum eigenvalue scans, correlation decay.

pub mod ca;
mod cone;
pub mod error;
pub mod exact;
pub mod gilman;
pub mod kurka;
pub mod par;
pub mod spectral;
pub mod stats;

pub use ca::{
    compose, load_rule, wolfram_rule, Alphabet, BernoulliMeasure, Cylinder, DyadicDistance, FiniteWord,
    LocalRule, PeriodicConfig, SeedStream,
};
pub use error::{CaError, Result};
