//! Spectral probes of `(F, μ)`: exact cycle spectra of periodic orbits, Wiener-sum
//! eigenvalue scans, correlation decay and the rational/irrational verdict.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::f64::consts::TAU;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::ca::{Alphabet, BernoulliMeasure, Cylinder, LocalRule, PeriodicConfig, SeedStream};
use crate::cone;
use crate::error::{CaError, Result};
use crate::par;
use crate::stats::{wilson95, Interval};

/// Calibrated noise floor: `T · max_α E|S_T(α)|²` for i.i.d. fair-coin observables
/// centered to `±1/2`, averaged over 100 orbits on a 1024-point grid.
/// Measured at about 0.37; frozen with headroom.
pub const NOISE_FLOOR_C: f64 = 0.5;

/// Default atom threshold: ten times the calibrated noise floor.
pub fn default_threshold(horizon: usize) -> f64 {
    10.0 * NOISE_FLOOR_C / horizon as f64
}

pub const DEFAULT_MAX_DENOMINATOR: u64 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ObservableKind {
    /// `x_0`, scaled by `1/(k-1)`.
    LetterAtZero,
    /// Indicator of a cylinder.
    CylinderIndicator { cylinder: Cylinder },
    /// Constant function, for uncentered diagnostics.
    Constant { value: f64 },
}

/// A bounded observable `g`, optionally with its mean under a Bernoulli measure subtracted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub kind: ObservableKind,
    /// Subtracted mean (zero when uncentered).
    pub mean: f64,
    scale: f64,
}

impl Observable {
    /// `(x_0 - E[x_0]) / (k - 1)`: for binary alphabets `x_0 - 1/2` under the uniform measure.
    pub fn letter_at_zero(measure: &BernoulliMeasure) -> Self {
        let scale = 1.0 / (measure.alphabet().size() - 1) as f64;
        Observable {
            kind: ObservableKind::LetterAtZero,
            mean: measure.mean_letter() * scale,
            scale,
        }
    }

    /// `1_[u]_l - ν([u]_l)`.
    pub fn cylinder_indicator(cylinder: Cylinder, measure: &BernoulliMeasure) -> Self {
        let mean = measure.cylinder_measure(&cylinder);
        Observable {
            kind: ObservableKind::CylinderIndicator { cylinder },
            mean,
            scale: 1.0,
        }
    }

    pub fn constant(value: f64) -> Self {
        Observable {
            kind: ObservableKind::Constant { value },
            mean: 0.0,
            scale: 1.0,
        }
    }

    /// Same observable without mean subtraction.
    pub fn uncentered(mut self) -> Self {
        self.mean = 0.0;
        self
    }

    pub fn eval(&self, x: &PeriodicConfig) -> f64 {
        self.eval_cells(x.cells())
    }

    fn eval_cells(&self, cells: &[u8]) -> f64 {
        let at = |i: i64| cells[i.rem_euclid(cells.len() as i64) as usize];
        let raw = match &self.kind {
            ObservableKind::LetterAtZero => at(0) as f64 * self.scale,
            ObservableKind::CylinderIndicator { cylinder } => {
                if cylinder.contains_with(at) {
                    1.0
                } else {
                    0.0
                }
            }
            ObservableKind::Constant { value } => *value,
        };
        raw - self.mean
    }

    /// `sup |g|`.
    pub fn sup_abs(&self) -> f64 {
        match &self.kind {
            ObservableKind::LetterAtZero => self.mean.abs().max((1.0 - self.mean).abs()),
            ObservableKind::CylinderIndicator { .. } => self.mean.abs().max((1.0 - self.mean).abs()),
            ObservableKind::Constant { value } => value.abs(),
        }
    }
}

/// Preperiod `τ` and period `q` of the smallest repeat `F^(τ+q)(x) = F^τ(x)` with
/// `τ + q <= cap`, or `None`. Repeats are detected by hashing and confirmed exactly.
pub fn orbit_cycle(rule: &LocalRule, x: &PeriodicConfig, cap: usize) -> Result<Option<(usize, usize)>> {
    rule.alphabet().ensure_same(x.alphabet())?;
    if cap == 0 {
        return Err(CaError::InvalidParameter("cycle cap must be >= 1".into()));
    }
    let mut detector = CycleDetector::new(rule, x.cells());
    let mut cur = x.cells().to_vec();
    let mut next = Vec::with_capacity(cur.len());
    let mut scratch = Vec::new();
    for t in 0..=cap {
        if let Some(found) = detector.observe(t, &cur) {
            return Ok(Some(found));
        }
        if t < cap {
            rule.step_cells(&cur, &mut scratch, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
    }
    Ok(None)
}

struct CycleDetector<'a> {
    rule: &'a LocalRule,
    start: Vec<u8>,
    seen: HashMap<u64, Vec<usize>>,
}

impl<'a> CycleDetector<'a> {
    fn new(rule: &'a LocalRule, start: &[u8]) -> Self {
        CycleDetector {
            rule,
            start: start.to_vec(),
            seen: HashMap::new(),
        }
    }

    /// Records `F^t(x) = cells`; returns `(τ, q)` when it repeats an earlier iterate.
    fn observe(&mut self, t: usize, cells: &[u8]) -> Option<(usize, usize)> {
        let mut h = DefaultHasher::new();
        cells.hash(&mut h);
        let key = h.finish();
        if let Some(times) = self.seen.get(&key) {
            for &tau in times {
                if self.iterate_start(tau) == cells {
                    return Some((tau, t - tau));
                }
            }
        }
        self.seen.entry(key).or_default().push(t);
        None
    }

    fn iterate_start(&self, n: usize) -> Vec<u8> {
        let mut cur = self.start.clone();
        let mut next = Vec::with_capacity(cur.len());
        let mut scratch = Vec::new();
        for _ in 0..n {
            self.rule.step_cells(&cur, &mut scratch, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }
}

/// Eigenvalues of the cyclic permutation on a period-`q` orbit: `e^{2πi p/q}`,
/// stored as exact reduced fractions `p/q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleSpectrum {
    pub preperiod: usize,
    pub period: usize,
    #[serde(with = "ratio_strings")]
    pub frequencies: Vec<Ratio<u64>>,
}

pub fn cycle_spectrum(period: usize) -> Result<CycleSpectrum> {
    orbit_spectrum_from(0, period)
}

fn orbit_spectrum_from(preperiod: usize, period: usize) -> Result<CycleSpectrum> {
    if period == 0 {
        return Err(CaError::InvalidParameter("cycle period must be >= 1".into()));
    }
    let q = period as u64;
    Ok(CycleSpectrum {
        preperiod,
        period,
        frequencies: (0..q).map(|p| Ratio::new(p, q)).collect(),
    })
}

/// Cycle spectrum of the orbit of `x`, if it closes within `cap` steps.
pub fn orbit_spectrum(rule: &LocalRule, x: &PeriodicConfig, cap: usize) -> Result<Option<CycleSpectrum>> {
    orbit_cycle(rule, x, cap)?
        .map(|(tau, q)| orbit_spectrum_from(tau, q))
        .transpose()
}

mod ratio_strings {
    use num_rational::Ratio;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Ratio<u64>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| format!("{}/{}", r.numer(), r.denom())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Ratio<u64>>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| {
                let (p, q) = s.split_once('/').ok_or_else(|| serde::de::Error::custom("expected p/q"))?;
                let p = p.parse().map_err(serde::de::Error::custom)?;
                let q: u64 = q.parse().map_err(serde::de::Error::custom)?;
                if q == 0 {
                    return Err(serde::de::Error::custom("zero denominator"));
                }
                Ok(Ratio::new(p, q))
            })
            .collect()
    }
}

/// `e^{-2πi·frac}` with exact values at multiples of 1/4.
fn phase(frac: f64) -> Complex64 {
    if frac == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if frac == 0.25 {
        Complex64::new(0.0, -1.0)
    } else if frac == 0.5 {
        Complex64::new(-1.0, 0.0)
    } else if frac == 0.75 {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::from_polar(1.0, -TAU * frac)
    }
}

/// `(1/T) Σ_n e^{-2πinα} v_n` over the supplied values.
pub fn weighted_average(values: &[f64], alpha: f64) -> Complex64 {
    let sum: Complex64 = values
        .iter()
        .enumerate()
        .map(|(n, &v)| phase((n as f64 * alpha).rem_euclid(1.0)) * v)
        .sum();
    sum / values.len() as f64
}

/// Values `g(F^n x)` for `n < horizon`, and whether the orbit repeated within them.
fn orbit_values(rule: &LocalRule, x: &PeriodicConfig, g: &Observable, horizon: usize, detect: bool) -> (Vec<f64>, bool) {
    let mut detector = detect.then(|| CycleDetector::new(rule, x.cells()));
    let mut cycled = false;
    let mut cur = x.cells().to_vec();
    let mut next = Vec::with_capacity(cur.len());
    let mut scratch = Vec::new();
    let mut values = Vec::with_capacity(horizon);
    for t in 0..horizon {
        values.push(g.eval_cells(&cur));
        if let Some(d) = detector.as_mut() {
            if !cycled {
                cycled = d.observe(t, &cur).is_some();
            }
        }
        if t + 1 < horizon {
            rule.step_cells(&cur, &mut scratch, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
    }
    (values, cycled)
}

/// `S_T(α; x) = (1/T) Σ_{n<T} e^{-2πinα} g(F^n x)`.
pub fn wiener_sum(rule: &LocalRule, x: &PeriodicConfig, g: &Observable, alpha: f64, horizon: usize) -> Result<Complex64> {
    rule.alphabet().ensure_same(x.alphabet())?;
    if horizon == 0 {
        return Err(CaError::InvalidParameter("horizon must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(CaError::InvalidParameter(format!("frequency {alpha} outside [0, 1)")));
    }
    let (values, _) = orbit_values(rule, x, g, horizon, false);
    Ok(weighted_average(&values, alpha))
}

/// Frequencies `α ∈ [0, 1)`, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaGrid {
    values: Vec<f64>,
    /// `Some(M)` for the grid `j/M`, which uses exact phase indexing.
    uniform: Option<usize>,
}

impl AlphaGrid {
    pub fn uniform(points: usize) -> Result<Self> {
        if points == 0 {
            return Err(CaError::InvalidParameter("grid needs at least one point".into()));
        }
        Ok(AlphaGrid {
            values: (0..points).map(|j| j as f64 / points as f64).collect(),
            uniform: Some(points),
        })
    }

    pub fn explicit(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|a| !(0.0..1.0).contains(a)) {
            return Err(CaError::InvalidParameter("grid values must lie in [0, 1)".into()));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(AlphaGrid { values, uniform: None })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Spacing used as the matching tolerance for rationals.
    pub fn step(&self) -> f64 {
        match self.uniform {
            Some(m) => 1.0 / m as f64,
            None => self
                .values
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(1.0, f64::min),
        }
    }

    /// `|S_T(α)|²` at every grid point for one value sequence.
    fn masses(&self, values: &[f64]) -> Vec<f64> {
        let t = values.len() as f64;
        match self.uniform {
            Some(m) => {
                let table: Vec<Complex64> = (0..m).map(|i| phase(i as f64 / m as f64)).collect();
                (0..m)
                    .map(|j| {
                        let mut idx = 0usize;
                        let mut sum = Complex64::new(0.0, 0.0);
                        for &v in values {
                            sum += table[idx] * v;
                            idx += j;
                            if idx >= m {
                                idx -= m;
                            }
                        }
                        (sum / t).norm_sqr()
                    })
                    .collect()
            }
            None => self.values.iter().map(|&a| weighted_average(values, a).norm_sqr()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralScan {
    pub alpha_grid: Vec<f64>,
    pub grid_step: f64,
    pub horizon: usize,
    pub orbits: usize,
    pub period: usize,
    /// Estimated `E|S_T(α)|²` per grid point.
    pub atom_mass: Vec<f64>,
    /// Fraction of orbits that entered a cycle within `T` steps.
    pub guard: f64,
    /// `guard <= 0.05`.
    pub guard_ok: bool,
}

pub const MAX_CYCLED_FRACTION: f64 = 0.05;

/// Mean of `|S_T(α; x)|²` over `orbits` sampled points `x`, at every grid frequency.
#[allow(clippy::too_many_arguments)]
pub fn eigenvalue_scan(
    rule: &LocalRule,
    measure: &BernoulliMeasure,
    g: &Observable,
    grid: &AlphaGrid,
    horizon: usize,
    orbits: usize,
    period: usize,
    stream: &SeedStream,
) -> Result<SpectralScan> {
    rule.alphabet().ensure_same(measure.alphabet())?;
    if horizon == 0 || orbits == 0 || period == 0 {
        return Err(CaError::InvalidParameter("horizon, orbits and period must be >= 1".into()));
    }
    let per_orbit = par::map_range(orbits, |o| -> Result<(Vec<f64>, bool)> {
        let x = measure.sample_config(period, &stream.substream(o as u64))?;
        let (values, cycled) = orbit_values(rule, &x, g, horizon, true);
        Ok((grid.masses(&values), cycled))
    });
    let mut atom_mass = vec![0.0; grid.values().len()];
    let mut cycled = 0usize;
    for orbit in per_orbit {
        let (masses, c) = orbit?;
        cycled += c as usize;
        for (acc, m) in atom_mass.iter_mut().zip(masses) {
            *acc += m;
        }
    }
    atom_mass.iter_mut().for_each(|m| *m /= orbits as f64);
    let guard = cycled as f64 / orbits as f64;
    Ok(SpectralScan {
        alpha_grid: grid.values().to_vec(),
        grid_step: grid.step(),
        horizon,
        orbits,
        period,
        atom_mass,
        guard,
        guard_ok: guard <= MAX_CYCLED_FRACTION,
    })
}

/// The left shift `σ` over the measure's alphabet, as a radius-1 rule.
pub fn shift_rule(alphabet: Alphabet) -> LocalRule {
    let k = alphabet.size();
    let table = (0..k * k * k).map(|idx| (idx % k) as u8).collect();
    LocalRule::new(alphabet, 1, table).expect("shift table is valid")
}

/// [`eigenvalue_scan`] with `F = σ`.
pub fn shift_spectrum_check(
    measure: &BernoulliMeasure,
    g: &Observable,
    grid: &AlphaGrid,
    horizon: usize,
    orbits: usize,
    period: usize,
    stream: &SeedStream,
) -> Result<SpectralScan> {
    eigenvalue_scan(&shift_rule(measure.alphabet()), measure, g, grid, horizon, orbits, period, stream)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPoint {
    pub n: usize,
    /// `μ̂(U ∩ F^-n V) - μ(U)μ(V)`.
    pub estimate: f64,
    /// Standard error of the estimate.
    pub sigma: f64,
    pub ci: Interval,
}

/// Estimates `μ(U ∩ F^-n V) - μ(U)μ(V)` for `n = 0..=n_max` with common samples across `n`.
#[allow(clippy::too_many_arguments)]
pub fn correlation_decay(
    rule: &LocalRule,
    measure: &BernoulliMeasure,
    u: &Cylinder,
    v: &Cylinder,
    n_max: usize,
    samples: usize,
    period: usize,
    stream: &SeedStream,
) -> Result<Vec<CorrelationPoint>> {
    rule.alphabet().ensure_same(measure.alphabet())?;
    if samples == 0 {
        return Err(CaError::InvalidParameter("samples must be >= 1".into()));
    }
    let reach = (n_max * rule.radius()) as i64;
    let (u_lo, u_hi) = u.span();
    let (v_lo, v_hi) = v.span();
    let lo = u_lo.min(v_lo - reach);
    let hi = u_hi.max(v_hi + reach);
    let width = (hi - lo) as usize;
    if width > period {
        return Err(CaError::PeriodTooSmall {
            period,
            reason: format!("cylinders and dependence cone span {width} cells"),
        });
    }
    let mu_uv = measure.cylinder_measure(u) * measure.cylinder_measure(v);
    let v_reach_lo = v_lo - reach;
    let v_reach_hi = v_hi + reach;
    let hits = par::map_range(samples, |i| {
        let mut rng = stream.substream(i as u64).rng();
        let x = measure.sample_letters(width, &mut rng);
        let mut flags = vec![false; n_max + 1];
        if !u.contains_with(|p| x[(p - lo) as usize]) {
            return flags;
        }
        let cone = x[(v_reach_lo - lo) as usize..(v_reach_hi - lo) as usize].to_vec();
        cone::evolve(rule, v_reach_lo, cone, n_max, |n, lo_n, seg| {
            flags[n] = v.contains_with(|p| seg[(p - lo_n) as usize]);
            true
        });
        flags
    });
    Ok((0..=n_max)
        .map(|n| {
            let count = hits.iter().filter(|f| f[n]).count() as u64;
            let p = count as f64 / samples as f64;
            let ci = wilson95(count, samples as u64);
            CorrelationPoint {
                n,
                estimate: p - mu_uv,
                sigma: (p * (1.0 - p) / samples as f64).sqrt(),
                ci: Interval {
                    lo: ci.lo - mu_uv,
                    hi: ci.hi - mu_uv,
                },
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectedAtom {
    pub alpha: f64,
    pub mass: f64,
    /// Nearest admissible rational as `"p/q"`, when within one grid step.
    pub matched: Option<String>,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalityVerdict {
    pub pass: bool,
    pub threshold: f64,
    pub max_denominator: u64,
    pub grid_step: f64,
    /// The eigenvalue 1 (constant eigenfunctions) is always present.
    pub trivial_eigenvalue: bool,
    pub atoms: Vec<DetectedAtom>,
    pub offending: Vec<f64>,
}

/// Nearest `p/q` (reduced, `q <= max_den`) to `alpha` on the circle, with its distance.
pub fn nearest_rational(alpha: f64, max_den: u64) -> (Ratio<u64>, f64) {
    let mut best = (Ratio::new(0, 1), circle_distance(alpha, 0.0));
    for q in 1..=max_den {
        let p = (alpha * q as f64).round() as u64;
        let d = circle_distance(alpha, p as f64 / q as f64);
        if d < best.1 {
            best = (Ratio::new(p % q, q), d);
        }
    }
    best
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Flags grid points with mass above `threshold`; passes iff each lies within one
/// grid step of some `p/q` with `q <= max_den`.
pub fn rationality_verdict(scan: &SpectralScan, threshold: f64, max_den: u64) -> Result<RationalityVerdict> {
    if threshold <= 0.0 || max_den == 0 {
        return Err(CaError::InvalidParameter("threshold must be > 0 and Q >= 1".into()));
    }
    let atoms: Vec<DetectedAtom> = scan
        .alpha_grid
        .iter()
        .zip(&scan.atom_mass)
        .filter(|(_, &m)| m > threshold)
        .map(|(&alpha, &mass)| {
            let (r, distance) = nearest_rational(alpha, max_den);
            DetectedAtom {
                alpha,
                mass,
                matched: (distance <= scan.grid_step).then(|| format!("{}/{}", r.numer(), r.denom())),
                distance,
            }
        })
        .collect();
    let offending: Vec<f64> = atoms.iter().filter(|a| a.matched.is_none()).map(|a| a.alpha).collect();
    Ok(RationalityVerdict {
        pass: offending.is_empty(),
        threshold,
        max_denominator: max_den,
        grid_step: scan.grid_step,
        trivial_eigenvalue: true,
        atoms,
        offending,
    })
}

/// Largest atom mass at a grid point farther than one grid step from every `p/q`
/// with `q <= max_den`; zero when there is no such point.
pub fn max_off_rational_mass(scan: &SpectralScan, max_den: u64) -> f64 {
    scan.alpha_grid
        .iter()
        .zip(&scan.atom_mass)
        .filter(|(&a, _)| nearest_rational(a, max_den).1 > scan.grid_step)
        .map(|(_, &m)| m)
        .fold(0.0, f64::max)
}
