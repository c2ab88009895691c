//! Monte Carlo estimates of trace-class masses, μ-equicontinuity ratios and
//! propagation probabilities, and the A/B/C verdict built on them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ca::{Alphabet, BernoulliMeasure, LocalRule, PeriodicConfig, SeedStream};
use crate::cone;
use crate::error::{CaError, Result};
use crate::exact;
use crate::kurka::{self, KurkaParams, KurkaVerdict};
use crate::par;
use crate::stats::{wilson95, Interval};

/// `F^j(x)` and `F^j(y)` agree on `[-m, m)` for every `0 <= j <= T`.
pub fn trace_equivalent(rule: &LocalRule, x: &PeriodicConfig, y: &PeriodicConfig, m: usize, horizon: usize) -> Result<bool> {
    rule.alphabet().ensure_same(x.alphabet())?;
    x.alphabet().ensure_same(y.alphabet())?;
    if x.period() != y.period() {
        return Err(CaError::PeriodMismatch {
            left: x.period(),
            right: y.period(),
        });
    }
    let m = m as i64;
    Ok(cone::window_trace(rule, x, -m, m, horizon) == cone::window_trace(rule, y, -m, m, horizon))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub m: usize,
    pub n: usize,
    pub horizon: usize,
    pub samples: u64,
    pub hits: u64,
    pub ratio_hat: f64,
    pub ci: Interval,
}

/// Estimates `μ([x(-n,n)] ∩ B_[-m,m](x)) / μ([x(-n,n)])` truncated at horizon `T`,
/// by redrawing `x` outside `[-n, n)` and testing trace equivalence.
#[allow(clippy::too_many_arguments)]
pub fn estimate_class_ratio(
    rule: &LocalRule,
    x: &PeriodicConfig,
    m: usize,
    n: usize,
    horizon: usize,
    samples: usize,
    stream: &SeedStream,
) -> Result<RatioEstimate> {
    rule.alphabet().ensure_same(x.alphabet())?;
    if m == 0 || n < m || horizon == 0 || samples == 0 {
        return Err(CaError::InvalidParameter(format!(
            "need n >= m >= 1, T >= 1, samples >= 1 (m={m}, n={n}, T={horizon}, samples={samples})"
        )));
    }
    let measure = BernoulliMeasure::uniform(rule.alphabet());
    let (mi, ni) = (m as i64, n as i64);
    let reference = cone::window_trace(rule, x, -mi, mi, horizon);
    let hits = par::map_range(samples, |i| -> Result<bool> {
        let y = measure.resample_outside(x, -ni, ni, &stream.substream(i as u64))?;
        Ok(cone::window_trace(rule, &y, -mi, mi, horizon) == reference)
    })
    .into_iter()
    .try_fold(0u64, |acc, h| h.map(|h| acc + h as u64))?;
    Ok(RatioEstimate {
        m,
        n,
        horizon,
        samples: samples as u64,
        hits,
        ratio_hat: hits as f64 / samples as f64,
        ci: wilson95(hits, samples as u64),
    })
}

/// Ratio estimates at each `n` of an increasing grid, for a shared point `x`.
#[allow(clippy::too_many_arguments)]
pub fn mu_equicontinuity_curve(
    rule: &LocalRule,
    x: &PeriodicConfig,
    m: usize,
    n_list: &[usize],
    horizon: usize,
    samples: usize,
    stream: &SeedStream,
) -> Result<Vec<RatioEstimate>> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CaError::InvalidParameter("n grid must be strictly increasing".into()));
    }
    n_list
        .iter()
        .map(|&n| estimate_class_ratio(rule, x, m, n, horizon, samples, &stream.substream(n as u64)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Left,
    Right,
    Both,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
            Direction::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationEstimate {
    pub interval: (i64, i64),
    pub t: usize,
    pub horizon: usize,
    pub samples: u64,
    pub hits: u64,
    pub p_hat: f64,
    pub ci: Interval,
    pub direction: Direction,
}

/// Farthest distance from `I` at which a sampled change was ever visible, per side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reach {
    pub left: usize,
    pub right: usize,
}

impl Reach {
    /// Whether this sample's change affected a site at distance `> t` on the given side(s).
    /// `Both` means either side.
    pub fn affects(&self, t: usize, direction: Direction) -> bool {
        match direction {
            Direction::Left => self.left > t,
            Direction::Right => self.right > t,
            Direction::Both => self.left.max(self.right) > t,
        }
    }
}

fn check_propagation(rule: &LocalRule, i1: i64, i2: i64, t: usize, horizon: usize, period: usize) -> Result<()> {
    if i1 >= i2 {
        return Err(CaError::InvalidInterval { start: i1, end: i2 });
    }
    if horizon == 0 {
        return Err(CaError::InvalidParameter("horizon must be >= 1".into()));
    }
    let reach = horizon * rule.radius();
    if 2 * (t + reach) >= period {
        return Err(CaError::PeriodTooSmall {
            period,
            reason: format!("need t + T·r < N/2 (t={t}, T·r={reach})"),
        });
    }
    let span = (i2 - i1) as usize + 4 * reach;
    if span > period {
        return Err(CaError::PeriodTooSmall {
            period,
            reason: format!("light cone of width {span} wraps around the ring"),
        });
    }
    Ok(())
}

/// Per-sample reach of a random change on `[i1, i2)` over `T` steps.
///
/// Sample `i` depends only on `(stream, i)`, so every `t` sees the same draws.
/// `x` is uniform; the cells outside the light cone never influence the outcome
/// and are not drawn.
#[allow(clippy::too_many_arguments)]
pub fn propagation_reaches(
    rule: &LocalRule,
    i1: i64,
    i2: i64,
    max_t: usize,
    horizon: usize,
    samples: usize,
    period: usize,
    stream: &SeedStream,
) -> Result<Vec<Reach>> {
    check_propagation(rule, i1, i2, max_t, horizon, period)?;
    if samples == 0 {
        return Err(CaError::InvalidParameter("samples must be >= 1".into()));
    }
    let k = rule.k() as u8;
    let r = rule.radius() as i64;
    let outer = 2 * horizon as i64 * r;
    let lo = i1 - outer;
    let width = (i2 - i1 + 2 * outer) as usize;
    let (a, b) = ((i1 - lo) as usize, (i2 - lo) as usize);
    Ok(par::map_range(samples, |i| {
        let mut rng = stream.substream(i as u64).rng();
        let x: Vec<u8> = (0..width).map(|_| rng.random_range(0..k)).collect();
        let mut x2 = x.clone();
        while x2[a..b] == x[a..b] {
            for c in &mut x2[a..b] {
                *c = rng.random_range(0..k);
            }
        }
        let mut first = Vec::with_capacity(horizon + 1);
        cone::evolve(rule, lo, x, horizon, |_, _, seg| {
            first.push(seg.to_vec());
            true
        });
        let mut reach = Reach { left: 0, right: 0 };
        cone::evolve(rule, lo, x2, horizon, |j, lo_j, seg| {
            for (c, (u, v)) in first[j].iter().zip(seg).enumerate() {
                if u != v {
                    let pos = lo_j + c as i64;
                    if pos < i1 {
                        reach.left = reach.left.max((i1 - pos) as usize);
                    } else if pos >= i2 {
                        reach.right = reach.right.max((pos - i2 + 1) as usize);
                    }
                }
            }
            true
        });
        reach
    }))
}

fn estimate_from_reaches(reaches: &[Reach], i1: i64, i2: i64, t: usize, horizon: usize, direction: Direction) -> PropagationEstimate {
    let hits = reaches.iter().filter(|r| r.affects(t, direction)).count() as u64;
    let samples = reaches.len() as u64;
    PropagationEstimate {
        interval: (i1, i2),
        t,
        horizon,
        samples,
        hits,
        p_hat: hits as f64 / samples as f64,
        ci: wilson95(hits, samples),
        direction,
    }
}

/// Probability that a random change on `[i1, i2)` affects, at some step `<= T`,
/// a site at distance `> t` from the interval on the chosen side(s).
#[allow(clippy::too_many_arguments)]
pub fn estimate_p_t(
    rule: &LocalRule,
    i1: i64,
    i2: i64,
    t: usize,
    horizon: usize,
    direction: Direction,
    samples: usize,
    period: usize,
    stream: &SeedStream,
) -> Result<PropagationEstimate> {
    let reaches = propagation_reaches(rule, i1, i2, t, horizon, samples, period, stream)?;
    Ok(estimate_from_reaches(&reaches, i1, i2, t, horizon, direction))
}

/// `p_t` over an increasing `t` grid with common random numbers across `t`.
#[allow(clippy::too_many_arguments)]
pub fn propagation_profile(
    rule: &LocalRule,
    i1: i64,
    i2: i64,
    t_list: &[usize],
    horizon: usize,
    direction: Direction,
    samples: usize,
    period: usize,
    stream: &SeedStream,
) -> Result<Vec<PropagationEstimate>> {
    check_t_grid(t_list)?;
    let max_t = t_list.last().copied().unwrap_or(0);
    let reaches = propagation_reaches(rule, i1, i2, max_t, horizon, samples, period, stream)?;
    Ok(profile_from_reaches(&reaches, i1, i2, t_list, horizon, direction))
}

fn check_t_grid(t_list: &[usize]) -> Result<()> {
    if t_list.is_empty() || t_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CaError::InvalidParameter("t grid must be non-empty and strictly increasing".into()));
    }
    Ok(())
}

fn profile_from_reaches(
    reaches: &[Reach],
    i1: i64,
    i2: i64,
    t_list: &[usize],
    horizon: usize,
    direction: Direction,
) -> Vec<PropagationEstimate> {
    t_list
        .iter()
        .map(|&t| estimate_from_reaches(reaches, i1, i2, t, horizon, direction))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GilmanClass {
    A,
    B,
    C,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GilmanParams {
    pub kurka: KurkaParams,
    pub period: usize,
    /// Number of sampled points `x` for ratio curves.
    pub points: usize,
    pub m: usize,
    pub n_grid: Vec<usize>,
    pub ratio_horizon: usize,
    pub ratio_samples: usize,
    /// Final ratio a non-decreasing curve must reach to count as trending to 1.
    pub ratio_threshold: f64,
    pub interval: (i64, i64),
    pub t_grid: Vec<usize>,
    pub propagation_horizon: usize,
    pub propagation_samples: usize,
    pub propagation_threshold: f64,
}

impl Default for GilmanParams {
    fn default() -> Self {
        GilmanParams {
            kurka: KurkaParams::default(),
            period: 1 << 12,
            points: 4,
            m: 1,
            n_grid: vec![2, 4, 8, 16],
            ratio_horizon: 32,
            ratio_samples: 2000,
            ratio_threshold: 0.9,
            interval: (0, 1),
            t_grid: (0..=16).collect(),
            propagation_horizon: 64,
            propagation_samples: 10_000,
            propagation_threshold: 0.99,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GilmanVerdict {
    pub class: GilmanClass,
    /// Side(s) on which changes propagate, for class C.
    pub direction: Option<Direction>,
    /// Exact surjectivity (uniform measure invariant), when decidable within guards.
    pub surjective: Option<bool>,
    pub kurka: KurkaVerdict,
    pub ratio_curves: Vec<Vec<RatioEstimate>>,
    pub left_profile: Vec<PropagationEstimate>,
    pub right_profile: Vec<PropagationEstimate>,
    pub params: GilmanParams,
}

/// The A/B/C decision from already-collected evidence.
///
/// A: blocking word. B: some ratio curve is non-decreasing and ends at or above
/// `ratio_threshold`. C: every `p_hat` on one side is at or above
/// `propagation_threshold`.
pub fn decide_class(
    has_blocking_word: bool,
    curves: &[Vec<RatioEstimate>],
    left: &[PropagationEstimate],
    right: &[PropagationEstimate],
    ratio_threshold: f64,
    propagation_threshold: f64,
) -> (GilmanClass, Option<Direction>) {
    if has_blocking_word {
        return (GilmanClass::A, None);
    }
    let trends_to_one = |curve: &Vec<RatioEstimate>| {
        curve.last().is_some_and(|last| {
            last.ratio_hat >= ratio_threshold && curve.windows(2).all(|w| w[1].ratio_hat >= w[0].ratio_hat)
        })
    };
    if curves.iter().any(trends_to_one) {
        return (GilmanClass::B, None);
    }
    let saturated = |p: &[PropagationEstimate]| !p.is_empty() && p.iter().all(|e| e.p_hat >= propagation_threshold);
    match (saturated(left), saturated(right)) {
        (true, true) => (GilmanClass::C, Some(Direction::Both)),
        (true, false) => (GilmanClass::C, Some(Direction::Left)),
        (false, true) => (GilmanClass::C, Some(Direction::Right)),
        (false, false) => (GilmanClass::Inconclusive, None),
    }
}

/// Runs the Kůrka search, then ratio curves, then directional propagation profiles.
pub fn classify_gilman(rule: &LocalRule, params: &GilmanParams, stream: &SeedStream) -> Result<GilmanVerdict> {
    if params.points == 0 || params.n_grid.is_empty() {
        return Err(CaError::InvalidParameter("need at least one point and one n".into()));
    }
    check_t_grid(&params.t_grid)?;
    let surjective = match exact::is_surjective(rule) {
        Ok(report) => Some(report.surjective),
        Err(CaError::GuardExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let kurka = kurka::classify_kurka(rule, &params.kurka)?;
    let mut verdict = GilmanVerdict {
        class: GilmanClass::A,
        direction: None,
        surjective,
        kurka,
        ratio_curves: Vec::new(),
        left_profile: Vec::new(),
        right_profile: Vec::new(),
        params: params.clone(),
    };
    if verdict.kurka.has_blocking_word() {
        return Ok(verdict);
    }

    let measure = BernoulliMeasure::uniform(rule.alphabet());
    let points = stream.substream(0);
    let curves = stream.substream(1);
    verdict.ratio_curves = (0..params.points)
        .map(|i| {
            let x = measure.sample_config(params.period, &points.substream(i as u64))?;
            mu_equicontinuity_curve(
                rule,
                &x,
                params.m,
                &params.n_grid,
                params.ratio_horizon,
                params.ratio_samples,
                &curves.substream(i as u64),
            )
        })
        .collect::<Result<_>>()?;

    let (i1, i2) = params.interval;
    let max_t = *params.t_grid.last().unwrap();
    let reaches = propagation_reaches(
        rule,
        i1,
        i2,
        max_t,
        params.propagation_horizon,
        params.propagation_samples,
        params.period,
        &stream.substream(2),
    )?;
    let h = params.propagation_horizon;
    verdict.left_profile = profile_from_reaches(&reaches, i1, i2, &params.t_grid, h, Direction::Left);
    verdict.right_profile = profile_from_reaches(&reaches, i1, i2, &params.t_grid, h, Direction::Right);
    let (class, direction) = decide_class(
        false,
        &verdict.ratio_curves,
        &verdict.left_profile,
        &verdict.right_profile,
        params.ratio_threshold,
        params.propagation_threshold,
    );
    verdict.class = class;
    verdict.direction = direction;
    Ok(verdict)
}

/// Closed-form horizon-`T` ratio for the left shift: `k^-max(0, T + m - n)`.
pub fn shift_ratio_closed_form(alphabet: Alphabet, m: usize, n: usize, horizon: usize) -> f64 {
    let missing = (horizon + m).saturating_sub(n);
    (alphabet.size() as f64).powi(-(missing as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ca::wolfram_rule;

    fn uniform() -> BernoulliMeasure {
        BernoulliMeasure::uniform(Alphabet::BINARY)
    }

    fn point(seed: u64, period: usize) -> PeriodicConfig {
        uniform().sample_config(period, &SeedStream::new(seed, 0)).unwrap()
    }

    #[test]
    fn trace_equivalence_examples() {
        let x = point(1, 64);
        let r30 = wolfram_rule(30).unwrap();
        assert!(trace_equivalent(&r30, &x, &x, 3, 10).unwrap());
        let id = wolfram_rule(204).unwrap();
        let y = uniform().resample_outside(&x, -3, 3, &SeedStream::new(1, 1)).unwrap();
        assert!(trace_equivalent(&id, &x, &y, 3, 10).unwrap());
        let shift = wolfram_rule(170).unwrap();
        let m = 3;
        let mut z = x.clone();
        z.set(m + 1, 1 - x.at(m + 1)).unwrap();
        assert!(!trace_equivalent(&shift, &x, &z, m as usize, 2).unwrap());
        assert!(trace_equivalent(&shift, &x, &z, m as usize, 1).unwrap());
        assert!(trace_equivalent(&shift, &x, &point(2, 32), 1, 1).is_err());
    }

    #[test]
    fn trace_equivalence_is_an_equivalence() {
        let rule = wolfram_rule(110).unwrap();
        let base = point(9, 40);
        for i in 0..200u64 {
            let pick = |j: u64| uniform().resample_outside(&base, -4, 4, &SeedStream::new(i, j)).unwrap();
            let (a, b, c) = (pick(0), pick(1), pick(2));
            let eq = |u: &PeriodicConfig, v: &PeriodicConfig| trace_equivalent(&rule, u, v, 2, 3).unwrap();
            assert!(eq(&a, &a));
            assert_eq!(eq(&a, &b), eq(&b, &a));
            if eq(&a, &b) && eq(&b, &c) {
                assert!(eq(&a, &c));
            }
        }
    }

    #[test]
    fn ratio_examples() {
        let x = point(4, 256);
        let s = SeedStream::new(4, 1);
        let id = estimate_class_ratio(&wolfram_rule(204).unwrap(), &x, 1, 4, 16, 500, &s).unwrap();
        assert_eq!(id.ratio_hat, 1.0);
        let not = estimate_class_ratio(&wolfram_rule(51).unwrap(), &x, 2, 2, 16, 500, &s).unwrap();
        assert_eq!(not.ratio_hat, 1.0);
        let shift = estimate_class_ratio(&wolfram_rule(170).unwrap(), &x, 1, 4, 16, 10_000, &s).unwrap();
        assert!(shift.ratio_hat <= 0.01);
        assert!(shift.ci.contains(2f64.powi(-13)), "{shift:?}");
        assert!(estimate_class_ratio(&wolfram_rule(170).unwrap(), &x, 2, 1, 16, 10, &s).is_err());
    }

    #[test]
    fn curve_examples() {
        let x = point(5, 1024);
        let s = SeedStream::new(5, 1);
        let id = mu_equicontinuity_curve(&wolfram_rule(204).unwrap(), &x, 1, &[1, 2, 4, 8], 16, 200, &s).unwrap();
        assert!(id.iter().all(|e| e.ratio_hat == 1.0));
        let shift = mu_equicontinuity_curve(&wolfram_rule(170).unwrap(), &x, 1, &[8, 12, 14, 16, 17], 16, 4000, &s).unwrap();
        for e in &shift {
            assert!(e.ci.contains(shift_ratio_closed_form(Alphabet::BINARY, 1, e.n, 16)), "{e:?}");
        }
        assert_eq!(shift.last().unwrap().ratio_hat, 1.0);
        let xor = mu_equicontinuity_curve(&wolfram_rule(90).unwrap(), &x, 1, &[2, 4, 8, 16], 32, 10_000, &s).unwrap();
        assert!(xor.iter().all(|e| e.ratio_hat < 0.05), "{xor:?}");
        assert!(mu_equicontinuity_curve(&wolfram_rule(90).unwrap(), &x, 1, &[4, 2], 32, 10, &s).is_err());
    }

    #[test]
    fn propagation_examples() {
        let s = SeedStream::new(6, 0);
        let n = 1 << 12;
        let id = propagation_profile(&wolfram_rule(204).unwrap(), 0, 2, &[1, 2, 5], 64, Direction::Both, 500, n, &s).unwrap();
        assert!(id.iter().all(|e| e.p_hat == 0.0));
        let shift = wolfram_rule(170).unwrap();
        for t in [0, 5, 15] {
            let left = estimate_p_t(&shift, 0, 1, t, 16, Direction::Left, 500, n, &s).unwrap();
            assert_eq!(left.p_hat, 1.0, "t={t}");
        }
        let right = estimate_p_t(&shift, 0, 1, 1, 16, Direction::Right, 500, n, &s).unwrap();
        assert_eq!(right.p_hat, 0.0);
        let xor = estimate_p_t(&wolfram_rule(90).unwrap(), 0, 1, 8, 64, Direction::Both, 10_000, n, &s).unwrap();
        assert!(xor.p_hat >= 0.99);
    }

    #[test]
    fn propagation_rejects_small_period() {
        let s = SeedStream::new(6, 0);
        assert!(matches!(
            estimate_p_t(&wolfram_rule(90).unwrap(), 0, 1, 8, 64, Direction::Left, 10, 128, &s),
            Err(CaError::PeriodTooSmall { .. })
        ));
        assert!(estimate_p_t(&wolfram_rule(90).unwrap(), 1, 1, 8, 4, Direction::Left, 10, 128, &s).is_err());
    }

    #[test]
    fn per_sample_indicators_are_monotone() {
        let reaches = propagation_reaches(&wolfram_rule(30).unwrap(), -1, 1, 20, 32, 2000, 1024, &SeedStream::new(8, 0)).unwrap();
        for r in &reaches {
            for d in [Direction::Left, Direction::Right, Direction::Both] {
                for t in 0..20 {
                    assert!(r.affects(t + 1, d) <= r.affects(t, d));
                }
            }
        }
    }

    #[test]
    fn rule_30_spreads_differences_to_the_right() {
        // Rule 30 is permutive in its left input, so the rightmost difference advances every step.
        let right = estimate_p_t(&wolfram_rule(30).unwrap(), 0, 1, 10, 32, Direction::Right, 1000, 1024, &SeedStream::new(2, 2)).unwrap();
        assert_eq!(right.p_hat, 1.0);
    }

    fn synthetic_curve(values: &[f64]) -> Vec<RatioEstimate> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| RatioEstimate {
                m: 1,
                n: 2 << i,
                horizon: 32,
                samples: 100,
                hits: (v * 100.0) as u64,
                ratio_hat: v,
                ci: Interval { lo: v, hi: v },
            })
            .collect()
    }

    fn synthetic_profile(values: &[f64], direction: Direction) -> Vec<PropagationEstimate> {
        values
            .iter()
            .enumerate()
            .map(|(t, &p)| PropagationEstimate {
                interval: (0, 1),
                t,
                horizon: 64,
                samples: 100,
                hits: (p * 100.0) as u64,
                p_hat: p,
                ci: Interval { lo: p, hi: p },
                direction,
            })
            .collect()
    }

    #[test]
    fn class_decision_logic() {
        let flat = synthetic_curve(&[0.0, 0.0, 0.01]);
        let rising = synthetic_curve(&[0.5, 0.8, 0.95]);
        let falling = synthetic_curve(&[0.99, 0.95, 0.92]);
        let full = synthetic_profile(&[1.0, 1.0, 0.995], Direction::Left);
        let none = synthetic_profile(&[0.3, 0.1, 0.0], Direction::Right);
        assert_eq!(decide_class(true, &[], &[], &[], 0.9, 0.99), (GilmanClass::A, None));
        assert_eq!(decide_class(false, &[flat.clone(), rising], &full, &none, 0.9, 0.99), (GilmanClass::B, None));
        assert_eq!(decide_class(false, &[falling], &none, &none, 0.9, 0.99).0, GilmanClass::Inconclusive);
        assert_eq!(decide_class(false, std::slice::from_ref(&flat), &full, &none, 0.9, 0.99), (GilmanClass::C, Some(Direction::Left)));
        assert_eq!(decide_class(false, std::slice::from_ref(&flat), &none, &full, 0.9, 0.99), (GilmanClass::C, Some(Direction::Right)));
        assert_eq!(decide_class(false, &[flat], &full, &full, 0.9, 0.99), (GilmanClass::C, Some(Direction::Both)));
    }

    #[test]
    fn classify_examples() {
        let s = SeedStream::new(10, 0);
        let fast = GilmanParams {
            ratio_samples: 500,
            propagation_samples: 2000,
            ..GilmanParams::default()
        };
        let id = classify_gilman(&wolfram_rule(204).unwrap(), &fast, &s).unwrap();
        assert_eq!(id.class, GilmanClass::A);
        assert_eq!(id.surjective, Some(true));
        let shift = classify_gilman(&wolfram_rule(170).unwrap(), &fast, &s).unwrap();
        assert_eq!((shift.class, shift.direction), (GilmanClass::C, Some(Direction::Left)));
        let xor = classify_gilman(&wolfram_rule(90).unwrap(), &fast, &s).unwrap();
        assert_eq!((xor.class, xor.direction), (GilmanClass::C, Some(Direction::Both)));
    }
}
