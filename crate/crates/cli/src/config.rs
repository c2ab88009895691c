//! Experiment configuration and its `key = value` text format.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use calab::gilman::GilmanParams;
use calab::kurka::{KurkaParams, DEFAULT_MAX_CONTEXTS};
use calab::spectral::{default_threshold, DEFAULT_MAX_DENOMINATOR};
use calab::{BernoulliMeasure, Cylinder};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Surjectivity,
    Kurka,
    Gilman,
    Spectral,
    Full,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Surjectivity => "surjectivity",
            Task::Kurka => "kurka",
            Task::Gilman => "gilman",
            Task::Spectral => "spectral",
            Task::Full => "full",
        }
    }

    pub fn runs_surjectivity(self) -> bool {
        matches!(self, Task::Surjectivity | Task::Full)
    }

    pub fn runs_kurka(self) -> bool {
        matches!(self, Task::Kurka | Task::Full)
    }

    pub fn runs_gilman(self) -> bool {
        matches!(self, Task::Gilman | Task::Full)
    }

    pub fn runs_spectral(self) -> bool {
        matches!(self, Task::Spectral | Task::Full)
    }
}

impl FromStr for Task {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "surjectivity" => Task::Surjectivity,
            "kurka" => Task::Kurka,
            "gilman" => Task::Gilman,
            "spectral" => Task::Spectral,
            "full" => Task::Full,
            _ => bail!("unknown task `{s}` (expected surjectivity, kurka, gilman, spectral or full)"),
        })
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Observable used by spectral scans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObservableSpec {
    /// Centered letter at cell 0.
    Letter,
    /// Centered indicator of `word` placed at `anchor`.
    Cylinder { word: String, anchor: i64 },
}

impl ObservableSpec {
    pub fn build(&self, measure: &BernoulliMeasure) -> Result<calab::spectral::Observable> {
        use calab::spectral::Observable;
        Ok(match self {
            ObservableSpec::Letter => Observable::letter_at_zero(measure),
            ObservableSpec::Cylinder { word, anchor } => {
                let word = word.parse().map_err(|e| anyhow!("observable word `{word}`: {e}"))?;
                Observable::cylinder_indicator(Cylinder::new(word, *anchor), measure)
            }
        })
    }
}

impl FromStr for ObservableSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "letter" {
            return Ok(ObservableSpec::Letter);
        }
        let parsed = s.strip_prefix("cylinder:").and_then(|rest| {
            let (word, anchor) = rest.split_once('@').unwrap_or((rest, "0"));
            Some((word, anchor.parse().ok()?))
        });
        match parsed {
            Some((word, anchor)) if !word.is_empty() => Ok(ObservableSpec::Cylinder {
                word: word.to_string(),
                anchor,
            }),
            _ => bail!("unknown observable `{s}` (expected `letter` or `cylinder:<word>@<anchor>`)"),
        }
    }
}

impl fmt::Display for ObservableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservableSpec::Letter => f.write_str("letter"),
            ObservableSpec::Cylinder { word, anchor } => write!(f, "cylinder:{word}@{anchor}"),
        }
    }
}

impl Serialize for ObservableSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Everything a run depends on. The output directory is not part of the echo.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub rule: String,
    pub task: Task,
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<String>,
    pub period: usize,
    pub kurka_max_len: usize,
    pub kurka_horizon: usize,
    pub kurka_max_contexts: u128,
    pub points: usize,
    pub m: usize,
    pub n_grid: Vec<usize>,
    pub ratio_horizon: usize,
    pub ratio_samples: usize,
    pub ratio_threshold: f64,
    pub interval: (i64, i64),
    pub t_grid: Vec<usize>,
    pub propagation_horizon: usize,
    pub propagation_samples: usize,
    pub propagation_threshold: f64,
    pub horizon: usize,
    pub orbits: usize,
    pub alpha_points: usize,
    /// Atom threshold; `None` means ten times the calibrated noise floor.
    pub threshold: Option<f64>,
    pub max_denominator: u64,
    pub observable: ObservableSpec,
}

pub const KEYS: &[&str] = &[
    "rule",
    "task",
    "seed",
    "out",
    "period",
    "kurka_max_len",
    "kurka_horizon",
    "kurka_max_contexts",
    "points",
    "m",
    "n_grid",
    "ratio_horizon",
    "ratio_samples",
    "ratio_threshold",
    "interval",
    "t_grid",
    "propagation_horizon",
    "propagation_samples",
    "propagation_threshold",
    "horizon",
    "orbits",
    "alpha_points",
    "threshold",
    "max_denominator",
    "observable",
];

impl Default for ExperimentConfig {
    fn default() -> Self {
        let g = GilmanParams::default();
        ExperimentConfig {
            rule: String::new(),
            task: Task::Full,
            seed: 0,
            out: None,
            period: g.period,
            kurka_max_len: g.kurka.max_len,
            kurka_horizon: g.kurka.horizon,
            kurka_max_contexts: DEFAULT_MAX_CONTEXTS,
            points: g.points,
            m: g.m,
            n_grid: g.n_grid,
            ratio_horizon: g.ratio_horizon,
            ratio_samples: g.ratio_samples,
            ratio_threshold: g.ratio_threshold,
            interval: g.interval,
            t_grid: g.t_grid,
            propagation_horizon: g.propagation_horizon,
            propagation_samples: g.propagation_samples,
            propagation_threshold: g.propagation_threshold,
            horizon: 1 << 10,
            orbits: 100,
            alpha_points: 1 << 10,
            threshold: None,
            max_denominator: DEFAULT_MAX_DENOMINATOR,
            observable: ObservableSpec::Letter,
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("`{key}`: cannot parse `{value}`: {e}"))
}

/// Comma-separated list; `a..=b` expands to an inclusive range.
fn list(key: &str, value: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..=") {
            Some((a, b)) => out.extend(num::<usize>(key, a)?..=num::<usize>(key, b)?),
            None => out.push(num(key, part)?),
        }
    }
    if out.is_empty() {
        bail!("`{key}`: empty list");
    }
    Ok(out)
}

impl ExperimentConfig {
    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "rule" => self.rule = value.to_string(),
            "task" => self.task = value.parse()?,
            "seed" => self.seed = num(key, value)?,
            "out" => self.out = Some(value.to_string()),
            "period" => self.period = num(key, value)?,
            "kurka_max_len" => self.kurka_max_len = num(key, value)?,
            "kurka_horizon" => self.kurka_horizon = num(key, value)?,
            "kurka_max_contexts" => self.kurka_max_contexts = num(key, value)?,
            "points" => self.points = num(key, value)?,
            "m" => self.m = num(key, value)?,
            "n_grid" => self.n_grid = list(key, value)?,
            "ratio_horizon" => self.ratio_horizon = num(key, value)?,
            "ratio_samples" => self.ratio_samples = num(key, value)?,
            "ratio_threshold" => self.ratio_threshold = num(key, value)?,
            "interval" => {
                let (a, b) = value
                    .split_once(',')
                    .ok_or_else(|| anyhow!("`interval`: expected `i1,i2`, got `{value}`"))?;
                self.interval = (num(key, a.trim())?, num(key, b.trim())?);
            }
            "t_grid" => self.t_grid = list(key, value)?,
            "propagation_horizon" => self.propagation_horizon = num(key, value)?,
            "propagation_samples" => self.propagation_samples = num(key, value)?,
            "propagation_threshold" => self.propagation_threshold = num(key, value)?,
            "horizon" => self.horizon = num(key, value)?,
            "orbits" => self.orbits = num(key, value)?,
            "alpha_points" => self.alpha_points = num(key, value)?,
            "threshold" => self.threshold = Some(num(key, value)?),
            "max_denominator" => self.max_denominator = num(key, value)?,
            "observable" => self.observable = value.parse()?,
            _ => bail!("unknown key `{key}` (known keys: {})", KEYS.join(", ")),
        }
        Ok(())
    }

    /// Applies `key = value` lines. Blank lines and `#` comments are ignored;
    /// unknown or repeated keys are errors.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<()> {
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = || format!("{origin}:{}", i + 1);
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{}: expected `key = value`, got `{line}`", at()))?;
            let key = key.trim();
            if seen.contains(&key) {
                bail!("{}: key `{key}` given twice", at());
            }
            seen.push(key);
            self.set(key, value).with_context(at)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        self.apply_text(&text, &path.display().to_string())
    }

    /// Checks required and positive parameters.
    pub fn validate(&self) -> Result<()> {
        if self.rule.is_empty() {
            bail!("no rule given: pass --rule eca:<n> or a rule file, or set `rule` in the config");
        }
        let positive = [
            ("period", self.period),
            ("kurka_max_len", self.kurka_max_len),
            ("kurka_horizon", self.kurka_horizon),
            ("points", self.points),
            ("m", self.m),
            ("ratio_horizon", self.ratio_horizon),
            ("ratio_samples", self.ratio_samples),
            ("propagation_horizon", self.propagation_horizon),
            ("propagation_samples", self.propagation_samples),
            ("horizon", self.horizon),
            ("orbits", self.orbits),
            ("alpha_points", self.alpha_points),
            ("max_denominator", self.max_denominator as usize),
        ];
        for (key, v) in positive {
            if v == 0 {
                bail!("`{key}` must be positive");
            }
        }
        if self.kurka_max_contexts == 0 {
            bail!("`kurka_max_contexts` must be positive");
        }
        if self.n_grid.contains(&0) {
            bail!("`n_grid` entries must be positive");
        }
        for (key, v) in [
            ("ratio_threshold", self.ratio_threshold),
            ("propagation_threshold", self.propagation_threshold),
        ] {
            if !(0.0..=1.0).contains(&v) {
                bail!("`{key}` must lie in [0, 1], got {v}");
            }
        }
        if let Some(t) = self.threshold {
            if t.is_nan() || t <= 0.0 {
                bail!("`threshold` must be positive, got {t}");
            }
        }
        if self.interval.0 >= self.interval.1 {
            bail!("`interval` must satisfy i1 < i2, got {:?}", self.interval);
        }
        Ok(())
    }

    pub fn threshold(&self) -> f64 {
        self.threshold.unwrap_or_else(|| default_threshold(self.horizon))
    }

    pub fn kurka_params(&self) -> KurkaParams {
        KurkaParams {
            max_len: self.kurka_max_len,
            horizon: self.kurka_horizon,
            max_contexts: self.kurka_max_contexts,
        }
    }

    pub fn gilman_params(&self) -> GilmanParams {
        GilmanParams {
            kurka: self.kurka_params(),
            period: self.period,
            points: self.points,
            m: self.m,
            n_grid: self.n_grid.clone(),
            ratio_horizon: self.ratio_horizon,
            ratio_samples: self.ratio_samples,
            ratio_threshold: self.ratio_threshold,
            interval: self.interval,
            t_grid: self.t_grid.clone(),
            propagation_horizon: self.propagation_horizon,
            propagation_samples: self.propagation_samples,
            propagation_threshold: self.propagation_threshold,
        }
    }
}
