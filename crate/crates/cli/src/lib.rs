//! Experiment harness: runs task pipelines from an [`ExperimentConfig`] and writes
//! `report.json`, `scan.csv`, `profile.csv` and `summary.csv`.

pub mod config;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use calab::exact::{self, DecisionMethod};
use calab::gilman::{self, GilmanClass, GilmanVerdict};
use calab::kurka::{self, KurkaVerdict};
use calab::spectral::{self, AlphaGrid, RationalityVerdict, SpectralScan};
use calab::{load_rule, BernoulliMeasure, FiniteWord, LocalRule, SeedStream};
use serde::Serialize;

pub use config::{ExperimentConfig, ObservableSpec, Task};

pub const SCHEMA: &str = "calab-report/1";
pub const TOOL_VERSION: &str = concat!("calab ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurjectivityResult {
    pub rule: String,
    pub surjective: bool,
    pub witness: Option<FiniteWord>,
    pub method: DecisionMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult {
    pub observable: String,
    pub threshold: f64,
    pub scan: SpectralScan,
    pub verdict: RationalityVerdict,
    pub max_off_rational_mass: f64,
}

/// Cross-check between the Gilman class and the spectral verdict: a surjective
/// class-C rule admits no irrational eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Consistency {
    pub gilman_class: GilmanClass,
    pub surjective: Option<bool>,
    pub applies: bool,
    pub rationality_pass: Option<bool>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Results {
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surjectivity: Option<SurjectivityResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kurka: Option<KurkaVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gilman: Option<GilmanVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistency: Option<Consistency>,
}

/// Wall-clock seconds per task. Not covered by the determinism contract.
pub type Timings = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub results: Results,
    pub timings: Timings,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn timed<T>(timings: &mut Timings, key: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f();
    timings.insert(key.to_string(), start.elapsed().as_secs_f64());
    out
}

/// Runs the configured task pipeline.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let rule = load_rule(&config.rule).with_context(|| format!("loading rule `{}`", config.rule))?;
    let root = SeedStream::new(config.seed, 0);
    let task = config.task;
    let mut timings = Timings::new();
    let mut results = Results {
        rule: rule.to_string(),
        ..Results::default()
    };

    if task.runs_surjectivity() {
        results.surjectivity = Some(timed(&mut timings, "surjectivity", || surjectivity(&rule))?);
    }
    if task.runs_kurka() {
        let params = config.kurka_params();
        results.kurka = Some(timed(&mut timings, "kurka", || {
            kurka::classify_kurka(&rule, &params).context("Kůrka search (try lowering kurka_max_len or kurka_horizon)")
        })?);
    }
    if task.runs_gilman() {
        let params = config.gilman_params();
        results.gilman = Some(timed(&mut timings, "gilman", || {
            gilman::classify_gilman(&rule, &params, &root.substream(1)).context("Gilman classification")
        })?);
    }
    if task.runs_spectral() {
        results.spectral = Some(timed(&mut timings, "spectral", || {
            spectral_task(&rule, config, &root.substream(2))
        })?);
    }
    if task == Task::Full {
        results.consistency = consistency(&results);
    }
    Ok(Report {
        schema: SCHEMA,
        tool_version: TOOL_VERSION,
        seed: config.seed,
        config: config.clone(),
        results,
        timings,
    })
}

fn surjectivity(rule: &LocalRule) -> Result<SurjectivityResult> {
    let report = exact::is_surjective(rule).context("surjectivity decision")?;
    Ok(SurjectivityResult {
        rule: rule.to_string(),
        surjective: report.surjective,
        witness: report.witness,
        method: report.method,
    })
}

fn spectral_task(rule: &LocalRule, config: &ExperimentConfig, stream: &SeedStream) -> Result<SpectralResult> {
    let measure = BernoulliMeasure::uniform(rule.alphabet());
    let g = config.observable.build(&measure)?;
    let grid = AlphaGrid::uniform(config.alpha_points)?;
    let scan = spectral::eigenvalue_scan(rule, &measure, &g, &grid, config.horizon, config.orbits, config.period, stream)
        .context("eigenvalue scan")?;
    let threshold = config.threshold();
    let verdict = spectral::rationality_verdict(&scan, threshold, config.max_denominator)?;
    Ok(SpectralResult {
        observable: config.observable.to_string(),
        threshold,
        max_off_rational_mass: spectral::max_off_rational_mass(&scan, config.max_denominator),
        scan,
        verdict,
    })
}

fn consistency(results: &Results) -> Option<Consistency> {
    let gilman = results.gilman.as_ref()?;
    let surjective = results.surjectivity.as_ref().map(|s| s.surjective).or(gilman.surjective);
    let applies = gilman.class == GilmanClass::C && surjective == Some(true);
    let rationality_pass = results.spectral.as_ref().map(|s| s.verdict.pass);
    let message = match (applies, rationality_pass) {
        (true, Some(true)) => "surjective class C rule: no irrational eigenvalue expected; rationality verdict PASS".to_string(),
        (true, Some(false)) => {
            "surjective class C rule: no irrational eigenvalue expected, but the rationality verdict FAILED; \
             check the cycle guard and raise horizon or period"
                .to_string()
        }
        (true, None) => "surjective class C rule: rationality verdict not computed".to_string(),
        (false, _) => format!(
            "not applicable (class {:?}, surjective {})",
            gilman.class,
            surjective.map_or("unknown".to_string(), |s| s.to_string())
        ),
    };
    Some(Consistency {
        gilman_class: gilman.class,
        surjective,
        applies,
        rationality_pass,
        message,
    })
}

/// One row of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub rule: String,
    pub surjective: Option<bool>,
    pub kurka: Option<String>,
    pub gilman: Option<String>,
    pub max_off_rational_mass: Option<f64>,
    pub status: String,
}

impl SummaryRow {
    pub fn from_results(rule: &str, results: &Results) -> Self {
        SummaryRow {
            rule: rule.to_string(),
            surjective: results
                .surjectivity
                .as_ref()
                .map(|s| s.surjective)
                .or(results.gilman.as_ref().and_then(|g| g.surjective)),
            kurka: results
                .kurka
                .as_ref()
                .or(results.gilman.as_ref().map(|g| &g.kurka))
                .map(|k| serde_json::to_value(k.class).unwrap().as_str().unwrap().to_string()),
            gilman: results.gilman.as_ref().map(|g| match g.direction {
                Some(d) => format!("{:?}-{}", g.class, d.as_str()),
                None => format!("{:?}", g.class),
            }),
            max_off_rational_mass: results.spectral.as_ref().map(|s| s.max_off_rational_mass),
            status: "ok".to_string(),
        }
    }

    fn failed(rule: &str, err: &anyhow::Error) -> Self {
        SummaryRow {
            rule: rule.to_string(),
            surjective: None,
            kurka: None,
            gilman: None,
            max_off_rational_mass: None,
            status: format!("error: {err:#}"),
        }
    }
}

/// Writes `contents` to `path` through a temporary file and a rename.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming {} to {}", tmp.display(), path.display()))
}

fn csv_bytes<R: Serialize>(rows: impl IntoIterator<Item = R>, header: &[&str]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Writes `report.json`, `summary.csv` and, when the tasks produced them,
/// `scan.csv` and `profile.csv` into `dir`.
pub fn write_outputs(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: Vec<u8>| -> Result<()> {
        let path = dir.join(name);
        write_atomic(&path, &bytes)?;
        written.push(path);
        Ok(())
    };
    put("report.json", report.to_json().into_bytes())?;
    if let Some(s) = &report.results.spectral {
        let rows = s.scan.alpha_grid.iter().zip(&s.scan.atom_mass).map(|(a, m)| (a, m, s.scan.guard));
        put("scan.csv", csv_bytes(rows, &["alpha", "atom_mass", "guard"])?)?;
    }
    if let Some(g) = &report.results.gilman {
        let rows = g
            .left_profile
            .iter()
            .chain(&g.right_profile)
            .map(|p| (p.t, p.p_hat, p.ci.lo, p.ci.hi, p.direction.as_str()));
        put("profile.csv", csv_bytes(rows, &["t", "p_hat", "ci_lo", "ci_hi", "direction"])?)?;
    }
    let row = SummaryRow::from_results(&report.config.rule, &report.results);
    put("summary.csv", summary_csv(std::slice::from_ref(&row))?)?;
    Ok(written)
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Expands a rule list: comma-separated specs, with `eca:all` for all 256 elementary rules.
pub fn expand_rules(spec: &str) -> Result<Vec<String>> {
    let mut rules = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part == "eca:all" {
            rules.extend((0..256).map(|n| format!("eca:{n}")));
        } else {
            rules.push(part.to_string());
        }
    }
    Ok(rules)
}

/// Directory name for a rule's report inside a corpus output.
pub fn rule_slug(rule: &str) -> String {
    rule.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '-' })
        .collect()
}

pub struct CorpusOutcome {
    pub reports: Vec<Result<Report>>,
    pub summary: Vec<SummaryRow>,
}

/// Runs `template` once per rule in parallel. Failures are isolated per rule.
pub fn corpus(rules: &[String], template: &ExperimentConfig) -> Result<CorpusOutcome> {
    if rules.is_empty() {
        bail!("empty corpus: give at least one rule");
    }
    let reports = calab::par::map_slice(rules, |rule| {
        let mut config = template.clone();
        config.rule = rule.clone();
        run(&config)
    });
    let summary = rules
        .iter()
        .zip(&reports)
        .map(|(rule, r)| match r {
            Ok(report) => SummaryRow::from_results(rule, &report.results),
            Err(e) => SummaryRow::failed(rule, e),
        })
        .collect();
    Ok(CorpusOutcome { reports, summary })
}

/// Writes one subdirectory per successful rule and the corpus `summary.csv`.
pub fn write_corpus(outcome: &CorpusOutcome, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    for report in outcome.reports.iter().flatten() {
        write_outputs(report, &dir.join(rule_slug(&report.config.rule)))?;
    }
    write_atomic(&dir.join("summary.csv"), &summary_csv(&outcome.summary)?)
}
