use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use calab_cli::{corpus, expand_rules, run, write_corpus, write_outputs, ExperimentConfig, Task};
use clap::{Args, Parser, Subcommand};

/// Cellular-automaton experiments: surjectivity, sensitivity classes and spectral probes.
#[derive(Parser)]
#[command(name = "calab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide surjectivity and report a shortest orphan.
    Surjectivity(RunArgs),
    /// Search for blocking words.
    Kurka(RunArgs),
    /// Classify into Gilman's classes A, B, C.
    Gilman(RunArgs),
    /// Eigenvalue scan and rationality verdict.
    Spectral(RunArgs),
    /// Surjectivity, Kůrka, Gilman and spectral in sequence.
    Full(RunArgs),
    /// Run one task over a list of rules.
    Corpus(CorpusArgs),
}

#[derive(Args)]
struct RunArgs {
    /// `eca:<n>` or a rule table file.
    #[arg(long)]
    rule: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CorpusArgs {
    /// Comma-separated rule specs; `eca:all` expands to all 256 elementary rules.
    #[arg(long)]
    rules: String,
    /// Task run for each rule.
    #[arg(long)]
    task: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
    /// Output directory. Without it the report is printed to stdout.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    period: Option<String>,
    #[arg(long)]
    kurka_max_len: Option<String>,
    #[arg(long)]
    kurka_horizon: Option<String>,
    #[arg(long)]
    kurka_max_contexts: Option<String>,
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    m: Option<String>,
    /// Comma list, e.g. `2,4,8,16`.
    #[arg(long)]
    n_grid: Option<String>,
    #[arg(long)]
    ratio_horizon: Option<String>,
    #[arg(long)]
    ratio_samples: Option<String>,
    #[arg(long)]
    ratio_threshold: Option<String>,
    /// `i1,i2`.
    #[arg(long, allow_hyphen_values = true)]
    interval: Option<String>,
    /// Comma list; `a..=b` ranges allowed.
    #[arg(long)]
    t_grid: Option<String>,
    #[arg(long)]
    propagation_horizon: Option<String>,
    #[arg(long)]
    propagation_samples: Option<String>,
    #[arg(long)]
    propagation_threshold: Option<String>,
    /// Spectral horizon T.
    #[arg(long)]
    horizon: Option<String>,
    #[arg(long)]
    orbits: Option<String>,
    #[arg(long)]
    alpha_points: Option<String>,
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long)]
    max_denominator: Option<String>,
    /// `letter` or `cylinder:<word>@<anchor>`.
    #[arg(long, allow_hyphen_values = true)]
    observable: Option<String>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut config = ExperimentConfig::default();
        if let Some(path) = &self.config {
            config.apply_file(path)?;
        }
        let flags = [
            ("seed", &self.seed),
            ("out", &self.out),
            ("period", &self.period),
            ("kurka_max_len", &self.kurka_max_len),
            ("kurka_horizon", &self.kurka_horizon),
            ("kurka_max_contexts", &self.kurka_max_contexts),
            ("points", &self.points),
            ("m", &self.m),
            ("n_grid", &self.n_grid),
            ("ratio_horizon", &self.ratio_horizon),
            ("ratio_samples", &self.ratio_samples),
            ("ratio_threshold", &self.ratio_threshold),
            ("interval", &self.interval),
            ("t_grid", &self.t_grid),
            ("propagation_horizon", &self.propagation_horizon),
            ("propagation_samples", &self.propagation_samples),
            ("propagation_threshold", &self.propagation_threshold),
            ("horizon", &self.horizon),
            ("orbits", &self.orbits),
            ("alpha_points", &self.alpha_points),
            ("threshold", &self.threshold),
            ("max_denominator", &self.max_denominator),
            ("observable", &self.observable),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                config.set(key, v).with_context(|| format!("--{}", key.replace('_', "-")))?;
            }
        }
        Ok(config)
    }
}

fn single(task: Task, args: RunArgs) -> Result<()> {
    let mut config = args.common.config()?;
    config.task = task;
    if let Some(rule) = args.rule {
        config.rule = rule;
    }
    let report = run(&config)?;
    match &config.out {
        Some(dir) => {
            for path in write_outputs(&report, dir.as_ref())? {
                println!("wrote {}", path.display());
            }
        }
        None => print!("{}", report.to_json()),
    }
    if let Some(c) = &report.results.consistency {
        eprintln!("consistency: {}", c.message);
    }
    Ok(())
}

fn corpus_cmd(args: CorpusArgs) -> Result<()> {
    let mut config = args.common.config()?;
    if let Some(task) = &args.task {
        config.set("task", task).context("--task")?;
    }
    let rules = expand_rules(&args.rules)?;
    let outcome = corpus(&rules, &config)?;
    match &config.out {
        Some(dir) => {
            write_corpus(&outcome, dir.as_ref())?;
            println!("wrote {} rule reports and {}/summary.csv", outcome.reports.iter().flatten().count(), dir);
        }
        None => print!("{}", String::from_utf8(calab_cli::summary_csv(&outcome.summary)?)?),
    }
    let failed = outcome.summary.iter().filter(|r| r.status != "ok").count();
    if failed > 0 {
        anyhow::bail!("{failed} of {} rules failed; see the status column of the summary", rules.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Surjectivity(a) => single(Task::Surjectivity, a),
        Command::Kurka(a) => single(Task::Kurka, a),
        Command::Gilman(a) => single(Task::Gilman, a),
        Command::Spectral(a) => single(Task::Spectral, a),
        Command::Full(a) => single(Task::Full, a),
        Command::Corpus(a) => corpus_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
