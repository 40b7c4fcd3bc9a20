//! Command-line front end.
//!
//! Values resolve as: command-line flag, then `--config` file entry, then the
//! built-in default. Config files hold `key = value` lines whose keys are the
//! long flag names; `#` starts a comment.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::experiments::{
    self, linear_grid, max_invariant_deviation, BathMode, SweepGrid, SwitchSetup, IDENTITY_TOL,
};
use crate::table::{to_table, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Scenario {
    /// Separable mixtures of the two definite orders pin every input to τ_p
    Theorem1,
    /// Pure |+⟩ controller, bath fixed at τ_p
    Case1Fixed,
    /// Pure |+⟩ controller, bath at the input temperature
    Case1Varying,
    /// Thermal controller, bath fixed at τ_p
    Case2Fixed,
    /// Thermal controller, bath at the input temperature
    Case2Varying,
    /// Full pipeline over a 5×5×3 (p, q, gamma) channel grid
    Sweep,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Theorem1 => "theorem1",
            Scenario::Case1Fixed => "case1-fixed",
            Scenario::Case1Varying => "case1-varying",
            Scenario::Case2Fixed => "case2-fixed",
            Scenario::Case2Varying => "case2-varying",
            Scenario::Sweep => "sweep",
        }
    }

    /// Long flag names (without `--`) the scenario reads.
    fn keys(&self) -> &'static [&'static str] {
        match self {
            Scenario::Theorem1 => &["p", "q", "gamma", "lambda-steps", "samples", "seed", "out", "format"],
            Scenario::Sweep => &["r-min", "r-max", "steps", "out", "format"],
            _ => &["p", "r-min", "r-max", "steps", "out", "format"],
        }
    }

    fn is_varying(&self) -> bool {
        matches!(self, Scenario::Case1Varying | Scenario::Case2Varying)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "thermoswitch",
    version,
    about = "Free energy and extractable work under coherently controlled orders of thermal qubit channels"
)]
struct Args {
    #[command(subcommand)]
    scenario: Scenario,
    /// Amplitude damping equilibrium ground population (also the fixed bath)
    #[arg(long, global = true)]
    p: Option<f64>,
    /// Phase-flip keep probability (theorem1 only; defaults to p)
    #[arg(long, global = true)]
    q: Option<f64>,
    /// Amplitude damping strength (theorem1 only)
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Smallest input ground population r
    #[arg(long = "r-min", global = true)]
    r_min: Option<f64>,
    /// Largest input ground population r
    #[arg(long = "r-max", global = true)]
    r_max: Option<f64>,
    /// Number of r grid points
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Number of mixing weights in [0, 1] (theorem1)
    #[arg(long = "lambda-steps", global = true)]
    lambda_steps: Option<usize>,
    /// Random input states per mixing weight (theorem1)
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Seed for input-state sampling (theorem1)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; the table goes to stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: csv or json
    #[arg(long, global = true)]
    format: Option<String>,
    /// key = value file supplying any of the flags above
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

/// Fully resolved, validated run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub p: f64,
    pub q: f64,
    pub gamma: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub steps: usize,
    pub lambda_steps: usize,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    /// Command line that reproduces this config, starting with the subcommand.
    pub fn to_args(&self) -> Vec<String> {
        let mut args = vec![self.scenario.as_str().to_owned()];
        for key in self.scenario.keys() {
            let value = match *key {
                "p" => self.p.to_string(),
                "q" => self.q.to_string(),
                "gamma" => self.gamma.to_string(),
                "r-min" => self.r_min.to_string(),
                "r-max" => self.r_max.to_string(),
                "steps" => self.steps.to_string(),
                "lambda-steps" => self.lambda_steps.to_string(),
                "samples" => self.samples.to_string(),
                "seed" => self.seed.to_string(),
                "format" => self.format.as_str().to_owned(),
                "out" => match &self.out {
                    Some(path) => path.display().to_string(),
                    None => continue,
                },
                _ => unreachable!("unknown key {key}"),
            };
            args.push(format!("--{key}"));
            args.push(value);
        }
        args
    }

    pub fn r_grid(&self) -> Vec<f64> {
        linear_grid(self.r_min, self.r_max, self.steps)
    }
}

/// Invalid command line or config file. `code` is the process exit status:
/// 0 for `--help`/`--version`, 2 otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct UsageError {
    pub message: String,
    pub code: u8,
}

fn usage(message: impl Into<String>) -> UsageError {
    UsageError {
        message: message.into(),
        code: 2,
    }
}

/// Raw, unvalidated values from one source.
#[derive(Debug, Default)]
struct Layer {
    p: Option<f64>,
    q: Option<f64>,
    gamma: Option<f64>,
    r_min: Option<f64>,
    r_max: Option<f64>,
    steps: Option<usize>,
    lambda_steps: Option<usize>,
    samples: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<String>,
}

impl Layer {
    fn present_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let mut add = |present: bool, key| {
            if present {
                keys.push(key)
            }
        };
        add(self.p.is_some(), "p");
        add(self.q.is_some(), "q");
        add(self.gamma.is_some(), "gamma");
        add(self.r_min.is_some(), "r-min");
        add(self.r_max.is_some(), "r-max");
        add(self.steps.is_some(), "steps");
        add(self.lambda_steps.is_some(), "lambda-steps");
        add(self.samples.is_some(), "samples");
        add(self.seed.is_some(), "seed");
        add(self.out.is_some(), "out");
        add(self.format.is_some(), "format");
        keys
    }

    /// Drops keys the scenario does not read.
    fn restrict(mut self, scenario: Scenario) -> Self {
        let keep = scenario.keys();
        let k = |key: &str| keep.contains(&key);
        if !k("p") {
            self.p = None;
        }
        if !k("q") {
            self.q = None;
        }
        if !k("gamma") {
            self.gamma = None;
        }
        if !k("r-min") {
            self.r_min = None;
        }
        if !k("r-max") {
            self.r_max = None;
        }
        if !k("steps") {
            self.steps = None;
        }
        if !k("lambda-steps") {
            self.lambda_steps = None;
        }
        if !k("samples") {
            self.samples = None;
        }
        if !k("seed") {
            self.seed = None;
        }
        self
    }

    fn or(self, lower: Layer) -> Layer {
        Layer {
            p: self.p.or(lower.p),
            q: self.q.or(lower.q),
            gamma: self.gamma.or(lower.gamma),
            r_min: self.r_min.or(lower.r_min),
            r_max: self.r_max.or(lower.r_max),
            steps: self.steps.or(lower.steps),
            lambda_steps: self.lambda_steps.or(lower.lambda_steps),
            samples: self.samples.or(lower.samples),
            seed: self.seed.or(lower.seed),
            out: self.out.or(lower.out),
            format: self.format.or(lower.format),
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str, source: &Path) -> Result<T, UsageError> {
    raw.parse().map_err(|_| {
        usage(format!(
            "invalid value '{raw}' for {key} in config file {}",
            source.display()
        ))
    })
}

fn parse_config(text: &str, source: &Path) -> Result<Layer, UsageError> {
    let mut layer = Layer::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            usage(format!(
                "{}:{}: expected key = value",
                source.display(),
                lineno + 1
            ))
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "p" => layer.p = Some(parse_value(key, value, source)?),
            "q" => layer.q = Some(parse_value(key, value, source)?),
            "gamma" => layer.gamma = Some(parse_value(key, value, source)?),
            "r-min" => layer.r_min = Some(parse_value(key, value, source)?),
            "r-max" => layer.r_max = Some(parse_value(key, value, source)?),
            "steps" => layer.steps = Some(parse_value(key, value, source)?),
            "lambda-steps" => layer.lambda_steps = Some(parse_value(key, value, source)?),
            "samples" => layer.samples = Some(parse_value(key, value, source)?),
            "seed" => layer.seed = Some(parse_value(key, value, source)?),
            "out" => layer.out = Some(PathBuf::from(value)),
            "format" => layer.format = Some(value.to_owned()),
            other => {
                return Err(usage(format!(
                    "{}:{}: unknown key '{other}'",
                    source.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok(layer)
}

fn in_closed(key: &str, value: f64, lo: f64, hi: f64) -> Result<(), UsageError> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(usage(format!(
            "invalid value {value} for --{key}: must lie in [{lo}, {hi}]"
        )))
    }
}

fn validate(cfg: &RunConfig) -> Result<(), UsageError> {
    let s = cfg.scenario;
    match s {
        Scenario::Theorem1 => {
            in_closed("p", cfg.p, 0.0, 1.0)?;
            in_closed("q", cfg.q, 0.0, 1.0)?;
            in_closed("gamma", cfg.gamma, 0.0, 1.0)?;
            if cfg.lambda_steps == 0 {
                return Err(usage("invalid value 0 for --lambda-steps: must be at least 1"));
            }
            if cfg.samples == 0 {
                return Err(usage("invalid value 0 for --samples: must be at least 1"));
            }
        }
        _ => {
            if s != Scenario::Sweep && !(cfg.p > 0.5 && cfg.p < 1.0) {
                return Err(usage(format!(
                    "invalid value {} for --p: must lie in (0.5, 1)",
                    cfg.p
                )));
            }
            for (key, r) in [("r-min", cfg.r_min), ("r-max", cfg.r_max)] {
                if s.is_varying() {
                    if !(r.is_finite() && (0.5..=1.0).contains(&r)) {
                        return Err(usage(format!(
                            "invalid value {r} for --{key}: must lie in (0.5, 1) \
                             (the endpoints 0.5 and 1 are pulled inward by 1e-6)"
                        )));
                    }
                } else {
                    in_closed(key, r, 0.5, 1.0)?;
                }
            }
            if cfg.r_min > cfg.r_max {
                return Err(usage(format!(
                    "--r-min ({}) must not exceed --r-max ({})",
                    cfg.r_min, cfg.r_max
                )));
            }
            if cfg.steps == 0 {
                return Err(usage("invalid value 0 for --steps: must be at least 1"));
            }
        }
    }
    Ok(())
}

/// Parses `argv` (including the program name) into a validated config.
/// Reads the `--config` file if one is given; writes nothing.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(|e| UsageError {
        message: e.render().to_string(),
        code: if e.use_stderr() { 2 } else { 0 },
    })?;
    let scenario = args.scenario;
    let flags = Layer {
        p: args.p,
        q: args.q,
        gamma: args.gamma,
        r_min: args.r_min,
        r_max: args.r_max,
        steps: args.steps,
        lambda_steps: args.lambda_steps,
        samples: args.samples,
        seed: args.seed,
        out: args.out,
        format: args.format,
    };
    if let Some(key) = flags
        .present_keys()
        .into_iter()
        .find(|k| !scenario.keys().contains(k))
    {
        return Err(usage(format!("--{key} is not used by {scenario}")));
    }

    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read config file {}: {e}", path.display())))?;
            parse_config(&text, path)?.restrict(scenario)
        }
        None => Layer::default(),
    };
    let merged = flags.or(file);

    let p = merged.p.unwrap_or(experiments::DEFAULT_P);
    let (q, gamma) = match scenario {
        Scenario::Theorem1 => (merged.q.unwrap_or(p), merged.gamma.unwrap_or(1.0)),
        _ => (p, 1.0),
    };
    let format = match merged.format {
        Some(f) => f
            .parse()
            .map_err(|msg| usage(format!("invalid value for --format: {msg}")))?,
        None => Format::Csv,
    };
    let cfg = RunConfig {
        scenario,
        p,
        q,
        gamma,
        r_min: merged.r_min.unwrap_or(experiments::DEFAULT_R_MIN),
        r_max: merged.r_max.unwrap_or(experiments::DEFAULT_R_MAX),
        steps: merged.steps.unwrap_or(experiments::DEFAULT_R_STEPS),
        lambda_steps: merged.lambda_steps.unwrap_or(experiments::DEFAULT_LAMBDA_STEPS),
        samples: merged.samples.unwrap_or(experiments::DEFAULT_SAMPLES),
        seed: merged.seed.unwrap_or(experiments::DEFAULT_SEED),
        out: merged.out,
        format,
    };
    validate(&cfg)?;
    Ok(cfg)
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] crate::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// What a run computed, for the one-line summary and the exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub scenario: Scenario,
    pub rows: usize,
    pub max_deviation: f64,
    /// Grid points skipped because of a domain error (sweep only).
    pub skipped: usize,
    /// Every enforced invariant held.
    pub passed: bool,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: rows={} max_deviation={:e} skipped={} status={}",
            self.scenario,
            self.rows,
            self.max_deviation,
            self.skipped,
            if self.passed { "pass" } else { "FAIL" }
        )
    }
}

/// Computes the table for `cfg` without writing it anywhere.
pub fn compute(cfg: &RunConfig) -> Result<(String, RunSummary), RunError> {
    let grid = cfg.r_grid();
    let summary = |rows, max_deviation: f64, skipped, enforced: bool| RunSummary {
        scenario: cfg.scenario,
        rows,
        max_deviation,
        skipped,
        passed: !enforced || max_deviation <= IDENTITY_TOL,
    };
    let scenario_records = match cfg.scenario {
        Scenario::Theorem1 => {
            let report = experiments::run_theorem1(cfg.p, cfg.q, cfg.gamma, cfg.lambda_steps, cfg.samples, cfg.seed)?;
            let table = to_table(&report.rows, cfg.format);
            return Ok((
                table,
                summary(report.rows.len(), report.max_distance, 0, report.in_theorem),
            ));
        }
        Scenario::Sweep => {
            let outcome = experiments::run_general_sweep(&SweepGrid::with_r(grid), &SwitchSetup::case1());
            let dev = max_invariant_deviation(&outcome.records, false);
            let table = to_table(&outcome.records, cfg.format);
            return Ok((table, summary(outcome.records.len(), dev, outcome.failures.len(), true)));
        }
        Scenario::Case1Fixed => experiments::run_case1_fixed_bath(cfg.p, &grid)?,
        Scenario::Case1Varying => experiments::run_case1_varying_bath(cfg.p, &grid)?,
        Scenario::Case2Fixed => experiments::run_case2(cfg.p, &grid, BathMode::Fixed)?,
        Scenario::Case2Varying => experiments::run_case2(cfg.p, &grid, BathMode::Varying)?,
    };
    let mut dev = max_invariant_deviation(&scenario_records, true);
    if cfg.scenario == Scenario::Case1Fixed {
        let excess = scenario_records
            .iter()
            .map(|r| (r.w_switch - r.input_work_bound()).max(0.0))
            .fold(0.0, f64::max);
        dev = dev.max(excess);
    }
    let table = to_table(&scenario_records, cfg.format);
    Ok((table, summary(scenario_records.len(), dev, 0, true)))
}

/// Computes and writes the table (to `cfg.out`, or to `sink` when no output
/// path is set).
pub fn run(cfg: &RunConfig, sink: &mut dyn Write) -> Result<RunSummary, RunError> {
    let (table, summary) = compute(cfg)?;
    match &cfg.out {
        Some(path) => fs::write(path, table).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        })?,
        None => sink.write_all(table.as_bytes()).map_err(|source| RunError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })?,
    }
    Ok(summary)
}
