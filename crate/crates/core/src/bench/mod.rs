//! Experiment harness: set generators, acceptance suites and reports.
//!
//! Exit codes are a stable contract: 0 when every assertion passes, 1 when an
//! assertion fails, 2 for usage or configuration errors. Logged-only metrics
//! never affect the exit code.

mod gen;
mod suites;

pub use gen::{gen_set, gen_set_str, Generator};
pub use suites::{check_certificate, standard_corpus};

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::group::GroupSpec;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker pool.
pub const THREADS_VAR: &str = "BOURGAINLAB_THREADS";

/// Exit code for an error: usage and configuration problems map to 2,
/// everything else to 1.
pub fn exit_code_for(e: &Error) -> i32 {
    match e.root() {
        Error::GroupSpec(_)
        | Error::ElementMismatch(..)
        | Error::SpecMismatch(..)
        | Error::InvalidArgument(_)
        | Error::Parse(_)
        | Error::Io { .. }
        | Error::Json(_)
        | Error::Csv(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

/// Sizes the global pool from [`THREADS_VAR`]. Only the first call has an
/// effect.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::InvalidArgument(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    Harmonic,
    Systems,
    Spectrum,
    Roth,
    Longaps,
    All,
}

impl SuiteName {
    pub const ALL: [SuiteName; 5] = [
        SuiteName::Harmonic,
        SuiteName::Systems,
        SuiteName::Spectrum,
        SuiteName::Roth,
        SuiteName::Longaps,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Harmonic => "harmonic",
            SuiteName::Systems => "systems",
            SuiteName::Spectrum => "spectrum",
            SuiteName::Roth => "roth",
            SuiteName::Longaps => "longaps",
            SuiteName::All => "all",
        }
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "harmonic" => SuiteName::Harmonic,
            "systems" => SuiteName::Systems,
            "spectrum" => SuiteName::Spectrum,
            "roth" => SuiteName::Roth,
            "longaps" => SuiteName::Longaps,
            "all" => SuiteName::All,
            _ => return Err(Error::Parse(format!("unknown suite `{s}`"))),
        })
    }
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub group: String,
    /// Generator string such as `random(0.3)`.
    pub set: Option<String>,
    /// Suite name or command.
    pub operation: String,
    /// Free-form parameters, e.g. `trials`, `eta`, `nu`.
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub output: Option<String>,
    pub constants: Constants,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            group: "Z1009".into(),
            set: None,
            operation: "all".into(),
            params: BTreeMap::new(),
            seed: 42,
            output: None,
            constants: Constants::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn spec(&self) -> Result<GroupSpec> {
        self.group.parse()
    }

    /// Parsed parameter, or `default` when absent.
    pub fn param<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("parameter {key} = `{v}` does not parse"))),
        }
    }

    /// Applies `key=value` overrides to the constants.
    pub fn override_constant(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected KEY=VALUE, got `{assignment}`")))?;
        let mut obj = serde_json::to_value(&self.constants)?;
        let slot = obj
            .get_mut(key.trim())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown constant `{key}`")))?;
        let parsed: Value = serde_json::from_str(value.trim())
            .map_err(|_| Error::Parse(format!("bad value for {key}: `{value}`")))?;
        *slot = parsed;
        self.constants = serde_json::from_value(obj)
            .map_err(|e| Error::InvalidArgument(format!("bad value for {key}: {e}")))?;
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        self.spec()?;
        let c = &self.constants;
        let tunables = [c.c_ann, c.c_step];
        if tunables.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
            return Err(Error::InvalidArgument("tunable constants must lie in (0, 1]".into()));
        }
        if !(c.c0 > 0.0 && c.c1 > 0.0 && c.c_chang > 0.0 && c.c_ctl > 0.0) {
            return Err(Error::InvalidArgument("constants must be positive".into()));
        }
        if c.regularity_points < 3 || c.regularity_points % 2 == 0 || c.lambda_points == 0 {
            return Err(Error::InvalidArgument("grid sizes must be odd >= 3 and >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Logged,
}

/// One recorded outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub status: Status,
    pub detail: Value,
}

/// One row of the empirical-constant ledger.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub suite: String,
    pub entry: String,
    pub metric: String,
    pub value: f64,
    pub bound: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub logged: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    pub ledger: Vec<LedgerRow>,
    pub summary: Summary,
    pub exit_code: i32,
    /// The only field allowed to differ between identical runs.
    pub wall_time_ms: f64,
}

impl Report {
    pub fn new(config: ExperimentConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            checks: Vec::new(),
            ledger: Vec::new(),
            summary: Summary::default(),
            exit_code: EXIT_PASS,
            wall_time_ms: 0.0,
        }
    }

    fn absorb(&mut self, rec: Recorder) {
        self.checks.extend(rec.checks);
        self.ledger.extend(rec.ledger);
    }

    fn finish(&mut self) {
        let count = |s| self.checks.iter().filter(|c| c.status == s).count();
        self.summary = Summary {
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            logged: count(Status::Logged),
        };
        self.exit_code = if self.summary.failed == 0 { EXIT_PASS } else { EXIT_FAIL };
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// JSON with the wall-time field zeroed, for reproducibility checks.
    pub fn to_json_untimed(&self) -> String {
        let mut r = self.clone();
        r.wall_time_ms = 0.0;
        r.to_json()
    }

    /// The ledger as CSV with a header row.
    pub fn ledger_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["suite", "entry", "metric", "value", "bound"])?;
        for row in &self.ledger {
            w.write_record([
                row.suite.clone(),
                row.entry.clone(),
                row.metric.clone(),
                row.value.to_string(),
                row.bound.map(|b| b.to_string()).unwrap_or_default(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Critical(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Parse(format!("unknown format `{s}`"))),
        }
    }
}

pub fn emit_report(report: &Report, format: Format, path: &Path) -> Result<()> {
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.ledger_csv()?,
    };
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Collects checks and ledger rows for one suite or corpus entry.
#[derive(Debug, Default)]
pub(crate) struct Recorder {
    suite: String,
    checks: Vec<Check>,
    ledger: Vec<LedgerRow>,
}

impl Recorder {
    pub(crate) fn new(suite: &str) -> Self {
        Self {
            suite: suite.into(),
            ..Default::default()
        }
    }

    fn push(&mut self, name: &str, status: Status, detail: Value) {
        self.checks.push(Check {
            suite: self.suite.clone(),
            name: name.into(),
            status,
            detail,
        });
    }

    pub(crate) fn check(&mut self, name: &str, ok: bool, detail: Value) {
        self.push(name, if ok { Status::Pass } else { Status::Fail }, detail);
    }

    pub(crate) fn log(&mut self, name: &str, detail: Value) {
        self.push(name, Status::Logged, detail);
    }

    pub(crate) fn fail(&mut self, name: &str, e: &Error) {
        self.push(name, Status::Fail, serde_json::json!({ "error": e.to_string() }));
    }

    pub(crate) fn ledger(&mut self, entry: &str, metric: &str, value: f64, bound: Option<f64>) {
        self.ledger.push(LedgerRow {
            suite: self.suite.clone(),
            entry: entry.into(),
            metric: metric.into(),
            value,
            bound,
        });
    }

    pub(crate) fn merge(&mut self, other: Recorder) {
        self.checks.extend(other.checks);
        self.ledger.extend(other.ledger);
    }
}

/// Runs `f` over `items` on the pool and merges the recorders in input order.
pub(crate) fn par_entries<T: Sync>(
    rec: &mut Recorder,
    items: &[T],
    f: impl Fn(&mut Recorder, &T) + Sync,
) {
    let suite = rec.suite.clone();
    let parts: Vec<Recorder> = items
        .par_iter()
        .map(|item| {
            let mut r = Recorder::new(&suite);
            f(&mut r, item);
            r
        })
        .collect();
    for p in parts {
        rec.merge(p);
    }
}

/// Runs one suite (or all of them) and returns the report; the exit code is
/// stored in [`Report::exit_code`]. Configuration errors are returned as `Err`.
pub fn run_suite(name: SuiteName, config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let start = Instant::now();
    let mut report = Report::new(config.clone());
    let names: Vec<SuiteName> = if name == SuiteName::All {
        SuiteName::ALL.to_vec()
    } else {
        vec![name]
    };
    for n in names {
        let rec = suites::run(n, config)?;
        report.absorb(rec);
    }
    report.finish();
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}
