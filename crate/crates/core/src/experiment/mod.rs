//! Named, reproducible experiments driven by TOML configs.
//!
//! A run produces an [`ExperimentReport`] with one pass/fail [`Check`] per
//! property, the measured values and the tables used by `plotdata`.

mod runs;

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::NamedBuilder;
use crate::expr::{parse, Expr};
use crate::sampling::GridSpec;

/// Overrides the output directory of `run`.
pub const OUT_DIR_ENV: &str = "MERODIFF_OUT_DIR";
/// Worker threads for the global pool.
pub const THREADS_ENV: &str = "MERODIFF_THREADS";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("cannot read report {path}: {reason}")]
    UnknownReport { path: PathBuf, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A function given by a named builder or by its text form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionEntry {
    Named(NamedBuilder),
    Text {
        text: String,
    },
}

impl FunctionEntry {
    pub fn build(&self) -> Result<Expr, String> {
        match self {
            FunctionEntry::Named(b) => b.build(),
            FunctionEntry::Text { text: src } => parse(src).map_err(|e| e.to_string()),
        }
    }
}

/// Experiment-specific knobs; each experiment reads the ones it uses and
/// falls back to its defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub samples: Option<usize>,
    pub cases: Option<usize>,
    pub orders: Option<Vec<u32>>,
    pub n_seq: Option<Vec<u64>>,
    pub ratio_floor: Option<f64>,
    pub c_max: Option<f64>,
    pub h: Option<f64>,
    pub order: Option<f64>,
    pub gamma: Option<f64>,
    pub big_m: Option<f64>,
    pub rho: Option<f64>,
    pub tau: Option<f64>,
    pub radii: Option<Vec<f64>>,
    pub max_window: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub relative: Option<f64>,
    pub top_decile: Option<f64>,
    pub final_value: Option<f64>,
    pub slack: Option<f64>,
    pub order_range: Option<(f64, f64)>,
    pub ratio: Option<f64>,
    pub fraction: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default)]
    pub seed: u64,
    /// Bits for extended-precision stages; `53` keeps plain doubles where
    /// an experiment allows it.
    pub precision_bits: Option<usize>,
    pub function: Option<FunctionEntry>,
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    /// A config with every field at its default.
    pub fn new(id: &str) -> Self {
        ExperimentConfig {
            experiment: id.to_string(),
            seed: 0,
            precision_bits: None,
            function: None,
            grid: None,
            params: Params::default(),
            tolerances: Tolerances::default(),
            output: OutputSpec::default(),
        }
    }

    pub fn from_toml(src: &str) -> Result<Self, ExperimentError> {
        let cfg: ExperimentConfig = toml::from_str(src).map_err(|e| ExperimentError::Config(e.to_string()))?;
        if find(&cfg.experiment).is_none() {
            return Err(ExperimentError::UnknownExperiment(cfg.experiment));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        Self::from_toml(&fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub value: Option<f64>,
}

/// A numeric table with a header row.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, w: impl io::Write) -> Result<(), ExperimentError> {
        let mut out = csv::Writer::from_writer(w);
        let err = |e: csv::Error| ExperimentError::Io(e.into());
        out.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|x| x.to_string())).map_err(err)?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub seed: u64,
    pub precision_bits: usize,
    pub grid: Option<Vec<f64>>,
    pub version: String,
    /// Seconds since the Unix epoch; ignored by [`ExperimentReport::canonical_json`].
    pub timestamp: u64,
    /// Ignored by [`ExperimentReport::canonical_json`].
    pub runtime_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub description: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub measured: BTreeMap<String, serde_json::Value>,
    pub tables: BTreeMap<String, Table>,
    pub metadata: Metadata,
}

impl ExperimentReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String, ExperimentError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The JSON form with the timestamp and runtime zeroed; equal configs
    /// give equal strings.
    pub fn canonical_json(&self) -> Result<String, ExperimentError> {
        let mut r = self.clone();
        r.metadata.timestamp = 0;
        r.metadata.runtime_seconds = 0.0;
        r.to_json()
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let unknown = |reason: String| ExperimentError::UnknownReport {
            path: path.to_path_buf(),
            reason,
        };
        let src = fs::read_to_string(path).map_err(|e| unknown(e.to_string()))?;
        serde_json::from_str(&src).map_err(|e| unknown(e.to_string()))
    }
}

pub struct CatalogueEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub(crate) run: fn(&runs::Ctx) -> runs::Outcome,
}

pub fn catalogue() -> &'static [CatalogueEntry] {
    runs::CATALOGUE
}

pub fn find(id: &str) -> Option<&'static CatalogueEntry> {
    catalogue().iter().find(|e| e.id == id)
}

/// `(id, description)` for every experiment.
pub fn list_experiments() -> Vec<(&'static str, &'static str)> {
    catalogue().iter().map(|e| (e.id, e.description)).collect()
}

/// Runs one experiment. Module failures become failed checks; only config
/// problems are errors.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let entry = find(&cfg.experiment).ok_or_else(|| ExperimentError::UnknownExperiment(cfg.experiment.clone()))?;
    let start = Instant::now();
    let ctx = runs::Ctx::new(cfg)?;
    let out = (entry.run)(&ctx);
    let passed = !out.checks.is_empty() && out.checks.iter().all(|c| c.passed);
    Ok(ExperimentReport {
        experiment: cfg.experiment.clone(),
        description: entry.description.to_string(),
        passed,
        checks: out.checks,
        measured: out.measured,
        tables: out.tables,
        metadata: Metadata {
            seed: cfg.seed,
            precision_bits: ctx.default_bits(),
            grid: out.grid,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            runtime_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

/// Output directory: the environment override, then the config, then `out`.
pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Writes `<dir>/<id>.json` and the plot tables; returns the written paths.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.json", report.experiment));
    fs::write(&path, report.to_json()?)?;
    let mut paths = vec![path];
    paths.extend(emit_plotdata(report, dir)?);
    Ok(paths)
}

/// One CSV per table, named `<id>-<table>.csv`.
pub fn emit_plotdata(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (name, table) in &report.tables {
        let path = dir.join(format!("{}-{}.csv", report.experiment, name));
        table.write_csv(fs::File::create(&path)?)?;
        paths.push(path);
    }
    Ok(paths)
}
