//! Scenario runner: JSON configs, parameter scans, run records and file manifests.

pub mod data;
pub mod registry;
pub mod scenarios;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::dynamics::EvolveOptions;
use crate::error::Error;
use crate::fields::GridSpec;

pub use data::{random_bump_pair, BumpClass};
pub use registry::{Registry, REGISTRY_FILE};

pub const SCHEMA_VERSION: u32 = 1;
pub const WORKERS_ENV: &str = "MRNLS_WORKERS";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    GroundState,
    ThresholdScan,
    GalileanTest,
    VirialCheck,
    Morawetz,
    LtsMonitor,
    ProfileRecovery,
    InequalityAudit,
}

impl ScenarioKind {
    pub fn randomized(self) -> bool {
        matches!(self, Self::ProfileRecovery | Self::InequalityAudit | Self::Morawetz)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::GroundState => "ground_state",
            Self::ThresholdScan => "threshold_scan",
            Self::GalileanTest => "galilean_test",
            Self::VirialCheck => "virial_check",
            Self::Morawetz => "morawetz",
            Self::LtsMonitor => "lts_monitor",
            Self::ProfileRecovery => "profile_recovery",
            Self::InequalityAudit => "inequality_audit",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub scenario: ScenarioKind,
    pub kappa: f64,
    pub grid: GridSpec,
    #[serde(default)]
    pub evolve: EvolveOptions,
    #[serde(default)]
    pub seed: Option<u64>,
    /// output directory, relative to the output root
    #[serde(default)]
    pub output: Option<String>,
    /// scenario-specific parameters; unknown keys are rejected per scenario
    #[serde(default)]
    pub params: Value,
}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config: {0}")]
    Config(String),
    #[error("numerical guard: {0}")]
    Numeric(String),
    #[error("io: {0}")]
    Io(String),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Numeric(_) => EXIT_NUMERIC,
            Self::Io(_) => EXIT_FAIL,
        }
    }
}

impl From<Error> for LabError {
    fn from(e: Error) -> Self {
        match e {
            Error::Numeric(_) | Error::NoConvergence { .. } | Error::Budget(_) => Self::Numeric(e.to_string()),
            Error::Io(e) => Self::Io(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let v: Value = serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        Self::from_value(v)
    }

    pub fn from_value(v: Value) -> Result<Self, LabError> {
        let cfg: Self = serde_json::from_value(v).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), LabError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(LabError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(LabError::Config(format!("kappa must be positive, got {}", self.kappa)));
        }
        if self.scenario.randomized() && self.seed.is_none() {
            return Err(LabError::Config(format!("scenario {} needs a seed", self.scenario.name())));
        }
        self.grid.build()?;
        scenarios::check_params(self)?;
        Ok(())
    }

    pub fn hash(&self) -> String {
        hex_digest(&serde_json::to_vec(self).expect("config serializes"))
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    /// counts toward the exit code
    Assertion,
    /// recorded only
    Expectation,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerdictLine {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    /// the rule the value was held to, e.g. "<= 1e-3"
    pub rule: String,
    pub kind: VerdictKind,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl VerdictLine {
    pub fn le(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::assert(name, value <= bound, value, format!("<= {bound:e}"))
    }

    pub fn ge(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::assert(name, value >= bound, value, format!(">= {bound:e}"))
    }

    pub fn assert(name: impl Into<String>, pass: bool, value: f64, rule: impl Into<String>) -> Self {
        Self { name: name.into(), pass, value, rule: rule.into(), kind: VerdictKind::Assertion, note: String::new() }
    }

    pub fn expect(name: impl Into<String>, pass: bool, value: f64, rule: impl Into<String>) -> Self {
        Self { kind: VerdictKind::Expectation, ..Self::assert(name, pass, value, rule) }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub scenario: ScenarioKind,
    pub config_hash: String,
    pub code_version: String,
    pub wall_time_s: f64,
    pub passed: bool,
    pub verdicts: Vec<VerdictLine>,
    /// headline values, merged into scan tables
    pub summary: BTreeMap<String, String>,
    pub notes: Vec<String>,
    pub files: Vec<ManifestEntry>,
}

impl RunRecord {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

/// File sink for one run; every file written through it enters the manifest.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<ManifestEntry>,
}

impl Outputs {
    pub fn new(dir: PathBuf) -> Result<Self, LabError> {
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir, files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), LabError> {
        std::fs::write(self.dir.join(name), bytes)?;
        self.files.retain(|f| f.path != name);
        self.files.push(ManifestEntry { path: name.to_string(), bytes: bytes.len() as u64, sha256: hex_digest(bytes) });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, v: &T) -> Result<(), LabError> {
        let bytes = serde_json::to_vec_pretty(v).map_err(|e| LabError::Io(e.to_string()))?;
        self.write(name, &bytes)
    }
}

/// What a scenario hands back to the runner.
#[derive(Default)]
pub struct ScenarioResult {
    pub verdicts: Vec<VerdictLine>,
    pub summary: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

pub fn output_dir(cfg: &ScenarioConfig, root: &Path) -> PathBuf {
    root.join(cfg.output.clone().unwrap_or_else(|| cfg.scenario.name().to_string()))
}

/// Executes one scenario and writes `run.json` next to its outputs. A numerical
/// guard trip writes `diagnostic.json` before the error is returned.
pub fn run(cfg: &ScenarioConfig, root: &Path) -> Result<RunRecord, LabError> {
    cfg.validate()?;
    let start = Instant::now();
    let mut out = Outputs::new(output_dir(cfg, root))?;
    out.write_json("config.json", cfg)?;
    let res = match scenarios::execute(cfg, root, &mut out) {
        Ok(r) => r,
        Err(e) => {
            if let LabError::Numeric(msg) = &e {
                let diag = serde_json::json!({ "scenario": cfg.scenario, "config_hash": cfg.hash(), "error": msg });
                out.write_json("diagnostic.json", &diag)?;
            }
            return Err(e);
        }
    };
    let passed = res.verdicts.iter().filter(|v| v.kind == VerdictKind::Assertion).all(|v| v.pass);
    let mut record = RunRecord {
        schema_version: SCHEMA_VERSION,
        scenario: cfg.scenario,
        config_hash: cfg.hash(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
        passed,
        verdicts: res.verdicts,
        summary: res.summary,
        notes: res.notes,
        files: Vec::new(),
    };
    record.files = out.files.clone();
    out.write_json("run.json", &record)?;
    Ok(record)
}

/// Worker budget from the environment, defaulting to the rayon pool size.
pub fn workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

/// Sets a dotted path (`params.c_values`, `grid.n`, `kappa`) in a JSON config.
/// An array target is replaced by a one-element array. Integral values are
/// written as JSON integers.
pub fn set_path(cfg: &mut Value, path: &str, value: f64) -> Result<(), LabError> {
    let num = if value.fract() == 0.0 && value.abs() < 9e15 {
        Value::from(value as i64)
    } else {
        serde_json::Number::from_f64(value).map(Value::Number).ok_or_else(|| LabError::Config(format!("{value} is not a finite number")))?
    };
    let mut cur = cfg;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, p) in parts.iter().enumerate() {
        let obj = cur.as_object_mut().ok_or_else(|| LabError::Config(format!("axis {path}: {p} is not inside an object")))?;
        if i + 1 == parts.len() {
            let slot = obj.entry(p.to_string()).or_insert(Value::Null);
            match slot {
                Value::Array(_) => *slot = Value::Array(vec![num]),
                Value::Number(_) | Value::Null => *slot = num,
                _ => return Err(LabError::Config(format!("axis {path} does not name a numeric field"))),
            }
            return Ok(());
        }
        cur = obj.entry(p.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Err(LabError::Config("empty axis".into()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanRow {
    pub index: usize,
    pub value: f64,
    pub exit_code: i32,
    pub passed: bool,
    pub failed: Vec<String>,
    pub summary: BTreeMap<String, String>,
    pub error: Option<String>,
}

/// One run per axis value, each in its own output directory `<output>/<axis>_<index>`,
/// executed on a pool of [`workers`] threads. Failed rows are marked and the
/// scan continues. Writes `scan.csv` under the template's output directory.
pub fn scan(template: &Value, axis: &str, values: &[f64], root: &Path) -> Result<Vec<ScanRow>, LabError> {
    if values.is_empty() {
        return Err(LabError::Config("scan needs at least one value".into()));
    }
    let base = ScenarioConfig::from_value(template.clone())?;
    let base_dir = output_dir(&base, root);
    let tag = axis.replace('.', "_");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers().min(values.len()))
        .build()
        .map_err(|e| LabError::Io(e.to_string()))?;
    let rows: Vec<ScanRow> = pool.install(|| {
        values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| {
                let row = |exit_code, passed, failed, summary, error| ScanRow { index: i, value: v, exit_code, passed, failed, summary, error };
                let mut cfg = template.clone();
                let parsed = set_path(&mut cfg, axis, v).and_then(|_| {
                    let rel = Path::new(base.output.as_deref().unwrap_or(base.scenario.name())).join(format!("{tag}_{i}"));
                    cfg["output"] = Value::String(rel.to_string_lossy().into_owned());
                    ScenarioConfig::from_value(cfg)
                });
                match parsed.and_then(|c| run(&c, root)) {
                    Ok(r) => {
                        let failed = r
                            .verdicts
                            .iter()
                            .filter(|x| x.kind == VerdictKind::Assertion && !x.pass)
                            .map(|x| x.name.clone())
                            .collect();
                        row(r.exit_code(), r.passed, failed, r.summary, None)
                    }
                    Err(e) => row(e.exit_code(), false, Vec::new(), BTreeMap::new(), Some(e.to_string())),
                }
            })
            .collect()
    });
    std::fs::create_dir_all(&base_dir)?;
    std::fs::write(base_dir.join("scan.csv"), scan_csv(axis, &rows))?;
    Ok(rows)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn scan_csv(axis: &str, rows: &[ScanRow]) -> String {
    let mut keys: Vec<&String> = rows.iter().flat_map(|r| r.summary.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut s = format!("index,{},exit_code,passed,failed", csv_field(axis));
    for k in &keys {
        s.push(',');
        s.push_str(&csv_field(k));
    }
    s.push_str(",error\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{},{}", r.index, r.value, r.exit_code, r.passed, csv_field(&r.failed.join(";"))));
        for k in &keys {
            s.push(',');
            s.push_str(&csv_field(r.summary.get(*k).map(String::as_str).unwrap_or("")));
        }
        s.push(',');
        s.push_str(&csv_field(r.error.as_deref().unwrap_or("")));
        s.push('\n');
    }
    s
}
