//! Run configuration and artifact serialization.
//!
//! Configuration precedence is command-line flags, then the JSON config file,
//! then built-in defaults. Every artifact is written together with metadata
//! naming the tool version, the command and the effective configuration:
//! JSON documents embed it under `meta`, CSV and SVG files get a
//! `<file>.meta.json` sidecar. No timestamps or paths are recorded, so equal
//! inputs give byte-identical files.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::SaddlePathOptions;
use crate::empirics::{DgpConfig, DidOptions};
use crate::error::{Error, Result, Violation};
use crate::model::{ModelParams, SteadyState};
use crate::sweep::{linspace, CellStatus, SweepGrid, Variable};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl AxisSpec {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub theta: AxisSpec,
    pub eta: AxisSpec,
}

impl Default for GridConfig {
    fn default() -> Self {
        let axis = AxisSpec {
            lo: 0.05,
            hi: 0.95,
            n: 50,
        };
        Self {
            theta: axis,
            eta: axis,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdConfig {
    pub thetas: Vec<f64>,
    pub eta_range: (f64, f64),
    pub tol: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            thetas: (1..=9).map(|i| i as f64 / 10.0).collect(),
            eta_range: (0.0, 0.99),
            tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContourConfig {
    pub variable: Variable,
    /// Explicit level; when absent the level is the variable's value at
    /// `reference = (θ, η)`.
    pub level: Option<f64>,
    pub reference: (f64, f64),
}

impl Default for ContourConfig {
    fn default() -> Self {
        Self {
            variable: Variable::CStar,
            level: None,
            reference: (0.5, 0.7),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseConfig {
    /// Capital window; defaults to `[0.02, 2]·k*`.
    pub k_range: Option<(f64, f64)>,
    pub saddle: SaddlePathOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShockConfig {
    pub eta_before: Option<f64>,
    pub eta_after: Option<f64>,
    pub theta_before: Option<f64>,
    pub theta_after: Option<f64>,
}

impl Default for ShockConfig {
    fn default() -> Self {
        Self {
            eta_before: Some(0.1),
            eta_after: Some(0.2),
            theta_before: None,
            theta_after: None,
        }
    }
}

impl ShockConfig {
    /// Parameters before and after; unset entries keep the base values.
    pub fn resolve(&self, base: &ModelParams) -> (ModelParams, ModelParams) {
        let before = base
            .with_eta(self.eta_before.unwrap_or(base.eta))
            .with_theta(self.theta_before.unwrap_or(base.theta));
        let after = base
            .with_eta(self.eta_after.unwrap_or(base.eta))
            .with_theta(self.theta_after.unwrap_or(base.theta));
        (before, after)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DidSimConfig {
    pub dgp: DgpConfig,
    pub options: DidOptions,
    pub event_window: (i32, i32),
    /// Monte-Carlo replications; 1 estimates a single panel.
    pub replications: usize,
}

impl Default for DidSimConfig {
    fn default() -> Self {
        Self {
            dgp: DgpConfig::default(),
            options: DidOptions::default(),
            event_window: (-5, 5),
            replications: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(Error::Usage(format!(
                "unknown format {other:?} (expected csv, json or svg)"
            ))),
        }
    }
}

/// Parse a comma-separated format list such as `csv,json,svg`.
pub fn parse_formats(s: &str) -> Result<Vec<Format>> {
    let mut v = s
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(Format::from_str)
        .collect::<Result<Vec<_>>>()?;
    v.sort();
    v.dedup();
    if v.is_empty() {
        return Err(Error::Usage("empty format list".into()));
    }
    Ok(v)
}

/// Everything a command needs. The output directory is a command-line
/// setting only, so it never appears in artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub params: ModelParams,
    pub grid: GridConfig,
    /// Relative tolerance for trajectory integration.
    pub rtol: f64,
    /// Relative finite-difference step for sensitivity signs.
    pub sensitivity_step: f64,
    pub threshold: ThresholdConfig,
    pub contour: ContourConfig,
    pub phase: PhaseConfig,
    pub shock: ShockConfig,
    pub did: DidSimConfig,
    pub formats: Vec<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::baseline(),
            grid: GridConfig::default(),
            rtol: 1e-10,
            sensitivity_step: 1e-4,
            threshold: ThresholdConfig::default(),
            contour: ContourConfig::default(),
            phase: PhaseConfig::default(),
            shock: ShockConfig::default(),
            did: DidSimConfig::default(),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub eta: Option<f64>,
    pub theta: Option<f64>,
    pub w: Option<f64>,
    pub delta: Option<f64>,
    pub rho: Option<f64>,
    pub sigma: Option<f64>,
    pub a: Option<f64>,
    pub seed: Option<u64>,
    pub formats: Option<Vec<Format>>,
    pub shock: ShockOverrides,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ShockOverrides {
    pub eta_before: Option<f64>,
    pub eta_after: Option<f64>,
    pub theta_before: Option<f64>,
    pub theta_after: Option<f64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn apply(&mut self, o: &Overrides) {
        let p = &mut self.params;
        for (slot, v) in [
            (&mut p.alpha, o.alpha),
            (&mut p.beta, o.beta),
            (&mut p.eta, o.eta),
            (&mut p.theta, o.theta),
            (&mut p.w, o.w),
            (&mut p.delta, o.delta),
            (&mut p.rho, o.rho),
            (&mut p.sigma, o.sigma),
            (&mut p.a, o.a),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if let Some(seed) = o.seed {
            self.did.dgp.seed = seed;
        }
        if let Some(f) = &o.formats {
            self.formats = f.clone();
        }
        let s = &mut self.shock;
        for (slot, v) in [
            (&mut s.eta_before, o.shock.eta_before),
            (&mut s.eta_after, o.shock.eta_after),
            (&mut s.theta_before, o.shock.theta_before),
            (&mut s.theta_after, o.shock.theta_after),
        ] {
            if v.is_some() {
                *slot = v;
            }
        }
    }

    /// Field-level validation of everything that does not depend on the
    /// command.
    pub fn validate(&self) -> Result<()> {
        let mut v = self.params.violations();
        let mut check = |ok: bool, field: &'static str, value: f64, bound: &str| {
            if !ok {
                v.push(Violation {
                    field,
                    value,
                    bound: bound.into(),
                });
            }
        };
        check(
            (1e-12..=1e-3).contains(&self.rtol),
            "rtol",
            self.rtol,
            "in [1e-12, 1e-3]",
        );
        check(
            self.sensitivity_step > 0.0 && self.sensitivity_step < 0.1,
            "sensitivity_step",
            self.sensitivity_step,
            "in (0, 0.1)",
        );
        check(self.threshold.tol > 0.0, "threshold.tol", self.threshold.tol, "> 0");
        for (field, axis) in [("grid.theta", self.grid.theta), ("grid.eta", self.grid.eta)] {
            check(axis.n >= 1, field, axis.n as f64, "n >= 1");
            check(
                axis.lo >= 0.0 && axis.hi < 1.0 && (axis.hi > axis.lo || axis.n == 1),
                field,
                axis.lo,
                "0 <= lo < hi < 1",
            );
        }
        check(
            self.did.replications >= 1,
            "did.replications",
            self.did.replications as f64,
            ">= 1",
        );
        if !v.is_empty() {
            return Err(Error::Validation(v));
        }
        self.did.dgp.validate()
    }
}

/// Load the effective configuration: defaults, then `path`, then overrides.
pub fn parse_config(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| {
                Error::Usage(format!("cannot read config {}: {e}", p.display()))
            })?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    cfg.apply(overrides);
    cfg.validate()?;
    Ok(cfg)
}

// ---------------------------------------------------------------------------
// artifacts

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
}

impl Meta {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            config: config.clone(),
        }
    }
}

#[derive(Serialize)]
struct Document<'a, T> {
    meta: &'a Meta,
    data: &'a T,
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes artifacts into one directory and remembers what it wrote.
pub struct ArtifactWriter {
    dir: PathBuf,
    meta: Meta,
    written: Vec<PathBuf>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path, meta: Meta) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            meta,
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.written.push(path);
        Ok(())
    }

    fn sidecar(&mut self, name: &str) -> Result<()> {
        let text = to_json_string(&self.meta)?;
        self.put(&format!("{name}.meta.json"), text.as_bytes())
    }

    /// The effective configuration, without a metadata wrapper.
    pub fn echo_config(&mut self) -> Result<()> {
        let text = to_json_string(&self.meta.config)?;
        self.put("config.json", text.as_bytes())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, data: &T) -> Result<()> {
        let text = to_json_string(&Document {
            meta: &self.meta,
            data,
        })?;
        self.put(name, text.as_bytes())
    }

    /// `fill` writes the CSV body into the provided buffer.
    pub fn csv(&mut self, name: &str, fill: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        self.put(name, &buf)?;
        self.sidecar(name)
    }

    pub fn svg(&mut self, name: &str, doc: &str) -> Result<()> {
        self.put(name, doc.as_bytes())?;
        self.sidecar(name)
    }
}

pub fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    x.to_string()
}

/// Write a table with a header and rows of already formatted fields.
pub fn write_table<W: Write>(w: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(&r)?;
    }
    out.flush()?;
    Ok(())
}

pub const SWEEP_HEADER: [&str; 8] = [
    "theta", "eta", "status", "k_star", "c_star", "l_star", "y_star", "r_star",
];

/// One row per cell in storage order; steady-state columns are empty for
/// masked cells.
pub fn write_sweep_csv<W: Write>(grid: &SweepGrid, w: W) -> Result<()> {
    let (nt, ne) = grid.shape();
    let rows = (0..nt).flat_map(|i| (0..ne).map(move |j| (i, j))).map(|(i, j)| {
        let mut rec = vec![
            num(grid.theta_axis[i]),
            num(grid.eta_axis[j]),
            grid.status(i, j).as_str().to_string(),
        ];
        match grid.cell(i, j) {
            Some(s) => rec.extend([s.k_star, s.c_star, s.l_star, s.y_star, s.r_star].map(num)),
            None => rec.extend(std::iter::repeat_n(String::new(), 5)),
        }
        rec
    });
    write_table(w, &SWEEP_HEADER, rows)
}

/// Inverse of [`write_sweep_csv`]; `base` supplies the non-swept parameters.
pub fn read_sweep_csv<R: Read>(r: R, base: &ModelParams) -> Result<SweepGrid> {
    let mut rdr = csv::Reader::from_reader(r);
    if rdr.headers()?.iter().ne(SWEEP_HEADER) {
        return Err(Error::Usage(format!(
            "sweep header must be {}",
            SWEEP_HEADER.join(",")
        )));
    }
    let mut theta_axis: Vec<f64> = Vec::new();
    let mut eta_axis: Vec<f64> = Vec::new();
    let mut cells = Vec::new();
    let mut mask = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::Usage(format!("row {}: cannot parse {what}", line + 2));
        let f = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(SWEEP_HEADER[i]));
        let (theta, eta) = (f(0)?, f(1)?);
        if theta_axis.last() != Some(&theta) {
            theta_axis.push(theta);
        }
        if theta_axis.len() == 1 {
            eta_axis.push(eta);
        }
        let status = CellStatus::parse(&rec[2]).ok_or_else(|| bad("status"))?;
        mask.push(status);
        cells.push(if status == CellStatus::Ok {
            Some(SteadyState {
                k_star: f(3)?,
                c_star: f(4)?,
                l_star: f(5)?,
                y_star: f(6)?,
                r_star: f(7)?,
                feasible: true,
            })
        } else {
            None
        });
    }
    let grid = SweepGrid {
        base: *base,
        theta_axis,
        eta_axis,
        cells,
        mask,
    };
    let (nt, ne) = grid.shape();
    let consistent = nt * ne == grid.mask.len()
        && grid.theta_axis.windows(2).all(|w| w[1] > w[0])
        && grid.eta_axis.windows(2).all(|w| w[1] > w[0]);
    if !consistent {
        return Err(Error::Usage("sweep rows do not form a θ-major lattice".into()));
    }
    Ok(grid)
}
