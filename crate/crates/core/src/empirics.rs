//! Synthetic staggered-adoption panels and two-way fixed-effects estimators.
//!
//! [`generate_panel`] draws a unit × year panel with unit effects, year
//! effects, Gaussian controls and a treatment effect switched on at each
//! treated unit's adoption year. [`twfe_did`] estimates the treated×post
//! coefficient and [`event_study`] its relative-time profile, both absorbing
//! unit and year effects and clustering standard errors by unit.
//!
//! This is the plain TWFE estimator; with heterogeneous effects under
//! staggered timing it is a weighted average that can carry negative weights.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::par::{map_indexed, Execution};

// ---------------------------------------------------------------------------
// panel

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelRow {
    pub unit: u32,
    pub year: i32,
    pub outcome: f64,
    /// `None` for never-treated units.
    pub adoption_year: Option<i32>,
    pub controls: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    rows: Vec<PanelRow>,
    control_names: Vec<String>,
}

impl Panel {
    /// Checks: no duplicate (unit, year), one adoption year per unit, every
    /// row carries one value per control, adoption not before the first year.
    pub fn new(rows: Vec<PanelRow>, control_names: Vec<String>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Design("panel has no rows".into()));
        }
        let first_year = rows.iter().map(|r| r.year).min().unwrap();
        let mut seen = HashSet::new();
        let mut adoption: BTreeMap<u32, Option<i32>> = BTreeMap::new();
        for r in &rows {
            if !seen.insert((r.unit, r.year)) {
                return Err(Error::Design(format!(
                    "duplicate observation for unit {} in {}",
                    r.unit, r.year
                )));
            }
            if r.controls.len() != control_names.len() {
                return Err(Error::Design(format!(
                    "unit {} in {} has {} controls, expected {}",
                    r.unit,
                    r.year,
                    r.controls.len(),
                    control_names.len()
                )));
            }
            if let Some(a) = r.adoption_year {
                if a < first_year {
                    return Err(Error::Design(format!(
                        "unit {} adopts in {a}, before the panel starts in {first_year}",
                        r.unit
                    )));
                }
            }
            if *adoption.entry(r.unit).or_insert(r.adoption_year) != r.adoption_year {
                return Err(Error::Design(format!(
                    "unit {} has inconsistent adoption years",
                    r.unit
                )));
            }
            if !r.outcome.is_finite() || r.controls.iter().any(|x| !x.is_finite()) {
                return Err(Error::Design(format!(
                    "non-finite value for unit {} in {}",
                    r.unit, r.year
                )));
            }
        }
        Ok(Self {
            rows,
            control_names,
        })
    }

    pub fn rows(&self) -> &[PanelRow] {
        &self.rows
    }

    pub fn control_names(&self) -> &[String] {
        &self.control_names
    }

    pub fn units(&self) -> BTreeSet<u32> {
        self.rows.iter().map(|r| r.unit).collect()
    }

    pub fn n_units(&self) -> usize {
        self.units().len()
    }

    pub fn year_span(&self) -> (i32, i32) {
        let lo = self.rows.iter().map(|r| r.year).min().unwrap();
        let hi = self.rows.iter().map(|r| r.year).max().unwrap();
        (lo, hi)
    }

    /// Every unit observed in every year of the span.
    pub fn is_balanced(&self) -> bool {
        let (lo, hi) = self.year_span();
        self.rows.len() == self.n_units() * (hi - lo + 1) as usize
    }

    /// Apply `f` to each row's outcome (used to check fixed-effect
    /// invariances).
    pub fn map_outcome(&self, f: impl Fn(&PanelRow) -> f64) -> Panel {
        let rows = self
            .rows
            .iter()
            .map(|r| PanelRow {
                outcome: f(r),
                ..r.clone()
            })
            .collect();
        Panel {
            rows,
            control_names: self.control_names.clone(),
        }
    }

    /// Rename units through `f`, which must be injective.
    pub fn relabel_units(&self, f: impl Fn(u32) -> u32) -> Result<Panel> {
        let rows = self
            .rows
            .iter()
            .map(|r| PanelRow {
                unit: f(r.unit),
                ..r.clone()
            })
            .collect();
        Panel::new(rows, self.control_names.clone())
    }

    /// Write the panel as `unit,year,outcome,adoption_year,control_1..`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        let mut header = vec![
            "unit".to_string(),
            "year".into(),
            "outcome".into(),
            "adoption_year".into(),
        ];
        header.extend(self.control_names.iter().cloned());
        out.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![
                r.unit.to_string(),
                r.year.to_string(),
                r.outcome.to_string(),
                r.adoption_year.map(|a| a.to_string()).unwrap_or_default(),
            ];
            rec.extend(r.controls.iter().map(|x| x.to_string()));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Panel> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
        let header = rdr.headers()?.clone();
        let fixed = ["unit", "year", "outcome", "adoption_year"];
        if header.len() < fixed.len() || fixed.iter().zip(header.iter()).any(|(a, b)| *a != b) {
            return Err(Error::Usage(format!(
                "panel header must start with {}, got {:?}",
                fixed.join(","),
                header.iter().collect::<Vec<_>>()
            )));
        }
        let control_names: Vec<String> = header.iter().skip(4).map(str::to_string).collect();
        for (i, name) in control_names.iter().enumerate() {
            if *name != format!("control_{}", i + 1) {
                return Err(Error::Usage(format!(
                    "control column {} must be named control_{}, got {name}",
                    i + 5,
                    i + 1
                )));
            }
        }
        let mut rows = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let bad = |field: &str| {
                Error::Usage(format!("row {}: cannot parse {field}", line + 2))
            };
            let num = |i: usize, field: &str| rec[i].parse::<f64>().map_err(|_| bad(field));
            let adoption_year = match &rec[3] {
                "" => None,
                s => Some(s.parse().map_err(|_| bad("adoption_year"))?),
            };
            rows.push(PanelRow {
                unit: rec[0].parse().map_err(|_| bad("unit"))?,
                year: rec[1].parse().map_err(|_| bad("year"))?,
                outcome: num(2, "outcome")?,
                adoption_year,
                controls: (4..rec.len())
                    .map(|i| num(i, &header[i]))
                    .collect::<Result<_>>()?,
            });
        }
        Panel::new(rows, control_names)
    }
}

// ---------------------------------------------------------------------------
// data-generating process

/// Treatment effect by period relative to adoption. `effects[i]` applies at
/// relative period `start + i`; periods past the end keep the last value and
/// periods before `start` get zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicProfile {
    pub start: i32,
    pub effects: Vec<f64>,
}

impl DynamicProfile {
    pub fn effect(&self, rel: i32) -> f64 {
        if rel < self.start || self.effects.is_empty() {
            return 0.0;
        }
        let i = ((rel - self.start) as usize).min(self.effects.len() - 1);
        self.effects[i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DgpConfig {
    pub n_units: usize,
    pub first_year: i32,
    pub n_years: usize,
    /// Fraction of units that are ever treated.
    pub share_treated: f64,
    /// Adoption years are uniform on this inclusive range.
    pub adoption_years: (i32, i32),
    pub unit_effect_sd: f64,
    pub year_effect_sd: f64,
    pub noise_sd: f64,
    /// Homogeneous level shift from the adoption year on; ignored when a
    /// dynamic profile is given.
    pub tau: f64,
    pub dynamic_profile: Option<DynamicProfile>,
    /// One coefficient per control; controls are drawn i.i.d. N(0, 1).
    pub control_coefs: Vec<f64>,
    pub seed: u64,
}

impl Default for DgpConfig {
    /// 216 units over 2000–2022, half treated with adoption in 2005–2018.
    fn default() -> Self {
        Self {
            n_units: 216,
            first_year: 2000,
            n_years: 23,
            share_treated: 0.5,
            adoption_years: (2005, 2018),
            unit_effect_sd: 1.0,
            year_effect_sd: 0.5,
            noise_sd: 0.1,
            tau: 0.05,
            dynamic_profile: None,
            control_coefs: vec![0.3, -0.2],
            seed: 20240101,
        }
    }
}

impl DgpConfig {
    pub fn last_year(&self) -> i32 {
        self.first_year + self.n_years as i32 - 1
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        let mut check = |ok: bool, field: &'static str, value: f64, bound: &str| {
            if !ok {
                v.push(Violation {
                    field,
                    value,
                    bound: bound.to_string(),
                });
            }
        };
        check(self.n_units >= 2, "n_units", self.n_units as f64, ">= 2");
        check(self.n_years >= 2, "n_years", self.n_years as f64, ">= 2");
        check(
            (0.0..=1.0).contains(&self.share_treated),
            "share_treated",
            self.share_treated,
            "in [0, 1]",
        );
        let (a0, a1) = self.adoption_years;
        check(
            a0 >= self.first_year,
            "adoption_years",
            a0 as f64,
            "start >= first_year",
        );
        check(a1 >= a0, "adoption_years", a1 as f64, "end >= start");
        for (field, x) in [
            ("unit_effect_sd", self.unit_effect_sd),
            ("year_effect_sd", self.year_effect_sd),
            ("noise_sd", self.noise_sd),
        ] {
            check(x >= 0.0 && x.is_finite(), field, x, ">= 0");
        }
        check(self.tau.is_finite(), "tau", self.tau, "finite");
        if let Some(p) = &self.dynamic_profile {
            check(!p.effects.is_empty(), "dynamic_profile", 0.0, "nonempty");
            check(
                p.effect(-1) == 0.0,
                "dynamic_profile",
                p.effect(-1),
                "reference period -1 equal to 0",
            );
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Effect on a treated unit at `rel` periods after adoption.
    pub fn treatment_effect(&self, rel: i32) -> f64 {
        match &self.dynamic_profile {
            Some(p) => p.effect(rel),
            None if rel >= 0 => self.tau,
            None => 0.0,
        }
    }

    pub fn control_names(&self) -> Vec<String> {
        (1..=self.control_coefs.len())
            .map(|i| format!("control_{i}"))
            .collect()
    }
}

/// Draw a balanced panel. Replications use independent ChaCha streams of the
/// same seed; stream 0 is the panel returned by [`generate_panel`].
pub fn generate_panel_stream(cfg: &DgpConfig, stream: u64) -> Result<Panel> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let normal = |sd: f64| Normal::new(0.0, sd).expect("sd validated");

    let n_treated = (cfg.share_treated * cfg.n_units as f64).round() as usize;
    let mut adoption = vec![None; cfg.n_units];
    let mut treated = sample(&mut rng, cfg.n_units, n_treated).into_vec();
    treated.sort_unstable();
    for u in treated {
        adoption[u] = Some(rng.random_range(cfg.adoption_years.0..=cfg.adoption_years.1));
    }
    let unit_fx: Vec<f64> = (0..cfg.n_units)
        .map(|_| normal(cfg.unit_effect_sd).sample(&mut rng))
        .collect();
    let year_fx: Vec<f64> = (0..cfg.n_years)
        .map(|_| normal(cfg.year_effect_sd).sample(&mut rng))
        .collect();
    let noise = normal(cfg.noise_sd);

    let mut rows = Vec::with_capacity(cfg.n_units * cfg.n_years);
    for u in 0..cfg.n_units {
        for (t, year_effect) in year_fx.iter().enumerate() {
            let year = cfg.first_year + t as i32;
            let controls: Vec<f64> = cfg
                .control_coefs
                .iter()
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let treatment = adoption[u].map_or(0.0, |a| cfg.treatment_effect(year - a));
            let outcome = unit_fx[u]
                + year_effect
                + controls
                    .iter()
                    .zip(&cfg.control_coefs)
                    .map(|(x, b)| x * b)
                    .sum::<f64>()
                + treatment
                + noise.sample(&mut rng);
            rows.push(PanelRow {
                unit: u as u32,
                year,
                outcome,
                adoption_year: adoption[u],
                controls,
            });
        }
    }
    Panel::new(rows, cfg.control_names())
}

pub fn generate_panel(cfg: &DgpConfig) -> Result<Panel> {
    generate_panel_stream(cfg, 0)
}

/// Run `f` on `reps` independent panels (streams `0..reps`).
pub fn monte_carlo<T, F>(cfg: &DgpConfig, reps: usize, exec: Execution, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Panel) -> Result<T> + Sync + Send,
{
    map_indexed(reps, exec, |r| f(&generate_panel_stream(cfg, r as u64)?))
        .into_iter()
        .collect()
}

// ---------------------------------------------------------------------------
// estimation

/// How unit and year effects are removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Absorption {
    /// Demean by unit, keep year dummies as regressors.
    #[default]
    Within,
    /// Explicit unit and year dummies.
    Dummies,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DidOptions {
    /// Control columns to include; `None` uses all of them.
    pub controls: Option<Vec<String>>,
    pub absorption: Absorption,
    /// Exclude observations in the adoption year itself.
    pub drop_adoption_period: bool,
}

impl Default for DidOptions {
    fn default() -> Self {
        Self {
            controls: None,
            absorption: Absorption::Within,
            drop_adoption_period: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DidResult {
    pub att: f64,
    /// Cluster-robust by unit.
    pub se: f64,
    pub n_obs: usize,
    pub n_clusters: usize,
    /// Number of unit and year effects absorbed.
    pub absorbed_units: usize,
    pub absorbed_years: usize,
    pub controls: Vec<Coefficient>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventStudyResult {
    /// Contiguous relative periods `min lead ..= max lag`.
    pub periods: Vec<i32>,
    /// Coefficient per period; exactly 0 at the reference period −1.
    pub coefficients: Vec<f64>,
    pub se: Vec<f64>,
    pub n_obs: usize,
    pub n_clusters: usize,
}

impl EventStudyResult {
    pub const REFERENCE: i32 = -1;

    pub fn at(&self, period: i32) -> Option<(f64, f64)> {
        let i = self.periods.iter().position(|&p| p == period)?;
        Some((self.coefficients[i], self.se[i]))
    }
}

struct Fit {
    beta: Vec<f64>,
    se: Vec<f64>,
    n_obs: usize,
    n_clusters: usize,
    n_years: usize,
}

fn control_indices(panel: &Panel, wanted: &Option<Vec<String>>) -> Result<Vec<usize>> {
    match wanted {
        None => Ok((0..panel.control_names.len()).collect()),
        Some(names) => names
            .iter()
            .map(|n| {
                panel
                    .control_names
                    .iter()
                    .position(|c| c == n)
                    .ok_or_else(|| Error::Usage(format!("unknown control {n}")))
            })
            .collect(),
    }
}

/// Least squares of `y` on the focal regressors plus unit and year effects,
/// with unit-clustered standard errors for the focal block.
fn fit_twfe(
    rows: &[&PanelRow],
    focal: &[Vec<f64>],
    focal_names: &[String],
    absorption: Absorption,
) -> Result<Fit> {
    let n = rows.len();
    let units: BTreeMap<u32, usize> = rows
        .iter()
        .map(|r| r.unit)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, u)| (u, i))
        .collect();
    let years: BTreeMap<i32, usize> = rows
        .iter()
        .map(|r| r.year)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, y)| (y, i))
        .collect();
    let (g, t) = (units.len(), years.len());
    let p = focal.len();

    let mut names: Vec<String> = focal_names.to_vec();
    let mut cols: Vec<Vec<f64>> = focal.to_vec();
    for (&year, &j) in years.iter().skip(1) {
        names.push(format!("year_{year}"));
        cols.push(rows.iter().map(|r| (years[&r.year] == j) as u8 as f64).collect());
    }
    let mut y: Vec<f64> = rows.iter().map(|r| r.outcome).collect();
    let unit_of: Vec<usize> = rows.iter().map(|r| units[&r.unit]).collect();

    match absorption {
        Absorption::Within => {
            let mut counts = vec![0.0; g];
            for &u in &unit_of {
                counts[u] += 1.0;
            }
            let demean = |v: &mut Vec<f64>| {
                let mut sums = vec![0.0; g];
                for (x, &u) in v.iter().zip(&unit_of) {
                    sums[u] += x;
                }
                for (x, &u) in v.iter_mut().zip(&unit_of) {
                    *x -= sums[u] / counts[u];
                }
            };
            demean(&mut y);
            cols.iter_mut().for_each(demean);
        }
        Absorption::Dummies => {
            for (&unit, &i) in &units {
                names.push(format!("unit_{unit}"));
                cols.push(unit_of.iter().map(|&u| (u == i) as u8 as f64).collect());
            }
        }
    }

    let k_total = p + (t - 1) + g;
    if n <= k_total {
        return Err(Error::Design(format!(
            "{n} observations cannot identify {k_total} parameters"
        )));
    }
    if g < 2 {
        return Err(Error::Design("clustering needs at least two units".into()));
    }

    let ncol = cols.len();
    let x = DMatrix::from_fn(n, ncol, |i, j| cols[j][i]);
    let norms: Vec<f64> = (0..ncol).map(|j| x.column(j).norm()).collect();
    let qr = x.clone().qr();
    let r = qr.r();
    let deficient: Vec<String> = (0..ncol)
        .filter(|&j| !(r[(j, j)].abs() > 1e-9 * norms[j]))
        .map(|j| names[j].clone())
        .collect();
    if !deficient.is_empty() {
        return Err(Error::RankDeficient(deficient));
    }
    let mut qty = DVector::from_vec(y.clone());
    qr.q_tr_mul(&mut qty);
    let beta = r
        .solve_upper_triangular(&qty.rows(0, ncol).into_owned())
        .ok_or_else(|| Error::Degenerate("singular triangular factor".into()))?;
    let resid = DVector::from_vec(y) - &x * &beta;

    // focal rows of (X'X)^{-1} = R^{-1} R^{-T}
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(ncol, ncol))
        .ok_or_else(|| Error::Degenerate("singular triangular factor".into()))?;
    let bread = r_inv.rows(0, p) * r_inv.transpose();
    let mut scores = vec![DVector::<f64>::zeros(ncol); g];
    for i in 0..n {
        let e = resid[i];
        if e != 0.0 {
            scores[unit_of[i]].axpy(e, &x.row(i).transpose(), 1.0);
        }
    }
    let mut meat = DMatrix::<f64>::zeros(p, p);
    for s in &scores {
        let v = &bread * s;
        meat.ger(1.0, &v, &v, 1.0);
    }
    let (gf, nf, kf) = (g as f64, n as f64, k_total as f64);
    let correction = gf / (gf - 1.0) * (nf - 1.0) / (nf - kf);
    let se = (0..p).map(|j| (correction * meat[(j, j)]).max(0.0).sqrt()).collect();

    Ok(Fit {
        beta: beta.iter().take(p).copied().collect(),
        se,
        n_obs: n,
        n_clusters: g,
        n_years: t,
    })
}

fn control_columns(rows: &[&PanelRow], idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter()
        .map(|&c| rows.iter().map(|r| r.controls[c]).collect())
        .collect()
}

/// TWFE difference-in-differences: coefficient on `treated × (year ≥ adoption)`.
pub fn twfe_did(panel: &Panel, opts: &DidOptions) -> Result<DidResult> {
    let ctrl = control_indices(panel, &opts.controls)?;
    let rows: Vec<&PanelRow> = panel
        .rows
        .iter()
        .filter(|r| !(opts.drop_adoption_period && r.adoption_year == Some(r.year)))
        .collect();
    let d: Vec<f64> = rows
        .iter()
        .map(|r| r.adoption_year.is_some_and(|a| r.year >= a) as u8 as f64)
        .collect();
    if !d.contains(&1.0) {
        return Err(Error::Design("no treated post-adoption observations".into()));
    }
    if !d.contains(&0.0) {
        return Err(Error::Design("no untreated comparison observations".into()));
    }
    let mut focal = vec![d];
    focal.extend(control_columns(&rows, &ctrl));
    let mut names = vec!["treated_post".to_string()];
    names.extend(ctrl.iter().map(|&c| panel.control_names[c].clone()));
    let fit = fit_twfe(&rows, &focal, &names, opts.absorption)?;
    Ok(DidResult {
        att: fit.beta[0],
        se: fit.se[0],
        n_obs: fit.n_obs,
        n_clusters: fit.n_clusters,
        absorbed_units: fit.n_clusters,
        absorbed_years: fit.n_years,
        controls: names[1..]
            .iter()
            .enumerate()
            .map(|(i, n)| Coefficient {
                name: n.clone(),
                estimate: fit.beta[i + 1],
                se: fit.se[i + 1],
            })
            .collect(),
    })
}

/// Event-study TWFE with relative-time indicators over `window = (min lead,
/// max lag)`. Periods beyond the window are binned into its endpoints and
/// period −1 is the omitted reference. All observations are kept.
pub fn event_study(
    panel: &Panel,
    opts: &DidOptions,
    window: (i32, i32),
) -> Result<EventStudyResult> {
    let (lo, hi) = window;
    if lo > -2 || hi < 2 {
        return Err(Error::Usage(format!(
            "event window ({lo}, {hi}) must cover periods -2..=2"
        )));
    }
    let ctrl = control_indices(panel, &opts.controls)?;
    let rows: Vec<&PanelRow> = panel.rows.iter().collect();
    if !rows.iter().any(|r| r.adoption_year.is_some()) {
        return Err(Error::Design("no treated units".into()));
    }
    let periods: Vec<i32> = (lo..=hi).collect();
    let estimated: Vec<i32> = periods
        .iter()
        .copied()
        .filter(|&e| e != EventStudyResult::REFERENCE)
        .collect();
    let mut focal: Vec<Vec<f64>> = estimated
        .iter()
        .map(|&e| {
            rows.iter()
                .map(|r| {
                    r.adoption_year
                        .is_some_and(|a| (r.year - a).clamp(lo, hi) == e) as u8 as f64
                })
                .collect()
        })
        .collect();
    focal.extend(control_columns(&rows, &ctrl));
    let mut names: Vec<String> = estimated.iter().map(|e| format!("rel_{e}")).collect();
    names.extend(ctrl.iter().map(|&c| panel.control_names[c].clone()));
    let fit = fit_twfe(&rows, &focal, &names, opts.absorption)?;

    let mut coefficients = Vec::with_capacity(periods.len());
    let mut se = Vec::with_capacity(periods.len());
    let mut k = 0;
    for &e in &periods {
        if e == EventStudyResult::REFERENCE {
            coefficients.push(0.0);
            se.push(0.0);
        } else {
            coefficients.push(fit.beta[k]);
            se.push(fit.se[k]);
            k += 1;
        }
    }
    Ok(EventStudyResult {
        periods,
        coefficients,
        se,
        n_obs: fit.n_obs,
        n_clusters: fit.n_clusters,
    })
}
