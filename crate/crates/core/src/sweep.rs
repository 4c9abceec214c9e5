//! (θ, η) parameter sweeps: equilibrium surfaces, the consumption-maximising
//! η per θ, iso-equilibrium contours and local comparative-statics signs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, SteadyState};
use crate::par::{map_indexed, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    Ok,
    Singular,
    Infeasible,
    Degenerate,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::Singular => "singular",
            CellStatus::Infeasible => "infeasible",
            CellStatus::Degenerate => "degenerate",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ok" => CellStatus::Ok,
            "singular" => CellStatus::Singular,
            "infeasible" => CellStatus::Infeasible,
            "degenerate" => CellStatus::Degenerate,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    KStar,
    CStar,
}

impl Variable {
    pub fn of(self, ss: &SteadyState) -> f64 {
        match self {
            Variable::KStar => ss.k_star,
            Variable::CStar => ss.c_star,
        }
    }
}

/// Steady states on a θ × η lattice. Cells are stored θ-major:
/// `index = i·|eta_axis| + j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub base: ModelParams,
    pub theta_axis: Vec<f64>,
    pub eta_axis: Vec<f64>,
    /// `None` wherever the mask is not `Ok`.
    pub cells: Vec<Option<SteadyState>>,
    pub mask: Vec<CellStatus>,
}

impl SweepGrid {
    pub fn shape(&self) -> (usize, usize) {
        (self.theta_axis.len(), self.eta_axis.len())
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.eta_axis.len() + j
    }

    pub fn cell(&self, i: usize, j: usize) -> Option<&SteadyState> {
        self.cells[self.index(i, j)].as_ref()
    }

    pub fn status(&self, i: usize, j: usize) -> CellStatus {
        self.mask[self.index(i, j)]
    }

    pub fn value(&self, i: usize, j: usize, var: Variable) -> Option<f64> {
        self.cell(i, j).map(|s| var.of(s))
    }

    pub fn count(&self, status: CellStatus) -> usize {
        self.mask.iter().filter(|&&m| m == status).count()
    }
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// The 50 × 50 lattice over `[0.05, 0.95]²`.
pub fn default_axes() -> (Vec<f64>, Vec<f64>) {
    (linspace(0.05, 0.95, 50), linspace(0.05, 0.95, 50))
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::Domain(format!("{name} axis is empty")));
    }
    if let Some(x) = axis.iter().find(|x| !(**x >= 0.0 && **x < 1.0)) {
        return Err(Error::Domain(format!("{name} axis value {x} outside [0, 1)")));
    }
    if axis.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(format!(
            "{name} axis must be strictly increasing"
        )));
    }
    Ok(())
}

/// Steady state of one (θ, η) cell with its mask status.
pub fn evaluate_cell(base: &ModelParams, theta: f64, eta: f64) -> (CellStatus, Option<SteadyState>) {
    let p = base.with_theta(theta).with_eta(eta);
    let Ok(m) = p.validate() else {
        return (CellStatus::Degenerate, None);
    };
    if m.regime().singular {
        return (CellStatus::Singular, None);
    }
    match m.steady_state() {
        Ok(ss) if ss.feasible => (CellStatus::Ok, Some(ss)),
        Ok(_) => (CellStatus::Infeasible, None),
        Err(_) => (CellStatus::Degenerate, None),
    }
}

pub fn grid_sweep(base: &ModelParams, theta_axis: &[f64], eta_axis: &[f64]) -> Result<SweepGrid> {
    grid_sweep_with(base, theta_axis, eta_axis, Execution::default())
}

pub fn grid_sweep_with(
    base: &ModelParams,
    theta_axis: &[f64],
    eta_axis: &[f64],
    exec: Execution,
) -> Result<SweepGrid> {
    check_axis("theta", theta_axis)?;
    check_axis("eta", eta_axis)?;
    base.validate()?;
    let ne = eta_axis.len();
    let results = map_indexed(theta_axis.len() * ne, exec, |idx| {
        evaluate_cell(base, theta_axis[idx / ne], eta_axis[idx % ne])
    });
    let (mask, cells) = results.into_iter().unzip();
    Ok(SweepGrid {
        base: *base,
        theta_axis: theta_axis.to_vec(),
        eta_axis: eta_axis.to_vec(),
        cells,
        mask,
    })
}

// ---------------------------------------------------------------------------
// consumption threshold

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`,
/// shrinking the bracket below `tol`.
pub fn golden_section_max<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    InteriorPeak,
    MonotoneOnRange,
}

impl Shape {
    pub fn as_str(self) -> &'static str {
        match self {
            Shape::InteriorPeak => "interior-peak",
            Shape::MonotoneOnRange => "monotone-on-range",
        }
    }
}

/// Maximiser of c*(η) on one side of the singular band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSegment {
    pub eta_lo: f64,
    pub eta_hi: f64,
    pub eta_star: f64,
    pub c_star_max: f64,
    pub shape: Shape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub theta: f64,
    pub segments: Vec<ThresholdSegment>,
}

/// Coarse scan followed by golden-section refinement of the bracket around
/// the best coarse point. Non-finite values count as `-∞`.
pub fn locate_maximum<F>(f: F, lo: f64, hi: f64, n_coarse: usize, tol: f64) -> Option<ThresholdSegment>
where
    F: Fn(f64) -> f64,
{
    let g = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::NEG_INFINITY
        }
    };
    let xs = linspace(lo, hi, n_coarse.max(3));
    let vals: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let (best, &vbest) = vals
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
    if vbest == f64::NEG_INFINITY {
        return None;
    }
    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(xs.len() - 1)];
    let (x, fx) = golden_section_max(g, a, b, tol);
    let (eta_star, c_star_max) = if fx >= vbest { (x, fx) } else { (xs[best], vbest) };
    let at_edge = (eta_star - lo).abs() <= tol || (hi - eta_star).abs() <= tol;
    let (eta_star, c_star_max, shape) = if at_edge {
        // snap to the boundary the maximum runs into
        let edge = if (eta_star - lo).abs() <= tol { lo } else { hi };
        let fe = g(edge);
        if fe >= c_star_max {
            (edge, fe, Shape::MonotoneOnRange)
        } else {
            (eta_star, c_star_max, Shape::MonotoneOnRange)
        }
    } else {
        (eta_star, c_star_max, Shape::InteriorPeak)
    };
    Some(ThresholdSegment {
        eta_lo: lo,
        eta_hi: hi,
        eta_star,
        c_star_max,
        shape,
    })
}

/// Sub-intervals of `eta_range` that avoid the singular band.
pub fn regular_eta_intervals(base: &ModelParams, eta_range: (f64, f64)) -> Vec<(f64, f64)> {
    const MARGIN: f64 = 1e-9;
    let (lo, hi) = eta_range;
    let centre = (1.0 - base.alpha - base.beta) / base.alpha;
    let half = base.singular_band / base.alpha;
    let band = (centre - half - MARGIN, centre + half + MARGIN);
    let mut out = Vec::new();
    if lo < band.0 {
        out.push((lo, hi.min(band.0)));
    }
    if hi > band.1 {
        out.push((lo.max(band.1), hi));
    }
    out.retain(|(a, b)| b > a);
    out
}

pub const DEFAULT_COARSE_POINTS: usize = 200;

/// Consumption-maximising η at fixed θ, reported separately on each side of
/// the singular band.
pub fn consumption_threshold(
    base: &ModelParams,
    theta: f64,
    eta_range: (f64, f64),
    tol: f64,
) -> Result<Threshold> {
    let (lo, hi) = eta_range;
    if !(lo >= 0.0 && hi < 1.0 && hi > lo) || !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "invalid eta range ({lo}, {hi}) or tolerance {tol}"
        )));
    }
    let c_of = |eta: f64| match evaluate_cell(base, theta, eta) {
        (CellStatus::Ok, Some(ss)) => ss.c_star,
        _ => f64::NEG_INFINITY,
    };
    let segments: Vec<_> = regular_eta_intervals(base, eta_range)
        .into_iter()
        .filter_map(|(a, b)| locate_maximum(c_of, a, b, DEFAULT_COARSE_POINTS, tol))
        .collect();
    if segments.is_empty() {
        return Err(Error::Search(format!(
            "no feasible steady state for theta = {theta} on eta in ({lo}, {hi})"
        )));
    }
    Ok(Threshold { theta, segments })
}

pub fn threshold_curve(
    base: &ModelParams,
    thetas: &[f64],
    eta_range: (f64, f64),
    tol: f64,
    exec: Execution,
) -> Result<Vec<Threshold>> {
    map_indexed(thetas.len(), exec, |i| {
        consumption_threshold(base, thetas[i], eta_range, tol)
    })
    .into_iter()
    .collect()
}

// ---------------------------------------------------------------------------
// iso-equilibrium contours

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoContour {
    pub level: f64,
    pub variable: Variable,
    /// Polylines in `(θ, η)`, each ordered along the curve.
    pub lines: Vec<Vec<[f64; 2]>>,
}

impl IsoContour {
    pub fn points(&self) -> impl Iterator<Item = &[f64; 2]> {
        self.lines.iter().flatten()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

/// Grid edge: `H(i, j)` joins nodes (i, j)–(i+1, j), `V(i, j)` joins
/// (i, j)–(i, j+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

/// Marching squares on a scalar field sampled at `xs × ys`
/// (`values[i][j]` at `(xs[i], ys[j])`, `None` = masked).
pub fn marching_squares(
    xs: &[f64],
    ys: &[f64],
    values: &dyn Fn(usize, usize) -> Option<f64>,
    level: f64,
) -> Vec<Vec<[f64; 2]>> {
    let above = |v: f64| v >= level;
    let point = |e: Edge| -> [f64; 2] {
        let ((i0, j0), (i1, j1)) = match e {
            Edge::H(i, j) => ((i, j), (i + 1, j)),
            Edge::V(i, j) => ((i, j), (i, j + 1)),
        };
        let (a, b) = (values(i0, j0).unwrap(), values(i1, j1).unwrap());
        let t = (level - a) / (b - a);
        [xs[i0] + t * (xs[i1] - xs[i0]), ys[j0] + t * (ys[j1] - ys[j0])]
    };

    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for i in 0..xs.len().saturating_sub(1) {
        for j in 0..ys.len().saturating_sub(1) {
            let (Some(v00), Some(v10), Some(v11), Some(v01)) =
                (values(i, j), values(i + 1, j), values(i + 1, j + 1), values(i, j + 1))
            else {
                continue;
            };
            let bottom = Edge::H(i, j);
            let right = Edge::V(i + 1, j);
            let top = Edge::H(i, j + 1);
            let left = Edge::V(i, j);
            let case = (above(v00) as u8)
                | (above(v10) as u8) << 1
                | (above(v11) as u8) << 2
                | (above(v01) as u8) << 3;
            match case {
                0 | 15 => {}
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((left, top)),
                5 | 10 => {
                    let centre_above = above(0.25 * (v00 + v10 + v11 + v01));
                    // case 5: corners 00 and 11 above
                    let joined = (case == 5) == centre_above;
                    if joined {
                        segments.push((left, top));
                        segments.push((bottom, right));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    let mut incident: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (s, (a, b)) in segments.iter().enumerate() {
        incident.entry(*a).or_default().push(s);
        incident.entry(*b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let walk = |start_seg: usize, start_edge: Edge, used: &mut Vec<bool>| -> Vec<Edge> {
        let mut chain = vec![start_edge];
        let (mut seg, mut at) = (start_seg, start_edge);
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            chain.push(next);
            at = next;
            match incident[&at].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        chain
    };

    let mut lines = Vec::new();
    // open curves start at edges touched by a single segment
    let open_starts: Vec<(Edge, usize)> = incident
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(e, segs)| (*e, segs[0]))
        .collect();
    for (edge, seg) in open_starts {
        if !used[seg] {
            lines.push(walk(seg, edge, &mut used));
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            lines.push(walk(s, segments[s].0, &mut used));
        }
    }
    lines
        .into_iter()
        .map(|chain| {
            let mut pts: Vec<[f64; 2]> = chain.into_iter().map(point).collect();
            // a level hitting a node exactly yields repeated vertices
            pts.dedup();
            pts
        })
        .collect()
}

pub fn iso_equilibrium_contour(grid: &SweepGrid, variable: Variable, level: f64) -> IsoContour {
    let values = |i: usize, j: usize| grid.value(i, j, variable);
    IsoContour {
        level,
        variable,
        lines: marching_squares(&grid.theta_axis, &grid.eta_axis, &values, level),
    }
}

/// Bilinear interpolation of the grid at `(θ, η)`; `None` outside the grid
/// or next to a masked node.
pub fn interpolate(grid: &SweepGrid, variable: Variable, theta: f64, eta: f64) -> Option<f64> {
    let locate = |axis: &[f64], x: f64| -> Option<(usize, f64)> {
        let n = axis.len();
        if n < 2 || x < axis[0] || x > axis[n - 1] {
            return None;
        }
        let i = axis.partition_point(|&a| a <= x).clamp(1, n - 1) - 1;
        Some((i, (x - axis[i]) / (axis[i + 1] - axis[i])))
    };
    let (i, u) = locate(&grid.theta_axis, theta)?;
    let (j, v) = locate(&grid.eta_axis, eta)?;
    let f = |a, b| grid.value(a, b, variable);
    Some(
        (1.0 - u) * (1.0 - v) * f(i, j)?
            + u * (1.0 - v) * f(i + 1, j)?
            + u * v * f(i + 1, j + 1)?
            + (1.0 - u) * v * f(i, j + 1)?,
    )
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut k = 0;
    while k < idx.len() {
        let mut e = k;
        while e + 1 < idx.len() && x[idx[e + 1]] == x[idx[k]] {
            e += 1;
        }
        let avg = 0.5 * (k + e) as f64 + 1.0;
        for &i in &idx[k..=e] {
            r[i] = avg;
        }
        k = e + 1;
    }
    r
}

/// Spearman rank correlation (average ranks for ties). `None` for fewer than
/// two points or a constant series.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

// ---------------------------------------------------------------------------
// comparative statics

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derivative {
    pub value: f64,
    /// -1, 0 or 1; 0 when the change is below the noise floor.
    pub sign: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sensitivity {
    pub dk_deta: Derivative,
    pub dk_dtheta: Derivative,
    pub dc_deta: Derivative,
    pub dc_dtheta: Derivative,
}

const NOISE_FLOOR: f64 = 1e-10;

#[derive(Clone, Copy)]
enum Axis {
    Eta,
    Theta,
}

fn steady_at(base: &ModelParams, axis: Axis, x: f64) -> Option<SteadyState> {
    let (theta, eta) = match axis {
        Axis::Eta => (base.theta, x),
        Axis::Theta => (x, base.eta),
    };
    let upper = match axis {
        Axis::Eta => 1.0,
        Axis::Theta => 1.0 + f64::EPSILON,
    };
    if !(x >= 0.0 && x < upper) {
        return None;
    }
    match evaluate_cell(base, theta, eta) {
        (CellStatus::Ok, ss) => ss,
        _ => None,
    }
}

fn derivative_pair(base: &ModelParams, axis: Axis, h: f64) -> Result<(Derivative, Derivative)> {
    let x0 = match axis {
        Axis::Eta => base.eta,
        Axis::Theta => base.theta,
    };
    let centre = steady_at(base, axis, x0)
        .ok_or_else(|| Error::Degenerate("base point is singular or infeasible".into()))?;
    let mut step = h * x0.abs().max(1.0);
    for _ in 0..5 {
        let plus = steady_at(base, axis, x0 + step);
        let minus = steady_at(base, axis, x0 - step);
        let (hi, lo, span) = match (plus, minus) {
            (Some(p), Some(m)) => (p, m, 2.0 * step),
            // one-sided at the edge of the admissible range
            (Some(p), None) if x0 - step < 0.0 => (p, centre, step),
            (None, Some(m)) if x0 + step >= 1.0 => (centre, m, step),
            _ => {
                step *= 0.25;
                continue;
            }
        };
        let d = |f: fn(&SteadyState) -> f64| {
            let diff = f(&hi) - f(&lo);
            let sign = if diff.abs() <= NOISE_FLOOR * f(&centre).abs() {
                0
            } else if diff > 0.0 {
                1
            } else {
                -1
            };
            Derivative {
                value: diff / span,
                sign,
            }
        };
        return Ok((d(|s| s.k_star), d(|s| s.c_star)));
    }
    Err(Error::Degenerate(
        "finite-difference neighbours stay singular or infeasible after step shrinking".into(),
    ))
}

/// Central-difference signs of `k*` and `c*` in η and θ. The step is
/// `h·max(|x|, 1)`.
pub fn sensitivity_signs(p: &ModelParams, h: f64) -> Result<Sensitivity> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    p.validate()?;
    let (dk_deta, dc_deta) = derivative_pair(p, Axis::Eta, h)?;
    let (dk_dtheta, dc_dtheta) = derivative_pair(p, Axis::Theta, h)?;
    Ok(Sensitivity {
        dk_deta,
        dk_dtheta,
        dc_deta,
        dc_dtheta,
    })
}
