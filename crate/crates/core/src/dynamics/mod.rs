//! The consumption–capital system
//!
//! ```text
//! ċ = c·(r(k) − ρ − δ)/σ
//! k̇ = y(k, l*(k)) − c − δ·k
//! ```
//!
//! with its local linearisation, nullclines and trajectories.

mod ode;
mod portrait;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;

pub use portrait::{
    phase_portrait, saddle_path, shock_experiment, verify_branch, BranchCheck, FieldSample,
    PhasePortrait, PortraitWindow, SaddlePath, SaddlePathOptions, ShockExperiment,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub c: f64,
    pub k: f64,
}

impl State {
    pub fn new(c: f64, k: f64) -> Self {
        Self { c, k }
    }

    fn as_array(self) -> [f64; 2] {
        [self.c, self.k]
    }

    fn from_array(v: [f64; 2]) -> Self {
        Self { c: v[0], k: v[1] }
    }

    pub fn norm(self) -> f64 {
        self.c.hypot(self.k)
    }

    pub fn distance(self, other: State) -> f64 {
        (self.c - other.c).hypot(self.k - other.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: State,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    MaxTime,
    LeftDomain,
    /// A caller-supplied stopping condition fired (e.g. target capital reached).
    Reached,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Forward,
    Backward,
}

/// Time-ordered samples. For a backward run `t` is elapsed backward time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub status: Status,
    pub direction: Direction,
}

impl Trajectory {
    pub fn first(&self) -> State {
        self.samples[0].state
    }

    pub fn last(&self) -> State {
        self.samples[self.samples.len() - 1].state
    }

    pub fn duration(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }
}

/// `(ċ, k̇)` at `s`.
pub fn rhs(s: State, m: &Model) -> Result<(f64, f64)> {
    if !(s.c > 0.0) || !(s.k > 0.0) {
        return Err(Error::Domain(format!(
            "state must be positive, got c = {}, k = {}",
            s.c, s.k
        )));
    }
    let p = m.params();
    let r = m.interest_rate(s.k)?;
    let y = m.reduced_output(s.k)?;
    Ok((s.c * (r - p.rho - p.delta) / p.sigma, y - s.c - p.delta * s.k))
}

/// Rows `(ċ, k̇)`, columns `(c, k)`.
pub fn jacobian(s: State, m: &Model) -> Result<[[f64; 2]; 2]> {
    rhs(s, m)?;
    let p = m.params();
    let r = m.interest_rate(s.k)?;
    let y = m.reduced_output(s.k)?;
    let dr_dk = r * m.rate_exponent() / s.k;
    let dy_dk = y * m.profit_exponent() / s.k;
    Ok([
        [(r - p.rho - p.delta) / p.sigma, s.c * dr_dk / p.sigma],
        [-1.0, dy_dk - p.delta],
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Saddle,
    Sink,
    Source,
    SpiralSink,
    SpiralSource,
    CenterDegenerate,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::Saddle => "saddle",
            Classification::Sink => "sink",
            Classification::Source => "source",
            Classification::SpiralSink => "spiral-sink",
            Classification::SpiralSource => "spiral-source",
            Classification::CenterDegenerate => "center-degenerate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Eigenvalues {
    /// Sorted ascending.
    Real { values: [f64; 2] },
    Complex { re: f64, im: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    pub equilibrium: State,
    pub jacobian: [[f64; 2]; 2],
    pub trace: f64,
    pub det: f64,
    pub classification: Classification,
    pub eigenvalues: Eigenvalues,
    /// Unit eigenvectors in `(c, k)` order, matching `eigenvalues` when real.
    pub eigenvectors: Option<[[f64; 2]; 2]>,
}

impl Linearization {
    /// Stable eigenvalue and unit eigenvector of a saddle.
    pub fn stable_direction(&self) -> Option<(f64, [f64; 2])> {
        match (self.classification, self.eigenvalues, self.eigenvectors) {
            (Classification::Saddle, Eigenvalues::Real { values }, Some(v)) => {
                Some((values[0], v[0]))
            }
            _ => None,
        }
    }
}

const DEGENERATE_DET: f64 = 1e-12;

fn eigenvector(j: &[[f64; 2]; 2], lambda: f64) -> [f64; 2] {
    // (J − λI)v = 0: v ⟂ either row; take the better-conditioned one
    let a = [j[0][1], lambda - j[0][0]];
    let b = [lambda - j[1][1], j[1][0]];
    let v = if a[0].hypot(a[1]) >= b[0].hypot(b[1]) { a } else { b };
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

/// Eigen-decomposition of a 2×2 matrix via its characteristic polynomial.
pub fn classify_matrix(j: [[f64; 2]; 2]) -> (Classification, Eigenvalues, Option<[[f64; 2]; 2]>) {
    let trace = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = trace * trace - 4.0 * det;

    if det.abs() < DEGENERATE_DET {
        let ev = if disc >= 0.0 {
            Eigenvalues::Real {
                values: [0.5 * (trace - disc.sqrt()), 0.5 * (trace + disc.sqrt())],
            }
        } else {
            Eigenvalues::Complex {
                re: 0.5 * trace,
                im: 0.5 * (-disc).sqrt(),
            }
        };
        return (Classification::CenterDegenerate, ev, None);
    }

    if disc >= 0.0 {
        // cancellation-free roots: q = (tr + sign(tr)·√disc)/2, λ = q and det/q
        let q = 0.5 * (trace + trace.signum() * disc.sqrt());
        let (l1, l2) = if q == 0.0 {
            (-(det.abs()).sqrt(), det.abs().sqrt())
        } else {
            (q, det / q)
        };
        let values = if l1 <= l2 { [l1, l2] } else { [l2, l1] };
        let class = if det < 0.0 {
            Classification::Saddle
        } else if trace < 0.0 {
            Classification::Sink
        } else {
            Classification::Source
        };
        let vecs = [eigenvector(&j, values[0]), eigenvector(&j, values[1])];
        (class, Eigenvalues::Real { values }, Some(vecs))
    } else {
        let class = if trace < 0.0 {
            Classification::SpiralSink
        } else if trace > 0.0 {
            Classification::SpiralSource
        } else {
            Classification::CenterDegenerate
        };
        (
            class,
            Eigenvalues::Complex {
                re: 0.5 * trace,
                im: 0.5 * (-disc).sqrt(),
            },
            None,
        )
    }
}

pub fn classify_equilibrium(m: &Model) -> Result<Linearization> {
    let ss = m.steady_state()?;
    if !ss.feasible {
        return Err(Error::Degenerate(format!(
            "steady state is infeasible (k* = {}, c* = {})",
            ss.k_star, ss.c_star
        )));
    }
    let eq = State::new(ss.c_star, ss.k_star);
    let j = jacobian(eq, m)?;
    let (classification, eigenvalues, eigenvectors) = classify_matrix(j);
    Ok(Linearization {
        equilibrium: eq,
        jacobian: j,
        trace: j[0][0] + j[1][1],
        det: j[0][0] * j[1][1] - j[0][1] * j[1][0],
        classification,
        eigenvalues,
        eigenvectors,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nullclines {
    /// `ċ = 0`: the vertical line `k = k*`, as `(k, c)` points.
    pub c_nullcline: Vec<[f64; 2]>,
    /// `k̇ = 0`: `c = y(k, l*(k)) − δk`, as `(k, c)` points.
    pub k_nullcline: Vec<[f64; 2]>,
}

pub fn nullclines(m: &Model, k_range: (f64, f64), n: usize) -> Result<Nullclines> {
    let (lo, hi) = k_range;
    if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() || n < 2 {
        return Err(Error::Domain(format!(
            "need 0 < k_lo < k_hi and n >= 2, got ({lo}, {hi}), n = {n}"
        )));
    }
    let ss = m.steady_state()?;
    let delta = m.params().delta;
    let k_nullcline = (0..n)
        .map(|i| {
            let k = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            Ok([k, m.reduced_output(k)? - delta * k])
        })
        .collect::<Result<Vec<_>>>()?;
    let c_top = k_nullcline
        .iter()
        .map(|p| p[1])
        .fold(ss.c_star, f64::max)
        * 1.25;
    let c_nullcline = (0..n)
        .map(|i| [ss.k_star, c_top * i as f64 / (n - 1) as f64])
        .collect();
    Ok(Nullclines {
        c_nullcline,
        k_nullcline,
    })
}

/// Knobs for [`integrate_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub t_max: f64,
    pub rtol: f64,
    pub direction: Direction,
    /// Stop once `‖(ċ/c, k̇/k)‖` falls below this.
    pub converge_rate: Option<f64>,
}

/// Adaptive integration from `s0` for up to `t_max`, stopping early when the
/// relative rate `‖(ċ/c, k̇/k)‖` falls below `tol` or the state leaves the
/// positive quadrant.
pub fn integrate(s0: State, m: &Model, t_max: f64, tol: f64) -> Result<Trajectory> {
    if !(1e-12..=1e-3).contains(&tol) {
        return Err(Error::Domain(format!("tol must lie in [1e-12, 1e-3], got {tol}")));
    }
    integrate_with(
        s0,
        m,
        IntegrateOptions {
            t_max,
            rtol: tol,
            direction: Direction::Forward,
            converge_rate: Some(tol),
        },
        |_| false,
    )
}

/// General driver: direction, convergence threshold and an extra stopping
/// predicate are all caller-controlled.
pub fn integrate_with<S>(
    s0: State,
    m: &Model,
    opts: IntegrateOptions,
    mut stop: S,
) -> Result<Trajectory>
where
    S: FnMut(State) -> bool,
{
    if !(opts.t_max >= 0.0) || !opts.t_max.is_finite() {
        return Err(Error::Domain(format!("t_max must be nonnegative, got {}", opts.t_max)));
    }
    rhs(s0, m)?;
    let sign = match opts.direction {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    };
    let field = |y: &[f64; 2]| -> Result<[f64; 2], ode::EvalError> {
        if !(y[0] > 0.0 && y[1] > 0.0) {
            return Err(ode::EvalError::OutOfDomain);
        }
        rhs(State::from_array(*y), m)
            .map(|(dc, dk)| [sign * dc, sign * dk])
            .map_err(|e| ode::EvalError::Other(e.to_string()))
    };
    let settings = ode::Settings {
        t_max: opts.t_max,
        rtol: opts.rtol,
        converge_rate: opts.converge_rate,
    };
    let mut samples = Vec::new();
    let outcome = ode::solve(
        field,
        s0.as_array(),
        &settings,
        |y| stop(State::from_array(*y)),
        |t, y| {
            samples.push(Sample {
                t,
                state: State::from_array(*y),
            })
        },
    );
    let status = |o| match o {
        ode::Outcome::Finished => Status::MaxTime,
        ode::Outcome::Converged => Status::Converged,
        ode::Outcome::Stopped => Status::Reached,
        ode::Outcome::LeftDomain => Status::LeftDomain,
    };
    match outcome {
        Ok(o) => Ok(Trajectory {
            samples,
            status: status(o),
            direction: opts.direction,
        }),
        Err(f) => Err(Error::Integration {
            t: f.t,
            reason: f.reason,
            partial: Box::new(Trajectory {
                samples,
                status: Status::MaxTime,
                direction: opts.direction,
            }),
        }),
    }
}
