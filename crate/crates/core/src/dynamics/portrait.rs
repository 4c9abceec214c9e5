//! Stable manifolds, phase portraits and comparative-statics shocks.

use serde::{Deserialize, Serialize};

use super::{
    classify_equilibrium, integrate_with, nullclines, rhs, Classification, Direction,
    IntegrateOptions, Linearization, Nullclines, Sample, State, Status, Trajectory,
};
use crate::error::{Error, Result};
use crate::model::{Model, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SaddlePathOptions {
    /// Seed offset along the stable eigenvector, relative to `k*`.
    pub eps_rel: f64,
    /// Integrator relative tolerance.
    pub rtol: f64,
    /// Backward horizon in units of `1/|λ_s|`.
    pub horizon: f64,
}

impl Default for SaddlePathOptions {
    fn default() -> Self {
        Self {
            eps_rel: 1e-6,
            rtol: 1e-10,
            horizon: 60.0,
        }
    }
}

/// One arm of the stable manifold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    /// Forward-time samples, from the far end to the seed next to the
    /// equilibrium.
    pub path: Trajectory,
    /// How the backward extraction ended: `Reached` when the target capital
    /// was covered, otherwise the branch is truncated.
    pub extraction: Status,
}

impl Branch {
    pub fn covers_target(&self) -> bool {
        self.extraction == Status::Reached
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddlePath {
    pub equilibrium: State,
    pub stable_eigenvalue: f64,
    pub stable_vector: [f64; 2],
    pub eps: f64,
    /// Arm approaching from `k < k*`.
    pub lower: Branch,
    /// Arm approaching from `k > k*`.
    pub upper: Branch,
}

/// Stable arms through a saddle, found by integrating backward in time from
/// `(c*, k*) ± ε·v_s` until `k` leaves `k_targets`.
pub fn saddle_path(m: &Model, k_targets: (f64, f64), opts: SaddlePathOptions) -> Result<SaddlePath> {
    let lin = classify_equilibrium(m)?;
    let (lambda, v) = lin
        .stable_direction()
        .ok_or_else(|| Error::Classification(lin.classification.to_string()))?;
    let eq = lin.equilibrium;
    let (lo, hi) = k_targets;
    if !(lo > 0.0 && lo < eq.k && hi > eq.k) {
        return Err(Error::Domain(format!(
            "k targets ({lo}, {hi}) must bracket k* = {}",
            eq.k
        )));
    }
    let eps = opts.eps_rel * eq.k;
    // orient v toward increasing k
    let v = if v[1] < 0.0 { [-v[0], -v[1]] } else { v };
    let t_max = opts.horizon / lambda.abs();

    let arm = |sign: f64| -> Result<Branch> {
        let seed = State::new(eq.c + sign * eps * v[0], eq.k + sign * eps * v[1]);
        let back = integrate_with(
            seed,
            m,
            IntegrateOptions {
                t_max,
                rtol: opts.rtol,
                direction: Direction::Backward,
                converge_rate: None,
            },
            |s| if sign < 0.0 { s.k <= lo } else { s.k >= hi },
        )?;
        Ok(Branch {
            path: reverse_in_time(&back),
            extraction: back.status,
        })
    };

    Ok(SaddlePath {
        equilibrium: eq,
        stable_eigenvalue: lambda,
        stable_vector: v,
        eps,
        lower: arm(-1.0)?,
        upper: arm(1.0)?,
    })
}

fn reverse_in_time(back: &Trajectory) -> Trajectory {
    let total = back.duration();
    let samples = back
        .samples
        .iter()
        .rev()
        .map(|s| Sample {
            t: total - s.t,
            state: s.state,
        })
        .collect();
    Trajectory {
        samples,
        status: Status::Converged,
        direction: Direction::Forward,
    }
}

/// Result of re-integrating a branch forward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchCheck {
    /// Largest mismatch between a forward segment's endpoint and the next
    /// stored sample, relative to `‖(c*, k*)‖`.
    pub max_defect: f64,
    /// Distance from the equilibrium at which the chained forward
    /// re-integration terminates, relative to `‖(c*, k*)‖`.
    pub terminal_distance: f64,
    /// Closest relative approach of one uninterrupted forward run from the far
    /// end. Rounding grows like `exp(λ_u·t)` along the way, so this is
    /// diagnostic only.
    pub single_run_closest: f64,
}

/// Re-integrate a forward-time branch segment by segment (multiple shooting).
pub fn verify_branch(m: &Model, path: &Trajectory, equilibrium: State, rtol: f64) -> Result<BranchCheck> {
    let scale = equilibrium.norm();
    let opts = |t_max| IntegrateOptions {
        t_max,
        rtol,
        direction: Direction::Forward,
        converge_rate: None,
    };
    let mut max_defect: f64 = 0.0;
    let mut end = path.first();
    for w in path.samples.windows(2) {
        let seg = integrate_with(w[0].state, m, opts(w[1].t - w[0].t), |_| false)?;
        end = seg.last();
        max_defect = max_defect.max(end.distance(w[1].state) / scale);
    }

    let single = match integrate_with(path.first(), m, opts(path.duration()), |_| false) {
        Ok(t) => t,
        Err(Error::Integration { partial, .. }) => *partial,
        Err(e) => return Err(e),
    };
    let single_run_closest = single
        .samples
        .iter()
        .map(|s| s.state.distance(equilibrium) / scale)
        .fold(f64::INFINITY, f64::min);

    Ok(BranchCheck {
        max_defect,
        terminal_distance: end.distance(equilibrium) / scale,
        single_run_closest,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortraitWindow {
    pub k_range: (f64, f64),
    /// Defaults to `[0, 1.25·max c on the k̇ = 0 locus]`.
    pub c_range: Option<(f64, f64)>,
    pub nullcline_samples: usize,
    pub field_nx: usize,
    pub field_ny: usize,
}

impl PortraitWindow {
    /// `k ∈ [0.02·k*, 2·k*]` around a single equilibrium.
    pub fn around(k_star: f64) -> Self {
        Self {
            k_range: (0.02 * k_star, 2.0 * k_star),
            c_range: None,
            nullcline_samples: 200,
            field_nx: 15,
            field_ny: 15,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub k: f64,
    pub c: f64,
    pub c_dot: f64,
    pub k_dot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePortrait {
    pub params: ModelParams,
    pub window: PortraitWindow,
    pub c_range: (f64, f64),
    pub nullclines: Nullclines,
    pub equilibrium: State,
    pub linearization: Linearization,
    pub classification: Classification,
    /// Empty unless the equilibrium is a saddle.
    pub stable_paths: Vec<Branch>,
    pub vector_field: Vec<FieldSample>,
}

pub fn phase_portrait(m: &Model, window: PortraitWindow, opts: SaddlePathOptions) -> Result<PhasePortrait> {
    let lin = classify_equilibrium(m)?;
    let nc = nullclines(m, window.k_range, window.nullcline_samples)?;
    let c_range = window.c_range.unwrap_or_else(|| {
        let top = nc.c_nullcline.last().map(|p| p[1]).unwrap_or(1.0);
        (0.0, top)
    });
    if !(c_range.1 > c_range.0) {
        return Err(Error::Domain(format!("empty c range {c_range:?}")));
    }

    let stable_paths = if lin.classification == Classification::Saddle {
        let sp = saddle_path(m, window.k_range, opts)?;
        vec![sp.lower, sp.upper]
    } else {
        Vec::new()
    };

    let (k0, k1) = window.k_range;
    let (c0, c1) = c_range;
    let mut vector_field = Vec::with_capacity(window.field_nx * window.field_ny);
    for j in 0..window.field_ny {
        // cell centres keep c > 0 on the bottom row
        let c = c0 + (c1 - c0) * (j as f64 + 0.5) / window.field_ny as f64;
        for i in 0..window.field_nx {
            let k = k0 + (k1 - k0) * (i as f64 + 0.5) / window.field_nx as f64;
            if c <= 0.0 {
                continue;
            }
            let (c_dot, k_dot) = rhs(State::new(c, k), m)?;
            vector_field.push(FieldSample { k, c, c_dot, k_dot });
        }
    }

    Ok(PhasePortrait {
        params: *m.params(),
        window,
        c_range,
        nullclines: nc,
        equilibrium: lin.equilibrium,
        classification: lin.classification,
        linearization: lin,
        stable_paths,
        vector_field,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockExperiment {
    pub before: PhasePortrait,
    pub after: PhasePortrait,
    pub delta_k_star: f64,
    pub delta_c_star: f64,
}

/// Before/after portraits on a shared window (default: `k ∈ [0.02, 2]·` the
/// extreme equilibria).
pub fn shock_experiment(
    before: &Model,
    after: &Model,
    window: Option<PortraitWindow>,
    opts: SaddlePathOptions,
) -> Result<ShockExperiment> {
    let b = before.steady_state()?;
    let a = after.steady_state()?;
    let window = window.unwrap_or_else(|| {
        let mut w = PortraitWindow::around(b.k_star);
        w.k_range = (0.02 * b.k_star.min(a.k_star), 2.0 * b.k_star.max(a.k_star));
        w
    });
    let pb = phase_portrait(before, window, opts)?;
    let pa = phase_portrait(after, window, opts)?;
    // shared vertical extent so the two pictures overlay
    let c_top = pb.c_range.1.max(pa.c_range.1);
    let window = PortraitWindow {
        c_range: Some((0.0, c_top)),
        ..window
    };
    let (pb, pa) = if pb.c_range.1 == c_top && pa.c_range.1 == c_top {
        (pb, pa)
    } else {
        (
            phase_portrait(before, window, opts)?,
            phase_portrait(after, window, opts)?,
        )
    };
    Ok(ShockExperiment {
        delta_k_star: a.k_star - b.k_star,
        delta_c_star: a.c_star - b.c_star,
        before: pb,
        after: pa,
    })
}
