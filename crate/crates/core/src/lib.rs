//! Solver and simulator for a representative-agent growth model in which a
//! policy-set share of output becomes data that raises technology.
//!
//! - [`model`]: production fixed point, labour demand, interest rate, steady state
//! - [`dynamics`]: the consumption–capital ODE, Jacobian, saddle paths, portraits
//! - [`firm_q`]: q-theory investment block with quadratic adjustment costs
//! - [`sweep`]: (θ, η) grids, consumption thresholds, iso-equilibrium contours
//! - [`empirics`]: synthetic staggered-adoption panels and TWFE / event-study estimators
//! - [`io`], [`svg`], [`cli`]: configuration, CSV/JSON artifacts, SVG figures

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod empirics;
pub mod error;
pub mod firm_q;
pub mod io;
pub mod model;
pub mod par;
pub mod sweep;
pub mod svg;

pub use error::{Error, Result};
pub use model::{validate_params, Model, ModelParams, Regime, SteadyState};
pub use par::Execution;
