//! Firm investment with quadratic adjustment costs (Tobin's q).
//!
//! The current-value Hamiltonian is
//! `π(w)k^{α/(1−β−αη)} − i − (a/2)(i/k − δ)²k + q(i − δk)`, giving the
//! investment rule `i/k = δ + (q − 1)/a` and the costate equation used by
//! [`q_dot`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QState {
    pub q: f64,
    pub k: f64,
}

/// Which parameter divides `2δ(q − 1)` in the closed-form steady capital.
///
/// The costate equation has `2δ/a`; the printed closed form carries `2δ/α`.
/// The two agree at `q = 1`, where the term vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossTermDivisor {
    #[default]
    AdjustmentCost,
    CapitalElasticity,
}

/// Gross investment rate `i/k`.
pub fn investment_rate(q: f64, m: &Model) -> f64 {
    let p = m.params();
    p.delta + (q - 1.0) / p.a
}

/// Net capital growth `k̇/k = i/k − δ`.
pub fn capital_growth_rate(q: f64, m: &Model) -> f64 {
    investment_rate(q, m) - m.params().delta
}

/// Marginal product of capital in accounting profit; equals the endogenous
/// interest rate.
pub fn marginal_product(k: f64, m: &Model) -> Result<f64> {
    m.interest_rate(k)
}

fn adjustment_term(q: f64, m: &Model, divisor: CrossTermDivisor) -> f64 {
    let p = m.params();
    let d = match divisor {
        CrossTermDivisor::AdjustmentCost => p.a,
        CrossTermDivisor::CapitalElasticity => p.alpha,
    };
    let x = q - 1.0;
    0.5 * p.a * (x * x / (p.a * p.a) + 2.0 * p.delta / d * x)
}

/// `dq/dt` given the firm's discount rate `r`.
pub fn q_dot(s: QState, r: f64, m: &Model) -> Result<f64> {
    if !(s.q > 0.0) || !(s.k > 0.0) {
        return Err(Error::Domain(format!(
            "q and k must be positive, got q = {}, k = {}",
            s.q, s.k
        )));
    }
    let p = m.params();
    let mpk = marginal_product(s.k, m)?;
    Ok((r + p.delta) * s.q - mpk - adjustment_term(s.q, m, CrossTermDivisor::AdjustmentCost))
}

/// Capital at which `q̇ = 0` for a given `q`.
pub fn k_of_q(q: f64, r: f64, m: &Model) -> Result<f64> {
    k_of_q_with(q, r, m, CrossTermDivisor::default())
}

pub fn k_of_q_with(q: f64, r: f64, m: &Model, divisor: CrossTermDivisor) -> Result<f64> {
    let p = m.params();
    let pi = m.profit_coefficient()?;
    let numerator = (r + p.delta) * q - adjustment_term(q, m, divisor);
    if !(numerator > 0.0) {
        return Err(Error::Degenerate(format!(
            "no steady capital at q = {q}: required marginal product {numerator} is not positive"
        )));
    }
    let scale = p.alpha / (1.0 - p.beta - p.alpha * p.eta) * pi;
    let k = ((numerator / scale).ln() / m.rate_exponent()).exp();
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Degenerate(format!("steady capital overflowed at q = {q}")));
    }
    Ok(k)
}

/// Steady state of the investment block: `q = 1`, so gross investment
/// replaces depreciation exactly.
pub fn firm_steady_state(r: f64, m: &Model) -> Result<QState> {
    Ok(QState {
        q: 1.0,
        k: k_of_q(1.0, r, m)?,
    })
}
