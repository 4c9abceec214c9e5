//! Closed-form primitives of the data-economy production block.
//!
//! Output feeds back into technology through data: `d = θ·y`, `z = d^η`,
//! `y = (z·k)^α l^β`. Solving the fixed point gives the reduced form
//!
//! ```text
//! y = θ^{αη/(1-αη)} k^{α/(1-αη)} l^{β/(1-αη)}
//! ```
//!
//! Optimising labour out of `y - w·l` leaves accounting profit
//! `π(w)·k^{α/(1-β-αη)}`, whose derivative in `k` is the endogenous interest
//! rate. Every power is evaluated as `exp(Σ exponent·ln base)` because the
//! steady-state exponents scale like `1/(α+β+αη-1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

pub const DEFAULT_SINGULAR_BAND: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelParams {
    /// Capital output elasticity.
    pub alpha: f64,
    /// Labour output elasticity.
    pub beta: f64,
    /// Data-to-technology conversion rate.
    pub eta: f64,
    /// Share of output that is turned into data.
    pub theta: f64,
    pub w: f64,
    pub delta: f64,
    pub rho: f64,
    /// Relative risk aversion (CRRA).
    pub sigma: f64,
    /// Investment adjustment-cost coefficient.
    pub a: f64,
    /// Half-width of the band around `α+β+αη = 1` where closed forms are refused.
    pub singular_band: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::baseline()
    }
}

impl ModelParams {
    /// α = 0.6, β = 0.2, w = 1, δ = 0.08, ρ = 0.07 from the calibration; σ = 2,
    /// a = 2, η = 0.2, θ = 0.5 are this crate's defaults.
    pub fn baseline() -> Self {
        Self {
            alpha: 0.6,
            beta: 0.2,
            eta: 0.2,
            theta: 0.5,
            w: 1.0,
            delta: 0.08,
            rho: 0.07,
            sigma: 2.0,
            a: 2.0,
            singular_band: DEFAULT_SINGULAR_BAND,
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    /// `α + β + αη − 1`, the sign of which separates decreasing from
    /// increasing returns to accumulable capital.
    pub fn k_exponent(&self) -> f64 {
        self.alpha + self.beta + self.alpha * self.eta - 1.0
    }

    /// Every violated bound, in field order.
    pub fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let mut check = |field: &'static str, value: f64, ok: bool, bound: &str| {
            if !ok || !value.is_finite() {
                v.push(Violation {
                    field,
                    value,
                    bound: bound.to_string(),
                });
            }
        };
        check("alpha", self.alpha, self.alpha > 0.0 && self.alpha < 1.0, "0 < alpha < 1");
        check("beta", self.beta, self.beta > 0.0 && self.beta < 1.0, "0 < beta < 1");
        check(
            "alpha+beta",
            self.alpha + self.beta,
            self.alpha + self.beta <= 1.0,
            "alpha + beta <= 1",
        );
        check("eta", self.eta, self.eta >= 0.0 && self.eta < 1.0, "0 <= eta < 1");
        check("theta", self.theta, (0.0..=1.0).contains(&self.theta), "0 <= theta <= 1");
        check("w", self.w, self.w > 0.0, "w > 0");
        check("delta", self.delta, self.delta > 0.0, "delta > 0");
        check("rho", self.rho, self.rho > 0.0, "rho > 0");
        check("sigma", self.sigma, self.sigma > 1.0, "sigma > 1");
        check("a", self.a, self.a > 0.0, "a > 0");
        check(
            "singular_band",
            self.singular_band,
            self.singular_band >= 0.0,
            "singular_band >= 0",
        );
        let ae = self.alpha * self.eta;
        check("1-alpha*eta", 1.0 - ae, 1.0 - ae > 0.0, "1 - alpha*eta > 0");
        check(
            "1-beta-alpha*eta",
            1.0 - self.beta - ae,
            1.0 - self.beta - ae > 0.0,
            "1 - beta - alpha*eta > 0",
        );
        v
    }

    pub fn validate(self) -> Result<Model> {
        validate_params(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentSign {
    Negative,
    Zero,
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub k_exponent: f64,
    pub k_exponent_sign: ExponentSign,
    pub singular: bool,
}

impl Regime {
    pub fn classify(p: &ModelParams) -> Self {
        let e = p.k_exponent();
        let k_exponent_sign = if e < 0.0 {
            ExponentSign::Negative
        } else if e > 0.0 {
            ExponentSign::Positive
        } else {
            ExponentSign::Zero
        };
        Self {
            k_exponent: e,
            k_exponent_sign,
            singular: e.abs() < p.singular_band || e == 0.0,
        }
    }
}

/// Equilibrium of the consumption–capital system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub k_star: f64,
    pub c_star: f64,
    pub l_star: f64,
    pub y_star: f64,
    pub r_star: f64,
    pub feasible: bool,
}

/// `d = θ·y`.
pub fn data_volume(y: f64, theta: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(Error::Domain(format!("output must be nonnegative, got {y}")));
    }
    Ok(theta * y)
}

/// `z = d^η`.
pub fn technology(d: f64, eta: f64) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::Domain(format!("data volume must be nonnegative, got {d}")));
    }
    if d == 0.0 {
        if eta == 0.0 {
            return Err(Error::Domain(
                "0^0 is undefined; with eta = 0 technology is identically 1".into(),
            ));
        }
        return Ok(0.0);
    }
    Ok((eta * d.ln()).exp())
}

pub fn validate_params(raw: ModelParams) -> Result<Model> {
    let v = raw.violations();
    if !v.is_empty() {
        return Err(Error::Validation(v));
    }
    Ok(Model::new_unchecked(raw))
}

/// Validated parameters together with the exponents every closed form uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    params: ModelParams,
    regime: Regime,
    /// 1 − αη
    s: f64,
    /// 1 − β − αη
    m: f64,
    /// αη·ln θ, or 0 when η = 0 (so θ = 0 stays harmless there)
    theta_log: f64,
    /// ln l*(1)
    ln_labor_scale: f64,
}

impl Model {
    fn new_unchecked(params: ModelParams) -> Self {
        let ModelParams {
            alpha,
            beta,
            eta,
            theta,
            w,
            ..
        } = params;
        let ae = alpha * eta;
        let s = 1.0 - ae;
        let m = 1.0 - beta - ae;
        let theta_log = if ae == 0.0 { 0.0 } else { ae * theta.ln() };
        let ln_b = (beta / s).ln();
        let ln_labor_scale = (s / m) * (ln_b + theta_log / s - w.ln());
        Self {
            params,
            regime: Regime::classify(&params),
            s,
            m,
            theta_log,
            ln_labor_scale,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    fn require_regular(&self) -> Result<()> {
        if self.regime.singular {
            return Err(Error::Regime {
                gap: self.regime.k_exponent.abs(),
                band: self.params.singular_band,
            });
        }
        Ok(())
    }

    fn require_data(&self) -> Result<()> {
        if self.theta_log == f64::NEG_INFINITY {
            return Err(Error::Domain("theta must be positive when eta > 0".into()));
        }
        Ok(())
    }

    /// Exponent of `k` in accounting profit and reduced output, `α/(1−β−αη)`.
    pub fn profit_exponent(&self) -> f64 {
        self.params.alpha / self.m
    }

    /// Exponent of `k` in the interest rate, `(α+β+αη−1)/(1−β−αη)`.
    pub fn rate_exponent(&self) -> f64 {
        self.regime.k_exponent / self.m
    }

    /// Output with the data fixed point solved out.
    pub fn output(&self, k: f64, l: f64) -> Result<f64> {
        if !(k > 0.0) || !(l > 0.0) {
            return Err(Error::Domain(format!(
                "capital and labour must be positive, got k = {k}, l = {l}"
            )));
        }
        self.require_data()?;
        let p = &self.params;
        Ok(((self.theta_log + p.alpha * k.ln() + p.beta * l.ln()) / self.s).exp())
    }

    /// Profit-maximising labour at capital `k` (marginal product equals `w`).
    pub fn labor_demand(&self, k: f64) -> Result<f64> {
        self.require_regular()?;
        self.require_data()?;
        if !(k > 0.0) {
            return Err(Error::Domain(format!("capital must be positive, got {k}")));
        }
        Ok(self.labor_at(k))
    }

    fn labor_at(&self, k: f64) -> f64 {
        (self.ln_labor_scale + self.profit_exponent() * k.ln()).exp()
    }

    /// `π(w)`: accounting profit per unit of `k^{α/(1−β−αη)}`.
    pub fn profit_coefficient(&self) -> Result<f64> {
        self.require_regular()?;
        self.require_data()?;
        let p = &self.params;
        let pi = p.w * (self.m / p.beta) * self.ln_labor_scale.exp();
        if !(pi > 0.0) || !pi.is_finite() {
            return Err(Error::Degenerate(format!("profit coefficient is {pi}")));
        }
        Ok(pi)
    }

    /// Endogenous interest rate, the marginal accounting profit of capital.
    pub fn interest_rate(&self, k: f64) -> Result<f64> {
        if !(k > 0.0) {
            return Err(Error::Domain(format!("capital must be positive, got {k}")));
        }
        let pi = self.profit_coefficient()?;
        Ok(self.params.alpha / self.m * pi * (self.rate_exponent() * k.ln()).exp())
    }

    /// Output at the labour optimum, `y(k, l*(k))`.
    pub fn reduced_output(&self, k: f64) -> Result<f64> {
        let l = self.labor_demand(k)?;
        let p = &self.params;
        Ok(p.w * self.s / p.beta * l)
    }

    /// Closed-form steady state. `c* ≤ 0` (or overflow) gives `feasible = false`
    /// rather than an error.
    pub fn steady_state(&self) -> Result<SteadyState> {
        let pi = self.profit_coefficient()?;
        let p = &self.params;
        let r_star = p.rho + p.delta;
        let ln_k = (self.m / self.regime.k_exponent)
            * (r_star.ln() + self.m.ln() - p.alpha.ln() - pi.ln());
        let k_star = ln_k.exp();
        let l_star = (self.ln_labor_scale + self.profit_exponent() * ln_k).exp();
        let y_star = p.w * self.s / p.beta * l_star;
        let c_star = y_star - p.delta * k_star;
        let finite = [k_star, l_star, y_star, c_star].iter().all(|x| x.is_finite());
        let feasible = finite && k_star > 0.0 && c_star > 0.0 && l_star > 0.0;
        Ok(SteadyState {
            k_star,
            c_star,
            l_star,
            y_star,
            r_star,
            feasible,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn base() -> ModelParams {
        ModelParams::baseline()
    }

    fn model(p: ModelParams) -> Model {
        p.validate().unwrap()
    }

    /// y = ((θy)^η k)^α l^β solved by iteration; a contraction since αη < 1.
    fn fixed_point_output(k: f64, l: f64, p: &ModelParams) -> f64 {
        let mut y: f64 = 1.0;
        for _ in 0..10_000 {
            let next = ((p.theta * y).powf(p.eta) * k).powf(p.alpha) * l.powf(p.beta);
            if (next - y).abs() <= 1e-15 * next {
                return next;
            }
            y = next;
        }
        y
    }

    // textbook Cobb-Douglas with η = 0, written without the general exponents
    fn cd_labor(k: f64, p: &ModelParams) -> f64 {
        (p.beta * k.powf(p.alpha) / p.w).powf(1.0 / (1.0 - p.beta))
    }

    fn cd_profit_coefficient(p: &ModelParams) -> f64 {
        (1.0 - p.beta) * (p.beta / p.w).powf(p.beta / (1.0 - p.beta))
    }

    #[test]
    fn baseline_is_valid_with_negative_exponent() {
        let m = model(base());
        assert_eq!(m.regime().k_exponent_sign, ExponentSign::Negative);
        assert!(!m.regime().singular);
    }

    #[test]
    fn alpha_out_of_range_is_reported_by_name() {
        let err = ModelParams { alpha: 1.2, ..base() }.validate().unwrap_err();
        match err {
            Error::Validation(v) => assert!(v.iter().any(|x| x.field == "alpha")),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn every_violation_is_listed() {
        let raw = ModelParams {
            alpha: -1.0,
            sigma: 0.5,
            w: 0.0,
            ..base()
        };
        let fields: Vec<_> = raw.violations().iter().map(|v| v.field).collect();
        for f in ["alpha", "w", "sigma"] {
            assert!(fields.contains(&f), "{f} missing from {fields:?}");
        }
    }

    #[test]
    fn singular_at_one_third() {
        let m = model(base().with_eta(1.0 / 3.0));
        assert!(m.regime().singular);
        assert!(matches!(m.steady_state(), Err(Error::Regime { .. })));
        assert!(matches!(m.labor_demand(1.0), Err(Error::Regime { .. })));
    }

    #[test]
    fn data_volume_examples() {
        assert_eq!(data_volume(2.0, 1.0).unwrap(), 2.0);
        assert_eq!(data_volume(2.0, 0.5).unwrap(), 1.0);
        assert_eq!(data_volume(0.0, 0.7).unwrap(), 0.0);
        assert!(data_volume(-1.0, 0.5).is_err());
    }

    #[test]
    fn technology_examples() {
        assert_relative_eq!(technology(1.0, 0.5).unwrap(), 1.0);
        assert_relative_eq!(technology(4.0, 0.5).unwrap(), 2.0, max_relative = 1e-15);
        assert!((technology(0.673, 0.5).unwrap() - 0.82037).abs() < 1e-5);
        assert_eq!(technology(0.0, 0.3).unwrap(), 0.0);
        assert!(technology(0.0, 0.0).is_err());
    }

    #[test]
    fn output_examples() {
        for eta in [0.0, 0.2, 0.5, 0.9] {
            let m = model(base().with_theta(1.0).with_eta(eta));
            assert_relative_eq!(m.output(1.0, 1.0).unwrap(), 1.0, max_relative = 1e-15);
        }
        for theta in [0.0, 0.3, 1.0] {
            let m = model(base().with_eta(0.0).with_theta(theta));
            assert_eq!(m.output(1.0, 1.0).unwrap(), 1.0);
        }
        let p = base().with_theta(0.5).with_eta(0.5);
        let y = model(p).output(2.0, 1.0).unwrap();
        let oracle = fixed_point_output(2.0, 1.0, &p);
        assert!((oracle - 1.3460).abs() < 1e-4);
        assert!((y - 1.3460).abs() < 1e-4);
        assert_relative_eq!(y, oracle, max_relative = 1e-12);
        assert!(model(p).output(0.0, 1.0).is_err());
        assert!(model(p).output(1.0, -1.0).is_err());
    }

    #[test]
    fn technology_matches_the_output_fixed_point() {
        // d = θ·y at (k=2, l=1, θ=0.5, η=0.5) is the 0.673 data volume
        let p = base().with_theta(0.5).with_eta(0.5);
        let y = model(p).output(2.0, 1.0).unwrap();
        let d = data_volume(y, p.theta).unwrap();
        assert!((d - 0.673).abs() < 1e-4);
        let z = technology(d, p.eta).unwrap();
        assert!((z - 0.82037).abs() < 1e-4);
        assert_relative_eq!((z * 2.0).powf(p.alpha), y, max_relative = 1e-12);
    }

    #[test]
    fn labor_demand_eta_zero_reduction() {
        let m = model(base().with_eta(0.0));
        assert!((m.labor_demand(1.0).unwrap() - 0.13375).abs() < 1e-5);
        assert!((m.labor_demand(51.199).unwrap() - 2.560).abs() < 1e-3);
        assert_relative_eq!(
            m.labor_demand(7.3).unwrap(),
            cd_labor(7.3, m.params()),
            max_relative = 1e-12
        );
    }

    #[test]
    fn profit_coefficient_examples() {
        let m0 = model(base().with_eta(0.0));
        assert!((m0.profit_coefficient().unwrap() - 0.53499).abs() < 1e-5);

        let m = model(base());
        let l1 = m.labor_demand(1.0).unwrap();
        let oracle = m.output(1.0, l1).unwrap() - m.params().w * l1;
        assert_relative_eq!(m.profit_coefficient().unwrap(), oracle, max_relative = 1e-8);
    }

    #[test]
    fn interest_rate_examples() {
        let m0 = model(base().with_eta(0.0));
        assert!((m0.interest_rate(1.0).unwrap() - 0.40125).abs() < 1e-5);
        assert!((m0.interest_rate(51.199).unwrap() - 0.15).abs() < 1e-4);

        // bisection on r(k) = ρ + δ over a bracket, independent of the closed form
        let (mut lo, mut hi) = (1.0_f64, 1000.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if m0.interest_rate(mid).unwrap() > 0.15 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let ss = m0.steady_state().unwrap();
        assert_relative_eq!(ss.k_star, 0.5 * (lo + hi), max_relative = 1e-10);

        let m = model(base());
        let k = m.steady_state().unwrap().k_star;
        assert_relative_eq!(m.interest_rate(k).unwrap(), 0.15, max_relative = 1e-10);
    }

    #[test]
    fn steady_state_eta_zero_anchor() {
        let ss = model(base().with_eta(0.0)).steady_state().unwrap();
        assert!((ss.k_star - 51.199).abs() < 0.01);
        assert!((ss.c_star - 8.706).abs() < 0.01);
        assert!(ss.feasible);
        assert_eq!(ss.r_star, 0.07 + 0.08);

        // textbook Ramsey: MPK = α·π·k^{(α+β−1)/(1−β)}/(1−β) = ρ + δ
        let p = base().with_eta(0.0);
        let pi = cd_profit_coefficient(&p);
        let k = ((p.rho + p.delta) * (1.0 - p.beta) / (p.alpha * pi))
            .powf((1.0 - p.beta) / (p.alpha + p.beta - 1.0));
        let l = cd_labor(k, &p);
        let c = k.powf(p.alpha) * l.powf(p.beta) - p.delta * k;
        assert_relative_eq!(ss.k_star, k, max_relative = 1e-10);
        assert_relative_eq!(ss.c_star, c, max_relative = 1e-10);
    }

    #[test]
    fn theta_irrelevant_at_eta_zero() {
        let a = model(base().with_eta(0.0).with_theta(0.3)).steady_state().unwrap();
        let b = model(base().with_eta(0.0).with_theta(0.9)).steady_state().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn steady_state_consistency() {
        let m = model(base());
        let ss = m.steady_state().unwrap();
        assert!(ss.feasible);
        assert_relative_eq!(m.labor_demand(ss.k_star).unwrap(), ss.l_star, max_relative = 1e-12);
        assert_relative_eq!(m.reduced_output(ss.k_star).unwrap(), ss.y_star, max_relative = 1e-12);
        assert_relative_eq!(
            m.output(ss.k_star, ss.l_star).unwrap(),
            ss.y_star,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            ss.c_star,
            ss.y_star - m.params().delta * ss.k_star,
            max_relative = 1e-12
        );
    }

    #[test]
    fn infeasible_consumption_is_flagged() {
        // c*/k* = (1−αη)(ρ+δ)/α − δ, negative for a large δ relative to ρ
        let p = ModelParams {
            delta: 0.5,
            rho: 0.01,
            alpha: 0.9,
            beta: 0.05,
            eta: 0.5,
            ..base()
        };
        let ss = model(p).steady_state().unwrap();
        assert!(ss.k_star > 0.0);
        assert!(ss.c_star <= 0.0);
        assert!(!ss.feasible);
    }

    fn valid_point() -> impl Strategy<Value = (ModelParams, f64, f64)> {
        (0.05..0.95f64, 0.0..0.99f64, 0.01..1.0f64, 0.05..50.0f64, 0.05..10.0f64).prop_map(
            |(eta, beta_frac, theta, k, l)| {
                let p = ModelParams {
                    alpha: 0.6,
                    beta: 0.35 * beta_frac + 0.01,
                    eta,
                    theta,
                    ..ModelParams::baseline()
                };
                (p, k, l)
            },
        )
    }

    proptest! {
        #[test]
        fn output_solves_the_fixed_point((p, k, l) in valid_point()) {
            let y = model(p).output(k, l).unwrap();
            let rhs = ((p.theta * y).powf(p.eta) * k).powf(p.alpha) * l.powf(p.beta);
            prop_assert!(((y - rhs) / y).abs() < 1e-10);
        }

        #[test]
        fn labor_demand_sets_mpl_to_wage((p, k, _l) in valid_point()) {
            let m = model(p);
            prop_assume!(!m.regime().singular);
            let l = m.labor_demand(k).unwrap();
            let h = 1e-5 * l;
            let mpl = (m.output(k, l + h).unwrap() - m.output(k, l - h).unwrap()) / (2.0 * h);
            prop_assert!(((mpl - p.w) / p.w).abs() < 1e-6);
        }

        #[test]
        fn interest_rate_is_marginal_profit((p, k, _l) in valid_point()) {
            let m = model(p);
            prop_assume!(!m.regime().singular);
            let pi = m.profit_coefficient().unwrap();
            let profit = |k: f64| pi * k.powf(m.profit_exponent());
            let h = 1e-5 * k;
            let fd = (profit(k + h) - profit(k - h)) / (2.0 * h);
            let r = m.interest_rate(k).unwrap();
            prop_assert!(((r - fd) / r).abs() < 1e-6);
        }

        #[test]
        fn steady_state_rate_is_rho_plus_delta((p, _k, _l) in valid_point()) {
            let m = model(p);
            prop_assume!(!m.regime().singular);
            let ss = m.steady_state().unwrap();
            prop_assume!(ss.feasible);
            let r = m.interest_rate(ss.k_star).unwrap();
            prop_assert!(((r - ss.r_star) / ss.r_star).abs() < 1e-10);
        }

        #[test]
        fn eta_zero_matches_cobb_douglas(k in 0.05..100.0f64, beta in 0.05..0.4f64, w in 0.2..3.0f64) {
            let p = ModelParams { beta, w, eta: 0.0, ..ModelParams::baseline() };
            let m = model(p);
            prop_assume!(!m.regime().singular);
            let l = cd_labor(k, &p);
            prop_assert!((m.labor_demand(k).unwrap() / l - 1.0).abs() < 1e-8);
            let pi = cd_profit_coefficient(&p);
            prop_assert!((m.profit_coefficient().unwrap() / pi - 1.0).abs() < 1e-8);
            let y = k.powf(p.alpha) * l.powf(p.beta);
            prop_assert!((m.output(k, l).unwrap() / y - 1.0).abs() < 1e-8);
            let r = p.alpha * pi / (1.0 - beta) * k.powf((p.alpha + beta - 1.0) / (1.0 - beta));
            prop_assert!((m.interest_rate(k).unwrap() / r - 1.0).abs() < 1e-8);
        }

        #[test]
        fn theta_never_matters_at_eta_zero(t1 in 0.0..=1.0f64, t2 in 0.0..=1.0f64, k in 0.1..100.0f64) {
            let a = model(ModelParams::baseline().with_eta(0.0).with_theta(t1));
            let b = model(ModelParams::baseline().with_eta(0.0).with_theta(t2));
            prop_assert_eq!(a.steady_state().unwrap(), b.steady_state().unwrap());
            prop_assert_eq!(a.interest_rate(k).unwrap(), b.interest_rate(k).unwrap());
            prop_assert_eq!(a.labor_demand(k).unwrap(), b.labor_demand(k).unwrap());
        }
    }
}
