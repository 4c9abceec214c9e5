//! Dormand–Prince 5(4) with embedded error estimate, for autonomous planar
//! systems.

/// Why a right-hand side could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum EvalError {
    /// The state left the region where the vector field is defined.
    OutOfDomain,
    Other(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Outcome {
    Finished,
    Converged,
    Stopped,
    LeftDomain,
}

#[derive(Debug, Clone)]
pub(crate) struct Failure {
    pub t: f64,
    pub reason: String,
}

pub(crate) struct Settings {
    pub t_max: f64,
    pub rtol: f64,
    /// Terminate once the relative rate norm drops below this.
    pub converge_rate: Option<f64>,
}

// The system is autonomous, so the stage nodes c2..c5 never enter.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order weights minus 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type V = [f64; 2];

fn axpy(y: &V, h: f64, terms: &[(f64, &V)]) -> V {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

fn rate_norm(y: &V, f: &V) -> f64 {
    ((f[0] / y[0]).powi(2) + (f[1] / y[1]).powi(2)).sqrt()
}

/// Integrate `y' = f(y)` from `y0` over `[0, t_max]`, calling `record` after
/// every accepted step and `stop` to test for early termination.
pub(crate) fn solve<F, S, R>(
    mut f: F,
    y0: V,
    settings: &Settings,
    mut stop: S,
    mut record: R,
) -> Result<Outcome, Failure>
where
    F: FnMut(&V) -> Result<V, EvalError>,
    S: FnMut(&V) -> bool,
    R: FnMut(f64, &V),
{
    let Settings {
        t_max,
        rtol,
        converge_rate,
    } = *settings;
    let fail = |t: f64, reason: String| Failure { t, reason };

    let mut t = 0.0;
    let mut y = y0;
    record(t, &y);
    if t_max <= 0.0 {
        return Ok(Outcome::Finished);
    }
    let mut k1 = f(&y).map_err(|e| match e {
        EvalError::OutOfDomain => fail(0.0, "initial state outside the domain".into()),
        EvalError::Other(m) => fail(0.0, m),
    })?;
    if let Some(tol) = converge_rate {
        if rate_norm(&y, &k1) < tol {
            return Ok(Outcome::Converged);
        }
    }

    let rate = rate_norm(&y, &k1);
    let mut h = if rate > 0.0 {
        (0.01 / rate).min(t_max)
    } else {
        t_max
    };
    let h_min = |t: f64| 1e-14 * (1.0 + t.abs());
    let mut domain_trouble = false;

    while t < t_max {
        if t + h > t_max {
            h = t_max - t;
        }
        if h < h_min(t) {
            if domain_trouble {
                return Ok(Outcome::LeftDomain);
            }
            return Err(fail(t, format!("step size underflow (h = {h:e})")));
        }

        let stages = (|| -> Result<(V, V, V), EvalError> {
            let k2 = f(&axpy(&y, h, &[(A21, &k1)]))?;
            let k3 = f(&axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
            let k4 = f(&axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
            let k5 = f(&axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
            let k6 = f(&axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ))?;
            let y_new = axpy(
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = f(&y_new)?;
            let err = axpy(
                &[0.0, 0.0],
                h,
                &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
            );
            Ok((y_new, k7, err))
        })();

        let (y_new, k7, err) = match stages {
            Ok(v) => v,
            Err(EvalError::OutOfDomain) => {
                domain_trouble = true;
                h *= 0.25;
                continue;
            }
            Err(EvalError::Other(m)) => return Err(fail(t, m)),
        };
        if !(y_new[0].is_finite() && y_new[1].is_finite()) {
            return Err(fail(t, "state overflowed".into()));
        }

        let mut err_norm: f64 = 0.0;
        for i in 0..2 {
            let scale = rtol * y[i].abs().max(y_new[i].abs()) + f64::MIN_POSITIVE;
            err_norm = err_norm.max(err[i].abs() / scale);
        }

        if err_norm <= 1.0 {
            t = if t_max - (t + h) < h_min(t) { t_max } else { t + h };
            y = y_new;
            k1 = k7;
            domain_trouble = false;
            record(t, &y);
            if stop(&y) {
                return Ok(Outcome::Stopped);
            }
            if let Some(tol) = converge_rate {
                if rate_norm(&y, &k1) < tol {
                    return Ok(Outcome::Converged);
                }
            }
            let factor = if err_norm == 0.0 {
                5.0
            } else {
                (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        } else {
            h *= (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    Ok(Outcome::Finished)
}
