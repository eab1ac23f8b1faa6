//! Exponential integral E1 for positive real arguments.
//!
//! Power series below the crossover, modified Lentz continued fraction
//! above it. The continued fraction evaluates the scaled form e^x E1(x)
//! directly, so the scaled entry point never over- or underflows for
//! large x.

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.5772156649015329;

/// log2(e), conversion factor from nats to bits.
pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

const SERIES_CROSSOVER: f64 = 1.0;
const SERIES_MAX_TERMS: usize = 60;
const LENTZ_MAX_ITERS: usize = 200;
const LENTZ_TINY: f64 = 1e-300;

/// E1(x) = integral of e^(-t)/t over t in [x, inf), for x > 0.
///
/// Underflows to 0 for x beyond about 700, as e^(-x) does.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::DomainError("exp_integral_e1 requires finite x > 0"));
    }
    if x <= SERIES_CROSSOVER {
        e1_series(x)
    } else {
        Ok(e1_lentz_scaled(x)? * (-x).exp())
    }
}

/// Scaled form e^x E1(x), finite and O(1/x) for all x > 0.
pub fn exp_e1_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::DomainError("exp_e1_scaled requires finite x > 0"));
    }
    if x <= SERIES_CROSSOVER {
        Ok(e1_series(x)? * x.exp())
    } else {
        e1_lentz_scaled(x)
    }
}

/// E1(x) = -gamma - ln x + sum_{k>=1} (-1)^(k+1) x^k / (k * k!).
/// Terms shrink fast for x <= 1; cancellation stays mild there.
fn e1_series(x: f64) -> Result<f64> {
    let mut sum = 0.0f64;
    let mut term = 1.0f64; // x^k / k! carried incrementally
    for k in 1..=SERIES_MAX_TERMS {
        term *= -x / k as f64;
        let contrib = -term / k as f64;
        sum += contrib;
        if contrib.abs() < f64::EPSILON * sum.abs().max(1.0) {
            return Ok(-EULER_GAMMA - x.ln() + sum);
        }
    }
    Err(Error::ConvergenceFailure("E1 series"))
}

/// Modified Lentz evaluation of the continued fraction
/// e^x E1(x) = 1 / (x + 1 - 1/(x + 3 - 4/(x + 5 - 9/(...)))).
fn e1_lentz_scaled(x: f64) -> Result<f64> {
    let mut b = x + 1.0;
    let mut c = 1.0 / LENTZ_TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=LENTZ_MAX_ITERS {
        let a = -((i * i) as f64);
        b += 2.0;
        d = a * d + b;
        if d.abs() < LENTZ_TINY {
            d = LENTZ_TINY;
        }
        c = b + a / c;
        if c.abs() < LENTZ_TINY {
            c = LENTZ_TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            return Ok(h);
        }
    }
    Err(Error::ConvergenceFailure("E1 continued fraction"))
}
