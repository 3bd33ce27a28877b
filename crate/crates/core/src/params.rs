//! Model parameters and the scalar helpers shared by every other module.
//!
//! Probabilities travel through the crate as natural logarithms. [`LogProb`]
//! is the validated form (at most zero); unnormalized log-weights stay plain
//! `f64`.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Slack allowed above zero when wrapping a log-probability.
const LOG_PROB_SLACK: f64 = 1e-9;

/// The `(alpha, theta)` pair of the Ewens-Pitman model with `0 < alpha < 1`
/// and `theta > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    alpha: f64,
    theta: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        validate_params(alpha, theta)
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `theta / alpha`, the shape that appears in every prefactor.
    #[inline]
    pub fn theta_over_alpha(&self) -> f64 {
        self.theta / self.alpha
    }

    /// `ln Γ(θ) − ln Γ(θ/α)`.
    pub fn log_gamma_ratio(&self) -> f64 {
        ln_gamma(self.theta) - ln_gamma(self.theta_over_alpha())
    }
}

pub fn validate_params(alpha: f64, theta: f64) -> Result<ModelParams> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            expected: "0 < alpha < 1",
        });
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            expected: "theta > 0",
        });
    }
    Ok(ModelParams { alpha, theta })
}

/// A probability stored as its natural logarithm. `-inf` encodes zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogProb(f64);

impl LogProb {
    pub const ONE: LogProb = LogProb(0.0);
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);

    pub fn new(log_value: f64) -> Result<Self> {
        if log_value.is_nan() || log_value > LOG_PROB_SLACK {
            return Err(Error::Domain(format!(
                "log-probability {log_value} is not in [-inf, 0]"
            )));
        }
        Ok(LogProb(log_value))
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn prob(self) -> f64 {
        self.0.exp()
    }
}

/// `ln Γ(a+z) − ln Γ(a)`, the log of the rising factorial `(a)_{z↑1}`.
pub fn log_rising(a: f64, z: f64) -> Result<f64> {
    if !(a > 0.0) || !(a + z > 0.0) {
        return Err(Error::Domain(format!(
            "log_rising needs a > 0 and a + z > 0, got a = {a}, z = {z}"
        )));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    Ok(ln_gamma(a + z) - ln_gamma(a))
}

/// Fractional part in the ceiling convention, `⌈x⌉ − x ∈ [0, 1)`.
#[inline]
pub fn frac_ceil(x: f64) -> f64 {
    x.ceil() - x
}

/// `ln(e^a + e^b)` without overflow.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{v_i}`, shifted by the maximum and accumulated from the smallest
/// term upward.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let mut scaled: Vec<f64> = values.iter().map(|v| (v - max).exp()).collect();
    scaled.sort_by(|a, b| a.total_cmp(b));
    max + scaled.iter().sum::<f64>().ln()
}
