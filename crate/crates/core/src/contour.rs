//! Numerical Cauchy integral for `P(X_1 + … + X_k = n)` along the vertical
//! line through the saddle point, and the leading saddle-point term.
//!
//! The integrand `G(z)^k / z^{n+1}` is evaluated as `exp` of its complex
//! logarithm and rescaled by its value at `t = 0`, so nothing overflows even
//! when the answer is `e^{−500}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{LogProb, ModelParams};
use crate::quadrature::{integrate_breaks, integrate_complex_breaks, Tolerance};
use crate::saddle::{h_eval, solve_saddle};

/// Nats below the `t = 0` magnitude at which the line is truncated.
pub const CUTOFF_NATS: f64 = 60.0;
const MAX_DOUBLINGS: usize = 200;

/// The line `z* + it`, `|t| ≤ t_max`, used for the coefficient of `z^n` in
/// `G(z)^k`. `n_points` caps the number of adaptive quadrature panels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub z_star: f64,
    pub t_max: f64,
    pub n_points: usize,
    pub n: usize,
    pub k: usize,
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if k < 1 || k >= n {
        return Err(Error::Index {
            index: k,
            lo: 1,
            hi: n.saturating_sub(1),
        });
    }
    Ok(())
}

impl ContourSpec {
    /// Places the line at the saddle for `x = k/n` and truncates it where
    /// the integrand has lost [`CUTOFF_NATS`] nats.
    pub fn new(params: &ModelParams, n: usize, k: usize) -> Result<Self> {
        check_nk(n, k)?;
        let z_star = solve_saddle(params, k as f64 / n as f64)?.z_star;
        let mut spec = Self {
            z_star,
            t_max: 0.0,
            n_points: 4000,
            n,
            k,
        };
        let width = spec.gaussian_width(params)?;
        let base = log_integrand(params, n, k, Complex64::new(z_star, 0.0))?.re;
        let mut t = width;
        for _ in 0..MAX_DOUBLINGS {
            let l = log_integrand(params, n, k, Complex64::new(z_star, t))?.re;
            if base - l > CUTOFF_NATS {
                break;
            }
            t *= 2.0;
        }
        spec.t_max = t;
        Ok(spec)
    }

    /// `1/√(n|h''(z*)|)`, the width of the Gaussian peak at `t = 0`.
    pub fn gaussian_width(&self, params: &ModelParams) -> Result<f64> {
        let x = self.k as f64 / self.n as f64;
        let h2 = h_eval(params, x, Complex64::new(self.z_star, 0.0), 2)?.re;
        Ok(1.0 / (self.n as f64 * h2.abs()).sqrt())
    }
}

/// `k·ln G(z) − (n+1)·ln z`: the real part is the log-magnitude of the
/// integrand and the imaginary part its phase.
pub fn log_integrand(params: &ModelParams, n: usize, k: usize, z: Complex64) -> Result<Complex64> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::PoleAtZero);
    }
    if z.im == 0.0 && z.re >= 1.0 {
        return Err(Error::BranchCut { re: z.re, im: z.im });
    }
    let one = Complex64::new(1.0, 0.0);
    let g = one - ((one - z).ln() * params.alpha()).exp();
    Ok(g.ln() * k as f64 - z.ln() * (n + 1) as f64)
}

/// `G(z)^k / z^{n+1}` with `G(z) = 1 − (1 − z)^α`, principal branches.
pub fn integrand(params: &ModelParams, n: usize, k: usize, z: Complex64) -> Result<Complex64> {
    Ok(log_integrand(params, n, k, z)?.exp())
}

// Panel edges 0, w, 2w, 4w, … clipped at t_max.
fn panel_edges(width: f64, t_max: f64) -> Vec<f64> {
    let mut edges = vec![0.0];
    let mut t = width.min(t_max);
    while t < t_max {
        edges.push(t);
        t *= 2.0;
    }
    edges.push(t_max);
    edges
}

fn scaled_integrand(
    params: &ModelParams,
    spec: &ContourSpec,
    base: f64,
    t: f64,
) -> Complex64 {
    match log_integrand(params, spec.n, spec.k, Complex64::new(spec.z_star, t)) {
        Ok(l) => (l - base).exp(),
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    }
}

fn validate_spec(spec: &ContourSpec) -> Result<()> {
    check_nk(spec.n, spec.k)?;
    if !(spec.z_star > 0.0 && spec.z_star < 1.0) {
        return Err(Error::OutOfRange {
            name: "z_star",
            value: spec.z_star,
            expected: "0 < z_star < 1",
        });
    }
    if !(spec.t_max > 0.0) || spec.n_points == 0 {
        return Err(Error::Domain("t_max and n_points must be positive".into()));
    }
    Ok(())
}

/// `(1/2π)∫_{−t_max}^{t_max} G(z*+it)^k/(z*+it)^{n+1} dt`, computed as
/// `(1/π)∫_0^{t_max} Re(·) dt` using conjugate symmetry.
pub fn vertical_line_integral(spec: &ContourSpec, params: &ModelParams) -> Result<LogProb> {
    validate_spec(spec)?;
    let base = log_integrand(params, spec.n, spec.k, Complex64::new(spec.z_star, 0.0))?.re;
    let width = spec.gaussian_width(params)?;
    let edges = panel_edges(width, spec.t_max);
    let tol = Tolerance::new(1e-15 * width, 1e-11, spec.n_points);
    let total = integrate_breaks(|t| scaled_integrand(params, spec, base, t).re, &edges, tol)?.value;
    if !(total > 0.0) {
        return Err(Error::QuadratureFailure {
            abs_err: total.abs(),
            tolerance: 0.0,
        });
    }
    LogProb::new(base + (total / PI).ln())
}

/// The same integral over the full line `[−t_max, t_max]` without using
/// symmetry, returned as `(log scale, value / e^{scale})`. The imaginary
/// part should vanish; its size measures the quadrature's symmetry error.
pub fn full_line_integral(spec: &ContourSpec, params: &ModelParams) -> Result<(f64, Complex64)> {
    validate_spec(spec)?;
    let base = log_integrand(params, spec.n, spec.k, Complex64::new(spec.z_star, 0.0))?.re;
    let width = spec.gaussian_width(params)?;
    let edges = panel_edges(width, spec.t_max);
    let tol = Tolerance::new(1e-15 * width, 1e-11, spec.n_points);
    let mut both: Vec<f64> = edges.iter().skip(1).rev().map(|t| -t).collect();
    both.extend_from_slice(&edges);
    let total = integrate_complex_breaks(|t| scaled_integrand(params, spec, base, t), &both, tol)?;
    Ok((base, total.value / (2.0 * PI)))
}

/// Log of `e^{−n h(z*)} / (z* √(2π n |h''(z*)|))`.
pub fn saddle_asymptotic(params: &ModelParams, n: usize, k: usize) -> Result<LogProb> {
    check_nk(n, k)?;
    let nf = n as f64;
    let s = solve_saddle(params, k as f64 / nf)?;
    LogProb::new(-nf * s.h_val - s.z_star.ln() - 0.5 * (2.0 * PI * nf * s.h2.abs()).ln())
}

/// `2^{(1+α/2)/(1−α)} e^{2h(z*)/(1−α)}`, the conservative truncation height
/// from the analytic error bound; reported for comparison with `t_max`.
pub fn analytic_truncation_bound(alpha: f64, h_star: f64) -> f64 {
    2f64.powf((1.0 + alpha / 2.0) / (1.0 - alpha)) * (2.0 * h_star / (1.0 - alpha)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sibuya::{convolve_power, pmf_table};

    fn half() -> ModelParams {
        ModelParams::new(0.5, 1.0).unwrap()
    }

    fn convolution(params: &ModelParams, n: usize, k: usize) -> f64 {
        let pmf = pmf_table(params, n);
        convolve_power(&pmf, k, n).unwrap().log_q(n)
    }

    #[test]
    fn integrand_examples() {
        let p = half();
        let v = integrand(&p, 2, 2, Complex64::new(0.5, 0.0)).unwrap();
        let expected = (1.0 - 0.5f64.sqrt()).powi(2) / 0.125;
        assert!((v.re - expected).abs() < 1e-14 && v.im == 0.0);
        assert!((expected - 0.68629).abs() < 1e-5);
        let z = Complex64::new(0.4, 0.7);
        let a = integrand(&p, 9, 4, z).unwrap();
        let b = integrand(&p, 9, 4, z.conj()).unwrap();
        assert!((a - b.conj()).norm() < 1e-14 * a.norm());
        assert!(integrand(&p, 2, 1, Complex64::new(0.0, 0.0)).is_err());
        assert!(integrand(&p, 2, 1, Complex64::new(1.5, 0.0)).is_err());
    }

    #[test]
    fn small_cases_match_convolution() {
        let p = half();
        let spec = ContourSpec::new(&p, 3, 2).unwrap();
        let v = vertical_line_integral(&spec, &p).unwrap().prob();
        assert!((v - 0.125).abs() < 1e-9, "{v}");
        let spec = ContourSpec::new(&p, 100, 50).unwrap();
        let v = vertical_line_integral(&spec, &p).unwrap().ln();
        assert!((v - convolution(&p, 100, 50)).abs() < 1e-6);
    }

    #[test]
    fn symmetric_part_dominates() {
        let p = ModelParams::new(0.3, 1.0).unwrap();
        let spec = ContourSpec::new(&p, 120, 40).unwrap();
        let (_, v) = full_line_integral(&spec, &p).unwrap();
        assert!(v.im.abs() < 1e-10 * v.re.abs());
    }

    #[test]
    fn magnitude_peaks_at_the_saddle() {
        let p = ModelParams::new(0.7, 1.0).unwrap();
        let spec = ContourSpec::new(&p, 200, 80).unwrap();
        let w = spec.gaussian_width(&p).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..=40 {
            let t = w * i as f64 / 10.0;
            let l = log_integrand(&p, 200, 80, Complex64::new(spec.z_star, t)).unwrap().re;
            assert!(l < prev);
            prev = l;
        }
    }

    #[test]
    fn saddle_term_converges() {
        let p = half();
        let exact = |n: usize, k: usize| {
            let spec = ContourSpec::new(&p, n, k).unwrap();
            vertical_line_integral(&spec, &p).unwrap().ln()
        };
        let e1 = (saddle_asymptotic(&p, 200, 100).unwrap().ln() - exact(200, 100)).abs();
        let e2 = (saddle_asymptotic(&p, 400, 200).unwrap().ln() - exact(400, 200)).abs();
        assert!(e1 < 0.02 && e2 < 0.01 && e2 < e1);
    }

    #[test]
    fn rejects_degenerate_k() {
        assert!(ContourSpec::new(&half(), 5, 5).is_err());
        assert!(saddle_asymptotic(&half(), 5, 0).is_err());
    }
}
