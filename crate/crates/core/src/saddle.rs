//! The saddle point of `h(z) = ln z − x ln(1 − (1 − z)^α)` on `(0, 1)` and
//! the rate function `I(x) = h(z(x))`.
//!
//! With `z = w/(1+w)` the critical equation reduces to
//! `(1 + w)^α − 1 − αxw = 0`, whose relevant root lies in
//! `(x^{−1/(1−α)} − 1, (αx)^{−1/(1−α)} − 1)`. For small `x` the root is huge
//! (`1 − z` can be far below machine epsilon), so the solver works with
//! `ln w` and every quantity downstream is rebuilt from `w` instead of `z`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::ModelParams;

const MAX_BISECTIONS: usize = 400;

/// The solved saddle at `x` together with `h` and its derivatives there and
/// the first two derivatives of the rate function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleSolution {
    pub x: f64,
    /// `z(x)` in `(0, 1)`.
    pub z_star: f64,
    /// `w = z/(1 − z)`.
    pub w_star: f64,
    /// `1 − z(x)`, kept separately because it underflows `1 − z` in f64.
    pub one_minus_z: f64,
    /// `h(z(x)) = I(x)`.
    pub h_val: f64,
    pub h2: f64,
    pub h3: f64,
    pub h4: f64,
    /// `I'(x) = −ln(1 − (1 − z)^α)`.
    pub i1: f64,
    /// `I''(x)`.
    pub i2: f64,
    /// `|h'(z(x))|`.
    pub residual: f64,
}

/// A real point of `(0, 1)` carried as `z`, `u = 1 − z` and their logs.
#[derive(Debug, Clone, Copy)]
struct RealPoint {
    z: f64,
    u: f64,
    ln_z: f64,
    ln_u: f64,
}

impl RealPoint {
    fn from_w(w: f64) -> Self {
        let l1p = w.ln_1p();
        // ln z = −ln(1 + 1/w) keeps full relative accuracy when w is huge
        let ln_z = if w > 1.0 {
            -(1.0 / w).ln_1p()
        } else {
            w.ln() - l1p
        };
        Self {
            z: w / (1.0 + w),
            u: 1.0 / (1.0 + w),
            ln_z,
            ln_u: -l1p,
        }
    }

    fn from_z(z: f64) -> Self {
        Self {
            z,
            u: 1.0 - z,
            ln_z: z.ln(),
            ln_u: (-z).ln_1p(),
        }
    }
}

/// `h` and its first four derivatives at a real point, from
/// `G^{(m)}(z) = α (1−α)_{(m−1)↑1} (1 − z)^{α−m}` and Faà di Bruno for `ln G`.
fn real_derivatives(alpha: f64, x: f64, p: &RealPoint) -> [f64; 5] {
    let u_alpha = (alpha * p.ln_u).exp();
    let g = -(alpha * p.ln_u).exp_m1();
    let ln_g = if u_alpha < 0.5 {
        (-u_alpha).ln_1p()
    } else {
        g.ln()
    };
    // r_m = G^{(m)} / G
    let mut r = [0.0f64; 5];
    let mut coeff = alpha;
    for (m, slot) in r.iter_mut().enumerate().skip(1) {
        if m > 1 {
            coeff *= (m - 1) as f64 - alpha;
        }
        *slot = coeff * ((alpha - m as f64) * p.ln_u).exp() / g;
    }
    let q1 = r[1];
    let q2 = r[2] - r[1] * r[1];
    let q3 = r[3] - 3.0 * r[1] * r[2] + 2.0 * r[1].powi(3);
    let q4 = r[4] - 4.0 * r[1] * r[3] - 3.0 * r[2] * r[2] + 12.0 * r[1] * r[1] * r[2]
        - 6.0 * r[1].powi(4);
    let iz = 1.0 / p.z;
    [
        p.ln_z - x * ln_g,
        iz - x * q1,
        -iz * iz - x * q2,
        2.0 * iz.powi(3) - x * q3,
        -6.0 * iz.powi(4) - x * q4,
    ]
}

fn complex_derivative(alpha: f64, x: f64, z: Complex64, order: usize) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let ln_u = (one - z).ln();
    let g = one - (ln_u * alpha).exp();
    if order == 0 {
        return z.ln() - g.ln() * x;
    }
    let mut r = [Complex64::new(0.0, 0.0); 5];
    let mut coeff = alpha;
    for (m, slot) in r.iter_mut().enumerate().skip(1) {
        if m > 1 {
            coeff *= (m - 1) as f64 - alpha;
        }
        *slot = (ln_u * (alpha - m as f64)).exp() * coeff / g;
    }
    let iz = one / z;
    match order {
        1 => iz - r[1] * x,
        2 => -iz * iz - (r[2] - r[1] * r[1]) * x,
        3 => iz.powi(3) * 2.0 - (r[3] - r[1] * r[2] * 3.0 + r[1].powi(3) * 2.0) * x,
        _ => {
            -iz.powi(4) * 6.0
                - (r[4] - r[1] * r[3] * 4.0 - r[2] * r[2] * 3.0 + r[1] * r[1] * r[2] * 12.0
                    - r[1].powi(4) * 6.0)
                    * x
        }
    }
}

/// The `order`-th derivative (0 through 4) of `h` at `z`, principal branch.
/// Real `z` in `(0, 1)` goes through the real-arithmetic path.
pub fn h_eval(params: &ModelParams, x: f64, z: Complex64, order: usize) -> Result<Complex64> {
    if order > 4 {
        return Err(Error::Domain(format!("derivative order {order} > 4")));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::PoleAtZero);
    }
    if z.im == 0.0 && z.re >= 1.0 {
        return Err(Error::BranchCut { re: z.re, im: z.im });
    }
    let alpha = params.alpha();
    if z.im == 0.0 && z.re > 0.0 {
        let d = real_derivatives(alpha, x, &RealPoint::from_z(z.re));
        return Ok(Complex64::new(d[order], 0.0));
    }
    Ok(complex_derivative(alpha, x, z, order))
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            expected: "0 < x < 1",
        });
    }
    Ok(())
}

// (1 + w)^α − 1 − αxw
fn critical(alpha: f64, x: f64, w: f64) -> f64 {
    (alpha * w.ln_1p()).exp_m1() - alpha * x * w
}

/// Solves `(1 + w)^α − 1 − αxw = 0` for its root above the stationary point
/// `x^{−1/(1−α)} − 1`, by bisection in `ln w` followed by guarded Newton
/// polishing.
pub fn solve_saddle(params: &ModelParams, x: f64) -> Result<SaddleSolution> {
    check_x(x)?;
    let alpha = params.alpha();
    let inv = 1.0 / (1.0 - alpha);
    let mut lo = (-x.ln() * inv).exp_m1().ln();
    let mut hi = (-(alpha * x).ln() * inv).exp_m1().ln();
    if !(critical(alpha, x, lo.exp()) > 0.0) {
        // w_peak is so close to the root that f rounds to zero or below there
        lo -= 1e-9 * lo.abs().max(1.0);
    }
    let mut widen = 0;
    while !(critical(alpha, x, hi.exp()) < 0.0) {
        hi += 1.0;
        widen += 1;
        if widen > 64 {
            return Err(Error::NoConvergence { iterations: widen });
        }
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if critical(alpha, x, mid.exp()) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (w_lo, w_hi) = (lo.exp(), hi.exp());
    let mut w = 0.5 * (w_lo + w_hi);
    for _ in 0..3 {
        let f = critical(alpha, x, w);
        let df = alpha * ((alpha - 1.0) * w.ln_1p()).exp() - alpha * x;
        let next = w - f / df;
        if !(next >= w_lo && next <= w_hi) {
            break;
        }
        w = next;
    }
    Ok(assemble(alpha, x, w))
}

fn assemble(alpha: f64, x: f64, w: f64) -> SaddleSolution {
    let p = RealPoint::from_w(w);
    let d = real_derivatives(alpha, x, &p);
    let u_alpha = (alpha * p.ln_u).exp();
    let g = -(alpha * p.ln_u).exp_m1();
    let rate_slope = -(if u_alpha < 0.5 {
        (-u_alpha).ln_1p()
    } else {
        g.ln()
    });
    // z'(x) = α z u^α / ((1 − αx) u^α − (1 − α))
    let dz_dx = alpha * p.z * u_alpha / ((1.0 - alpha * x) * u_alpha - (1.0 - alpha));
    let rate_curvature = -alpha * ((alpha - 1.0) * p.ln_u).exp() / g * dz_dx;
    SaddleSolution {
        x,
        z_star: p.z,
        w_star: w,
        one_minus_z: p.u,
        h_val: d[0],
        h2: d[2],
        h3: d[3],
        h4: d[4],
        i1: rate_slope,
        i2: rate_curvature,
        residual: d[1].abs(),
    }
}

/// `I(x) = h(z(x))`.
pub fn rate_function(params: &ModelParams, x: f64) -> Result<f64> {
    Ok(solve_saddle(params, x)?.h_val)
}

/// Leading small-`x` behaviour of `1 − z(x)`, `h''(z(x))` and `I''(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallXExpansion {
    pub one_minus_z_leading: f64,
    pub h2_leading: f64,
    pub i2_leading: f64,
}

pub fn small_x_expansions(params: &ModelParams, x: f64) -> Result<SmallXExpansion> {
    check_x(x)?;
    let alpha = params.alpha();
    let inv = 1.0 / (1.0 - alpha);
    let a_pow = alpha.powf(inv);
    Ok(SmallXExpansion {
        one_minus_z_leading: a_pow * x.powf(inv),
        h2_leading: -(1.0 - alpha) / a_pow * x.powf(-inv),
        i2_leading: a_pow * inv * x.powf((2.0 * alpha - 1.0) * inv),
    })
}

/// `α^{1/(1−α)}/(1−α)`, the coefficient of the small-`x` law of `I''`.
pub fn curvature_coefficient(alpha: f64) -> f64 {
    alpha.powf(1.0 / (1.0 - alpha)) / (1.0 - alpha)
}


#[cfg(test)]
mod identity_tests {
    use super::*;

    fn legendre_objective(alpha: f64, x: f64, lambda: f64) -> f64 {
        let base = -(-lambda).exp_m1();
        lambda * x + (-base.powf(1.0 / alpha)).ln_1p()
    }

    // Golden-section maximisation over ln λ; independent of the saddle solver.
    fn legendre_rate(alpha: f64, x: f64) -> f64 {
        let phi = 0.5 * (5.0f64.sqrt() - 1.0);
        let (mut a, mut b) = (-40.0f64, 6.0f64);
        let f = |s: f64| legendre_objective(alpha, x, s.exp());
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..200 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = f(d);
            }
        }
        f(0.5 * (a + b))
    }

    #[test]
    fn legendre_form_matches_rate_function() {
        let mut checked = 0;
        for &alpha in &[0.2, 0.5, 0.8, 0.35] {
            for &x in &[0.1, 0.3, 0.5, 0.7, 0.9] {
                let params = ModelParams::new(alpha, 1.0).unwrap();
                let i = rate_function(&params, x).unwrap();
                let l = legendre_rate(alpha, x);
                assert!((i - l).abs() < 1e-8, "alpha {alpha} x {x}: {i} vs {l}");
                checked += 1;
            }
        }
        assert_eq!(checked, 20);
    }

    #[test]
    fn slope_is_the_legendre_maximiser() {
        let params = ModelParams::new(0.5, 1.0).unwrap();
        let s = solve_saddle(&params, 0.4).unwrap();
        let at = legendre_objective(0.5, 0.4, s.i1);
        assert!((at - s.h_val).abs() < 1e-13);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let step = 1e-4;
        for a10 in 1..=9 {
            let params = ModelParams::new(a10 as f64 / 10.0, 1.0).unwrap();
            for x100 in (5..=95).step_by(5) {
                let x = x100 as f64 / 100.0;
                let s = solve_saddle(&params, x).unwrap();
                let ip = rate_function(&params, x + step).unwrap();
                let im = rate_function(&params, x - step).unwrap();
                let d1 = (ip - im) / (2.0 * step);
                let d2 = (ip - 2.0 * s.h_val + im) / (step * step);
                assert!((d1 - s.i1).abs() < 1e-6, "I' a {a10} x {x}: {d1} vs {}", s.i1);
                assert!(
                    (d2 - s.i2).abs() < 1e-4 * s.i2.abs().max(1.0),
                    "I'' a {a10} x {x}: {d2} vs {}",
                    s.i2
                );
            }
        }
    }

    #[test]
    fn expansion_errors_shrink_with_x() {
        for &alpha in &[0.3, 0.5, 0.7] {
            let params = ModelParams::new(alpha, 1.0).unwrap();
            let mut prev_u = f64::INFINITY;
            let mut prev_h2 = f64::INFINITY;
            for &x in &[0.05, 0.02, 0.01] {
                let s = solve_saddle(&params, x).unwrap();
                let e = small_x_expansions(&params, x).unwrap();
                let eu = (s.one_minus_z / e.one_minus_z_leading - 1.0).abs();
                let eh = (s.h2 / e.h2_leading - 1.0).abs();
                assert!(eu < prev_u && eh < prev_h2, "alpha {alpha} x {x}");
                prev_u = eu;
                prev_h2 = eh;
            }
        }
    }

    #[test]
    fn curvature_trichotomy() {
        let lead = |alpha: f64, x: f64| {
            small_x_expansions(&ModelParams::new(alpha, 1.0).unwrap(), x)
                .unwrap()
                .i2_leading
        };
        assert!(lead(0.3, 0.01) > lead(0.3, 0.02));
        assert!(lead(0.7, 0.01) < lead(0.7, 0.02));
        assert_eq!(lead(0.5, 0.01), lead(0.5, 0.02));
    }
}
