//! The positive α-stable density in Zolotarev's integral form and the law of
//! the α-diversity `S_{α,θ} = lim K_n/n^α`: density, tail, and the leading
//! large-`x` tail term.
//!
//! Every density is an integral of `A(φ) e^{−c·A(φ)}` over `(0, π)`, where
//! `A` increases from `A(0⁺) = (1−α)α^{α/(1−α)}` to `+∞`. The factor
//! `e^{−c·A(0⁺)}` is pulled out in log space so large arguments do not
//! underflow before the final exponentiation.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::quadrature::{integrate_breaks, Tolerance};

// Geometric refinement of the φ-panels towards both ends of (0, π).
const END_REFINEMENT: i32 = 52;
const PHI_TOL: Tolerance = Tolerance {
    abs: 1e-300,
    rel: 1e-12,
    max_intervals: 4000,
};
/// Nats below the peak at which improper `s`-integrals are truncated.
const TRUNCATION_NATS: f64 = 40.0;

// ln(sin y / y); the Taylor series below 0.1 keeps full relative accuracy,
// which the quadratic onset −y²/6 needs when multiplied by a large argument.
fn ln_sinc(y: f64) -> f64 {
    let y2 = y * y;
    if y.abs() < 0.1 {
        const C: [f64; 6] = [
            -1.0 / 6.0,
            -1.0 / 180.0,
            -1.0 / 2835.0,
            -1.0 / 37800.0,
            -1.0 / 467775.0,
            -691.0 / 3831077250.0,
        ];
        C.iter().rev().fold(0.0, |acc, c| acc * y2 + c) * y2
    } else {
        (y.sin() / y).ln()
    }
}

/// `A(φ) = (sin αφ / sin φ)^{1/(1−α)} · sin((1−α)φ) / sin αφ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableKernel {
    alpha: f64,
}

impl StableKernel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                expected: "0 < alpha < 1",
            });
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `ln A(φ)`; `+∞` at and beyond `π`.
    pub fn log_a(&self, phi: f64) -> f64 {
        self.a0().ln() + self.log_ratio(phi)
    }

    /// `ln(A(φ)/A(0⁺))`, accurate relative to its own (small) size near 0.
    pub fn log_ratio(&self, phi: f64) -> f64 {
        if phi >= PI {
            return f64::INFINITY;
        }
        let a = self.alpha;
        (ln_sinc(a * phi) - ln_sinc(phi)) / (1.0 - a) + ln_sinc((1.0 - a) * phi)
            - ln_sinc(a * phi)
    }

    /// `A(0⁺) = (1−α)α^{α/(1−α)}`, also the constant of the tail exponent.
    pub fn a0(&self) -> f64 {
        let a = self.alpha;
        (1.0 - a) * a.powf(a / (1.0 - a))
    }

    pub fn a(&self, phi: f64) -> f64 {
        self.log_a(phi).exp()
    }

    /// `ln A(π − δ)`, exact in `δ`: `sin φ` is taken as `sin δ`, so the
    /// rounding of `π` does not swamp tiny `δ`.
    pub fn log_a_near_pi(&self, delta: f64) -> f64 {
        if delta <= 0.0 {
            return f64::INFINITY;
        }
        if delta > 0.5 * PI {
            return self.log_a(PI - delta);
        }
        let a = self.alpha;
        let phi = PI - delta;
        let ln_sin_a = (a * phi).sin().ln();
        (ln_sin_a - delta.sin().ln()) / (1.0 - a) + ((1.0 - a) * phi).sin().ln() - ln_sin_a
    }

    /// `∫_0^π g(ln A(φ), ln(A(φ)/A(0⁺))) dφ`, split at `π/2`; the upper
    /// half is integrated in `δ = π − φ`. Both halves get breakpoints
    /// refined geometrically towards their endpoint at `0` or `π`.
    fn integrate_phi<G: Fn(f64, f64) -> f64>(&self, g: G) -> Result<f64> {
        let ln_a0 = self.a0().ln();
        let edges = geometric_edges(0.5 * PI);
        let lower = integrate_breaks(
            |phi| {
                let r = self.log_ratio(phi);
                g(ln_a0 + r, r)
            },
            &edges,
            PHI_TOL,
        )?
        .value;
        let upper = integrate_breaks(
            |d| {
                let la = self.log_a_near_pi(d);
                g(la, la - ln_a0)
            },
            &edges,
            PHI_TOL,
        )?
        .value;
        Ok(lower + upper)
    }

    /// `ln ∫_0^π A(φ) e^{−c(A(φ) − A(0⁺))} dφ`.
    fn log_integral(&self, c: f64) -> Result<f64> {
        let a0 = self.a0();
        let total = self.integrate_phi(|la, lr| {
            if la == f64::INFINITY {
                0.0
            } else {
                (la - c * a0 * lr.exp_m1()).exp()
            }
        })?;
        Ok(total.ln())
    }
}

// 0, top·2^{−52}, …, top/4, top/2, top
fn geometric_edges(top: f64) -> Vec<f64> {
    let mut edges = vec![0.0];
    for j in (0..=END_REFINEMENT).rev() {
        edges.push(top * 0.5f64.powi(j));
    }
    edges
}

/// `ln f_α(z)` of the positive α-stable density.
pub fn log_stable_density(alpha: f64, z: f64) -> Result<f64> {
    let kernel = StableKernel::new(alpha)?;
    if !(z > 0.0) {
        return Err(Error::OutOfRange {
            name: "z",
            value: z,
            expected: "z > 0",
        });
    }
    let inv = 1.0 / (1.0 - alpha);
    let c = (-alpha * inv * z.ln()).exp();
    Ok((alpha * inv / PI).ln() - inv * z.ln() - c * kernel.a0() + kernel.log_integral(c)?)
}

/// `f_α(z) = (1/π)(α/(1−α)) z^{−1/(1−α)} ∫_0^π A e^{−z^{−α/(1−α)}A} dφ`.
pub fn stable_density(alpha: f64, z: f64) -> Result<f64> {
    Ok(log_stable_density(alpha, z)?.exp())
}

/// Largest number of terms the series cross-check will sum.
pub const SERIES_MAX_TERMS: usize = 30;

/// `(1/π) Σ_{j=1}^{terms} (−1)^{j+1} sin(παj) Γ(αj+1)/(j! z^{αj+1})`, the
/// convergent series of `f_α`; accurate only for moderately large `z`.
pub fn stable_density_series(alpha: f64, z: f64, terms: usize) -> Result<f64> {
    StableKernel::new(alpha)?;
    if !(z >= 2.0) || terms == 0 || terms > SERIES_MAX_TERMS {
        return Err(Error::Domain(format!(
            "series cross-check needs z >= 2 and 1..={SERIES_MAX_TERMS} terms"
        )));
    }
    let mut sum = 0.0;
    for j in 1..=terms {
        let jf = j as f64;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        let mag = (ln_gamma(alpha * jf + 1.0) - ln_gamma(jf + 1.0) - (alpha * jf + 1.0) * z.ln())
            .exp();
        sum += sign * (PI * alpha * jf).sin() * mag;
    }
    Ok(sum / PI)
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::OutOfRange {
            name,
            value: v,
            expected: "positive and finite",
        });
    }
    Ok(())
}

/// `ln f_S(s)` from the single-integral form
/// `Γ(θ+1)/(π(1−α)Γ(θ/α+1)) s^{(θ−1)/α + 1/(α(1−α)) − 1} ∫ A e^{−s^{1/(1−α)}A} dφ`.
pub fn log_diversity_density(params: &ModelParams, s: f64) -> Result<f64> {
    check_positive("s", s)?;
    let (alpha, theta) = (params.alpha(), params.theta());
    let kernel = StableKernel::new(alpha)?;
    let c = (s.ln() / (1.0 - alpha)).exp();
    let power = (theta - 1.0) / alpha + 1.0 / (alpha * (1.0 - alpha)) - 1.0;
    Ok(ln_gamma(theta + 1.0) - PI.ln() - (1.0 - alpha).ln() - ln_gamma(theta / alpha + 1.0)
        + power * s.ln()
        - c * kernel.a0()
        + kernel.log_integral(c)?)
}

pub fn diversity_density(params: &ModelParams, s: f64) -> Result<f64> {
    Ok(log_diversity_density(params, s)?.exp())
}

/// The same density through the stable law:
/// `Γ(θ+1)/(αΓ(θ/α+1)) s^{(θ−1)/α−1} f_α(s^{−1/α})`.
pub fn diversity_density_via_stable(params: &ModelParams, s: f64) -> Result<f64> {
    check_positive("s", s)?;
    let (alpha, theta) = (params.alpha(), params.theta());
    let log = ln_gamma(theta + 1.0) - alpha.ln() - ln_gamma(theta / alpha + 1.0)
        + ((theta - 1.0) / alpha - 1.0) * s.ln()
        + log_stable_density(alpha, (-s.ln() / alpha).exp())?;
    Ok(log.exp())
}

// Integrates f_S over [lo, hi] in panels refined geometrically towards lo.
fn density_mass(params: &ModelParams, lo: f64, hi: f64) -> Result<f64> {
    let f = |s: f64| {
        if s <= 0.0 {
            0.0
        } else {
            diversity_density(params, s).unwrap_or(f64::NAN)
        }
    };
    let mut edges = vec![hi];
    let mut t = hi;
    while t > lo.max(hi * 1e-12) && edges.len() < 60 {
        t *= 0.5;
        edges.push(t.max(lo));
    }
    edges.push(lo);
    edges.reverse();
    edges.dedup();
    let tol = Tolerance::new(1e-300, 1e-11, 4000);
    Ok(integrate_breaks(f, &edges, tol)?.value)
}

/// Upper end of the essential support: the first point of a geometric scan
/// past the mode where `ln f_S` is [`TRUNCATION_NATS`] below its maximum.
fn support_end(params: &ModelParams) -> Result<f64> {
    let mut s = 0.05;
    let mut peak = f64::NEG_INFINITY;
    loop {
        let l = log_diversity_density(params, s)?;
        peak = peak.max(l);
        if l < peak - TRUNCATION_NATS {
            return Ok(s);
        }
        s *= 1.1;
        if s > 1e6 {
            return Err(Error::Domain("density support does not terminate".into()));
        }
    }
}

/// `∫_0^∞ f_S(s) ds`, truncated where the density is negligible; should be 1.
pub fn diversity_total_mass(params: &ModelParams) -> Result<f64> {
    let hi = support_end(params)?;
    density_mass(params, 0.0, hi)
}

/// `∫_0^x f_S(s) ds`.
pub fn diversity_cdf_mass(params: &ModelParams, x: f64) -> Result<f64> {
    check_positive("x", x)?;
    density_mass(params, 0.0, x)
}

// B(φ, x) = ∫_0^∞ (1 + w/c)^β e^{−w} dw with c = x^{1/(1−α)} A(φ)
fn b_factor(beta: f64, c: f64) -> Result<f64> {
    if beta == 0.0 {
        return Ok(1.0);
    }
    let f = |w: f64| (beta * (w / c).ln_1p() - w).exp();
    // the integrand is below e^{−w/2} once w > 2β ln(1 + w/c), certainly
    // past w = 4β + 80
    let top = 4.0 * beta + 80.0;
    let edges = [0.0, 1.0, 4.0, 16.0, top.max(32.0)];
    let edges: Vec<f64> = edges.into_iter().filter(|&e| e <= top.max(32.0)).collect();
    Ok(integrate_breaks(f, &edges, PHI_TOL)?.value)
}

/// `P(S_{α,θ} ≥ x)`, from the `B(φ, x)` double-integral form once
/// `x^{1/(1−α)}A(0⁺) ≥ 1`, and as `1 − ∫_0^x f_S` below that.
pub fn diversity_tail_numeric(params: &ModelParams, x: f64) -> Result<f64> {
    check_positive("x", x)?;
    let alpha = params.alpha();
    let kernel = StableKernel::new(alpha)?;
    let big_x = (x.ln() / (1.0 - alpha)).exp();
    if big_x * kernel.a0() < 1.0 {
        return Ok(1.0 - diversity_cdf_mass(params, x)?);
    }
    Ok(log_tail_b_form(params, &kernel, x, big_x)?.exp())
}

fn log_tail_b_form(params: &ModelParams, kernel: &StableKernel, x: f64, big_x: f64) -> Result<f64> {
    let (alpha, theta) = (params.alpha(), params.theta());
    let beta = (1.0 - alpha) * theta / alpha;
    let a0 = kernel.a0();
    let total = kernel.integrate_phi(|la, lr| {
        if la == f64::INFINITY {
            return 0.0;
        }
        let a = la.exp();
        let scaled = (-big_x * a0 * lr.exp_m1()).exp();
        if scaled == 0.0 {
            return 0.0;
        }
        scaled * b_factor(beta, big_x * a).unwrap_or(f64::NAN)
    })?;
    Ok(ln_gamma(theta + 1.0) - PI.ln() - ln_gamma(theta / alpha + 1.0)
        + params.theta_over_alpha() * x.ln()
        - big_x * a0
        + total.ln())
}

/// `Γ(θ)/(Γ(θ/α)π) · α · x^{θ/α} · e^{−(1−α)α^{α/(1−α)} x^{1/(1−α)}}`, the
/// leading large-`x` term of the tail.
pub fn diversity_tail_asymptotic(params: &ModelParams, x: f64) -> Result<f64> {
    check_positive("x", x)?;
    let alpha = params.alpha();
    let a0 = StableKernel::new(alpha)?.a0();
    let log = params.log_gamma_ratio() - PI.ln()
        + alpha.ln()
        + params.theta_over_alpha() * x.ln()
        - a0 * (x.ln() / (1.0 - alpha)).exp();
    Ok(log.exp())
}

/// The leading tail term multiplied by the Laplace width
/// `√(π/(2x^{1/(1−α)}A''(0)))` of the φ-integral, with `A''(0) = αA(0⁺)`.
/// This is the term the numeric tail actually approaches.
pub fn diversity_tail_laplace(params: &ModelParams, x: f64) -> Result<f64> {
    let alpha = params.alpha();
    let a0 = StableKernel::new(alpha)?.a0();
    let big_x = (x.ln() / (1.0 - alpha)).exp();
    Ok(diversity_tail_asymptotic(params, x)? * (PI / (2.0 * big_x * alpha * a0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levy(z: f64) -> f64 {
        z.powf(-1.5) * (-0.25 / z).exp() / (2.0 * PI.sqrt())
    }

    #[test]
    fn kernel_limits_and_shape() {
        let k = StableKernel::new(0.5).unwrap();
        assert!((k.a0() - 0.25).abs() < 1e-15);
        assert!((k.a(1e-9) - 0.25).abs() < 1e-15);
        assert!(k.a(PI - 1e-6) > 1e6);
        assert_eq!(k.a(PI), f64::INFINITY);
        for &alpha in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let k = StableKernel::new(alpha).unwrap();
            let mut prev = 0.0;
            for i in 1..1000 {
                let a = k.a(PI * i as f64 / 1000.0);
                assert!(a > prev && a.is_finite());
                prev = a;
            }
        }
    }

    #[test]
    fn kernel_curvature_at_zero() {
        // A(φ) ≈ A0 (1 + αφ²/2)
        for &alpha in &[0.3, 0.5, 0.8] {
            let k = StableKernel::new(alpha).unwrap();
            let phi = 1e-3;
            let second = 2.0 * (k.a(phi) - k.a0()) / (phi * phi);
            assert!((second / (alpha * k.a0()) - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn kernel_series_branch_is_continuous() {
        let (b, a) = (ln_sinc(0.099_999_999), ln_sinc(0.100_000_001));
        assert!((b - a).abs() < 1e-10);
        assert!((ln_sinc(1e-3) / (-1e-6 / 6.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn levy_closed_form() {
        assert!((stable_density(0.5, 1.0).unwrap() - 0.219_696).abs() < 1e-6);
        for i in 0..=20 {
            let z = 0.1 * 100f64.powf(i as f64 / 20.0);
            let f = stable_density(0.5, z).unwrap();
            assert!((f / levy(z) - 1.0).abs() < 1e-8, "z {z}");
        }
    }

    #[test]
    fn stable_density_vanishes_at_zero() {
        assert!(stable_density(0.5, 1e-3).unwrap() < 1e-100);
        assert!(stable_density(0.3, 1e-6).unwrap() < 1e-60);
    }

    #[test]
    fn series_cross_check() {
        for &alpha in &[0.3, 0.5, 0.7] {
            for &z in &[2.0, 4.0, 10.0] {
                let a = stable_density(alpha, z).unwrap();
                let b = stable_density_series(alpha, z, SERIES_MAX_TERMS).unwrap();
                assert!((a - b).abs() < 1e-8 * a, "alpha {alpha} z {z}: {a} vs {b}");
            }
        }
        assert!(stable_density_series(0.5, 1.0, 10).is_err());
        assert!(stable_density_series(0.5, 3.0, 31).is_err());
    }

    #[test]
    fn diversity_density_closed_form_at_half() {
        let p = ModelParams::new(0.5, 1.0).unwrap();
        assert!((diversity_density(&p, 1.0).unwrap() - levy(1.0)).abs() < 1e-10);
        for &s in &[0.3f64, 1.0, 2.5, 6.0] {
            let exact = s * s * (-s * s / 4.0).exp() / (2.0 * PI.sqrt());
            assert!((diversity_density(&p, s).unwrap() / exact - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn two_forms_agree() {
        for &alpha in &[0.3, 0.5, 0.7] {
            for &theta in &[0.5, 1.0, 2.0] {
                let p = ModelParams::new(alpha, theta).unwrap();
                for &s in &[0.25, 0.5, 1.0, 2.0, 4.0] {
                    let a = diversity_density(&p, s).unwrap();
                    let b = diversity_density_via_stable(&p, s).unwrap();
                    assert!((a / b - 1.0).abs() < 1e-8, "{alpha} {theta} {s}");
                }
            }
        }
    }

    #[test]
    fn tail_closed_form_at_half() {
        let p = ModelParams::new(0.5, 1.0).unwrap();
        let exact = |x: f64| {
            x * (-x * x / 4.0).exp() / PI.sqrt() + statrs::function::erf::erfc(x / 2.0)
        };
        for &x in &[0.5, 1.0, 1.9, 2.1, 3.0, 5.0, 8.0] {
            let t = diversity_tail_numeric(&p, x).unwrap();
            assert!((t / exact(x) - 1.0).abs() < 1e-8, "x {x}: {t} vs {}", exact(x));
        }
    }

    #[test]
    fn tail_paths_agree_at_switch() {
        let p = ModelParams::new(0.3, 2.0).unwrap();
        let k = StableKernel::new(0.3).unwrap();
        let x = 1.3 * k.a0().powf(-0.7);
        let big_x = (x.ln() / 0.7).exp();
        let b_form = log_tail_b_form(&p, &k, x, big_x).unwrap().exp();
        let direct = 1.0 - diversity_cdf_mass(&p, x).unwrap();
        assert!((b_form / direct - 1.0).abs() < 1e-8);
    }

    #[test]
    fn tail_is_monotone_and_starts_at_one() {
        let p = ModelParams::new(0.7, 0.5).unwrap();
        assert!((diversity_tail_numeric(&p, 1e-6).unwrap() - 1.0).abs() < 1e-6);
        let mut prev = 1.0;
        for i in 1..30 {
            let t = diversity_tail_numeric(&p, 0.2 * i as f64).unwrap();
            assert!(t < prev);
            prev = t;
        }
    }

    #[test]
    fn laplace_corrected_tail_converges() {
        let p = ModelParams::new(0.5, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for &x in &[3.0, 5.0, 8.0, 12.0] {
            let r = diversity_tail_numeric(&p, x).unwrap() / diversity_tail_laplace(&p, x).unwrap();
            assert!((r - 1.0).abs() < prev);
            prev = (r - 1.0).abs();
        }
        assert!(prev < 0.05);
    }

    #[test]
    fn normalisation() {
        let p = ModelParams::new(0.5, 2.0).unwrap();
        assert!((diversity_total_mass(&p).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn kernel_increases_on_the_open_interval() {
        // the Laplace-type tail argument relies on this; checked per alpha
        for a10 in 1..=9 {
            let k = StableKernel::new(a10 as f64 / 10.0).unwrap();
            let mut prev = k.log_a(1e-6);
            assert!((prev - k.a0().ln()).abs() < 1e-9);
            for i in 1..400 {
                let la = k.log_a(PI * i as f64 / 400.0);
                assert!(la > prev, "alpha {} at step {i}", a10 as f64 / 10.0);
                prev = la;
            }
        }
    }
}
