//! Precise local and global deviation estimates for `K_n`, assembled in the
//! log domain from the saddle solution, plus the discrete Laplace sum that
//! turns a local estimate into a tail estimate.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::exact;
use crate::params::{frac_ceil, log_sum_exp, ModelParams};
use crate::saddle::solve_saddle;

/// Which approximation produced a [`DeviationEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    LocalLdp,
    LocalMdp,
    GlobalLdp,
    GlobalMdp,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::LocalLdp => "local-ldp",
            Regime::LocalMdp => "local-mdp",
            Regime::GlobalLdp => "global-ldp",
            Regime::GlobalMdp => "global-mdp",
        }
    }

    /// Global regimes estimate `P(K_n ≥ ·)`, local ones `P(K_n = k)`.
    pub fn is_global(self) -> bool {
        matches!(self, Regime::GlobalLdp | Regime::GlobalMdp)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The arguments an estimate was computed from. `x` is always the argument
/// of the rate function; the others are present when the regime uses them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationInputs {
    pub n: usize,
    pub k: Option<usize>,
    pub x: f64,
    pub y: Option<f64>,
    pub b_n: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationEstimate {
    pub regime: Regime,
    /// Log of everything except `e^{−nI}`, fractional-part factor included.
    pub log_coeff: f64,
    /// `−n·I(x)`.
    pub log_exp: f64,
    pub log_total: f64,
    /// `−{nx}I'(x) − ln(1 − e^{−I'(x)})`, global LDP only.
    pub frac_factor: Option<f64>,
    pub inputs: DeviationInputs,
}

impl DeviationEstimate {
    fn new(
        regime: Regime,
        log_coeff: f64,
        log_exp: f64,
        frac_factor: Option<f64>,
        inputs: DeviationInputs,
    ) -> Self {
        Self {
            regime,
            log_coeff,
            log_exp,
            log_total: log_coeff + log_exp,
            frac_factor,
            inputs,
        }
    }
}

fn check_k(n: usize, k: usize, hi: usize) -> Result<()> {
    if k < 1 || k > hi {
        return Err(Error::Index {
            index: k,
            lo: 1,
            hi,
        });
    }
    let _ = n;
    Ok(())
}

fn check_bn(n: usize, b_n: f64) -> Result<()> {
    if !(b_n > 1.0 && b_n < n as f64) {
        return Err(Error::OutOfRange {
            name: "b_n",
            value: b_n,
            expected: "1 < b_n < n",
        });
    }
    Ok(())
}

/// `n·x`, snapped to the nearest integer when it is one up to rounding
/// (`0.3 * 200` is not exactly 60 in binary floating point).
pub fn snapped_product(n: usize, x: f64) -> f64 {
    let nx = n as f64 * x;
    let r = nx.round();
    if (nx - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        nx
    }
}

/// `⌈n·x⌉` with the same snapping, the first index of the tail `K_n ≥ nx`.
pub fn tail_start(n: usize, x: f64) -> usize {
    snapped_product(n, x).ceil().max(0.0) as usize
}

/// Log of `n!/k! · (θ/α)_k/(θ)_n`, exactly, via log-gamma.
pub fn log_coefficient_exact(params: &ModelParams, n: usize, k: usize) -> Result<f64> {
    exact::log_coefficient(params, n, k)
}

/// Log of `Γ(θ)/Γ(θ/α) · n^{(1/α−1)θ} · (k/n)^{θ/α−1}`.
pub fn log_coefficient_asymptotic(params: &ModelParams, n: usize, k: usize) -> Result<f64> {
    check_k(n, k, n)?;
    let (alpha, theta) = (params.alpha(), params.theta());
    let nf = n as f64;
    Ok(params.log_gamma_ratio()
        + (1.0 / alpha - 1.0) * theta * nf.ln()
        + (params.theta_over_alpha() - 1.0) * (k as f64 / nf).ln())
}

/// Precise local large deviation estimate of `P(K_n = k)`.
pub fn local_ldp(params: &ModelParams, n: usize, k: usize) -> Result<DeviationEstimate> {
    check_k(n, k, n.saturating_sub(1))?;
    let (alpha, theta) = (params.alpha(), params.theta());
    let nf = n as f64;
    let x = k as f64 / nf;
    let s = solve_saddle(params, x)?;
    let log_coeff = params.log_gamma_ratio() + ((1.0 / alpha - 1.0) * theta - 0.5) * nf.ln()
        - s.z_star.ln()
        - 0.5 * (2.0 * PI * s.h2.abs()).ln()
        + (params.theta_over_alpha() - 1.0) * x.ln();
    let inputs = DeviationInputs {
        n,
        k: Some(k),
        x,
        y: None,
        b_n: None,
    };
    Ok(DeviationEstimate::new(
        Regime::LocalLdp,
        log_coeff,
        -nf * s.h_val,
        None,
        inputs,
    ))
}

/// Precise local moderate deviation estimate of `P(K_n = k)` on the scale
/// `k = y·n^α·b_n^{1−α}`. The exponent uses the full rate function.
pub fn local_mdp(params: &ModelParams, n: usize, k: usize, b_n: f64) -> Result<DeviationEstimate> {
    check_bn(n, b_n)?;
    check_k(n, k, n.saturating_sub(1))?;
    let (alpha, theta) = (params.alpha(), params.theta());
    let nf = n as f64;
    let x = k as f64 / nf;
    let y = k as f64 / (nf.powf(alpha) * b_n.powf(1.0 - alpha));
    let rate = solve_saddle(params, x)?.h_val;
    let toa = params.theta_over_alpha();
    let log_coeff = params.log_gamma_ratio()
        - 0.5 * (2.0 * PI * (1.0 - alpha) / alpha.powf(1.0 / (1.0 - alpha))).ln()
        + ((1.0 / alpha - 1.0) * theta - 0.5) * nf.ln()
        + ((1.0 - alpha) * (toa - 1.0) + 0.5) * (b_n / nf).ln()
        + (toa + 1.0 / (2.0 * (1.0 - alpha)) - 1.0) * y.ln();
    let inputs = DeviationInputs {
        n,
        k: Some(k),
        x,
        y: Some(y),
        b_n: Some(b_n),
    };
    Ok(DeviationEstimate::new(
        Regime::LocalMdp,
        log_coeff,
        -nf * rate,
        None,
        inputs,
    ))
}

/// Precise global large deviation estimate of `P(K_n ≥ xn)`.
pub fn global_ldp(params: &ModelParams, n: usize, x: f64) -> Result<DeviationEstimate> {
    if n < 2 {
        return Err(Error::Domain("global estimates need n >= 2".into()));
    }
    let (alpha, theta) = (params.alpha(), params.theta());
    let nf = n as f64;
    let s = solve_saddle(params, x)?;
    // 1 − e^{−I'(x)} = (1 − z)^α exactly, which avoids expm1 round-off.
    let frac = -frac_ceil(snapped_product(n, x)) * s.i1 - alpha * s.one_minus_z.ln();
    let log_coeff = params.log_gamma_ratio() + ((1.0 / alpha - 1.0) * theta - 0.5) * nf.ln()
        - s.z_star.ln()
        - 0.5 * (2.0 * PI * s.h2.abs()).ln()
        + (params.theta_over_alpha() - 1.0) * x.ln()
        + frac;
    let inputs = DeviationInputs {
        n,
        k: None,
        x,
        y: None,
        b_n: None,
    };
    Ok(DeviationEstimate::new(
        Regime::GlobalLdp,
        log_coeff,
        -nf * s.h_val,
        Some(frac),
        inputs,
    ))
}

/// `√(2π(1−α)α^{(2α−1)/(1−α)})`, the constant of the global moderate
/// deviation prefactor; its α-power is exactly 1 at α = 1/2.
pub fn mdp_constant(alpha: f64) -> f64 {
    (2.0 * PI * (1.0 - alpha) * alpha.powf((2.0 * alpha - 1.0) / (1.0 - alpha))).sqrt()
}

/// Precise global moderate deviation estimate of
/// `P(K_n ≥ y·n^α·b_n^{1−α})`.
pub fn global_mdp(params: &ModelParams, n: usize, y: f64, b_n: f64) -> Result<DeviationEstimate> {
    check_bn(n, b_n)?;
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::OutOfRange {
            name: "y",
            value: y,
            expected: "y > 0",
        });
    }
    let (alpha, theta) = (params.alpha(), params.theta());
    let nf = n as f64;
    let x = y * (b_n / nf).powf(1.0 - alpha);
    let rate = solve_saddle(params, x)?.h_val;
    let log_coeff = params.log_gamma_ratio()
        + ((1.0 - alpha) * theta / alpha - 0.5) * b_n.ln()
        - mdp_constant(alpha).ln()
        + (params.theta_over_alpha() - 1.0 / (2.0 * (1.0 - alpha))) * y.ln();
    let inputs = DeviationInputs {
        n,
        k: None,
        x,
        y: Some(y),
        b_n: Some(b_n),
    };
    Ok(DeviationEstimate::new(
        Regime::GlobalMdp,
        log_coeff,
        -nf * rate,
        None,
        inputs,
    ))
}

/// The two readings of the moderate-deviation error term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdpErrorScales {
    /// `max(y^{α/(1−α)}, (1/y)(1/b_n)) · (b_n/n)^α` — the reading used here.
    pub grouped: f64,
    /// `max(y^{α/(1−α)}, 1/y) · (1/b_n) · (b_n/n)^α`.
    pub alternative: f64,
}

pub fn mdp_error_scales(alpha: f64, n: usize, y: f64, b_n: f64) -> MdpErrorScales {
    let scale = (b_n / n as f64).powf(alpha);
    let grow = y.powf(alpha / (1.0 - alpha));
    MdpErrorScales {
        grouped: grow.max(1.0 / (y * b_n)) * scale,
        alternative: grow.max(1.0 / y) / b_n * scale,
    }
}

/// `n·I(y(b_n/n)^{1−α})` divided by its leading moderate-deviation term
/// `b_n(1−α)α^{α/(1−α)}y^{1/(1−α)}`.
pub fn mdp_exponent_ratio(params: &ModelParams, n: usize, y: f64, b_n: f64) -> Result<f64> {
    let alpha = params.alpha();
    let x = y * (b_n / n as f64).powf(1.0 - alpha);
    let rate = solve_saddle(params, x)?.h_val;
    let lead = b_n
        * (1.0 - alpha)
        * alpha.powf(alpha / (1.0 - alpha))
        * y.powf(1.0 / (1.0 - alpha));
    Ok(n as f64 * rate / lead)
}

fn check_window(n: usize, x: f64, alpha2: f64) -> Result<()> {
    if n == 0 || !(x > 0.0) || !(x <= alpha2) {
        return Err(Error::Domain(format!(
            "Laplace sum needs n >= 1 and 0 < x <= alpha2, got n={n}, x={x}, alpha2={alpha2}"
        )));
    }
    Ok(())
}

/// Log of the closed-form approximation
/// `ψ(x)·e^{−{nx}f'(x)}/(1 − e^{−f'(x)})·e^{−nf(x)}` to
/// `Σ_{k ≥ nx} ψ(k/n) e^{−nf(k/n)}`.
pub fn laplace_sum<P, F, D>(
    psi: P,
    f: F,
    f_prime: D,
    n: usize,
    x: f64,
    alpha2: f64,
) -> Result<f64>
where
    P: Fn(f64) -> f64,
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    check_window(n, x, alpha2)?;
    let slope = f_prime(x);
    if !(slope > 0.0) {
        return Err(Error::Domain(format!("f'(x) = {slope} is not positive")));
    }
    let p = psi(x);
    if !(p > 0.0) {
        return Err(Error::Domain(format!("psi(x) = {p} is not positive")));
    }
    let frac = frac_ceil(snapped_product(n, x));
    Ok(p.ln() - frac * slope - (-(-slope).exp_m1()).ln() - n as f64 * f(x))
}

/// Log of the direct sum `Σ_{k=⌈nx⌉}^{⌈α₂n⌉} ψ(k/n) e^{−nf(k/n)}`.
pub fn laplace_direct_sum<P, F>(psi: P, f: F, n: usize, x: f64, alpha2: f64) -> Result<f64>
where
    P: Fn(f64) -> f64,
    F: Fn(f64) -> f64,
{
    check_window(n, x, alpha2)?;
    let nf = n as f64;
    let lo = tail_start(n, x);
    let hi = tail_start(n, alpha2);
    let terms: Vec<f64> = (lo..=hi)
        .map(|k| {
            let b = k as f64 / nf;
            psi(b).ln() - nf * f(b)
        })
        .collect();
    Ok(log_sum_exp(&terms))
}
