//! A self-contained cross-oracle check suite: every asymptotic or numerical
//! path is compared with an independent exact computation and reported as a
//! pass/fail line with the measured value.

use crate::asymptotics::{global_ldp, laplace_direct_sum, laplace_sum, local_ldp, tail_start};
use crate::contour::{vertical_line_integral, ContourSpec};
use crate::error::Result;
use crate::exact::{pmf_formula_upto, pmf_markov, tail_exact, MarkovDp};
use crate::fluctuation::stable_density;
use crate::montecarlo::{simulate_kn, tvd, SimConfig};
use crate::params::ModelParams;
use crate::saddle::solve_saddle;
use crate::sibuya::{convolve_power, pmf_table};

/// The nine `(α, θ)` pairs every grid check runs over.
pub const STANDARD_GRID: [(f64, f64); 9] = [
    (0.3, 0.5),
    (0.3, 1.0),
    (0.3, 2.0),
    (0.5, 0.5),
    (0.5, 1.0),
    (0.5, 2.0),
    (0.7, 0.5),
    (0.7, 1.0),
    (0.7, 2.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ValidationOptions {
    /// Reduced grids, for a fast smoke run.
    pub quick: bool,
    /// Negative control: multiplies every asymptotic estimate by
    /// `1 + perturbation` before it is compared.
    pub perturbation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckResult {
    fn at_most(name: &'static str, measured: f64, threshold: f64, detail: String) -> Self {
        Self {
            name,
            passed: measured <= threshold,
            measured,
            threshold,
            detail,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} measured={:.3e} threshold={:.3e} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.threshold,
            self.detail
        )
    }
}

fn grid(opts: &ValidationOptions) -> Vec<ModelParams> {
    let pts: &[(f64, f64)] = if opts.quick {
        &[(0.3, 2.0), (0.5, 1.0), (0.7, 0.5)]
    } else {
        &STANDARD_GRID
    };
    pts.iter()
        .map(|&(a, t)| ModelParams::new(a, t).expect("grid parameters are valid"))
        .collect()
}

fn shift(opts: &ValidationOptions) -> f64 {
    opts.perturbation.map_or(0.0, |d| d.ln_1p())
}

fn oracle_equivalence(opts: &ValidationOptions) -> Result<CheckResult> {
    let n_max = if opts.quick { 120 } else { 300 };
    let mut worst = 0.0f64;
    for p in grid(opts) {
        let formula = pmf_formula_upto(&p, n_max)?;
        let mut dp = MarkovDp::new(p);
        for table in &formula {
            while dp.samples() < table.n() {
                dp.step();
            }
            let markov = dp.table();
            for k in 1..=table.n() {
                worst = worst.max((markov.log_pmf(k) - table.log_pmf(k)).abs());
            }
        }
    }
    Ok(CheckResult::at_most(
        "oracle-equivalence",
        worst,
        1e-8,
        format!("max |log pmf markov - formula|, n <= {n_max}"),
    ))
}

fn contour_vs_convolution(opts: &ValidationOptions) -> Result<CheckResult> {
    let ns: &[usize] = if opts.quick { &[50, 100] } else { &[40, 100, 200] };
    let mut worst = 0.0f64;
    for alpha in [0.3, 0.5, 0.7] {
        let p = ModelParams::new(alpha, 1.0)?;
        for &n in ns {
            let pmf = pmf_table(&p, n);
            for frac in [0.2, 0.5, 0.8] {
                let k = tail_start(n, frac);
                let conv = convolve_power(&pmf, k, n)?.log_q(n);
                let spec = ContourSpec::new(&p, n, k)?;
                let line = vertical_line_integral(&spec, &p)?.ln();
                worst = worst.max((line - conv).exp_m1().abs());
            }
        }
    }
    Ok(CheckResult::at_most(
        "contour-vs-convolution",
        worst,
        1e-6,
        "max relative error, k/n in {0.2, 0.5, 0.8}".into(),
    ))
}

fn saddle_residuals(opts: &ValidationOptions) -> Result<CheckResult> {
    let step = if opts.quick { 7 } else { 1 };
    let mut worst = 0.0f64;
    for a10 in 1..=9 {
        let p = ModelParams::new(a10 as f64 / 10.0, 1.0)?;
        for x100 in (1..=99).step_by(step) {
            worst = worst.max(solve_saddle(&p, x100 as f64 / 100.0)?.residual);
        }
    }
    Ok(CheckResult::at_most(
        "saddle-residuals",
        worst,
        1e-12,
        "max |h'(z*)| over x in 0.01..0.99".into(),
    ))
}

/// Largest violation of "successive error ratios lie in [0.3, 0.8]"; zero
/// when every ratio is inside the band.
fn trend_violation(errors: &[f64]) -> f64 {
    errors
        .windows(2)
        .map(|w| {
            let r = w[1] / w[0];
            (0.3 - r).max(r - 0.8).max(0.0)
        })
        .fold(0.0, f64::max)
}

fn local_ldp_trend(opts: &ValidationOptions) -> Result<CheckResult> {
    let ns = [100usize, 200, 400, 800];
    let tables: Vec<_> = grid(opts)
        .into_iter()
        .map(|p| {
            let mut dp = MarkovDp::new(p);
            let mut out = Vec::new();
            for &n in &ns {
                while dp.samples() < n {
                    dp.step();
                }
                out.push(dp.table());
            }
            (p, out)
        })
        .collect();
    let mut worst = 0.0f64;
    for (p, tables) in &tables {
        for x in [0.3, 0.5, 0.7] {
            let mut errors = Vec::new();
            for t in tables {
                let k = tail_start(t.n(), x);
                let est = local_ldp(p, t.n(), k)?.log_total + shift(opts);
                errors.push((est - t.log_pmf(k)).exp_m1().abs());
            }
            worst = worst.max(trend_violation(&errors));
        }
    }
    Ok(CheckResult::at_most(
        "local-ldp-trend",
        worst,
        0.0,
        "distance of successive error ratios (n = 100..800) from [0.3, 0.8]".into(),
    ))
}

fn global_ldp_reference(opts: &ValidationOptions) -> Result<CheckResult> {
    let p = ModelParams::new(0.5, 1.0)?;
    let mut errors = Vec::new();
    for n in [200usize, 400] {
        let t = pmf_markov(&p, n)?;
        let est = global_ldp(&p, n, 0.5)?.log_total + shift(opts);
        errors.push((est - tail_exact(&t, tail_start(n, 0.5))?.ln()).exp_m1().abs());
    }
    let measured = if errors[1] < errors[0] {
        errors[0]
    } else {
        f64::INFINITY
    };
    Ok(CheckResult::at_most(
        "global-ldp-reference",
        measured,
        0.05,
        format!(
            "alpha=0.5 theta=1 x=0.5: error n=200 {:.3e}, n=400 {:.3e}",
            errors[0], errors[1]
        ),
    ))
}

fn laplace_geometric(opts: &ValidationOptions) -> Result<CheckResult> {
    let (n, x) = (500, 0.3013);
    let got = laplace_sum(|_| 1.0, |b| b, |_| 1.0, n, x, 1.0)? + shift(opts);
    let exact = -(n as f64 * x).ceil() - (-(-1.0f64).exp_m1()).ln();
    Ok(CheckResult::at_most(
        "laplace-geometric",
        (got - exact).exp_m1().abs(),
        1e-12,
        "psi=1, f(b)=b against the geometric series".into(),
    ))
}

fn laplace_checks(opts: &ValidationOptions) -> Result<CheckResult> {
    let n = 500;
    type Pair = (fn(f64) -> f64, fn(f64) -> f64, fn(f64) -> f64);
    let pairs: [Pair; 3] = [
        (|_| 1.0, |b| b * b, |b| 2.0 * b),
        (|b| 1.0 + b, |b| b.powf(1.5), |b| 1.5 * b.sqrt()),
        (|b| (-b).exp(), |b| b + 0.5 * b * b, |b| 1.0 + b),
    ];
    let mut worst = 0.0f64;
    for (psi, f, df) in pairs {
        let a = laplace_sum(psi, f, df, n, 0.3, 1.0)? + shift(opts);
        let d = laplace_direct_sum(psi, f, n, 0.3, 1.0)?;
        worst = worst.max((d - a).exp_m1().abs());
    }
    Ok(CheckResult::at_most(
        "laplace-sum",
        worst,
        0.02,
        "three (psi, f) pairs, direct sum vs closed form at n=500, x=0.3".into(),
    ))
}

fn monte_carlo(opts: &ValidationOptions) -> Result<CheckResult> {
    let p = ModelParams::new(0.5, 1.0)?;
    let reps = if opts.quick { 50_000 } else { 100_000 };
    let cfg = SimConfig::new(p, 200, reps, 20_240_601)?;
    let d = tvd(&simulate_kn(&cfg), &pmf_markov(&p, 200)?)?;
    let bound = if opts.quick { 0.03 } else { 0.02 };
    Ok(CheckResult::at_most(
        "monte-carlo-tvd",
        d,
        bound,
        format!("n=200, {reps} replications"),
    ))
}

fn levy_density(_opts: &ValidationOptions) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for i in 0..=10 {
        let z = 0.1 * 100f64.powf(i as f64 / 10.0);
        let levy = z.powf(-1.5) * (-0.25 / z).exp() / (2.0 * std::f64::consts::PI.sqrt());
        worst = worst.max((stable_density(0.5, z)? / levy - 1.0).abs());
    }
    Ok(CheckResult::at_most(
        "stable-density-levy",
        worst,
        1e-8,
        "alpha=1/2 against the closed form, z in [0.1, 10]".into(),
    ))
}

type Check = fn(&ValidationOptions) -> Result<CheckResult>;

const CHECKS: [(&str, Check); 9] = [
    ("oracle-equivalence", oracle_equivalence),
    ("contour-vs-convolution", contour_vs_convolution),
    ("saddle-residuals", saddle_residuals),
    ("local-ldp-trend", local_ldp_trend),
    ("global-ldp-reference", global_ldp_reference),
    ("laplace-geometric", laplace_geometric),
    ("laplace-sum", laplace_checks),
    ("monte-carlo-tvd", monte_carlo),
    ("stable-density-levy", levy_density),
];

/// Runs every check; a check whose computation errors is reported as a
/// failure carrying the error text.
pub fn run_validation(opts: &ValidationOptions) -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            check(opts).unwrap_or_else(|e| CheckResult {
                name,
                passed: false,
                measured: f64::NAN,
                threshold: f64::NAN,
                detail: format!("error: {e}"),
            })
        })
        .collect()
}
