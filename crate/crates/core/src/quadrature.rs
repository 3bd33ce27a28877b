//! Globally adaptive 15-point Gauss–Kronrod quadrature.
//!
//! The integrand may be complex valued; real integrals go through
//! [`integrate`], which wraps the real function.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and the subdivision budget of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64, max_intervals: usize) -> Self {
        Self {
            abs,
            rel,
            max_intervals,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(0.0, 1e-10, 2000)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub abs_err: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        k += pair * WGK[j];
        if j % 2 == 1 {
            g += pair * WG[j / 2];
        }
    }
    Panel {
        a,
        b,
        value: k * h,
        err: ((k - g) * h).norm(),
    }
}

/// Integrates a complex-valued `f` over `[a, b]`, bisecting the panel with
/// the largest error estimate until the summed estimate drops below
/// `max(tol.abs, tol.rel·|value|)`.
pub fn integrate_complex<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral<Complex64>>
where
    F: Fn(f64) -> Complex64,
{
    integrate_complex_breaks(f, &[a, b], tol)
}

/// As [`integrate_complex`] over `[breaks[0], breaks[last]]`, starting from
/// the panels delimited by the (increasing) `breaks`. The stopping rule is
/// global, so panels carrying negligible mass need no accuracy of their own.
pub fn integrate_complex_breaks<F>(f: F, breaks: &[f64], tol: Tolerance) -> Result<Integral<Complex64>>
where
    F: Fn(f64) -> Complex64,
{
    if breaks.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite limits {breaks:?}")));
    }
    if breaks.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("breakpoints must be increasing".into()));
    }
    let mut panels: Vec<Panel> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod(&f, w[0], w[1]))
        .collect();
    if panels.is_empty() {
        return Ok(Integral {
            value: Complex64::new(0.0, 0.0),
            abs_err: 0.0,
            intervals: 0,
        });
    }
    let budget = tol.max_intervals.max(panels.len());
    loop {
        let value: Complex64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let target = tol.abs.max(tol.rel * value.norm());
        if !value.re.is_finite() || !value.im.is_finite() || !err.is_finite() {
            return Err(Error::QuadratureFailure {
                abs_err: f64::INFINITY,
                tolerance: target,
            });
        }
        if err <= target {
            return Ok(Integral {
                value,
                abs_err: err,
                intervals: panels.len(),
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.err > acc.1 { (i, p.err) } else { acc });
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if panels.len() >= budget || mid <= p.a || mid >= p.b {
            return Err(Error::QuadratureFailure {
                abs_err: err,
                tolerance: target,
            });
        }
        panels[worst] = kronrod(&f, p.a, mid);
        panels.push(kronrod(&f, mid, p.b));
    }
}

/// Real-valued counterpart of [`integrate_complex`].
pub fn integrate<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral<f64>>
where
    F: Fn(f64) -> f64,
{
    integrate_breaks(f, &[a, b], tol)
}

/// Real-valued counterpart of [`integrate_complex_breaks`].
pub fn integrate_breaks<F>(f: F, breaks: &[f64], tol: Tolerance) -> Result<Integral<f64>>
where
    F: Fn(f64) -> f64,
{
    let r = integrate_complex_breaks(|x| Complex64::new(f(x), 0.0), breaks, tol)?;
    Ok(Integral {
        value: r.value.re,
        abs_err: r.abs_err,
        intervals: r.intervals,
    })
}
