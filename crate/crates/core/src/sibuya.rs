//! The Sibuya distribution `P(X = j) = α (1−α)_{(j−1)↑1} / j!` on `{1, 2, …}`
//! and its convolution powers, truncated to a finite support.
//!
//! Every summand is at least one, so the k-fold sum restricted to `m ≤ n`
//! only ever needs the first `n` masses. Truncating at the target `n` is
//! exact, not an approximation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Log-masses of the Sibuya law for `j = 1..=j_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SibuyaPmf {
    alpha: f64,
    // log_p[j - 1] = ln P(X = j)
    log_p: Vec<f64>,
}

impl SibuyaPmf {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn j_max(&self) -> usize {
        self.log_p.len()
    }

    /// `ln P(X = j)`; `-inf` outside `1..=j_max`.
    pub fn log_p(&self, j: usize) -> f64 {
        if j == 0 || j > self.log_p.len() {
            f64::NEG_INFINITY
        } else {
            self.log_p[j - 1]
        }
    }

    /// Log-masses indexed from `j = 1`.
    pub fn log_masses(&self) -> &[f64] {
        &self.log_p
    }

    /// The one-fold table `P(X = m)` on `1..=n_max`.
    fn as_table(&self, n_max: usize) -> ConvolutionTable {
        let mut log_q = vec![f64::NEG_INFINITY; n_max + 1];
        for (m, slot) in log_q.iter_mut().enumerate().skip(1) {
            *slot = self.log_p(m);
        }
        ConvolutionTable { k: 1, log_q }
    }
}

/// Builds `ln P_α(j)` for `j ≤ j_max` from the ratio
/// `P(j+1)/P(j) = (j − α)/(j + 1)`.
pub fn pmf_table(params: &ModelParams, j_max: usize) -> SibuyaPmf {
    sibuya_pmf(params.alpha(), j_max)
}

pub(crate) fn sibuya_pmf(alpha: f64, j_max: usize) -> SibuyaPmf {
    let mut log_p = Vec::with_capacity(j_max);
    if j_max > 0 {
        let mut cur = alpha.ln();
        log_p.push(cur);
        for j in 1..j_max {
            let jf = j as f64;
            cur += (jf - alpha).ln() - (jf + 1.0).ln();
            log_p.push(cur);
        }
    }
    SibuyaPmf { alpha, log_p }
}

/// Probability generating function `E z^X = 1 − (1 − z)^α` on the principal
/// branch.
pub fn generating_function(alpha: f64, z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re >= 1.0 {
        return Err(Error::BranchCut { re: z.re, im: z.im });
    }
    let one_minus = Complex64::new(1.0, 0.0) - z;
    Ok(Complex64::new(1.0, 0.0) - (one_minus.ln() * alpha).exp())
}

/// `ln P(X_1 + … + X_k = m)` for `m = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionTable {
    k: usize,
    log_q: Vec<f64>,
}

impl ConvolutionTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_max(&self) -> usize {
        self.log_q.len() - 1
    }

    /// `ln P(S_k = m)`; `-inf` for `m < k` and beyond the truncation.
    pub fn log_q(&self, m: usize) -> f64 {
        self.log_q.get(m).copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// Convolution of two tables, truncated to the shorter support.
    pub fn convolve(&self, other: &ConvolutionTable) -> ConvolutionTable {
        let n_max = self.n_max().min(other.n_max());
        let k = self.k + other.k;
        let mut log_q = vec![f64::NEG_INFINITY; n_max + 1];
        let mut terms = Vec::with_capacity(n_max + 1);
        for (m, slot) in log_q.iter_mut().enumerate().skip(k) {
            terms.clear();
            let mut max = f64::NEG_INFINITY;
            // i ranges over the support of self, m - i over the support of other
            for i in self.k..=(m - other.k) {
                let v = self.log_q[i] + other.log_q[m - i];
                if v > max {
                    max = v;
                }
                terms.push(v);
            }
            if max == f64::NEG_INFINITY {
                continue;
            }
            let s: f64 = terms.iter().map(|v| (v - max).exp()).sum();
            *slot = max + s.ln();
        }
        ConvolutionTable { k, log_q }
    }
}

/// Exact k-fold convolution power of the Sibuya law on `{k, …, n_max}`,
/// computed by binary powering in the log domain.
pub fn convolve_power(pmf: &SibuyaPmf, k: usize, n_max: usize) -> Result<ConvolutionTable> {
    if k == 0 {
        return Err(Error::Domain("convolution power needs k >= 1".into()));
    }
    if pmf.j_max() < n_max {
        return Err(Error::Domain(format!(
            "Sibuya table holds j <= {}, need {n_max}",
            pmf.j_max()
        )));
    }
    let mut base = pmf.as_table(n_max);
    let mut acc: Option<ConvolutionTable> = None;
    let mut e = k;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => a.convolve(&base),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = base.convolve(&base);
    }
    Ok(acc.expect("k >= 1"))
}

/// Iterates `S_1, S_2, …` by repeated convolution with the one-fold law.
/// Used when every power up to `n_max` is needed.
pub struct ConvolutionPowers<'a> {
    pmf: &'a SibuyaPmf,
    n_max: usize,
    current: Option<ConvolutionTable>,
}

impl<'a> ConvolutionPowers<'a> {
    pub fn new(pmf: &'a SibuyaPmf, n_max: usize) -> Result<Self> {
        if pmf.j_max() < n_max {
            return Err(Error::Domain(format!(
                "Sibuya table holds j <= {}, need {n_max}",
                pmf.j_max()
            )));
        }
        Ok(Self {
            pmf,
            n_max,
            current: None,
        })
    }
}

impl Iterator for ConvolutionPowers<'_> {
    type Item = ConvolutionTable;

    fn next(&mut self) -> Option<ConvolutionTable> {
        let next = match &self.current {
            None => self.pmf.as_table(self.n_max),
            Some(t) if t.k >= self.n_max => return None,
            Some(t) => step_power(t, self.pmf),
        };
        self.current = Some(next.clone());
        Some(next)
    }
}

// S_{k+1}[m] = Σ_j S_k[m - j] P(j); skips the `-inf` prefix of S_k.
fn step_power(t: &ConvolutionTable, pmf: &SibuyaPmf) -> ConvolutionTable {
    let n_max = t.n_max();
    let k = t.k + 1;
    let mut log_q = vec![f64::NEG_INFINITY; n_max + 1];
    for (m, slot) in log_q.iter_mut().enumerate().skip(k) {
        let mut max = f64::NEG_INFINITY;
        for i in t.k..m {
            let v = t.log_q[i] + pmf.log_p(m - i);
            if v > max {
                max = v;
            }
        }
        if max == f64::NEG_INFINITY {
            continue;
        }
        let mut s = 0.0;
        for i in t.k..m {
            s += (t.log_q[i] + pmf.log_p(m - i) - max).exp();
        }
        *slot = max + s.ln();
    }
    ConvolutionTable { k, log_q }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::log_rising;
    use statrs::function::gamma::ln_gamma;

    fn params(alpha: f64) -> ModelParams {
        ModelParams::new(alpha, 1.0).unwrap()
    }

    #[test]
    fn first_masses_at_half() {
        let t = pmf_table(&params(0.5), 3);
        assert!((t.log_p(1).exp() - 0.5).abs() < 1e-16);
        assert!((t.log_p(2).exp() - 0.125).abs() < 1e-16);
        assert!((t.log_p(3).exp() - 0.0625).abs() < 1e-16);
        assert_eq!(t.log_p(4), f64::NEG_INFINITY);
    }

    #[test]
    fn recurrence_matches_rising_factorial() {
        for a10 in 1..=9 {
            let alpha = a10 as f64 / 10.0;
            let t = pmf_table(&params(alpha), 50);
            for j in 1..=50usize {
                let direct = alpha.ln() + log_rising(1.0 - alpha, (j - 1) as f64).unwrap()
                    - ln_gamma(j as f64 + 1.0);
                assert!((t.log_p(j) - direct).abs() < 1e-10, "alpha {alpha} j {j}");
            }
        }
    }

    #[test]
    fn masses_strictly_decrease_and_partial_sums_stay_below_one() {
        for a10 in 1..=9 {
            let t = pmf_table(&params(a10 as f64 / 10.0), 500);
            let mut total = 0.0;
            for j in 1..=500 {
                total += t.log_p(j).exp();
                if j > 1 {
                    assert!(t.log_p(j) < t.log_p(j - 1));
                }
            }
            assert!(total <= 1.0 + 1e-14);
        }
    }

    #[test]
    fn generating_function_examples() {
        let z0 = generating_function(0.3, Complex64::new(0.0, 0.0)).unwrap();
        assert!(z0.norm() < 1e-16);
        let g = generating_function(0.5, Complex64::new(0.75, 0.0)).unwrap();
        assert!((g.re - 0.5).abs() < 1e-15 && g.im.abs() < 1e-16);
        let near_one = generating_function(0.5, Complex64::new(1.0 - 1e-12, 0.0)).unwrap();
        assert!((near_one.re - 1.0).abs() < 1e-5);
        assert!(matches!(
            generating_function(0.5, Complex64::new(1.5, 0.0)),
            Err(Error::BranchCut { .. })
        ));
    }

    #[test]
    fn truncated_series_approaches_generating_function() {
        let alpha = 0.6;
        let t = pmf_table(&params(alpha), 20_000);
        for &z in &[0.1, 0.5, 0.9] {
            let exact = generating_function(alpha, Complex64::new(z, 0.0)).unwrap().re;
            let mut prev_err = f64::INFINITY;
            for &cut in &[50usize, 200, 2000, 20_000] {
                let s: f64 = (1..=cut).map(|j| t.log_p(j).exp() * z.powi(j as i32)).sum();
                let err = (exact - s).abs();
                // remaining mass times z^(cut+1) bounds the error
                let tail_mass: f64 = 1.0 - (1..=cut).map(|j| t.log_p(j).exp()).sum::<f64>();
                assert!(err <= tail_mass * z.powi(cut as i32 + 1) + 1e-14);
                assert!(err <= prev_err);
                prev_err = err;
            }
        }
    }

    #[test]
    fn convolution_examples() {
        let t = pmf_table(&params(0.5), 10);
        let c2 = convolve_power(&t, 2, 10).unwrap();
        assert!((c2.log_q(2).exp() - 0.25).abs() < 1e-16);
        assert!((c2.log_q(3).exp() - 0.125).abs() < 1e-16);
        let c3 = convolve_power(&t, 3, 10).unwrap();
        assert_eq!(c3.log_q(2), f64::NEG_INFINITY);
        assert!(convolve_power(&t, 0, 10).is_err());
        assert!(convolve_power(&t, 2, 11).is_err());
    }

    #[test]
    fn convolution_mass_deficit_is_truncated_tail() {
        let t = pmf_table(&params(0.4), 60);
        let c = convolve_power(&t, 3, 60).unwrap();
        let total: f64 = (0..=60).map(|m| c.log_q(m).exp()).sum();
        assert!(total < 1.0);
        assert!(total > 0.5);
    }

    #[test]
    fn binary_powering_matches_iteration() {
        let t = pmf_table(&params(0.3), 80);
        let iterated: Vec<ConvolutionTable> = ConvolutionPowers::new(&t, 80).unwrap().collect();
        assert_eq!(iterated.len(), 80);
        for k in [1usize, 2, 5, 13, 40, 80] {
            let b = convolve_power(&t, k, 80).unwrap();
            for m in k..=80 {
                let (x, y) = (b.log_q(m), iterated[k - 1].log_q(m));
                assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0), "k {k} m {m}");
            }
        }
    }

    #[test]
    fn power_additivity() {
        let t = pmf_table(&params(0.7), 120);
        for (k1, k2) in [(1usize, 1usize), (3, 4), (10, 25), (17, 30)] {
            let lhs = convolve_power(&t, k1 + k2, 120).unwrap();
            let rhs = convolve_power(&t, k1, 120)
                .unwrap()
                .convolve(&convolve_power(&t, k2, 120).unwrap());
            for m in (k1 + k2)..=120 {
                let (x, y) = (lhs.log_q(m), rhs.log_q(m));
                assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
            }
        }
    }
}
