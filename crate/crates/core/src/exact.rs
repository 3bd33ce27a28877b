//! Exact law of the number of types `K_n`, computed two independent ways.
//!
//! * [`pmf_markov`] evolves the sequential sampling scheme as a Markov chain
//!   on the current number of types.
//! * [`pmf_formula`] uses the closed form
//!   `P(K_n = k) = n!/k! · (θ/α)_{k↑1}/(θ)_{n↑1} · P(X_1 + … + X_k = n)`
//!   with Sibuya-distributed `X_l`.
//!
//! The first never touches the Sibuya representation, so agreement between
//! the two checks the representation itself.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::params::{log_add_exp, log_rising, log_sum_exp, LogProb, ModelParams};
use crate::sibuya::{sibuya_pmf, ConvolutionPowers};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    MarkovDp,
    SibuyaFormula,
}

/// `ln P(K_n = k)` for `k = 1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfTable {
    n: usize,
    params: ModelParams,
    log_pmf: Vec<f64>,
    method: Method,
}

impl PmfTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// `ln P(K_n = k)`; `-inf` outside `1..=n`.
    pub fn log_pmf(&self, k: usize) -> f64 {
        if k == 0 || k > self.n {
            f64::NEG_INFINITY
        } else {
            self.log_pmf[k - 1]
        }
    }

    /// Log-masses in order `k = 1..=n`.
    pub fn log_masses(&self) -> &[f64] {
        &self.log_pmf
    }

    pub fn total_mass(&self) -> f64 {
        self.log_pmf.iter().map(|v| v.exp()).sum()
    }
}

/// Log-domain forward recursion of the chain
/// `K ↦ K + 1` with probability `(θ + Kα)/(θ + m)` after `m` draws.
#[derive(Debug, Clone)]
pub struct MarkovDp {
    params: ModelParams,
    m: usize,
    // row[k - 1] = ln P(K_m = k)
    row: Vec<f64>,
}

impl MarkovDp {
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            m: 1,
            row: vec![0.0],
        }
    }

    pub fn samples(&self) -> usize {
        self.m
    }

    /// Advances from `m` to `m + 1` draws.
    pub fn step(&mut self) {
        let (alpha, theta) = (self.params.alpha(), self.params.theta());
        let m = self.m as f64;
        let log_den = (theta + m).ln();
        self.row.push(f64::NEG_INFINITY);
        for k in (1..=self.m + 1).rev() {
            let kf = k as f64;
            let stay = if k <= self.m {
                self.row[k - 1] + (m - kf * alpha).ln()
            } else {
                f64::NEG_INFINITY
            };
            let arrive = if k >= 2 {
                self.row[k - 2] + (theta + (kf - 1.0) * alpha).ln()
            } else {
                f64::NEG_INFINITY
            };
            self.row[k - 1] = log_add_exp(stay, arrive) - log_den;
        }
        self.m += 1;
    }

    pub fn table(&self) -> PmfTable {
        PmfTable {
            n: self.m,
            params: self.params,
            log_pmf: self.row.clone(),
            method: Method::MarkovDp,
        }
    }
}

pub fn pmf_markov(params: &ModelParams, n: usize) -> Result<PmfTable> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let mut dp = MarkovDp::new(*params);
    while dp.samples() < n {
        dp.step();
    }
    Ok(dp.table())
}

/// Exact log of `n!/k! · (θ/α)_{k↑1} / (θ)_{n↑1}`.
pub fn log_coefficient(params: &ModelParams, n: usize, k: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::Index { index: k, lo: 1, hi: n });
    }
    Ok(ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0)
        + log_rising(params.theta_over_alpha(), k as f64)?
        - log_rising(params.theta(), n as f64)?)
}

pub fn pmf_formula(params: &ModelParams, n: usize) -> Result<PmfTable> {
    let mut all = pmf_formula_upto(params, n)?;
    Ok(all.pop().expect("n >= 1"))
}

/// Formula-path tables for every `n` in `1..=n_max`, sharing one pass over
/// the convolution powers.
pub fn pmf_formula_upto(params: &ModelParams, n_max: usize) -> Result<Vec<PmfTable>> {
    if n_max == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let sib = sibuya_pmf(params.alpha(), n_max);
    // conv[n - 1][k - 1] = ln P(S_k = n)
    let mut conv = vec![Vec::new(); n_max];
    for table in ConvolutionPowers::new(&sib, n_max)? {
        for (n, row) in conv.iter_mut().enumerate().skip(table.k() - 1) {
            row.push(table.log_q(n + 1));
        }
    }
    conv.into_iter()
        .enumerate()
        .map(|(i, row)| {
            let n = i + 1;
            let log_pmf = row
                .iter()
                .enumerate()
                .map(|(j, lq)| Ok(log_coefficient(params, n, j + 1)? + lq))
                .collect::<Result<Vec<f64>>>()?;
            Ok(PmfTable {
                n,
                params: *params,
                log_pmf,
                method: Method::SibuyaFormula,
            })
        })
        .collect()
}

/// `ln P(K_n ≥ k0)`, summed from the smallest term.
pub fn tail_exact(table: &PmfTable, k0: usize) -> Result<LogProb> {
    if k0 == 0 || k0 > table.n {
        return Err(Error::Index {
            index: k0,
            lo: 1,
            hi: table.n,
        });
    }
    let v = log_sum_exp(&table.log_pmf[k0 - 1..]);
    LogProb::new(v.min(0.0))
}

/// `E K_n`.
pub fn mean_exact(table: &PmfTable) -> f64 {
    table
        .log_pmf
        .iter()
        .enumerate()
        .map(|(i, lp)| (i + 1) as f64 * lp.exp())
        .sum()
}
