//! Seeded simulation of `K_n` through the sequential sampling scheme.
//!
//! Only the number of types is tracked: after `m` draws with `K` types the
//! next draw founds a new type with probability `(θ + Kα)/(θ + m)`.
//!
//! # Random streams
//!
//! Replication `r` (0-based) draws from
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `r` via
//! `set_stream(r)`, and consumes one `f64` from `Rng::random` per draw after
//! the first. This derivation is stable: the same `(params, n, seed)` gives
//! the same counts regardless of the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::PmfTable;
use crate::params::ModelParams;

const CHUNK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: ModelParams,
    pub n: usize,
    pub replications: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(params: ModelParams, n: usize, replications: u64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        if replications == 0 {
            return Err(Error::Domain("replications must be at least 1".into()));
        }
        Ok(Self {
            params,
            n,
            replications,
            seed,
        })
    }
}

/// Histogram of simulated `K_n`; `counts[k - 1]` is the number of
/// replications that ended with `k` types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalPmf {
    counts: Vec<u64>,
    total: u64,
}

impl EmpiricalPmf {
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        let total = counts.iter().sum();
        if counts.is_empty() || total == 0 {
            return Err(Error::Domain("empirical pmf needs at least one observation".into()));
        }
        Ok(Self { counts, total })
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Relative frequency of `K_n = k`; zero outside `1..=n`.
    pub fn frequency(&self, k: usize) -> f64 {
        if k == 0 || k > self.counts.len() {
            return 0.0;
        }
        self.counts[k - 1] as f64 / self.total as f64
    }

    pub fn mean(&self) -> f64 {
        self.weighted_sum(|k| k) / self.total as f64
    }

    /// Standard error of the sample mean.
    pub fn std_error(&self) -> f64 {
        let m = self.mean();
        let var = self.weighted_sum(|k| (k - m) * (k - m)) / self.total as f64;
        (var / self.total as f64).sqrt()
    }

    fn weighted_sum(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| c as f64 * f((i + 1) as f64))
            .sum()
    }
}

fn replicate(params: &ModelParams, n: usize, rng: &mut ChaCha8Rng) -> usize {
    let (alpha, theta) = (params.alpha(), params.theta());
    let mut k = 1usize;
    for m in 1..n {
        let p_new = (theta + k as f64 * alpha) / (theta + m as f64);
        if rng.random::<f64>() < p_new {
            k += 1;
        }
    }
    k
}

fn simulate_range(config: &SimConfig, lo: u64, hi: u64) -> Vec<u64> {
    let mut counts = vec![0u64; config.n];
    for r in lo..hi {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(r);
        counts[replicate(&config.params, config.n, &mut rng) - 1] += 1;
    }
    counts
}

fn merge(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Simulates `config.replications` independent copies of `K_n` on the
/// current rayon pool.
pub fn simulate_kn(config: &SimConfig) -> EmpiricalPmf {
    let chunks = config.replications.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            simulate_range(config, lo, (lo + CHUNK).min(config.replications))
        })
        .reduce(|| vec![0u64; config.n], merge);
    let total = config.replications;
    EmpiricalPmf { counts, total }
}

/// [`simulate_kn`] on a dedicated pool of `threads` workers.
pub fn simulate_kn_with_threads(config: &SimConfig, threads: usize) -> Result<EmpiricalPmf> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    Ok(pool.install(|| simulate_kn(config)))
}

/// `½ Σ_k |counts[k]/total − P(K_n = k)|`.
pub fn tvd(emp: &EmpiricalPmf, exact: &PmfTable) -> Result<f64> {
    if emp.n() != exact.n() {
        return Err(Error::DimensionMismatch {
            expected: exact.n(),
            got: emp.n(),
        });
    }
    Ok(0.5
        * (1..=emp.n())
            .map(|k| (emp.frequency(k) - exact.log_pmf(k).exp()).abs())
            .sum::<f64>())
}
