//! Exact distribution of the number of distinct types `K_n` in the
//! two-parameter Ewens–Pitman model, together with precise large- and
//! moderate-deviation approximations and the law of the limiting
//! α-diversity.
//!
//! Everything probabilistic is carried in the log domain: at a few hundred
//! samples individual point masses underflow `f64`.
//!
//! The modules build on each other roughly in this order:
//!
//! - [`params`]: parameters, log-probabilities, scalar helpers;
//! - [`sibuya`]: the Sibuya law and its truncated convolution powers;
//! - [`exact`]: the pmf of `K_n` two independent ways;
//! - [`saddle`]: the saddle point and the rate function;
//! - [`asymptotics`]: local and global deviation estimates;
//! - [`contour`]: the Cauchy integral along the steepest-descent line;
//! - [`fluctuation`]: the α-stable and α-diversity densities;
//! - [`montecarlo`]: seeded simulation;
//! - [`validation`]: a cross-oracle check suite.

// `!(x > 0.0)` is used deliberately so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod contour;
pub mod error;
pub mod exact;
pub mod fluctuation;
pub mod montecarlo;
pub mod params;
pub mod quadrature;
pub mod saddle;
pub mod sibuya;
pub mod validation;

pub use asymptotics::{DeviationEstimate, Regime};
pub use error::{Error, Result};
pub use exact::{pmf_formula, pmf_markov, tail_exact, Method, PmfTable};
pub use params::{LogProb, ModelParams};
pub use saddle::{rate_function, solve_saddle, SaddleSolution};
