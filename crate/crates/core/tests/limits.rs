//! Behaviour of `K_n` as `n` grows: scaling of the mean, convergence of
//! `K_n/n^α` to the diversity law, and agreement of simulation with the
//! exact law.

use ewens_pitman::exact::{mean_exact, MarkovDp};
use ewens_pitman::fluctuation::diversity_cdf_mass;
use ewens_pitman::montecarlo::{simulate_kn, SimConfig};
use ewens_pitman::ModelParams;
use statrs::function::gamma::ln_gamma;

fn p(alpha: f64, theta: f64) -> ModelParams {
    ModelParams::new(alpha, theta).unwrap()
}

#[test]
fn mean_over_n_alpha_approaches_mean_diversity() {
    for &(a, t) in &[(0.3, 1.0), (0.5, 2.0), (0.7, 0.5)] {
        // E S = Γ(θ + 1)/(α Γ(θ + α))
        let target = (ln_gamma(t + 1.0) - ln_gamma(t + a)).exp() / a;
        let mut dp = MarkovDp::new(p(a, t));
        // E K_n = E S · n^α − θ/α + o(1), so the relative error times n^α
        // tends to θ/(α E S)
        let correction = t / (a * target);
        let mut scaled = Vec::new();
        for n in [100usize, 400, 1600] {
            while dp.samples() < n {
                dp.step();
            }
            let nf = (n as f64).powf(a);
            let err = 1.0 - mean_exact(&dp.table()) / nf / target;
            scaled.push((err * nf / correction - 1.0).abs());
        }
        // what remains decays at least like n^{−min(α, 1−α)}
        let rate = 4f64.powf(-a.min(1.0 - a)) * 1.1;
        assert!(scaled.windows(2).all(|w| w[1] < rate * w[0]), "({a},{t}) {scaled:?}");
        assert!(scaled[2] < 0.1, "({a},{t}) {scaled:?}");
    }
}

/// Largest gap between the exact CDF of `K_n/n^α` and the diversity CDF,
/// measured at the jump points of the former.
fn ks_distance(a: f64, t: f64, n: usize) -> f64 {
    let params = p(a, t);
    let mut dp = MarkovDp::new(params);
    while dp.samples() < n {
        dp.step();
    }
    let table = dp.table();
    let scale = (n as f64).powf(a);
    let mut cdf = vec![0.0];
    for k in 1..=n {
        cdf.push(cdf[k - 1] + table.log_pmf(k).exp());
    }
    // about sixty evaluation points across the bulk of the law
    let lo = cdf.iter().position(|&c| c > 1e-4).unwrap_or(1).max(1);
    let hi = cdf.iter().position(|&c| c > 1.0 - 1e-4).unwrap_or(n);
    let stride = ((hi - lo) / 60).max(1);
    (lo..=hi)
        .step_by(stride)
        .map(|k| {
            let f = diversity_cdf_mass(&params, k as f64 / scale).unwrap();
            (cdf[k - 1] - f).abs().max((cdf[k] - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn scaled_count_is_close_to_the_diversity_law() {
    // The jump of size P(K_n = k) ~ n^{−α} dominates the distance, so the
    // band is loose and only shrinks slowly with n.
    for &(a, t) in &[(0.5, 1.0), (0.7, 1.0)] {
        let small = ks_distance(a, t, 250);
        let large = ks_distance(a, t, 2000);
        assert!(large < small, "({a},{t}): {small} -> {large}");
        assert!(large < 0.06, "({a},{t}): {large}");
    }
}

#[test]
fn simulated_mean_within_three_standard_errors() {
    let params = p(0.4, 1.5);
    let n = 150;
    let emp = simulate_kn(&SimConfig::new(params, n, 40_000, 99).unwrap());
    let mut dp = MarkovDp::new(params);
    while dp.samples() < n {
        dp.step();
    }
    let exact = mean_exact(&dp.table());
    assert!((emp.mean() - exact).abs() < 3.0 * emp.std_error(), "{} vs {exact}", emp.mean());
}
