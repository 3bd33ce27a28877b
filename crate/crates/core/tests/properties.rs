//! Structural invariants checked on random inputs.

use ewens_pitman::asymptotics::{snapped_product, tail_start};
use ewens_pitman::exact::{mean_exact, pmf_markov, tail_exact};
use ewens_pitman::params::{frac_ceil, log_rising, log_sum_exp};
use ewens_pitman::saddle::solve_saddle;
use ewens_pitman::sibuya::{convolve_power, generating_function, pmf_table};
use ewens_pitman::{LogProb, ModelParams};
use num_complex::Complex64;
use proptest::prelude::*;
use statrs::function::gamma::ln_gamma;

fn model() -> impl Strategy<Value = ModelParams> {
    (0.05f64..0.95, 0.05f64..5.0).prop_map(|(a, t)| ModelParams::new(a, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_powers_add(p in model(), k1 in 1usize..8, k2 in 1usize..8, n in 16usize..80) {
        let sib = pmf_table(&p, n);
        let a = convolve_power(&sib, k1, n).unwrap();
        let b = convolve_power(&sib, k2, n).unwrap();
        let ab = a.convolve(&b);
        let direct = convolve_power(&sib, k1 + k2, n).unwrap();
        prop_assert_eq!(ab.k(), k1 + k2);
        for m in (k1 + k2)..=n {
            prop_assert!((ab.log_q(m) - direct.log_q(m)).abs() < 1e-10);
        }
        // fewer than k draws cannot sum below k
        prop_assert_eq!(direct.log_q(k1 + k2 - 1), f64::NEG_INFINITY);
    }

    #[test]
    fn sibuya_head_plus_tail_is_one(alpha in 0.05f64..0.95, j in 1usize..400) {
        let p = ModelParams::new(alpha, 1.0).unwrap();
        let sib = pmf_table(&p, j);
        let head: f64 = (1..=j).map(|i| sib.log_p(i).exp()).sum();
        // P(X > j) = Γ(j + 1 − α)/(Γ(1 − α)Γ(j + 1))
        let tail = (ln_gamma(j as f64 + 1.0 - alpha) - ln_gamma(1.0 - alpha) - ln_gamma(j as f64 + 1.0)).exp();
        prop_assert!((head + tail - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generating_function_on_the_real_segment(alpha in 0.05f64..0.95, z in 0.0f64..1.0) {
        let g = generating_function(alpha, Complex64::new(z, 0.0)).unwrap();
        prop_assert!((g.re - (1.0 - (1.0 - z).powf(alpha))).abs() < 1e-14);
        prop_assert!(g.im.abs() < 1e-15);
    }

    #[test]
    fn frac_ceil_complements_to_ceiling(x in -1e6f64..1e6) {
        let f = frac_ceil(x);
        prop_assert!((0.0..1.0).contains(&f));
        prop_assert_eq!(x + f, x.ceil());
    }

    #[test]
    fn snapping_only_moves_near_integers(n in 1usize..10_000, m in 0usize..10_000) {
        let x = m as f64 / n as f64;
        prop_assert_eq!(snapped_product(n, x), m as f64);
        prop_assert_eq!(tail_start(n, x), m);
    }

    #[test]
    fn log_rising_is_a_product(a in 0.01f64..20.0, k in 0usize..30) {
        let direct: f64 = (0..k).map(|i| (a + i as f64).ln()).sum();
        prop_assert!((log_rising(a, k as f64).unwrap() - direct).abs() < 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn log_sum_exp_is_shift_invariant(v in prop::collection::vec(-50.0f64..50.0, 1..20), c in -500.0f64..500.0) {
        let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
        prop_assert!((log_sum_exp(&shifted) - log_sum_exp(&v) - c).abs() < 1e-10);
    }

    #[test]
    fn log_probabilities_are_non_positive(v in -1e3f64..1e3) {
        prop_assert_eq!(LogProb::new(v).is_ok(), v <= 0.0);
    }

    #[test]
    fn exact_law_is_normalised_with_the_known_mean(p in model(), n in 1usize..250) {
        let t = pmf_markov(&p, n).unwrap();
        prop_assert!((t.total_mass() - 1.0).abs() < 1e-10);
        // E K_n = (θ/α)((θ + α)_n/(θ)_n − 1)
        let (a, th) = (p.alpha(), p.theta());
        let ratio = (log_rising(th + a, n as f64).unwrap() - log_rising(th, n as f64).unwrap()).exp();
        let mean = th / a * (ratio - 1.0);
        prop_assert!((mean_exact(&t) / mean - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tail_is_monotone(p in model(), n in 2usize..150) {
        let t = pmf_markov(&p, n).unwrap();
        let tails: Vec<f64> = (1..=n).map(|k| tail_exact(&t, k).unwrap().ln()).collect();
        prop_assert!(tails.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn saddle_is_interior_and_rate_is_convex(p in model(), x in 0.02f64..0.98) {
        let s = solve_saddle(&p, x).unwrap();
        prop_assert!(s.z_star > 0.0 && s.z_star < 1.0);
        prop_assert!(s.one_minus_z > 0.0);
        prop_assert!(s.residual < 1e-10);
        prop_assert!(s.h_val > 0.0 && s.i1 > 0.0 && s.i2 > 0.0);
        let next = solve_saddle(&p, x + 0.01).unwrap();
        prop_assert!(next.h_val > s.h_val && next.i1 > s.i1);
    }
}
