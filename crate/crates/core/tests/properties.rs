use std::path::Path;

use lpdecay::analysis::gronwall_bound;
use lpdecay::besov::{besov_norm, log_besov_norm, BesovSpec, DyadicDecomposition};
use lpdecay::config::SimConfig;
use lpdecay::harness::fit_decay_exponent;
use lpdecay::random::random_field;
use lpdecay::spectral::{gradient, gradient_part, leray_project, Grid, SpectralField};
use lpdecay::transport::product_law_check;
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::new(32, 5.0).unwrap()
}

fn max_gap(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn scale(f: &SpectralField) -> f64 {
    f.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn blocks_sum_to_the_field(seed in 0u64..10_000, k_cut in 1.0f64..15.0) {
        let f = random_field(grid(), seed, k_cut);
        let rec = DyadicDecomposition::new(&f).reconstruct();
        prop_assert!(max_gap(&f, &rec) <= 1e-12 * scale(&f));
    }

    #[test]
    fn leray_is_a_projection(s1 in 0u64..10_000, s2 in 0u64..10_000, k_cut in 1.0f64..15.0) {
        let (a, b) = (random_field(grid(), s1, k_cut), random_field(grid(), s2, k_cut));
        let p = leray_project(&a, &b).unwrap();
        let pp = leray_project(p.u1(), p.u2()).unwrap();
        prop_assert!(max_gap(p.u1(), pp.u1()) <= 1e-12 * scale(&a));
        prop_assert!(max_gap(p.u2(), pp.u2()) <= 1e-12 * scale(&b));
        prop_assert!(p.divergence().coeffs().iter().all(|c| c.norm() <= 1e-10));
        // P + Q = I
        let (q1, q2) = gradient_part(&a, &b).unwrap();
        prop_assert!(max_gap(&(p.u1() + &q1), &a) <= 1e-12 * scale(&a));
        prop_assert!(max_gap(&(p.u2() + &q2), &b) <= 1e-12 * scale(&b));
        // gradients are annihilated
        let (g1, g2) = gradient(&a);
        let pg = leray_project(&g1, &g2).unwrap();
        prop_assert!(pg.u1().l2_norm() + pg.u2().l2_norm() <= 1e-10 * (g1.l2_norm() + g2.l2_norm()).max(1.0));
    }

    #[test]
    fn besov_norms_are_homogeneous_and_subadditive(
        s1 in 0u64..10_000, s2 in 0u64..10_000, lambda in -50.0f64..50.0,
        s in -1.0f64..2.0, p_inf in any::<bool>(), r in 1.0f64..4.0,
    ) {
        let p = if p_inf { f64::INFINITY } else { 2.0 };
        let spec = BesovSpec::classical(s, p, r).unwrap();
        let (f, g) = (random_field(grid(), s1, 10.0), random_field(grid(), s2, 10.0));
        let nf = besov_norm(&f, spec);
        let scaled = besov_norm(&f.scaled(lambda), spec);
        prop_assert!((scaled - lambda.abs() * nf).abs() <= 1e-12 * scaled.max(1.0));
        let sum = besov_norm(&(&f + &g), spec);
        prop_assert!(sum <= (nf + besov_norm(&g, spec)) * (1.0 + 1e-12));
    }

    #[test]
    fn log_norm_grows_with_eta(seed in 0u64..10_000, eta in 0.1f64..3.0, step in 0.01f64..1.0) {
        let f = random_field(grid(), seed, 12.0);
        prop_assert!(log_besov_norm(&f, eta).unwrap() <= log_besov_norm(&f, eta + step).unwrap());
    }

    #[test]
    fn product_ratio_ignores_scaling(
        s1 in 0u64..10_000, s2 in 0u64..10_000, la in 0.01f64..100.0, lb in 0.01f64..100.0,
    ) {
        let (a, b) = (random_field(grid(), s1, 8.0), random_field(grid(), s2, 8.0));
        let r0 = product_law_check(&a, &b, 1.5).unwrap().ratio;
        let r1 = product_law_check(&a.scaled(la), &b.scaled(-lb), 1.5).unwrap().ratio;
        prop_assert!((r0 - r1).abs() <= 1e-10 * r0);
    }

    #[test]
    fn gronwall_bound_is_monotone(
        g in prop::collection::vec(0.0f64..2.0, 21),
        h in prop::collection::vec(0.0f64..1.0, 21),
        bump in prop::collection::vec(0.0f64..1.0, 21),
    ) {
        let t: Vec<f64> = (0..21).map(|i| 0.1 * i as f64).collect();
        let b = gronwall_bound(&g, &h, &t).unwrap();
        let h2: Vec<f64> = h.iter().zip(&bump).map(|(a, d)| a + d).collect();
        let b2 = gronwall_bound(&g, &h2, &t).unwrap();
        for k in 0..t.len() {
            prop_assert!(b[k] >= g[k]);
            prop_assert!(b2[k] >= b[k] * (1.0 - 1e-14));
        }
    }

    #[test]
    fn fit_recovers_power_laws(a in 0.0f64..3.0, c in -5.0f64..5.0) {
        let series: Vec<(f64, f64)> = (0..60)
            .map(|i| {
                let t = i as f64 * 2.0;
                (t, c.exp() * (t + std::f64::consts::E).powf(-a))
            })
            .collect();
        let fit = fit_decay_exponent(&series, (1.0, 200.0)).unwrap();
        prop_assert!((fit.exponent - a).abs() <= 1e-9);
        prop_assert!((fit.log_prefactor - c).abs() <= 1e-8);
    }

    #[test]
    fn config_survives_a_round_trip(
        seed in any::<u64>(), half_n in 8usize..64, dt in 0.01f64..0.5, contrast in 0.0f64..0.3,
    ) {
        let text = format!(
            "seed = {seed}\n[grid]\nn = {}\nl = 20.0\n[time]\ndt = {dt:?}\nt_final = 2.0\n\
             [physics]\nviscosity = {{ kind = \"affine\", mu0 = 0.5, slope = 0.2 }}\ndensity_contrast = {contrast:?}\n\
             [initial]\namplitude = 1.0\ntarget_p = 1.2\nregularity = {{ kind = \"h1\" }}\n\
             profile = {{ kind = \"flat_disk\", k_c = 0.5 }}\n",
            2 * half_n
        );
        let cfg = SimConfig::from_toml_str(&text, Path::new("p.toml")).unwrap();
        let again = SimConfig::from_toml_str(&cfg.to_toml(), Path::new("q.toml")).unwrap();
        prop_assert_eq!(cfg, again);
    }
}
