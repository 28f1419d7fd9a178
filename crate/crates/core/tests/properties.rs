use beltrami::config::RunConfig;
use beltrami::corpus::{linear_phase_example, power_example, Phi};
use beltrami::fields::registry::cubic_a;
use beltrami::fields::{a_to_hstar, claim1_gaps, h_to_b};
use beltrami::grid::spectral::ifft2;
use beltrami::grid::wirtinger;
use beltrami::probes::{alpha_k, directional_qr_check, mu_nu_check, MuNuPair};
use beltrami::transforms::{beurling_global, cauchy_global};
use beltrami::{Complex64, ComplexGrid};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn band_limited(n: usize, coeffs: &[(f64, f64)], with_mean: bool) -> ComplexGrid {
    let mut spec = vec![c(0.0, 0.0); n * n];
    let m = 4i64;
    let mut it = coeffs.iter().cycle();
    for j in -m..=m {
        for k in -m..=m {
            let (a, b) = *it.next().unwrap();
            if j == 0 && k == 0 && !with_mean {
                continue;
            }
            spec[j.rem_euclid(n as i64) as usize * n + k.rem_euclid(n as i64) as usize] = c(a, b);
        }
    }
    ComplexGrid::new(1.0, n, ifft2(&spec, n)).unwrap()
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn beurling_is_isometric(coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 81)) {
        let psi = band_limited(32, &coeffs, false);
        prop_assume!(psi.l2_norm() > 1e-6);
        let s = beurling_global(&psi);
        prop_assert!((s.l2_norm() / psi.l2_norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cauchy_inverts_dbar(coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 81)) {
        let psi = band_limited(32, &coeffs, true);
        let cg = cauchy_global(&psi);
        let per = cg.map(|z, v| v - psi.mean() * z.conj());
        let (_, d) = wirtinger(&per).unwrap();
        let m = psi.mean();
        prop_assert!(d.zip_map(&psi, |_, a, b| a + m - b).max_abs() < 1e-10);
    }

    #[test]
    fn ellipticity_forms_agree(x1 in complex(), x2 in complex(), a1 in complex(), a2 in complex(), k in 0.01..0.99f64) {
        let (g1, g2) = claim1_gaps(x1, x2, a1, a2, k);
        prop_assume!(g1.abs() > 1e-9 && g2.abs() > 1e-9);
        prop_assert_eq!(g1 >= 0.0, g2 >= 0.0);
    }

    #[test]
    fn alpha_k_is_bracketed(big_k in 1.0001..100.0f64) {
        let a = alpha_k(big_k).unwrap();
        prop_assert!(1.0 / big_k < a && a < 3.0 / (2.0 * big_k + 1.0));
    }

    #[test]
    fn linear_phase_jets_pass_pointwise_checks(k in 0.05..0.95f64, phi0 in -3.0..3.0f64, r in 0.05..0.4f64, t in 0.0..6.28f64) {
        let z = Complex64::from_polar(r, t);
        for phi in [Phi::Square, Phi::Exp] {
            let j = linear_phase_example(k, phi0, phi).unwrap().jet(z);
            prop_assert!(directional_qr_check(&j, k, 128).unwrap() <= 1e-10 * (1.0 + j.fzz.norm()));
            let (s1, s2) = mu_nu_check(&MuNuPair::from_jet(&j).unwrap(), k).unwrap();
            prop_assert!(s1 >= -1e-10 && s2 >= -1e-10);
        }
    }

    #[test]
    fn power_example_saturates(big_k in 1.1..10.0f64, r in 0.01..0.5f64, t in 0.0..6.28f64) {
        let p = power_example(big_k).unwrap();
        let k = p.k().unwrap();
        let (s1, s2) = mu_nu_check(&MuNuPair::from_jet(&p.jet(Complex64::from_polar(r, t))).unwrap(), k).unwrap();
        prop_assert!(s1.abs() < 1e-12);
        prop_assert!(s2 >= -1e-12);
    }

    #[test]
    fn conversion_round_trip(eps in 0.0..0.33f64, z in complex(), xi in complex()) {
        let a = cubic_a(eps).unwrap();
        let pair = a_to_hstar(&a);
        let b = h_to_b(&pair.normalized, z, xi).unwrap();
        prop_assert!((b - a.eval(z, xi)).norm() < 1e-9 * xi.norm().max(1.0));
    }

    #[test]
    fn config_round_trip(exp in 4u32..10, seed in any::<u64>(), tol in 1e-14..1e-6f64) {
        let mut cfg = RunConfig::default();
        cfg.grid.n = 1 << exp;
        cfg.seed = seed;
        cfg.solver.tol = tol;
        let back = RunConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
