use proptest::prelude::*;
use std::sync::OnceLock;

use quasisym_core::convexity::{
    certify_hprime_convex, gamma_coefficients, pi_coefficients, qp_coefficients, qp_eval, CertificateMode,
    GammaTriple,
};
use quasisym_core::format;
use quasisym_core::nonlin::{bundle_for, g_inverse, solve_g, GFunction, NonlinearitySpec};
use quasisym_core::radial::{multiplicity, sign_changes};

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn g_for(k_index: usize) -> &'static GFunction {
    static TABLES: OnceLock<Vec<GFunction>> = OnceLock::new();
    &TABLES.get_or_init(|| {
        [1.5, 2.0, 3.0, 4.5]
            .iter()
            .map(|&k| solve_g(&NonlinearitySpec::power(k, 3.0, 3).unwrap(), 10.0, 1e-12).unwrap())
            .collect()
    })[k_index]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn g_is_odd_and_increasing(idx in 0usize..4, s in 0.0f64..10.0, ds in 1e-3f64..0.5) {
        let g = g_for(idx);
        let v = g.eval(s).unwrap();
        prop_assert_eq!(g.eval(-s).unwrap(), -v);
        prop_assert!(g.eval((s + ds).min(10.0)).unwrap() >= v);
        // |g(s)| ≤ |s| since a ≥ 1
        prop_assert!(v.abs() <= s + 1e-12);
    }

    #[test]
    fn g_inverse_round_trip(idx in 0usize..4, s in -10.0f64..10.0) {
        let g = g_for(idx);
        let back = g_inverse(g, g.eval(s).unwrap()).unwrap();
        prop_assert!((back - s).abs() <= 1e-9 * (1.0 + s.abs()), "{back} vs {s}");
    }

    #[test]
    fn gamma_factorizations(k in 1.01f64..15.0, gap in 1e-3f64..10.0) {
        let p = k + 1.0 + gap;
        let g = gamma_coefficients(p, k);
        prop_assert!(rel(g.gamma1, GammaTriple::gamma1_factored(p, k)) <= 1e-12);
        prop_assert!(rel(g.gamma2, GammaTriple::gamma2_factored(p, k)) <= 1e-12);
        prop_assert!(g.gamma1 > 0.0);
    }

    #[test]
    fn q_expansion_matches_factored_form(k in 1.01f64..8.0, gap in 1e-3f64..10.0, s in 1e-3f64..5.0) {
        let p = k + 1.0 + gap;
        let pi = pi_coefficients(p, k);
        let q = qp_coefficients(p, k);
        prop_assert!(rel(pi.eval_factored(k, s), qp_eval(&q, k, s)) <= 1e-10);
        prop_assert_eq!(q.c3, pi.sum());
    }

    #[test]
    fn bridge_identity(k in 2.0f64..4.0, p in 4.0f64..12.0, s in 0.1f64..3.0) {
        let b = bundle_for(NonlinearitySpec::power(k, p, 3).unwrap(), 3.0, 1e-12).unwrap();
        let t = b.g().eval(s).unwrap();
        let a = 1.0 + t.powf(k);
        let lhs = 4.0 * a.powi(5) * b.h_eval(&[0.0], s, 3).unwrap();
        let rhs = t.powf(p - 3.0) * qp_eval(&qp_coefficients(p, k), k, t);
        prop_assert!(rel(lhs, rhs) <= 1e-8, "{lhs} vs {rhs}");
    }

    #[test]
    fn sharp_certificate_implies_positive_samples(k in 1.5f64..4.0, p in 2.5f64..20.0) {
        let cert = certify_hprime_convex(p, k, CertificateMode::Sharp).unwrap();
        if cert.certified {
            for i in 1..=200 {
                let x = (i as f64 / 20.0).powi(3);
                prop_assert!(cert.q.eval_x(x) > 0.0, "Q({x}) <= 0 for p={p} k={k}");
            }
        }
    }

    #[test]
    fn sign_changes_ignore_scaling_and_zeros(values in prop::collection::vec(-5.0f64..5.0, 0..40), c in 0.1f64..10.0) {
        let scaled: Vec<f64> = values.iter().map(|v| c * v).collect();
        prop_assert_eq!(sign_changes(&values), sign_changes(&scaled));
        let mut padded = vec![0.0];
        for v in &values {
            padded.push(*v);
            padded.push(0.0);
        }
        prop_assert_eq!(sign_changes(&values), sign_changes(&padded));
    }

    #[test]
    fn number_format_round_trips(x in prop::num::f64::NORMAL) {
        let back: f64 = format::num(x).parse().unwrap();
        prop_assert!(rel(back, x) <= 5e-12);
    }
}

#[test]
fn harmonic_multiplicities_in_three_dimensions() {
    for l in 0..20 {
        assert_eq!(multiplicity(l, 3), 2 * l as u64 + 1);
    }
    assert_eq!(multiplicity(3, 2), 2);
    assert_eq!(multiplicity(0, 2), 1);
}
