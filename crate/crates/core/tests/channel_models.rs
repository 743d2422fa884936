mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use tcd_core::channel_models::schema::Document;
use tcd_core::channel_models::{
    eigen_decompose, one_ring_covariance, one_ring_lag, one_ring_spectrum, sample_channels, synthesize_unitary_ensemble,
    szego_logdet_rate, OneRingParams, DEFAULT_RANK_THRESHOLD,
};
use tcd_core::linalg::{hermitian_eigenvalues, orthonormality_defect};

#[allow(clippy::too_many_arguments)]
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    // split first so oscillatory integrands cannot fool the first estimate
    let n = 64;
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let (x0, x1) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (f0, fm, f1) = (f(x0), f(0.5 * (x0 + x1)), f(x1));
            let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
            simpson(&f, x0, x1, f0, fm, f1, whole, 1e-13, 40)
        })
        .sum()
}

fn lag_oracle(theta: f64, delta: f64, d: f64, n: i64) -> Complex64 {
    let phase = |w: f64| 2.0 * PI * d * n as f64 * (w + theta).sin();
    let re = adaptive(|w| phase(w).cos(), -delta, delta);
    let im = adaptive(|w| phase(w).sin(), -delta, delta);
    Complex64::new(re, im) / (2.0 * delta)
}

#[test]
fn lags_match_adaptive_simpson() {
    for (theta_deg, delta_deg, d) in [(0.0, 90.0, 0.5), (30.0, 10.0, 0.5), (-55.0, 20.0, 1.0), (80.0, 5.0, 0.5)] {
        let p = OneRingParams::from_degrees(theta_deg, delta_deg, d, 64).unwrap();
        for n in [1i64, 3, 17, 63] {
            let got = one_ring_lag(&p, n).unwrap();
            let want = lag_oracle(p.theta, p.delta, d, n);
            assert!((got - want).norm() < 1e-8, "theta={theta_deg} delta={delta_deg} n={n}: {got} vs {want}");
        }
    }
}

#[test]
fn spectrum_integrates_to_one_and_matches_eigen_mass() {
    let p = OneRingParams::from_degrees(20.0, 15.0, 0.5, 128).unwrap();
    let s = one_ring_spectrum(&p).unwrap();
    assert!((s.total_mass().unwrap() - 1.0).abs() < 1e-6);
    // fraction of eigenvalues above a small threshold tracks the support
    let ev = hermitian_eigenvalues(one_ring_covariance(&p).unwrap().entries());
    let big = ev.iter().filter(|&&l| l > 1e-3).count() as f64 / 128.0;
    assert!((big - s.support_measure()).abs() < 0.1, "{big} vs {}", s.support_measure());
}

#[test]
fn szego_rate_tracks_finite_logdet() {
    let p = OneRingParams::new(0.0, PI / 2.0, 0.5, 128).unwrap();
    let rate = szego_logdet_rate(&one_ring_spectrum(&p).unwrap()).unwrap();
    let ld = one_ring_covariance(&p).unwrap().log2_det() / 128.0;
    assert!((ld - rate.raw_bits).abs() < 0.1, "{ld} vs {}", rate.raw_bits);
}

#[test]
fn sampled_channels_have_requested_covariance() {
    let ens = synthesize_unitary_ensemble(4, 2, 2, &[vec![3.0, 1.0]], 3).unwrap();
    let n = 20_000;
    let hs = sample_channels(ens.groups(), n, 9);
    for (g, h) in ens.groups().iter().zip(&hs) {
        let emp = (h * h.adjoint()) / Complex64::new(n as f64, 0.0);
        let err = (&emp - g.covariance()).norm() / g.covariance().norm();
        assert!(err < 0.05, "relative covariance error {err}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn one_ring_is_valid_covariance(theta in -89.0f64..89.0, delta in 1.0f64..90.0, m in 1usize..24) {
        let p = OneRingParams::from_degrees(theta, delta, 0.5, m).unwrap();
        let r = one_ring_covariance(&p).unwrap();
        let ev = hermitian_eigenvalues(r.entries());
        prop_assert!(ev.iter().all(|&l| l > -1e-8));
        prop_assert!((ev.iter().sum::<f64>() - m as f64).abs() < 1e-8);
    }

    #[test]
    fn ensembles_are_orthonormal_and_round_trip(m in 2usize..10, seed in 0u64..1000) {
        let g = m / 2;
        let r = m / g;
        let prof: Vec<f64> = (0..r).map(|i| (r - i) as f64).collect();
        let s: f64 = prof.iter().sum();
        let prof: Vec<f64> = prof.iter().map(|x| x * m as f64 / s).collect();
        let ens = synthesize_unitary_ensemble(m, g, r, &[prof], seed).unwrap();
        prop_assert!(orthonormality_defect(&ens.stacked_basis()) < 1e-10);
        let doc = Document::from_ensemble(&ens);
        let back = Document::from_json(&doc.to_json().unwrap()).unwrap().to_ensemble().unwrap();
        prop_assert_eq!(back.profiles(), ens.profiles());
        prop_assert!((back.stacked_basis() - ens.stacked_basis()).norm() == 0.0);
    }

    #[test]
    fn decomposition_reconstructs(theta in -60.0f64..60.0, delta in 5.0f64..40.0) {
        let p = OneRingParams::from_degrees(theta, delta, 0.5, 16).unwrap();
        let cov = one_ring_covariance(&p).unwrap();
        let ge = eigen_decompose(&cov, 1e-12).unwrap();
        let err = (ge.covariance() - cov.entries()).norm() / cov.entries().norm();
        prop_assert!(err < 1e-6);
        let trunc = eigen_decompose(&cov, DEFAULT_RANK_THRESHOLD).unwrap();
        prop_assert!(trunc.rank() <= ge.rank());
    }
}
