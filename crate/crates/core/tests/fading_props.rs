use std::f64::consts::PI;

use hoyt_core::fading::{
    envelope_pdf, params_from_q, params_from_sigmas, params_from_tau, phase_pdf, q_from_tau, sample_signal, tau_from_q,
};
use hoyt_core::quad::{integrate, integrate_to_infinity, QuadOptions};
use hoyt_core::rng::GaussianStream;
use proptest::prelude::*;

#[test]
fn sigma_round_trip() {
    for k in 0..=10 {
        let q = k as f64 / 10.0;
        for omega in [0.5, 1.0, 3.0] {
            let p = params_from_q(q, omega).unwrap();
            let back = params_from_sigmas(p.sigma_x(), p.sigma_y()).unwrap();
            assert!((back.q - q).abs() <= 1e-14, "q={q}: {}", back.q);
            assert!((back.omega - omega).abs() <= 1e-14 * omega);
        }
    }
}

#[test]
fn envelope_continuous_near_rayleigh() {
    let near = params_from_q(1.0 - 1e-9, 1.0).unwrap();
    let ray = params_from_q(1.0, 1.0).unwrap();
    for k in 0..=100 {
        let r = 5.0 * k as f64 / 100.0;
        let (a, b) = (envelope_pdf(r, &near).unwrap(), envelope_pdf(r, &ray).unwrap());
        assert!((a - b).abs() <= 1e-6, "r={r}: {a} vs {b}");
    }
}

#[test]
fn densities_normalize() {
    let opts = QuadOptions::default();
    for q in [0.0, 0.3, 0.7, 1.0] {
        for omega in [0.5, 2.0] {
            let p = params_from_q(q, omega).unwrap();
            let mass = integrate_to_infinity(|r| envelope_pdf(r, &p).unwrap(), 0.0, opts)
                .unwrap()
                .value;
            assert!((mass - 1.0).abs() < 1e-9, "q={q} omega={omega}: {mass}");
        }
    }
    let p = params_from_q(0.6, 1.5).unwrap();
    let second = integrate_to_infinity(|r| r * r * envelope_pdf(r, &p).unwrap(), 0.0, opts)
        .unwrap()
        .value;
    assert!((second - 1.5).abs() < 1e-9);
    let p = params_from_q(0.4, 1.0).unwrap();
    let mass = integrate(|t| phase_pdf(t, &p).unwrap(), -PI, PI, opts).unwrap().value;
    assert!((mass - 1.0).abs() < 1e-10);
}

#[test]
fn sample_moments() {
    let p = params_from_q(0.5, 2.0).unwrap();
    let mut rng = GaussianStream::from_seed(11);
    let n = 1_000_000;
    let (mut sr, mut si, mut s2) = (0.0, 0.0, 0.0);
    for _ in 0..n {
        let z = sample_signal(&p, &mut rng);
        sr += z.re;
        si += z.im;
        s2 += z.norm_sqr();
    }
    let nf = n as f64;
    let bound = 4.0 * (p.omega / nf).sqrt();
    assert!((sr / nf).abs() < bound && (si / nf).abs() < bound);
    // Var|Z|² = 2(σ_X⁴ + σ_Y⁴) for independent Gaussian components.
    let sd = (2.0 * (p.sigma_x2.powi(2) + p.sigma_y2.powi(2)) / nf).sqrt();
    assert!((s2 / nf - p.omega).abs() < 4.0 * sd, "{}", s2 / nf);
}

#[test]
fn envelope_histogram() {
    let p = params_from_q(0.5, 1.0).unwrap();
    let mut rng = GaussianStream::from_seed(5);
    let (bins, hi, draws) = (30usize, 3.0, 1_000_000usize);
    let width = hi / bins as f64;
    let mut counts = vec![0u64; bins];
    for _ in 0..draws {
        let r = sample_signal(&p, &mut rng).norm();
        if r < hi {
            counts[(r / width) as usize] += 1;
        }
    }
    let mut worst: f64 = 0.0;
    for (k, &c) in counts.iter().enumerate() {
        let lo = k as f64 * width;
        let prob = integrate(|r| envelope_pdf(r, &p).unwrap(), lo, lo + width, QuadOptions::default())
            .unwrap()
            .value;
        let se = (prob * (1.0 - prob) / draws as f64).sqrt();
        worst = worst.max((c as f64 / draws as f64 - prob).abs() / se);
    }
    assert!(worst < 3.0, "worst bin deviation {worst} standard errors");
}

proptest! {
    #[test]
    fn tau_round_trip(q in 0.0f64..1.0) {
        let back = q_from_tau(tau_from_q(q));
        prop_assert!((back - q).abs() <= 1e-12);
        let p = params_from_tau(tau_from_q(q), 1.0).unwrap();
        prop_assert!((p.q - q).abs() <= 1e-12);
    }

    #[test]
    fn phase_is_even_with_period_pi(q in 0.01f64..=1.0, theta in -PI..PI) {
        let p = params_from_q(q, 1.0).unwrap();
        let v = phase_pdf(theta, &p).unwrap();
        prop_assert!((phase_pdf(-theta, &p).unwrap() - v).abs() <= 1e-12 * v);
        prop_assert!((phase_pdf(theta + PI, &p).unwrap() - v).abs() <= 1e-12 * v);
    }
}
