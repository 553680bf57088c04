use hoyt_core::quad::{integrate_to_infinity, QuadOptions};
use hoyt_core::specfun::{laguerre, laguerre_weighted, log_gamma};
use proptest::prelude::*;

fn w(b: f64, x: f64) -> f64 {
    x.powf(b) * (-x).exp()
}

fn lag(n: i64, alpha: f64, x: f64) -> f64 {
    if n < 0 {
        0.0
    } else {
        laguerre(n as usize, alpha, x).unwrap()
    }
}

/// `∫₀^∞ f`, through `x = u²` so that `x^{-1/2}` endpoint behaviour is smooth.
fn integrate_sq(f: impl Fn(f64) -> f64) -> f64 {
    let opts = QuadOptions::with_tolerances(1e-11, 1e-11);
    integrate_to_infinity(|u| 2.0 * u * f(u * u), 0.0, opts).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn weighted_derivative_identity(mu in 0usize..=60, alpha in -0.999f64..=5.0, x in 1e-3f64..=50.0) {
        let a = (alpha - 1.0) / 2.0;
        let f = |t: f64| w(a + 1.0, t) * lag(mu as i64, alpha, 2.0 * t);
        let h = 1e-3 * x.min(1.0);
        let fd = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
        let m = mu as f64;
        let up = (m + 1.0) * lag(mu as i64 + 1, alpha, 2.0 * x);
        let down = (m - 1.0 + 2.0 * a + 2.0) * lag(mu as i64 - 1, alpha, 2.0 * x);
        let rhs = 0.5 * w(a, x) * (up - down);
        let scale = 0.5 * w(a, x) * (up.abs() + down.abs());
        prop_assert!((fd - rhs).abs() <= 1e-6 * scale.max(1e-300), "fd {fd} vs {rhs}");
    }

    #[test]
    fn weighted_matches_naive_product(n in 0usize..=60, alpha in -0.999f64..=5.0, b in -0.5f64..=3.0, x in 0.0f64..=50.0) {
        let naive = w(b, x) * laguerre(n, alpha, 2.0 * x).unwrap();
        prop_assume!(naive.is_finite());
        let v = laguerre_weighted(n, alpha, b, x).unwrap().value();
        prop_assert!((v - naive).abs() <= 1e-12 * naive.abs().max(1e-300) + 1e-300, "{v} vs {naive}");
    }
}

#[test]
fn orthogonality() {
    for alpha in [0.0, 0.5, 1.0, 2.0, 3.0] {
        for m in 0..=8 {
            for n in 0..=m {
                let v = integrate_sq(|x| w(alpha, x) * lag(m, alpha, x) * lag(n, alpha, x));
                let expected = if m == n {
                    (log_gamma(n as f64 + alpha + 1.0).unwrap() - log_gamma(n as f64 + 1.0).unwrap()).exp()
                } else {
                    0.0
                };
                assert!(
                    (v - expected).abs() <= 1e-8 * expected.max(1.0),
                    "alpha={alpha} m={m} n={n}: {v} vs {expected}"
                );
            }
        }
    }
}

#[test]
fn weighted_laguerre_integral() {
    for a in [-0.5, 0.0, 0.5, 1.5] {
        for mu in 0..=10 {
            let v = integrate_sq(|y| w(a, y) * lag(mu, 2.0 * a + 1.0, 2.0 * y));
            let expected = if mu % 2 == 0 {
                let h = mu as f64 / 2.0;
                (log_gamma(h + a + 1.0).unwrap() - log_gamma(h + 1.0).unwrap()).exp()
            } else {
                0.0
            };
            assert!(
                (v - expected).abs() <= 1e-8 * expected.max(1.0),
                "a={a} mu={mu}: {v} vs {expected}"
            );
        }
    }
}
