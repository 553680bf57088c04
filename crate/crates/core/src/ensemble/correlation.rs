use num_complex::Complex64;

use super::density::level_density;
use super::kernel::{kernel_a, kernel_b, kernel_s};
use super::{crossover_from_q, ChannelConfig, SeriesControl};
use crate::error::{Error, Result};
use crate::fading::Crossover;
use crate::linalg::{determinant, ComplexMatrix};
use crate::specfun::{lgamma, ln_weight, CompensatedSum, LaguerreSeq};

/// Determinants more negative than this (relative to `Π R₁(λ_j)²`) are a
/// consistency fault rather than rounding.
const NEGATIVE_DET_TOL: f64 = 1e-9;

/// `n`-level correlation function `R_n(λ_1, …, λ_n; Ω; τ)`, `1 ≤ n ≤ N`.
///
/// Interior `q` builds the `2n × 2n` matrix of `[[S, A], [B, Sᵀ]]` blocks and
/// returns the square root of its determinant. `q = 1` uses the ordinary
/// determinantal form of the unitary ensemble.
pub fn correlation_fn(points: &[f64], cfg: &ChannelConfig, q: f64, ctrl: &SeriesControl) -> Result<f64> {
    let n = points.len();
    if n == 0 || n > cfg.n {
        return Err(Error::dimension(format!(
            "correlation order must lie in 1..={}, got {n}",
            cfg.n
        )));
    }
    if points.iter().any(|&l| !(l >= 0.0 && l.is_finite())) {
        return Err(Error::domain("points must be finite and >= 0"));
    }
    let crossover = crossover_from_q(q)?;
    if n == 1 {
        return level_density(points[0], cfg, q, ctrl);
    }
    if cfg.a < 0.0 && points.contains(&0.0) {
        return Err(Error::domain(
            "square arrays have an unbounded kernel at lambda = 0; use points > 0",
        ));
    }
    match crossover {
        Crossover::Unitary => unitary_correlation(points, cfg),
        Crossover::Orthogonal | Crossover::Interior { .. } => {
            quaternion_correlation(points, cfg, crossover.tau(), ctrl)
        }
    }
}

fn lue_kernel_matrix(points: &[f64], cfg: &ChannelConfig) -> Vec<Vec<f64>> {
    let alpha = cfg.alpha();
    let n = cfg.n;
    // φ_k(λ) = √(Γ(k+1)/Γ(k+α+1) · w_α(λ/Ω)/Ω) L_k(λ/Ω)
    let funcs: Vec<Vec<f64>> = points
        .iter()
        .map(|&lam| {
            let t = lam / cfg.omega;
            let half_w = 0.5 * (ln_weight(alpha, t) - cfg.omega.ln());
            LaguerreSeq::new(alpha, t)
                .take(n)
                .enumerate()
                .map(|(k, l)| {
                    let kf = k as f64;
                    l.scale_log(half_w + 0.5 * (lgamma(kf + 1.0) - lgamma(kf + alpha + 1.0)))
                        .value()
                })
                .collect()
        })
        .collect();
    funcs
        .iter()
        .map(|fj| {
            funcs
                .iter()
                .map(|fk| {
                    fj.iter()
                        .zip(fk)
                        .map(|(a, b)| a * b)
                        .collect::<CompensatedSum>()
                        .value()
                })
                .collect()
        })
        .collect()
}

fn unitary_correlation(points: &[f64], cfg: &ChannelConfig) -> Result<f64> {
    let k = lue_kernel_matrix(points, cfg);
    let n = points.len();
    let m = ComplexMatrix::from_fn(n, n, |r, c| Complex64::new(k[r][c], 0.0));
    let det = determinant(&m)?.re;
    let scale: f64 = (0..n).map(|j| k[j][j]).product();
    checked_nonnegative(det, scale)
}

fn checked_nonnegative(det: f64, scale: f64) -> Result<f64> {
    if !det.is_finite() {
        return Err(Error::Numerical(format!("correlation determinant is {det}")));
    }
    if det < 0.0 {
        if det < -NEGATIVE_DET_TOL * scale.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::Numerical(format!(
                "correlation determinant {det:e} is negative beyond tolerance (scale {scale:e})"
            )));
        }
        return Ok(0.0);
    }
    Ok(det)
}

fn quaternion_correlation(points: &[f64], cfg: &ChannelConfig, tau: f64, ctrl: &SeriesControl) -> Result<f64> {
    let n = points.len();
    let two_omega = 2.0 * cfg.omega;
    let xs: Vec<f64> = points.iter().map(|&l| l / two_omega).collect();
    let mut s = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in 0..n {
            s[j][k] = kernel_s(xs[j], xs[k], cfg, tau, ctrl)?;
        }
    }
    let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            let (a, b) = if j == k {
                (0.0, 0.0)
            } else {
                (
                    kernel_a(xs[j], xs[k], cfg, tau)?,
                    kernel_b(xs[j], xs[k], cfg, tau, ctrl)?,
                )
            };
            m[(2 * j, 2 * k)] = Complex64::new(s[j][k], 0.0);
            m[(2 * j, 2 * k + 1)] = Complex64::new(a, 0.0);
            m[(2 * j + 1, 2 * k)] = Complex64::new(b, 0.0);
            m[(2 * j + 1, 2 * k + 1)] = Complex64::new(s[k][j], 0.0);
        }
    }
    let det = determinant(&m)?.re;
    let scale: f64 = (0..n).map(|j| s[j][j] * s[j][j]).product();
    let det = checked_nonnegative(det, scale)?;
    Ok(det.sqrt() / two_omega.powi(n as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::jpd;

    fn ctrl() -> SeriesControl {
        SeriesControl::default()
    }

    #[test]
    fn first_order_is_level_density() {
        let cfg = ChannelConfig::new(3, 5, 1.2).unwrap();
        for q in [0.0, 0.4, 1.0] {
            let r = correlation_fn(&[1.7], &cfg, q, &ctrl()).unwrap();
            let d = level_density(1.7, &cfg, q, &ctrl()).unwrap();
            assert_eq!(r, d);
        }
    }

    #[test]
    fn full_order_is_factorial_times_jpd() {
        for (nt, nr) in [(2, 2), (2, 5)] {
            let cfg = ChannelConfig::new(nt, nr, 1.0).unwrap();
            for q in [0.0, 0.5, 1.0] {
                let pts = [2.3, 0.6];
                let r2 = correlation_fn(&pts, &cfg, q, &ctrl()).unwrap();
                let p = jpd(&pts, &cfg, q, &ctrl()).unwrap();
                assert!(
                    (r2 - 2.0 * p).abs() < 1e-9 * r2,
                    "({nt},{nr}) q={q}: {r2} vs {}",
                    2.0 * p
                );
            }
        }
        let cfg = ChannelConfig::new(3, 4, 1.0).unwrap();
        for q in [0.0, 0.5, 1.0] {
            let pts = [3.1, 1.4, 0.5];
            let r3 = correlation_fn(&pts, &cfg, q, &ctrl()).unwrap();
            let p = jpd(&pts, &cfg, q, &ctrl()).unwrap();
            assert!((r3 - 6.0 * p.abs()).abs() < 1e-8 * r3, "q={q}: {r3} vs {}", 6.0 * p);
        }
    }

    #[test]
    fn coincident_points_repel() {
        let cfg = ChannelConfig::new(2, 2, 1.0).unwrap();
        for q in [0.0, 0.5, 1.0] {
            let r2 = correlation_fn(&[1.1, 1.1], &cfg, q, &ctrl()).unwrap();
            let r1 = level_density(1.1, &cfg, q, &ctrl()).unwrap();
            assert!(r2 >= 0.0 && r2 <= r1 * r1);
            assert!(r2 < 1e-6);
        }
    }

    #[test]
    fn order_bounds() {
        let cfg = ChannelConfig::new(2, 3, 1.0).unwrap();
        assert!(correlation_fn(&[], &cfg, 0.5, &ctrl()).is_err());
        assert!(correlation_fn(&[1.0, 2.0, 3.0], &cfg, 0.5, &ctrl()).is_err());
    }
}
