use super::gfun::{g_tau, omega_tau};
use super::{crossover_from_q, ChannelConfig, SeriesControl};
use crate::error::{Error, Result};
use crate::fading::Crossover;
use crate::linalg::{pfaffian, AntisymmetricMatrix};
use crate::specfun::{lgamma, ln_weight};

const LN_2: f64 = std::f64::consts::LN_2;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// `ln C_N⁽⁰⁾`.
pub(crate) fn ln_c_orthogonal(n: usize, a: f64) -> f64 {
    let nf = n as f64;
    let mut s = 0.5 * nf * LN_PI - nf * LN_2;
    for k in 1..=n {
        let h = k as f64 / 2.0;
        s -= lgamma(h + 1.0) + lgamma(h + a + 0.5);
    }
    s
}

/// `ln C_N⁽∞⁾`.
pub(crate) fn ln_c_unitary(n: usize, a: f64) -> f64 {
    (1..=n)
        .map(|k| {
            let k = k as f64;
            -(lgamma(k + 1.0) + lgamma(k + 2.0 * a + 1.0))
        })
        .sum()
}

/// `(sign, ln |Δ_N(λ)|)` with `Δ_N = Π_{j<k} (λ_j − λ_k)`.
fn vandermonde(lams: &[f64]) -> (f64, f64) {
    let mut sign = 1.0;
    let mut ln = 0.0;
    for j in 0..lams.len() {
        for k in j + 1..lams.len() {
            let d = lams[j] - lams[k];
            if d == 0.0 {
                return (0.0, f64::NEG_INFINITY);
            }
            if d < 0.0 {
                sign = -sign;
            }
            ln += d.abs().ln();
        }
    }
    (sign, ln)
}

fn assemble(sign: f64, ln_parts: &[f64]) -> f64 {
    if sign == 0.0 {
        return 0.0;
    }
    sign * ln_parts.iter().sum::<f64>().exp()
}

/// Joint density `P(λ_1, …, λ_N; Ω; τ)` of the unordered eigenvalues.
///
/// Returned with its sign: for odd `N` a permutation of the arguments can
/// flip it, and the value is nonnegative on eigenvalues sorted in
/// decreasing order.
pub fn jpd(lams: &[f64], cfg: &ChannelConfig, q: f64, ctrl: &SeriesControl) -> Result<f64> {
    let n = cfg.n;
    if lams.len() != n {
        return Err(Error::dimension(format!(
            "jpd needs {n} eigenvalues, got {}",
            lams.len()
        )));
    }
    if lams.iter().any(|&l| !(l >= 0.0 && l.is_finite())) {
        return Err(Error::domain("eigenvalues must be finite and >= 0"));
    }
    let (a, omega) = (cfg.a, cfg.omega);
    let nf = n as f64;
    let (dsign, ln_delta) = vandermonde(lams);
    if dsign == 0.0 {
        return Ok(0.0);
    }
    match crossover_from_q(q)? {
        Crossover::Unitary => {
            let alpha = cfg.alpha();
            let ln_w: f64 = lams.iter().map(|&l| ln_weight(alpha, l / omega)).sum();
            Ok(assemble(
                1.0,
                &[-nf * nf * omega.ln(), ln_c_unitary(n, a), 2.0 * ln_delta, ln_w],
            ))
        }
        Crossover::Orthogonal => {
            let ln_w: f64 = lams.iter().map(|&l| ln_weight(a, l / (2.0 * omega))).sum();
            Ok(assemble(
                1.0,
                &[
                    -0.5 * nf * (nf + 1.0) * (2.0 * omega).ln(),
                    ln_c_orthogonal(n, a),
                    ln_delta,
                    ln_w,
                ],
            ))
        }
        Crossover::Interior { tau } => {
            let xs: Vec<f64> = lams.iter().map(|&l| l / (2.0 * omega)).collect();
            let dim = n + n % 2;
            // G carries an overall e^{−τ}; lifting the G block by e^{τ} keeps
            // the Pfaffian entries of order one at large τ.
            let lift = tau.exp();
            let mut f = AntisymmetricMatrix::zeros(dim);
            for j in 0..n {
                for k in j + 1..n {
                    f.set(j, k, lift * g_tau(xs[j], xs[k], a, tau, ctrl)?);
                }
                if n % 2 == 1 {
                    f.set(j, n, omega_tau(xs[j], a, tau, ctrl)?);
                }
            }
            let pf = pfaffian(&f)?;
            if pf == 0.0 {
                return Ok(0.0);
            }
            let m = dim / 2;
            let ln_w: f64 = xs.iter().map(|&x| ln_weight(a, x)).sum();
            Ok(assemble(
                dsign * pf.signum(),
                &[
                    m as f64 * LN_2,
                    0.5 * nf * (nf - 1.0) * tau - (n / 2) as f64 * tau,
                    -0.5 * nf * (nf + 1.0) * (2.0 * omega).ln(),
                    ln_c_orthogonal(n, a),
                    ln_delta,
                    pf.abs().ln(),
                    ln_w,
                ],
            ))
        }
    }
}

/// `ln` of the constant `2^m e^{N(N−1)τ/2} (2Ω)^{−N(N+1)/2} C_N⁽⁰⁾`.
pub fn jpd_normalization_log(cfg: &ChannelConfig, tau: f64) -> f64 {
    let nf = cfg.n as f64;
    let m = cfg.n.div_ceil(2) as f64;
    m * LN_2 + 0.5 * nf * (nf - 1.0) * tau - 0.5 * nf * (nf + 1.0) * (2.0 * cfg.omega).ln()
        + ln_c_orthogonal(cfg.n, cfg.a)
}

// Keeps the τ = 0 Pfaffian route available for cross-checks in tests.
#[cfg(test)]
pub(crate) fn jpd_pfaffian_at_zero_tau(lams: &[f64], cfg: &ChannelConfig) -> Result<f64> {
    let n = cfg.n;
    let xs: Vec<f64> = lams.iter().map(|&l| l / (2.0 * cfg.omega)).collect();
    let dim = n + n % 2;
    let mut f = AntisymmetricMatrix::zeros(dim);
    for j in 0..n {
        for k in j + 1..n {
            f.set(j, k, super::gfun::g_zero(xs[j], xs[k]));
        }
        if n % 2 == 1 {
            f.set(j, n, 0.5);
        }
    }
    let (dsign, ln_delta) = vandermonde(lams);
    let pf = pfaffian(&f)?;
    let ln_w: f64 = xs.iter().map(|&x| ln_weight(cfg.a, x)).sum();
    Ok(dsign * pf * (jpd_normalization_log(cfg, 0.0) + ln_delta + ln_w).exp())
}
