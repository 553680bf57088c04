//! Two-point kernels `S`, `A`, `B` of the self-dual quaternion matrix whose
//! quaternion determinant gives the correlation functions.

use super::gfun::{g_series, g_zero, omega_tau};
use super::skew::{skew_phi, skew_psi};
use super::{check_tau, check_x, ChannelConfig, Series, SeriesControl};
use crate::error::{Error, Result};
use crate::specfun::{lgamma, ln_weight, CompensatedSum, LaguerreSeq, LogSigned};

const LN_2: f64 = std::f64::consts::LN_2;

fn check_pair(x: f64, y: f64, tau: f64) -> Result<()> {
    check_x(x)?;
    check_x(y)?;
    check_tau(tau)
}

fn finite(v: f64, what: &str, tau: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical(format!(
            "kernel {what} is not representable at tau = {tau}; the growing e^(k tau) factors overflow"
        )))
    }
}

/// `S_N⁽τ⁾(x, y)`.
///
/// For `τ > 0` this is the closed form: a finite Christoffel–Darboux-type
/// sum plus a correction series that vanishes as `τ → ∞`. At `τ = 0` the
/// defining sum over skew-orthogonal functions is used.
pub fn kernel_s(x: f64, y: f64, cfg: &ChannelConfig, tau: f64, ctrl: &SeriesControl) -> Result<f64> {
    check_pair(x, y, tau)?;
    if tau == 0.0 {
        return kernel_s_definition(x, y, cfg, tau, ctrl);
    }
    let (n, a, c) = (cfg.n, cfg.a, cfg.c);
    let alpha = cfg.alpha();
    let nf = n as f64;
    let ln_wx = ln_weight(a, x);
    let ln_wy = ln_weight(a + 1.0, y);
    if ln_wy == f64::NEG_INFINITY || ln_wx == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    // With w_a(x) = +∞ at the origin only the sign of the bracket survives.
    let singular = ln_wx == f64::INFINITY;
    let ln_front = (2.0 * a + 2.0) * LN_2 + if singular { 0.0 } else { ln_wx + ln_wy };

    let lx: Vec<LogSigned> = LaguerreSeq::new(alpha, 2.0 * x).take(n).collect();
    let mut ly = LaguerreSeq::new(alpha, 2.0 * y);
    let mut bracket = CompensatedSum::new();
    for (mu, lxm) in lx.iter().enumerate() {
        let lym = ly.next().expect("sequence is infinite");
        let m = mu as f64;
        let ln_alpha_sq = lgamma(m + alpha + 1.0) - lgamma(m + 1.0);
        bracket.add((*lxm * lym).scale_log(ln_front - ln_alpha_sq).value());
    }

    let l_last = lx[n - 1];
    if !l_last.is_zero() {
        let cf = c as f64;
        let ln_const = ln_front - alpha * LN_2 + lgamma((nf + 1.0) / 2.0) - lgamma((nf + alpha) / 2.0);
        let mut series = Series::new(ctrl, tau);
        // orders 2ν + 1 − c for ν ≥ (N + c)/2 are N+1, N+3, …
        for (nu, l) in ((n + c) / 2..).zip(ly.skip(1).step_by(2)) {
            let v = nu as f64;
            let ln_co = -(2.0 * v + 2.0 - nf - cf) * tau + lgamma(v + 1.0 - cf / 2.0) - lgamma(v + a + 2.0 - cf / 2.0);
            let term = (l_last * l).scale_log(ln_const + ln_co).value();
            if series.push(term)? {
                break;
            }
        }
        bracket.add(series.value());
    }
    let v = bracket.value();
    if singular {
        return Ok(if v == 0.0 { 0.0 } else { v.signum() * f64::INFINITY });
    }
    Ok(v)
}

/// `Σ_μ [φ_{2μ}(x) ψ_{2μ+1}(y) − φ_{2μ+1}(x) ψ_{2μ}(y)] + c φ_{N−1}(x) ω(y)`.
pub(crate) fn kernel_s_definition(x: f64, y: f64, cfg: &ChannelConfig, tau: f64, ctrl: &SeriesControl) -> Result<f64> {
    let (n, c) = (cfg.n, cfg.c);
    let mut s = CompensatedSum::new();
    for mu in 0..(n - c) / 2 {
        let j = 2 * mu;
        s.add(skew_phi(j, x, cfg, tau)? * skew_psi(j + 1, y, cfg, tau, ctrl)?);
        s.add(-skew_phi(j + 1, x, cfg, tau)? * skew_psi(j, y, cfg, tau, ctrl)?);
    }
    if c == 1 {
        s.add(skew_phi(n - 1, x, cfg, tau)? * omega_tau(y, cfg.a, tau, ctrl)?);
    }
    Ok(s.value())
}

/// `A_N⁽τ⁾(x, y) = Σ_μ [φ_{2μ+1}(x) φ_{2μ}(y) − φ_{2μ}(x) φ_{2μ+1}(y)]`.
pub fn kernel_a(x: f64, y: f64, cfg: &ChannelConfig, tau: f64) -> Result<f64> {
    check_pair(x, y, tau)?;
    let (n, c) = (cfg.n, cfg.c);
    let mut s = CompensatedSum::new();
    for mu in 0..(n - c) / 2 {
        let j = 2 * mu;
        let (ex, ox) = (skew_phi(j, x, cfg, tau)?, skew_phi(j + 1, x, cfg, tau)?);
        let (ey, oy) = (skew_phi(j, y, cfg, tau)?, skew_phi(j + 1, y, cfg, tau)?);
        s.add(ox * ey);
        s.add(-ex * oy);
    }
    finite(s.value(), "A", tau)
}

/// `B_N⁽τ⁾(x, y)`.
///
/// For `τ > 0` the dual-function tail `Σ_{μ ≥ (N−c)/2}` is summed directly
/// as a restricted `G` series. Writing it as a finite part minus `G`
/// cancels catastrophically once `τ` is large.
pub fn kernel_b(x: f64, y: f64, cfg: &ChannelConfig, tau: f64, ctrl: &SeriesControl) -> Result<f64> {
    check_pair(x, y, tau)?;
    let (n, a, c) = (cfg.n, cfg.a, cfg.c);
    if tau == 0.0 {
        return finite(kernel_b_finite_part(x, y, cfg, tau, ctrl)? - g_zero(x, y), "B", tau);
    }
    let m0 = (n - c) / 2;
    let tail = if c == 0 {
        g_series(x, y, a, tau, ctrl, m0, m0)?
    } else {
        g_series(x, y, a, tau, ctrl, 0, m0)?
    };
    let mut b = -tail;
    if c == 1 {
        b += unpaired_term(x, y, cfg, tau, ctrl)?;
    }
    finite(b, "B", tau)
}

fn unpaired_term(x: f64, y: f64, cfg: &ChannelConfig, tau: f64, ctrl: &SeriesControl) -> Result<f64> {
    let j = cfg.n - 1;
    let (px, py) = (skew_psi(j, x, cfg, tau, ctrl)?, skew_psi(j, y, cfg, tau, ctrl)?);
    let (wx, wy) = (omega_tau(x, cfg.a, tau, ctrl)?, omega_tau(y, cfg.a, tau, ctrl)?);
    Ok(px * wy - py * wx)
}

/// `Σ_μ [ψ_{2μ}(x) ψ_{2μ+1}(y) − ψ_{2μ+1}(x) ψ_{2μ}(y)] + c [ψ_{N−1}(x) ω(y) − ψ_{N−1}(y) ω(x)]`,
/// which equals `B + G`.
pub(crate) fn kernel_b_finite_part(x: f64, y: f64, cfg: &ChannelConfig, tau: f64, ctrl: &SeriesControl) -> Result<f64> {
    let (n, c) = (cfg.n, cfg.c);
    let mut s = CompensatedSum::new();
    for mu in 0..(n - c) / 2 {
        let j = 2 * mu;
        let (ex, ox) = (skew_psi(j, x, cfg, tau, ctrl)?, skew_psi(j + 1, x, cfg, tau, ctrl)?);
        let (ey, oy) = (skew_psi(j, y, cfg, tau, ctrl)?, skew_psi(j + 1, y, cfg, tau, ctrl)?);
        s.add(ex * oy);
        s.add(-ox * ey);
    }
    if c == 1 {
        s.add(unpaired_term(x, y, cfg, tau, ctrl)?);
    }
    Ok(s.value())
}
