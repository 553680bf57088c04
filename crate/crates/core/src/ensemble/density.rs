use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{crossover_from_q, ChannelConfig, Series, SeriesControl};
use crate::error::{Error, Result};
use crate::fading::Crossover;
use crate::specfun::{laguerre, lgamma, ln_weight, upper_incomplete_gamma_seq, CompensatedSum, LaguerreSeq};

const LN_2: f64 = std::f64::consts::LN_2;

/// Level density sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub lambda_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub config: ChannelConfig,
    pub q: f64,
}

impl DensityCurve {
    /// Trapezoid-rule integral over the grid.
    pub fn trapezoid(&self) -> f64 {
        self.lambda_grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(l, v)| 0.5 * (l[1] - l[0]) * (v[0] + v[1]))
            .sum()
    }

    /// The marginal density `R₁ / N`.
    pub fn marginal(&self) -> Vec<f64> {
        let n = self.config.n as f64;
        self.values.iter().map(|v| v / n).collect()
    }
}

fn check_lambda(lam: f64) -> Result<()> {
    if lam >= 0.0 && lam.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("lambda must be finite and >= 0, got {lam}")))
    }
}

/// Level density `R₁(λ; Ω; τ)` for `q ∈ [0, 1]`.
///
/// `q = 1` and `q = 0` use the closed LUE and LOE forms; interior values
/// sum the correction series, which converges like `e^{−2ντ}`.
pub fn level_density(lam: f64, cfg: &ChannelConfig, q: f64, ctrl: &SeriesControl) -> Result<f64> {
    check_lambda(lam)?;
    match crossover_from_q(q)? {
        Crossover::Unitary => density_lue(lam, cfg),
        Crossover::Orthogonal => density_loe(lam, cfg),
        Crossover::Interior { tau } => density_series(lam, cfg, tau, ctrl),
    }
}

pub fn marginal_density(lam: f64, cfg: &ChannelConfig, q: f64, ctrl: &SeriesControl) -> Result<f64> {
    Ok(level_density(lam, cfg, q, ctrl)? / cfg.n as f64)
}

/// Rayleigh (`q = 1`) level density:
/// `(1/Ω) w_{2a+1}(t) Σ_{μ<N} Γ(μ+1)/Γ(μ+2a+2) L_μ(t)²` with `t = λ/Ω`.
pub fn density_lue(lam: f64, cfg: &ChannelConfig) -> Result<f64> {
    check_lambda(lam)?;
    let alpha = cfg.alpha();
    let t = lam / cfg.omega;
    let ln_w = ln_weight(alpha, t) - cfg.omega.ln();
    if ln_w == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let s: CompensatedSum = LaguerreSeq::new(alpha, t)
        .take(cfg.n)
        .enumerate()
        .map(|(mu, l)| {
            let m = mu as f64;
            (l * l)
                .scale_log(ln_w + lgamma(m + 1.0) - lgamma(m + alpha + 1.0))
                .value()
        })
        .collect();
    Ok(s.value())
}

/// One-sided Gaussian (`q = 0`) level density, a finite sum with upper
/// incomplete gamma functions.
fn density_loe(lam: f64, cfg: &ChannelConfig) -> Result<f64> {
    let (n, a, c) = (cfg.n, cfg.a, cfg.c);
    let alpha = cfg.alpha();
    let nf = n as f64;
    let x = lam / (2.0 * cfg.omega);
    let base = density_lue(lam, cfg)?;
    let l_last = laguerre(n - 1, alpha, 2.0 * x)?;
    let gammas = upper_incomplete_gamma_seq(a + 1.0, x, n + 1)?;
    let ln_chi0 = alpha * LN_2 + (nf + alpha).ln() + lgamma(nf + 1.0);
    let mut s = CompensatedSum::new();
    for (mu, g) in gammas.iter().enumerate() {
        let m = mu as f64;
        let ln_chi = ln_chi0 + m * LN_2 - lgamma(m + 1.0) - lgamma(m + alpha + 1.0) - lgamma(nf - m + 1.0);
        let sign = if mu % 2 == 0 { 1.0 } else { -1.0 };
        s.add(sign * ln_chi.exp() * g);
    }
    if c == 1 {
        s.add((lgamma((nf + 1.0) / 2.0) - lgamma((nf + alpha) / 2.0)).exp());
    } else {
        let ln_eta = 2.0 * a * LN_2 + lgamma(nf + 1.0) + lgamma((nf + 2.0 * a + 2.0) / 2.0)
            - lgamma(nf + alpha)
            - lgamma((nf + 2.0) / 2.0);
        s.add(-ln_eta.exp());
    }
    let bracket = l_last * s.value();
    let ln_pre = ln_weight(a, x) - (2.0 * cfg.omega).ln();
    if ln_pre == f64::INFINITY {
        // w_a(0) = +∞ for square arrays.
        return Ok(if bracket > 0.0 { f64::INFINITY } else { base });
    }
    Ok(base + ln_pre.exp() * bracket)
}

/// Interior `0 < τ < ∞` level density.
fn density_series(lam: f64, cfg: &ChannelConfig, tau: f64, ctrl: &SeriesControl) -> Result<f64> {
    let (n, a, c) = (cfg.n, cfg.a, cfg.c);
    let alpha = cfg.alpha();
    let (nf, cf) = (n as f64, c as f64);
    let t = lam / cfg.omega;
    let base = density_lue(lam, cfg)?;
    let ln_w = ln_weight(alpha, t);
    if ln_w == f64::NEG_INFINITY {
        return Ok(base);
    }
    let mut seq = LaguerreSeq::new(alpha, t);
    let l_last = seq.nth(n - 1).expect("sequence is infinite");
    if l_last.is_zero() {
        return Ok(base);
    }
    let ln_const = ln_w - cfg.omega.ln() - alpha * LN_2 + lgamma((nf + 1.0) / 2.0) - lgamma((nf + alpha) / 2.0);
    let mut series = Series::new(ctrl, tau);
    // the next value is L_N; orders N+1, N+3, … follow
    for (nu, l) in ((n + c) / 2..).zip(seq.skip(1).step_by(2)) {
        let v = nu as f64;
        let ln_co = -(2.0 * v + 2.0 - nf - cf) * tau + lgamma(v + 1.0 - cf / 2.0) - lgamma(v + a + 2.0 - cf / 2.0);
        if series.push((l_last * l).scale_log(ln_const + ln_co).value())? {
            break;
        }
    }
    Ok(base + series.value())
}

/// Support `[λ_min, λ_max] = [MΩ(1 − √(N/M))², MΩ(1 + √(N/M))²]`.
pub fn mp_edges(cfg: &ChannelConfig) -> (f64, f64) {
    let m = cfg.m_dim as f64;
    let r = (cfg.n as f64 / m).sqrt();
    (m * cfg.omega * (1.0 - r).powi(2), m * cfg.omega * (1.0 + r).powi(2))
}

/// Marčenko–Pastur level density (large-`N` limit); integrates to `N`.
pub fn density_mp(lam: f64, cfg: &ChannelConfig) -> f64 {
    let (lo, hi) = mp_edges(cfg);
    if !(lam >= lo && lam <= hi) {
        return 0.0;
    }
    if lam == 0.0 {
        return f64::INFINITY;
    }
    ((hi - lam) * (lam - lo)).max(0.0).sqrt() / (2.0 * std::f64::consts::PI * cfg.omega * lam)
}

/// Level density on an ascending grid, evaluated in parallel. The value at
/// `λ = 0` is `+∞` for square arrays at `q = 0`.
pub fn density_curve(grid: &[f64], cfg: &ChannelConfig, q: f64, ctrl: &SeriesControl) -> Result<DensityCurve> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("lambda grid must be strictly ascending"));
    }
    let values = grid
        .par_iter()
        .map(|&lam| {
            let v = level_density(lam, cfg, q, ctrl)?;
            if v.is_nan() {
                Err(Error::Numerical(format!("level density is NaN at lambda = {lam}")))
            } else {
                Ok(v)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(DensityCurve {
        lambda_grid: grid.to_vec(),
        values,
        config: *cfg,
        q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::kernel::kernel_s;
    use crate::quad::{integrate, QuadOptions};

    fn ctrl() -> SeriesControl {
        SeriesControl::default()
    }

    fn total(cfg: &ChannelConfig, q: f64) -> f64 {
        // λ = u² tames the λ^{−1/2} edge of square LOE-like densities.
        let hi = (8.0 * mp_edges(cfg).1 + 40.0 * cfg.omega).sqrt();
        integrate(
            |u| 2.0 * u * level_density(u * u, cfg, q, &ctrl()).unwrap(),
            0.0,
            hi,
            QuadOptions::with_tolerances(1e-11, 1e-11),
        )
        .unwrap()
        .value
    }

    #[test]
    fn normalization() {
        for &(nt, nr, q) in &[
            (2, 2, 1.0),
            (3, 6, 0.5),
            (4, 15, 0.0),
            (2, 2, 0.0),
            (3, 3, 0.3),
            (5, 2, 0.8),
        ] {
            let cfg = ChannelConfig::new(nt, nr, 1.0).unwrap();
            let v = total(&cfg, q);
            assert!((v - cfg.n as f64).abs() < 1e-6, "({nt},{nr},{q}) -> {v}");
        }
    }

    #[test]
    fn single_antenna_rayleigh_is_exponential() {
        let cfg = ChannelConfig::new(1, 1, 1.0).unwrap();
        for lam in [0.0, 0.3, 2.0, 7.5] {
            let v = level_density(lam, &cfg, 1.0, &ctrl()).unwrap();
            assert!((v - (-lam).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn single_antenna_one_sided_gaussian_is_chi_square() {
        // |h|² with h ~ N(0, Ω): density e^{−λ/2Ω} / √(2πΩλ).
        let cfg = ChannelConfig::new(1, 1, 1.0).unwrap();
        for lam in [0.1, 1.0, 4.0] {
            let v = level_density(lam, &cfg, 0.0, &ctrl()).unwrap();
            let expect = (-lam / 2.0).exp() / (2.0 * std::f64::consts::PI * lam).sqrt();
            assert!((v - expect).abs() < 1e-13, "{v} {expect}");
        }
    }

    #[test]
    fn interior_matches_kernel_diagonal() {
        for (nt, nr) in [(2, 2), (3, 6), (5, 3)] {
            let cfg = ChannelConfig::new(nt, nr, 1.7).unwrap();
            let tau = crate::fading::tau_from_q(0.5);
            for lam in [0.2, 1.5, 6.0] {
                let x = lam / (2.0 * cfg.omega);
                let k = kernel_s(x, x, &cfg, tau, &ctrl()).unwrap() / (2.0 * cfg.omega);
                let d = level_density(lam, &cfg, 0.5, &ctrl()).unwrap();
                assert!((k - d).abs() < 1e-12 * d, "{k} {d}");
            }
        }
    }

    #[test]
    fn orthogonal_closed_form_matches_zero_tau_kernel() {
        for (nt, nr) in [(2, 2), (3, 4), (4, 6), (3, 3)] {
            let cfg = ChannelConfig::new(nt, nr, 1.0).unwrap();
            for lam in [0.3, 1.0, 4.0, 9.0] {
                let x = lam / 2.0;
                let k = kernel_s(x, x, &cfg, 0.0, &ctrl()).unwrap() / 2.0;
                let d = level_density(lam, &cfg, 0.0, &ctrl()).unwrap();
                assert!((k - d).abs() < 1e-10 * d, "({nt},{nr}) {lam}: {k} {d}");
            }
        }
    }

    #[test]
    fn square_orthogonal_is_unbounded_at_origin() {
        let cfg = ChannelConfig::new(2, 2, 1.0).unwrap();
        assert_eq!(level_density(0.0, &cfg, 0.0, &ctrl()).unwrap(), f64::INFINITY);
        assert!(level_density(0.0, &cfg, 0.5, &ctrl()).unwrap().is_finite());
    }

    #[test]
    fn mp_edges_and_mass() {
        let cfg = ChannelConfig::new(4, 4, 1.0).unwrap();
        assert_eq!(mp_edges(&cfg), (0.0, 16.0));
        assert_eq!(density_mp(17.0, &cfg), 0.0);
        let cfg = ChannelConfig::new(3, 12, 2.0).unwrap();
        let (lo, hi) = mp_edges(&cfg);
        // λ = lo + (hi − lo) sin²θ removes both square-root edges
        let mass = integrate(
            |th: f64| {
                let lam = lo + (hi - lo) * th.sin().powi(2);
                density_mp(lam, &cfg) * (hi - lo) * (2.0 * th).sin()
            },
            0.0,
            std::f64::consts::FRAC_PI_2,
            QuadOptions::default(),
        )
        .unwrap()
        .value;
        assert!((mass - 3.0).abs() < 1e-6, "{mass}");
    }

    #[test]
    fn curve_rejects_unsorted_grid() {
        let cfg = ChannelConfig::new(2, 3, 1.0).unwrap();
        assert!(density_curve(&[1.0, 0.5], &cfg, 0.5, &ctrl()).is_err());
        let c = density_curve(&[0.5, 1.0, 1.5], &cfg, 0.5, &ctrl()).unwrap();
        assert_eq!(c.values.len(), 3);
        assert!(c.marginal()[0] * 2.0 - c.values[0] < 1e-15);
    }
}
