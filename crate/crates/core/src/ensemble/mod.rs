//! Eigenvalue statistics of `W = H†H` along the LOE→LUE crossover.
//!
//! Functions of a bare `x` (the antisymmetric function `G`, `ω`, the
//! skew-orthogonal system and the kernels) work in the scaled variable
//! `x = λ / (2Ω)`. Functions of `λ` (JPD, level density, correlations) take
//! physical eigenvalues and a [`ChannelConfig`] carrying `Ω`.

mod correlation;
mod density;
mod gfun;
mod jpd;
mod kernel;
mod skew;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fading::Crossover;
use crate::specfun::{lgamma, ln_weight, CompensatedSum, LaguerreSeq, LogSigned};

pub use correlation::correlation_fn;
pub use density::{density_curve, density_lue, density_mp, level_density, marginal_density, mp_edges, DensityCurve};
pub use gfun::{g_tau, g_tau_ordered, g_zero, omega_tau, SummationOrder};
pub use jpd::{jpd, jpd_normalization_log};
pub use kernel::{kernel_a, kernel_b, kernel_s};
pub use skew::{skew_phi, skew_psi};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub nt: usize,
    pub nr: usize,
    /// `min(nt, nr)`.
    pub n: usize,
    /// `max(nt, nr)`.
    pub m_dim: usize,
    /// `(|nt − nr| − 1) / 2`.
    pub a: f64,
    /// `n mod 2`.
    pub c: usize,
    pub omega: f64,
}

impl ChannelConfig {
    pub fn new(nt: usize, nr: usize, omega: f64) -> Result<Self> {
        if nt == 0 || nr == 0 {
            return Err(Error::domain("antenna counts must be positive"));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::domain(format!("omega must be positive and finite, got {omega}")));
        }
        let n = nt.min(nr);
        Ok(Self {
            nt,
            nr,
            n,
            m_dim: nt.max(nr),
            a: (nt.abs_diff(nr) as f64 - 1.0) / 2.0,
            c: n % 2,
            omega,
        })
    }

    /// Laguerre parameter `2a + 1 = |nt − nr|`.
    pub fn alpha(&self) -> f64 {
        2.0 * self.a + 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_terms: 20_000,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::domain(format!("rel_tol must lie in (0, 1), got {rel_tol}")));
        }
        if max_terms == 0 {
            return Err(Error::domain("max_terms must be positive"));
        }
        Ok(Self { rel_tol, max_terms })
    }
}

pub(crate) fn crossover_from_q(q: f64) -> Result<Crossover> {
    Crossover::from_q(q)
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if tau >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("tau must be >= 0, got {tau}")))
    }
}

pub(crate) fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("argument must be finite and >= 0, got {x}")))
    }
}

/// Running sum of an infinite series with the three-small-terms stopping rule.
///
/// A term is small when `|term| ≤ rel_tol · max |partial sum|`; measuring
/// against the largest partial sum seen keeps series whose value is near
/// zero from running to `max_terms`.
pub(crate) struct Series {
    ctrl: SeriesControl,
    tau: f64,
    sum: CompensatedSum,
    peak: f64,
    small_run: usize,
    terms: usize,
}

impl Series {
    pub(crate) fn new(ctrl: &SeriesControl, tau: f64) -> Self {
        Self {
            ctrl: *ctrl,
            tau,
            sum: CompensatedSum::new(),
            peak: 0.0,
            small_run: 0,
            terms: 0,
        }
    }

    /// Adds a term; `Ok(true)` once the series has converged.
    pub(crate) fn push(&mut self, term: f64) -> Result<bool> {
        if !term.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite series term at index {} (tau = {})",
                self.terms, self.tau
            )));
        }
        self.sum.add(term);
        self.terms += 1;
        self.peak = self.peak.max(self.sum.value().abs());
        if term.abs() <= self.ctrl.rel_tol * self.peak {
            self.small_run += 1;
        } else {
            self.small_run = 0;
        }
        if self.small_run >= 3 {
            return Ok(true);
        }
        if self.terms >= self.ctrl.max_terms {
            return Err(Error::Truncation {
                tau: self.tau,
                terms: self.terms,
            });
        }
        Ok(false)
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum.value()
    }
}

/// `exp(−k τ)` with `exp(−0 · ∞) = 1`.
pub(crate) fn decay_log(k: f64, tau: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        -k * tau
    }
}

/// The building blocks of the `G`/`ω` series at one point:
/// `Xe_μ(x) = w_{a+1}(x) e^{−2μτ} Γ(μ+½)/Γ(μ+a+3/2) L_{2μ}(2x)` and
/// `Xo_μ(x) = w_{a+1}(x) e^{−(2μ+1)τ} Γ(μ+1)/Γ(μ+a+2) L_{2μ+1}(2x)`,
/// yielded as pairs for `μ = 0, 1, …`.
pub(crate) struct Modes {
    lag: LaguerreSeq,
    ln_w: f64,
    a: f64,
    tau: f64,
    mu: usize,
}

impl Modes {
    pub(crate) fn new(x: f64, a: f64, tau: f64) -> Self {
        Self {
            lag: LaguerreSeq::new(2.0 * a + 1.0, 2.0 * x),
            ln_w: ln_weight(a + 1.0, x),
            a,
            tau,
            mu: 0,
        }
    }
}

fn collapse(l: LogSigned, ln_factor: f64) -> f64 {
    if l.is_zero() || ln_factor == f64::NEG_INFINITY {
        0.0
    } else {
        l.scale_log(ln_factor).value()
    }
}

impl Iterator for Modes {
    type Item = (f64, f64);

    fn next(&mut self) -> Option<(f64, f64)> {
        let le = self.lag.next()?;
        let lo = self.lag.next()?;
        let m = self.mu as f64;
        let a = self.a;
        let ln_e = self.ln_w + decay_log(2.0 * m, self.tau) + lgamma(m + 0.5) - lgamma(m + a + 1.5);
        let ln_o = self.ln_w + decay_log(2.0 * m + 1.0, self.tau) + lgamma(m + 1.0) - lgamma(m + a + 2.0);
        self.mu += 1;
        Some((collapse(le, ln_e), collapse(lo, ln_o)))
    }
}
