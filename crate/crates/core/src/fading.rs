//! Nakagami-q (Hoyt) signal model.
//!
//! A fading coefficient is `Z = X + jY` with independent zero-mean
//! Gaussians of variances `σ_X² ≥ σ_Y²`. The Hoyt parameter
//! `q = σ_Y/σ_X ∈ [0, 1]`, the power `Ω = σ_X² + σ_Y²` and the crossover
//! time `τ ≥ 0` with `e^{−τ} = (1 − q²)/(1 + q²)` are interchangeable
//! descriptions. `q = 0` (τ = 0) is one-sided Gaussian fading, `q = 1`
//! (τ = ∞) is Rayleigh.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::GaussianStream;
use crate::specfun::bessel_i0_scaled;

/// Position on the orthogonal → unitary crossover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Crossover {
    /// τ = 0, q = 0: real Gaussian channel entries.
    Orthogonal,
    /// 0 < τ < ∞.
    Interior { tau: f64 },
    /// τ = ∞, q = 1: circular complex Gaussian entries.
    Unitary,
}

impl Crossover {
    pub fn from_q(q: f64) -> Result<Self> {
        check_q(q)?;
        Ok(if q == 0.0 {
            Crossover::Orthogonal
        } else if q == 1.0 {
            Crossover::Unitary
        } else {
            Crossover::Interior { tau: tau_from_q(q) }
        })
    }

    pub fn from_tau(tau: f64) -> Result<Self> {
        if !(tau >= 0.0) {
            return Err(Error::domain(format!("tau must be >= 0, got {tau}")));
        }
        Ok(if tau == 0.0 {
            Crossover::Orthogonal
        } else if tau == f64::INFINITY {
            Crossover::Unitary
        } else {
            Crossover::Interior { tau }
        })
    }

    pub fn tau(&self) -> f64 {
        match *self {
            Crossover::Orthogonal => 0.0,
            Crossover::Interior { tau } => tau,
            Crossover::Unitary => f64::INFINITY,
        }
    }

    pub fn q(&self) -> f64 {
        q_from_tau(self.tau())
    }
}

fn check_q(q: f64) -> Result<()> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::domain(format!("q must lie in [0, 1], got {q}")))
    }
}

/// `τ = −ln((1 − q²)/(1 + q²))`, `+∞` at `q = 1`.
pub fn tau_from_q(q: f64) -> f64 {
    if q >= 1.0 {
        f64::INFINITY
    } else {
        let q2 = q * q;
        // ln((1+q²)/(1−q²)) = ln1p(q²) − ln1p(−q²)
        q2.ln_1p() - (-q2).ln_1p()
    }
}

/// Inverse of [`tau_from_q`]: `q² = (1 − e^{−τ})/(1 + e^{−τ}) = tanh(τ/2)`.
pub fn q_from_tau(tau: f64) -> f64 {
    if tau == f64::INFINITY {
        1.0
    } else {
        (0.5 * tau).tanh().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingParams {
    pub q: f64,
    pub omega: f64,
    /// `+∞` for Rayleigh fading.
    pub tau: f64,
    pub sigma_x2: f64,
    pub sigma_y2: f64,
}

impl FadingParams {
    pub fn crossover(&self) -> Crossover {
        Crossover::from_tau(self.tau).expect("tau validated at construction")
    }

    pub fn sigma_x(&self) -> f64 {
        self.sigma_x2.sqrt()
    }

    pub fn sigma_y(&self) -> f64 {
        self.sigma_y2.sqrt()
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("omega must be positive and finite, got {omega}")))
    }
}

pub fn params_from_q(q: f64, omega: f64) -> Result<FadingParams> {
    check_q(q)?;
    check_omega(omega)?;
    let q2 = q * q;
    let e = (1.0 - q2) / (1.0 + q2);
    Ok(FadingParams {
        q,
        omega,
        tau: tau_from_q(q),
        sigma_x2: 0.5 * (1.0 + e) * omega,
        sigma_y2: 0.5 * (1.0 - e) * omega,
    })
}

pub fn params_from_tau(tau: f64, omega: f64) -> Result<FadingParams> {
    Crossover::from_tau(tau)?;
    check_omega(omega)?;
    let e = (-tau).exp();
    Ok(FadingParams {
        q: q_from_tau(tau),
        omega,
        tau,
        sigma_x2: 0.5 * (1.0 + e) * omega,
        sigma_y2: 0.5 * (1.0 - e) * omega,
    })
}

/// Builds parameters from the two standard deviations, reordering so that
/// `σ_X ≥ σ_Y`.
pub fn params_from_sigmas(sigma_x: f64, sigma_y: f64) -> Result<FadingParams> {
    if !(sigma_x >= 0.0 && sigma_y >= 0.0) {
        return Err(Error::domain("standard deviations must be nonnegative"));
    }
    if sigma_x == 0.0 && sigma_y == 0.0 {
        return Err(Error::domain("at least one standard deviation must be positive"));
    }
    let (big, small) = if sigma_x >= sigma_y {
        (sigma_x, sigma_y)
    } else {
        (sigma_y, sigma_x)
    };
    let q = small / big;
    let sigma_x2 = big * big;
    let sigma_y2 = small * small;
    Ok(FadingParams {
        q,
        omega: sigma_x2 + sigma_y2,
        tau: tau_from_q(q),
        sigma_x2,
        sigma_y2,
    })
}

/// Density of the envelope `R = |Z|`.
///
/// At `q = 0` the Hoyt form is singular; the limiting one-sided Gaussian
/// density of `|X|`, `X ~ N(0, Ω)`, is returned instead.
pub fn envelope_pdf(r: f64, p: &FadingParams) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::domain(format!("envelope must be >= 0, got {r}")));
    }
    let (q, omega) = (p.q, p.omega);
    if q == 0.0 {
        return Ok((2.0 / (PI * omega)).sqrt() * (-r * r / (2.0 * omega)).exp());
    }
    let q2 = q * q;
    let r2 = r * r;
    // exp(−A r²) I₀(B r²) = exp(−(A − B) r²) · [e^{−B r²} I₀(B r²)],
    // with A − B = (1 + q²)/(2Ω).
    let b = (1.0 - q2 * q2) / (4.0 * q2 * omega);
    let decay = (1.0 + q2) / (2.0 * omega);
    Ok((1.0 + q2) * r / (q * omega) * (-decay * r2).exp() * bessel_i0_scaled(b * r2))
}

/// Density of the phase `θ = arg Z`, periodic with period π.
pub fn phase_pdf(theta: f64, p: &FadingParams) -> Result<f64> {
    if p.sigma_y2 == 0.0 || p.sigma_x2 == 0.0 {
        return Err(Error::domain(
            "phase density is degenerate when a standard deviation is zero",
        ));
    }
    let (s, c) = theta.sin_cos();
    Ok(p.sigma_x() * p.sigma_y() / (2.0 * PI * (p.sigma_x2 * s * s + p.sigma_y2 * c * c)))
}

/// Draws `X + jY`; the real part is drawn first.
pub fn sample_signal(p: &FadingParams, rng: &mut GaussianStream) -> Complex64 {
    let x = rng.next_normal(p.sigma_x());
    let y = rng.next_normal(p.sigma_y());
    Complex64::new(x, y)
}
