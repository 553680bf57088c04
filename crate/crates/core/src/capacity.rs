//! Ergodic Shannon capacity `𝒞 = ∫ log₂(1 + (P/N_t) λ) R₁(λ) dλ`.
//!
//! Power is linear at this layer. Decibel values follow
//! `power_db = 10 log₁₀ P`; see [`db_to_linear`].

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{density_mp, level_density, mp_edges, ChannelConfig, SeriesControl};
use crate::error::{Error, Result};
use crate::fading::Crossover;
use crate::quad::{integrate, try_integrate, QuadOptions};

/// Absolute size below which an added tail panel ends the integration.
const TAIL_TOL: f64 = 1e-9;
const MAX_TAIL_PANELS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    /// Bits per second per hertz.
    pub capacity: f64,
    pub est_abs_error: f64,
    pub config: ChannelConfig,
    pub q: f64,
    pub power_db: f64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(p: f64) -> f64 {
    10.0 * p.log10()
}

fn check_power(power: f64) -> Result<()> {
    if power > 0.0 && power.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("power must be finite and > 0, got {power}")))
    }
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

type Integrand<'a> = dyn Fn(f64) -> Result<f64> + 'a;

/// Integrates `f` over `[lo, hi]`, switching to `λ = u²` when `sqrt_map` is
/// set so that a `λ^{-1/2}` origin singularity becomes bounded.
fn panel(f: &Integrand, lo: f64, hi: f64, sqrt_map: bool, opts: QuadOptions) -> Result<(f64, f64)> {
    let e = if sqrt_map {
        try_integrate(
            |u| {
                let lam = u * u;
                if lam == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(2.0 * u * f(lam)?)
                }
            },
            lo.sqrt(),
            hi.sqrt(),
            opts,
        )?
    } else {
        try_integrate(f, lo, hi, opts)?
    };
    Ok((e.value, e.abs_error))
}

/// `∫₀^∞ g(λ) dλ` for a nonnegative integrand concentrated below `λ_max`:
/// one panel on `[0, 1.5 λ_max]`, then panels of width `λ_max / 2` until
/// one contributes less than the tail tolerance.
fn integrate_spectrum(f: &Integrand, cfg: &ChannelConfig, opts: QuadOptions) -> Result<(f64, f64)> {
    let sqrt_map = cfg.a < 0.0;
    let lmax = mp_edges(cfg).1;
    let mut hi = 1.5 * lmax;
    let (mut value, mut err) = panel(f, 0.0, hi, sqrt_map, opts)?;
    for _ in 0..MAX_TAIL_PANELS {
        let lo = hi;
        hi += 0.5 * lmax;
        let (v, e) = panel(f, lo, hi, false, opts)?;
        value += v;
        err += e;
        if v.abs() < TAIL_TOL {
            return Ok((value, err));
        }
    }
    Err(Error::Quadrature(format!(
        "tail of the capacity integral still above {TAIL_TOL:e} at lambda = {hi}"
    )))
}

/// Ergodic capacity at linear power `power` from the exact level density.
pub fn ergodic_capacity(cfg: &ChannelConfig, q: f64, power: f64, ctrl: &SeriesControl) -> Result<CapacityResult> {
    check_power(power)?;
    Crossover::from_q(q)?;
    let snr = power / cfg.nt as f64;
    let integrand = |lam: f64| Ok(log2_1p(snr * lam) * level_density(lam, cfg, q, ctrl)?);
    let (capacity, est_abs_error) = integrate_spectrum(&integrand, cfg, QuadOptions::default())?;
    Ok(CapacityResult {
        capacity: capacity.max(0.0),
        est_abs_error,
        config: *cfg,
        q,
        power_db: linear_to_db(power),
    })
}

/// Capacity from the Marčenko–Pastur density, the large-array limit.
pub fn mp_capacity(cfg: &ChannelConfig, power: f64) -> Result<f64> {
    check_power(power)?;
    let snr = power / cfg.nt as f64;
    let (lo, hi) = mp_edges(cfg);
    // λ = lo + (hi − lo) sin²θ removes the square-root edges and, for square
    // arrays, the λ^{-1/2} pole at the origin.
    let width = hi - lo;
    let e = integrate(
        |theta: f64| {
            let (s, c) = theta.sin_cos();
            let lam = lo + width * s * s;
            if lam <= 0.0 {
                return 0.0;
            }
            log2_1p(snr * lam) * density_mp(lam, cfg) * 2.0 * width * s * c
        },
        0.0,
        std::f64::consts::FRAC_PI_2,
        QuadOptions::default(),
    )?;
    Ok(e.value)
}

/// `1 − 𝒞(q = 0) / 𝒞(q = 1)`.
pub fn degradation(cfg: &ChannelConfig, power: f64, ctrl: &SeriesControl) -> Result<f64> {
    let (c0, c1) = rayon::join(
        || ergodic_capacity(cfg, 0.0, power, ctrl),
        || ergodic_capacity(cfg, 1.0, power, ctrl),
    );
    Ok(1.0 - c0?.capacity / c1?.capacity)
}

/// Capacity on the Cartesian product of `q_values` and `power_db_values`,
/// rows ordered with `q` outer and power inner.
pub fn capacity_sweep(
    cfg: &ChannelConfig,
    q_values: &[f64],
    power_db_values: &[f64],
    ctrl: &SeriesControl,
) -> Result<Vec<CapacityResult>> {
    if q_values.is_empty() || power_db_values.is_empty() {
        return Err(Error::domain("capacity sweep needs non-empty q and power grids"));
    }
    let cells: Vec<(f64, f64)> = q_values
        .iter()
        .flat_map(|&q| power_db_values.iter().map(move |&db| (q, db)))
        .collect();
    cells
        .par_iter()
        .map(|&(q, db)| {
            let mut r = ergodic_capacity(cfg, q, db_to_linear(db), ctrl)?;
            r.power_db = db;
            Ok(r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctrl() -> SeriesControl {
        SeriesControl::default()
    }

    fn cfg(nt: usize, nr: usize) -> ChannelConfig {
        ChannelConfig::new(nt, nr, 1.0).unwrap()
    }

    #[test]
    fn db_round_trip() {
        assert!((db_to_linear(15.0) - 31.622776601683793).abs() < 1e-12);
        assert!((linear_to_db(db_to_linear(-7.5)) + 7.5).abs() < 1e-12);
    }

    #[test]
    fn single_antenna_rayleigh_closed_form() {
        // E[log₂(1 + Pλ)] with λ ~ Exp(1) is e^{1/P} E₁(1/P) / ln 2.
        let p = 10.0;
        let c = ergodic_capacity(&cfg(1, 1), 1.0, p, &ctrl()).unwrap();
        let expect = 2.906_514_808_414_805; // e^{0.1} E₁(0.1) / ln 2
        assert!((c.capacity - expect).abs() < 1e-8, "{}", c.capacity);
    }

    #[test]
    fn tiny_power() {
        for q in [0.0, 0.5, 1.0] {
            let c = ergodic_capacity(&cfg(2, 2), q, 1e-9, &ctrl()).unwrap();
            assert!(c.capacity >= 0.0 && c.capacity < 1e-7);
        }
    }

    #[test]
    fn antenna_swap_rescales_power() {
        let p = 7.0;
        for q in [0.0, 0.5, 1.0] {
            let a = ergodic_capacity(&cfg(2, 3), q, p, &ctrl()).unwrap().capacity;
            let b = ergodic_capacity(&cfg(3, 2), q, 1.5 * p, &ctrl()).unwrap().capacity;
            assert!((a - b).abs() < 1e-8, "q={q}: {a} vs {b}");
        }
    }

    #[test]
    fn sweep_is_monotone() {
        let c = cfg(2, 2);
        let qs = [0.0, 0.3, 0.7, 1.0];
        let ps = [0.0, 10.0, 20.0];
        let rows = capacity_sweep(&c, &qs, &ps, &ctrl()).unwrap();
        assert_eq!(rows.len(), 12);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.q, qs[i / 3]);
            assert_eq!(r.power_db, ps[i % 3]);
        }
        for row in rows.chunks(3) {
            assert!(row[0].capacity < row[1].capacity && row[1].capacity < row[2].capacity);
        }
        for k in 0..3 {
            for j in 0..3 {
                assert!(rows[3 * j + k].capacity <= rows[3 * (j + 1) + k].capacity + 1e-10);
            }
        }
    }

    #[test]
    fn below_mp_ceiling() {
        let c = cfg(3, 4);
        let p = 20.0;
        let lmax = mp_edges(&c).1;
        let ceiling = 3.0 * log2_1p(p / 3.0 * lmax);
        for q in [0.0, 1.0] {
            assert!(ergodic_capacity(&c, q, p, &ctrl()).unwrap().capacity <= ceiling);
        }
    }

    #[test]
    fn tighter_tolerance_stays_within_error_estimate() {
        let c = cfg(3, 3);
        let loose = ergodic_capacity(&c, 0.5, 31.6, &ctrl()).unwrap();
        let cap = {
            let snr = 31.6 / 3.0;
            let f = |lam: f64| Ok(log2_1p(snr * lam) * level_density(lam, &c, 0.5, &ctrl())?);
            integrate_spectrum(&f, &c, QuadOptions::with_tolerances(1e-13, 5e-11))
                .unwrap()
                .0
        };
        assert!((loose.capacity - cap).abs() <= loose.est_abs_error.max(1e-12));
    }

    #[test]
    fn invalid_power() {
        assert!(ergodic_capacity(&cfg(2, 2), 0.5, 0.0, &ctrl()).is_err());
        assert!(ergodic_capacity(&cfg(2, 2), 0.5, f64::NAN, &ctrl()).is_err());
        assert!(ergodic_capacity(&cfg(2, 2), 1.2, 1.0, &ctrl()).is_err());
    }
}
