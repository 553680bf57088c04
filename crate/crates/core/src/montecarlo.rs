//! Monte Carlo sampling of Nakagami-q channel matrices and their Wishart
//! spectra.
//!
//! Draws are split into chunks of [`CHUNK_SIZE`] samples. Chunk `k` uses
//! [`GaussianStream::for_chunk`]`(seed, k)` and chunk results are combined
//! in chunk order, so output depends on the seed only, never on the number
//! of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{level_density, mp_edges, ChannelConfig, SeriesControl};
use crate::error::{Error, Result};
use crate::fading::{params_from_q, sample_signal, FadingParams};
use crate::linalg::{gram, hermitian_eigenvalues, ComplexMatrix};
use crate::quad::{try_integrate, QuadOptions};
use crate::rng::GaussianStream;
use crate::specfun::CompensatedSum;

pub const CHUNK_SIZE: usize = 4096;

/// Eigenvalues below `−CLAMP_TOL · trace(W)` indicate a solver fault.
const CLAMP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    /// Ascending, nonnegative.
    pub eigenvalues: Vec<f64>,
}

impl SpectralSample {
    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total_samples: usize,
    /// Eigenvalues per draw.
    pub n: usize,
    /// Marginal-density estimate: `counts / (samples · N · width)`.
    pub normalized_values: Vec<f64>,
    /// Sample mean of `trace(W) = Σ λ` and its standard error.
    pub trace_mean: f64,
    pub trace_stderr: f64,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self, k: usize) -> f64 {
        self.bin_edges[k + 1] - self.bin_edges[k]
    }

    pub fn bin_center(&self, k: usize) -> f64 {
        0.5 * (self.bin_edges[k] + self.bin_edges[k + 1])
    }

    /// Binomial standard error of `normalized_values[k]`, treating each of
    /// the `samples · N` eigenvalues as a trial.
    pub fn stderr(&self, k: usize) -> f64 {
        let trials = (self.total_samples * self.n) as f64;
        let p = self.counts[k] as f64 / trials;
        (p * (1.0 - p) / trials).sqrt() / self.bin_width(k)
    }

    /// Fraction of all eigenvalues that fell inside the histogram range.
    pub fn mass_in_range(&self) -> f64 {
        self.counts.iter().sum::<u64>() as f64 / (self.total_samples * self.n) as f64
    }
}

/// `nr × nt` matrix `H = H_X + j H_Y` with independent entries of variance
/// `σ_X²` and `σ_Y²`.
pub fn sample_channel(cfg: &ChannelConfig, q: f64, rng: &mut GaussianStream) -> Result<ComplexMatrix> {
    let p = params_from_q(q, cfg.omega)?;
    Ok(draw(cfg, &p, rng))
}

fn draw(cfg: &ChannelConfig, p: &FadingParams, rng: &mut GaussianStream) -> ComplexMatrix {
    ComplexMatrix::from_fn(cfg.nr, cfg.nt, |_, _| sample_signal(p, rng))
}

fn spectrum_of(h: &ComplexMatrix, cfg: &ChannelConfig) -> Result<SpectralSample> {
    let w = gram(h, cfg.nr, cfg.nt)?;
    let trace = w.trace().re;
    let mut ev = hermitian_eigenvalues(&w)?;
    for l in ev.iter_mut() {
        if *l < 0.0 {
            if *l < -CLAMP_TOL * trace {
                return Err(Error::Numerical(format!(
                    "eigenvalue {l:e} of a Gram matrix with trace {trace:e} is negative beyond roundoff"
                )));
            }
            *l = 0.0;
        }
    }
    Ok(SpectralSample { eigenvalues: ev })
}

/// Eigenvalues of `W` for one channel draw.
pub fn sample_spectrum(cfg: &ChannelConfig, q: f64, rng: &mut GaussianStream) -> Result<SpectralSample> {
    let h = sample_channel(cfg, q, rng)?;
    spectrum_of(&h, cfg)
}

/// Runs `work(stream, count)` on every chunk in parallel and returns the
/// results in chunk order.
fn map_chunks<T, F>(samples: usize, seed: u64, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut GaussianStream, usize) -> Result<T> + Sync,
{
    let chunks = samples.div_ceil(CHUNK_SIZE);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = GaussianStream::for_chunk(seed, k as u64);
            let count = CHUNK_SIZE.min(samples - k * CHUNK_SIZE);
            work(&mut rng, count)
        })
        .collect()
}

/// Mean and standard error accumulated with Chan's pairwise update.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.count += 1.0;
        let d = v - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (v - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0.0 {
            return other;
        }
        if other.count == 0.0 {
            return self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + d * other.count / count,
            m2: self.m2 + other.m2 + d * d * self.count * other.count / count,
        }
    }

    fn stderr(&self) -> f64 {
        if self.count < 2.0 {
            return f64::NAN;
        }
        (self.m2 / (self.count - 1.0) / self.count).sqrt()
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        Err(Error::domain("samples must be at least 1"))
    } else {
        Ok(())
    }
}

/// Default histogram range `[0, 1.2 λ_max]` from the Marčenko–Pastur edge.
pub fn default_range(cfg: &ChannelConfig) -> (f64, f64) {
    (0.0, 1.2 * mp_edges(cfg).1)
}

/// Histogram of all `N · samples` eigenvalues, normalized as a marginal
/// density. `range` defaults to [`default_range`].
pub fn empirical_density(
    cfg: &ChannelConfig,
    q: f64,
    samples: usize,
    bins: usize,
    range: Option<(f64, f64)>,
    seed: u64,
) -> Result<Histogram> {
    check_samples(samples)?;
    if bins == 0 {
        return Err(Error::domain("bins must be at least 1"));
    }
    let (lo, hi) = range.unwrap_or_else(|| default_range(cfg));
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::domain(format!("invalid histogram range [{lo}, {hi}]")));
    }
    let p = params_from_q(q, cfg.omega)?;
    let width = (hi - lo) / bins as f64;
    let parts = map_chunks(samples, seed, |rng, count| {
        let mut counts = vec![0u64; bins];
        let mut trace = Moments::default();
        for _ in 0..count {
            let s = spectrum_of(&draw(cfg, &p, rng), cfg)?;
            trace.push(s.trace());
            for &l in &s.eigenvalues {
                if l < lo || l > hi {
                    continue;
                }
                let k = (((l - lo) / width) as usize).min(bins - 1);
                counts[k] += 1;
            }
        }
        Ok((counts, trace))
    })?;
    let mut counts = vec![0u64; bins];
    let mut trace = Moments::default();
    for (c, t) in parts {
        for (acc, v) in counts.iter_mut().zip(c) {
            *acc += v;
        }
        trace = trace.merge(t);
    }
    let bin_edges: Vec<f64> = (0..=bins).map(|k| lo + k as f64 * width).collect();
    let norm = (samples * cfg.n) as f64;
    let normalized_values = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| c as f64 / norm / (bin_edges[k + 1] - bin_edges[k]))
        .collect();
    Ok(Histogram {
        bin_edges,
        counts,
        total_samples: samples,
        n: cfg.n,
        normalized_values,
        trace_mean: trace.mean,
        trace_stderr: trace.stderr(),
    })
}

/// Exact marginal density averaged over each histogram bin,
/// `∫_bin R₁ dλ / (N · width)`, the quantity a bin count estimates.
pub fn analytic_bin_density(edges: &[f64], cfg: &ChannelConfig, q: f64, ctrl: &SeriesControl) -> Result<Vec<f64>> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) || edges[0] < 0.0 {
        return Err(Error::domain("bin edges must be nonnegative and strictly ascending"));
    }
    let opts = QuadOptions::with_tolerances(1e-13, 1e-10);
    let n = cfg.n as f64;
    edges
        .par_windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            // λ = lo + u² absorbs a λ^{-1/2} singularity at the origin.
            let mass = try_integrate(
                |u| {
                    if u == 0.0 {
                        return Ok(0.0);
                    }
                    Ok(2.0 * u * level_density(lo + u * u, cfg, q, ctrl)?)
                },
                0.0,
                (hi - lo).sqrt(),
                opts,
            )?;
            Ok(mass.value / (n * (hi - lo)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Sample mean of `Σ_i log₂(1 + (P/N_t) λ_i)`; `power` is linear.
pub fn mc_capacity(cfg: &ChannelConfig, q: f64, power: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    check_samples(samples)?;
    if !(power >= 0.0 && power.is_finite()) {
        return Err(Error::domain(format!("power must be finite and >= 0, got {power}")));
    }
    let p = params_from_q(q, cfg.omega)?;
    let snr = power / cfg.nt as f64;
    let parts = map_chunks(samples, seed, |rng, count| {
        let mut m = Moments::default();
        for _ in 0..count {
            let s = spectrum_of(&draw(cfg, &p, rng), cfg)?;
            let c: CompensatedSum = s.eigenvalues.iter().map(|&l| (snr * l).ln_1p()).collect();
            m.push(c.value() / std::f64::consts::LN_2);
        }
        Ok(m)
    })?;
    let m = parts.into_iter().fold(Moments::default(), Moments::merge);
    Ok(McEstimate {
        mean: m.mean,
        stderr: m.stderr(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(nt: usize, nr: usize) -> ChannelConfig {
        ChannelConfig::new(nt, nr, 1.0).unwrap()
    }

    #[test]
    fn rayleigh_entry_variances() {
        let c = cfg(4, 5);
        let mut rng = GaussianStream::from_seed(1);
        let (mut re, mut im, mut n) = (0.0, 0.0, 0.0);
        for _ in 0..10_000 {
            let h = sample_channel(&c, 1.0, &mut rng).unwrap();
            for z in h.entries() {
                re += z.re * z.re;
                im += z.im * z.im;
                n += 1.0;
            }
        }
        assert!((re / n - 0.5).abs() < 0.005 && (im / n - 0.5).abs() < 0.005);
    }

    #[test]
    fn one_sided_has_no_imaginary_part() {
        let mut rng = GaussianStream::from_seed(2);
        let h = sample_channel(&cfg(3, 3), 0.0, &mut rng).unwrap();
        assert!(h.entries().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn spectrum_shape() {
        let mut rng = GaussianStream::from_seed(3);
        let s = sample_spectrum(&cfg(2, 3), 0.5, &mut rng).unwrap();
        assert_eq!(s.eigenvalues.len(), 2);
        assert!(s.eigenvalues.iter().all(|&l| l >= 0.0));
        assert!(s.eigenvalues[0] <= s.eigenvalues[1]);
    }

    #[test]
    fn trace_mean_matches_entry_power() {
        for q in [0.0, 0.5, 1.0] {
            let c = cfg(2, 3);
            let h = empirical_density(&c, q, 20_000, 10, None, 7).unwrap();
            let expect = 6.0;
            assert!(
                (h.trace_mean - expect).abs() < 4.0 * h.trace_stderr,
                "q={q} {}",
                h.trace_mean
            );
        }
    }

    #[test]
    fn histogram_is_deterministic_and_normalized() {
        let c = cfg(2, 2);
        let a = empirical_density(&c, 0.5, 9_000, 20, None, 11).unwrap();
        let b = empirical_density(&c, 0.5, 9_000, 20, None, 11).unwrap();
        assert_eq!(a, b);
        let mass: f64 = (0..a.bins()).map(|k| a.normalized_values[k] * a.bin_width(k)).sum();
        assert!((mass - a.mass_in_range()).abs() < 1e-12);
        assert!(mass <= 1.0 && mass > 0.99);
        let wide = empirical_density(&c, 0.5, 9_000, 20, Some((0.0, 1e3)), 11).unwrap();
        assert_eq!(wide.mass_in_range(), 1.0);
    }

    #[test]
    fn single_antenna_rayleigh_is_exponential() {
        let c = cfg(1, 1);
        let h = empirical_density(&c, 1.0, 50_000, 5, Some((0.0, 100.0)), 5).unwrap();
        assert!((h.trace_mean - 1.0).abs() < 4.0 * h.trace_stderr);
    }

    #[test]
    fn histogram_matches_exact_density_for_one_antenna() {
        // 1×1 Rayleigh: λ ~ Exp(1).
        let c = cfg(1, 1);
        let h = empirical_density(&c, 1.0, 40_000, 10, Some((0.0, 5.0)), 3).unwrap();
        let exact = analytic_bin_density(&h.bin_edges, &c, 1.0, &SeriesControl::default()).unwrap();
        for (k, &e) in exact.iter().enumerate() {
            let (lo, hi) = (h.bin_edges[k], h.bin_edges[k + 1]);
            let closed = ((-lo).exp() - (-hi).exp()) / (hi - lo);
            assert!((e - closed).abs() < 1e-10);
            assert!((h.normalized_values[k] - closed).abs() < 4.0 * h.stderr(k));
        }
    }

    #[test]
    fn capacity_vanishes_at_zero_power() {
        let e = mc_capacity(&cfg(2, 2), 0.5, 0.0, 100, 1).unwrap();
        assert_eq!(e.mean, 0.0);
    }

    #[test]
    fn capacity_is_deterministic() {
        let a = mc_capacity(&cfg(2, 3), 0.3, 10.0, 5000, 9).unwrap();
        let b = mc_capacity(&cfg(2, 3), 0.3, 10.0, 5000, 9).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn invalid_arguments() {
        let c = cfg(2, 2);
        assert!(empirical_density(&c, 0.5, 0, 10, None, 1).is_err());
        assert!(empirical_density(&c, 0.5, 10, 0, None, 1).is_err());
        assert!(empirical_density(&c, 1.5, 10, 10, None, 1).is_err());
        assert!(mc_capacity(&c, 0.5, -1.0, 10, 1).is_err());
    }
}
