//! Self-consistency checks that tie the analytic pieces together: JPD
//! normalization, correlation functions against the JPD, the kernel trace,
//! agreement of the two `G` series orderings, and `Pf² = det`.

use serde::{Deserialize, Serialize};

use crate::ensemble::{correlation_fn, g_tau_ordered, jpd, kernel_s, ChannelConfig, SeriesControl, SummationOrder};
use crate::error::{Error, Result};
use crate::linalg::{determinant, pfaffian, AntisymmetricMatrix};
use crate::quad::{try_integrate, try_integrate_to_infinity, QuadOptions};
use crate::rng::GaussianStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Observed discrepancy.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn from_gap(name: impl Into<String>, gap: Result<f64>, tolerance: f64, detail: impl Into<String>) -> Self {
        let name = name.into();
        match gap {
            Ok(v) => Check {
                name,
                passed: v <= tolerance,
                value: v,
                tolerance,
                detail: detail.into(),
            },
            Err(e) => Check {
                name,
                passed: false,
                value: f64::NAN,
                tolerance,
                detail: e.to_string(),
            },
        }
    }
}

/// `∫₀^∞ f`, through `λ = u²` when `sqrt_map` is set.
fn half_line<F: FnMut(f64) -> Result<f64>>(mut f: F, sqrt_map: bool, opts: QuadOptions) -> Result<f64> {
    if sqrt_map {
        try_integrate_to_infinity(|u| if u == 0.0 { Ok(0.0) } else { Ok(2.0 * u * f(u * u)?) }, 0.0, opts)
            .map(|e| e.value)
    } else {
        try_integrate_to_infinity(f, 0.0, opts).map(|e| e.value)
    }
}

/// `∫ P dλ_1 ⋯ dλ_N` by nested adaptive quadrature over the ordered cell
/// `λ_1 ≥ ⋯ ≥ λ_N ≥ 0`, times `N!`. Inside the cell the integrand is smooth.
pub fn jpd_mass(cfg: &ChannelConfig, q: f64, ctrl: &SeriesControl, rel_tol: f64) -> Result<f64> {
    let opts = QuadOptions::with_tolerances(1e-14, rel_tol);
    let n = cfg.n;
    // `tail` holds λ_N, λ_{N−1}, … in ascending order.
    fn level(tail: &mut Vec<f64>, cfg: &ChannelConfig, q: f64, ctrl: &SeriesControl, opts: QuadOptions) -> Result<f64> {
        if tail.len() == cfg.n {
            let lams: Vec<f64> = tail.iter().rev().copied().collect();
            return jpd(&lams, cfg, q, ctrl);
        }
        let lo = tail.last().copied();
        let inner = |x: f64| {
            tail.push(x);
            let v = level(tail, cfg, q, ctrl, opts);
            tail.pop();
            v
        };
        match lo {
            None => half_line(inner, cfg.a < 0.0, opts),
            Some(lo) => try_integrate_to_infinity(inner, lo, opts).map(|e| e.value),
        }
    }
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    Ok(factorial * level(&mut Vec::with_capacity(n), cfg, q, ctrl, opts)?)
}

/// `R₁(λ) = 2 ∫ P(λ, μ) dμ` for `N = 2`.
pub fn r1_from_jpd(lam: f64, cfg: &ChannelConfig, q: f64, ctrl: &SeriesControl) -> Result<f64> {
    if cfg.n != 2 {
        return Err(Error::dimension(format!("r1_from_jpd needs N = 2, got {}", cfg.n)));
    }
    let opts = QuadOptions::with_tolerances(1e-14, 1e-10);
    let p = |mu: f64| jpd(&[lam, mu], cfg, q, ctrl);
    let below = if cfg.a < 0.0 {
        try_integrate(
            |u| if u == 0.0 { Ok(0.0) } else { Ok(2.0 * u * p(u * u)?) },
            0.0,
            lam.sqrt(),
            opts,
        )?
    } else {
        try_integrate(p, 0.0, lam, opts)?
    };
    let above = try_integrate_to_infinity(p, lam, opts)?;
    Ok(2.0 * (below.value + above.value))
}

/// `∫₀^∞ S(x, x) dx`, which equals `N`.
pub fn kernel_trace(cfg: &ChannelConfig, tau: f64, ctrl: &SeriesControl) -> Result<f64> {
    half_line(
        |x| kernel_s(x, x, cfg, tau, ctrl),
        cfg.a < 0.0,
        QuadOptions::with_tolerances(1e-13, 1e-11),
    )
}

/// Relative gap between the two orderings of the `G` double series.
pub fn ordering_gap(x: f64, y: f64, a: f64, tau: f64, ctrl: &SeriesControl) -> Result<f64> {
    let g1 = g_tau_ordered(x, y, a, tau, ctrl, SummationOrder::EvenOuter)?;
    let g2 = g_tau_ordered(x, y, a, tau, ctrl, SummationOrder::OddOuter)?;
    Ok((g1 - g2).abs() / g2.abs().max(f64::MIN_POSITIVE))
}

/// Random antisymmetric matrix with standard normal upper triangle.
pub fn random_antisymmetric(dim: usize, rng: &mut GaussianStream) -> AntisymmetricMatrix {
    AntisymmetricMatrix::from_fn(dim, |_, _| rng.next_standard_normal())
}

/// `|Pf(M)² − det M| / max(1, |det M|)` for a random antisymmetric `M`.
pub fn pfaffian_gap(dim: usize, seed: u64) -> Result<f64> {
    let mut rng = GaussianStream::from_seed(seed);
    let m = random_antisymmetric(dim, &mut rng);
    let pf = pfaffian(&m)?;
    let det = determinant(&m.to_complex())?.re;
    Ok((pf * pf - det).abs() / det.abs().max(1.0))
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn config(nt: usize, nr: usize) -> ChannelConfig {
    ChannelConfig::new(nt, nr, 1.0).expect("fixed configurations are valid")
}

/// Runs the bundled checks. `quick` keeps a representative subset that
/// finishes in a few seconds.
pub fn run_suite(quick: bool, ctrl: &SeriesControl) -> Vec<Check> {
    let mut out = Vec::new();

    let norm_cases: Vec<(usize, usize, f64, f64)> = if quick {
        vec![(2, 2, 0.5, 1e-4)]
    } else {
        let mut v = Vec::new();
        for q in [0.0, 0.5, 1.0] {
            v.push((2, 2, q, 1e-4));
        }
        for q in [0.0, 0.5, 1.0] {
            v.push((3, 4, q, 1e-3));
        }
        v
    };
    for (nt, nr, q, tol) in norm_cases {
        let cfg = config(nt, nr);
        let mass = jpd_mass(&cfg, q, ctrl, tol * 1e-3);
        let detail = mass.as_ref().map(|m| format!("mass {m:.10}")).unwrap_or_default();
        out.push(Check::from_gap(
            format!("jpd_normalization nt={nt} nr={nr} q={q}"),
            mass.map(|m| (m - 1.0).abs()),
            tol,
            detail,
        ));
    }

    let cfg2 = config(2, 2);
    let mut rng = GaussianStream::from_seed(20);
    let pairs: Vec<[f64; 2]> = (0..if quick { 2 } else { 5 })
        .map(|_| [0.1 + 6.0 * rng.next_uniform(), 0.1 + 6.0 * rng.next_uniform()])
        .collect();
    for p in &pairs {
        let gap = (|| {
            let r2 = correlation_fn(p, &cfg2, 0.5, ctrl)?;
            Ok(rel_gap(r2, 2.0 * jpd(p, &cfg2, 0.5, ctrl)?))
        })();
        out.push(Check::from_gap(
            format!("r2_vs_jpd q=0.5 at ({:.4}, {:.4})", p[0], p[1]),
            gap,
            1e-4,
            "",
        ));
    }
    for lam in if quick { vec![1.3] } else { vec![0.4, 1.3, 3.7] } {
        let gap = (|| {
            Ok(rel_gap(
                r1_from_jpd(lam, &cfg2, 0.5, ctrl)?,
                correlation_fn(&[lam], &cfg2, 0.5, ctrl)?,
            ))
        })();
        out.push(Check::from_gap(
            format!("r1_vs_jpd_marginal q=0.5 at {lam}"),
            gap,
            1e-4,
            "",
        ));
    }

    let trace_cases: Vec<(usize, usize)> = if quick {
        vec![(2, 2)]
    } else {
        vec![(1, 1), (2, 2), (2, 3), (3, 3), (3, 5), (4, 4), (4, 6), (5, 5), (5, 6)]
    };
    let taus = [0.0, 0.7, f64::INFINITY];
    for (nt, nr) in trace_cases {
        let cfg = config(nt, nr);
        for tau in taus {
            let gap = kernel_trace(&cfg, tau, ctrl).map(|t| (t - cfg.n as f64).abs());
            out.push(Check::from_gap(
                format!("kernel_trace nt={nt} nr={nr} tau={tau}"),
                gap,
                1e-6,
                "",
            ));
        }
    }

    let (tau_grid, a_grid): (&[f64], &[f64]) = if quick {
        (&[0.5, 2.0], &[-0.5, 1.0])
    } else {
        (&[0.25, 0.5, 1.0, 2.0], &[-0.5, 0.0, 0.5, 1.0])
    };
    for &tau in tau_grid {
        for &a in a_grid {
            out.push(Check::from_gap(
                format!("g_orderings tau={tau} a={a}"),
                ordering_gap(0.7, 1.9, a, tau, ctrl),
                1e-8,
                "",
            ));
        }
    }

    let max_dim = if quick { 6 } else { 12 };
    for dim in (0..=max_dim).step_by(2) {
        out.push(Check::from_gap(
            format!("pfaffian_squared_vs_det dim={dim}"),
            pfaffian_gap(dim, 100 + dim as u64),
            1e-10,
            "",
        ));
    }
    out
}
