use std::io::Read;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use hoyt_core::capacity::{capacity_sweep, db_to_linear, ergodic_capacity, linear_to_db, mp_capacity};
use hoyt_core::ensemble::{
    correlation_fn, density_curve, density_mp, level_density, mp_edges, ChannelConfig, SeriesControl,
};
use hoyt_core::fading::{tau_from_q, Crossover};
use hoyt_core::montecarlo::{analytic_bin_density, default_range, empirical_density, CHUNK_SIZE};
use hoyt_core::validation::run_suite;

use crate::args::{
    CapacityArgs, ChannelArgs, Command, CorrelationArgs, DegradationArgs, DensityArgs, FadingArgs, Format, OutputArgs,
    PowerArgs, SeriesArgs, SimulateArgs, ValidateArgs,
};
use crate::output::{Cell, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] hoyt_core::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numerical or I/O failure.
    pub fn exit_code(&self) -> u8 {
        use hoyt_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Core(E::Domain(_) | E::Dimension(_)) => 2,
            CliError::Core(_) | CliError::Io(_) => 3,
        }
    }
}

pub struct Outcome {
    pub report: Report,
    pub format: Format,
    pub output: Option<PathBuf>,
    /// Set when a validation check failed.
    pub failed: bool,
}

type Result<T> = std::result::Result<T, CliError>;

fn channel(c: &ChannelArgs) -> Result<ChannelConfig> {
    Ok(ChannelConfig::new(c.nt, c.nr, c.omega)?)
}

fn series(s: &SeriesArgs) -> Result<SeriesControl> {
    Ok(SeriesControl::new(s.rel_tol, s.max_terms)?)
}

fn q_of(q: Option<f64>, tau: Option<f64>) -> Result<f64> {
    match (q, tau) {
        (Some(q), None) => Ok(Crossover::from_q(q)?.q()),
        (None, Some(t)) => Ok(Crossover::from_tau(t)?.q()),
        _ => Err(CliError::Usage("give exactly one of --q and --tau".into())),
    }
}

fn fading(f: &FadingArgs) -> Result<f64> {
    q_of(f.q, f.tau)
}

/// JSON number, with infinities spelled out.
fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        Value::Null
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn config_meta(cfg: &ChannelConfig) -> Value {
    json!({
        "nt": cfg.nt,
        "nr": cfg.nr,
        "n": cfg.n,
        "m": cfg.m_dim,
        "a": cfg.a,
        "omega": cfg.omega,
    })
}

fn common_meta(report: &mut Report, cfg: Option<&ChannelConfig>, ctrl: &SeriesControl) {
    if let Some(cfg) = cfg {
        report.meta("config", config_meta(cfg));
    }
    report.meta("series", json!({"rel_tol": ctrl.rel_tol, "max_terms": ctrl.max_terms}));
    report.meta("threads", json!(rayon::current_num_threads()));
}

fn fading_meta(report: &mut Report, q: f64) {
    report.meta("q", json!(q));
    report.meta("tau", num(tau_from_q(q)));
}

fn finish(report: Report, out: &OutputArgs, default: Format) -> Outcome {
    Outcome {
        report,
        format: out.format.unwrap_or(default),
        output: out.output.clone(),
        failed: false,
    }
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Density(a) => density(a),
        Command::Capacity(a) => capacity(a),
        Command::Degradation(a) => degradation(a),
        Command::Simulate(a) => simulate(a),
        Command::Validate(a) => validate(a),
        Command::Correlations(a) => correlations(a),
    }
}

fn density(a: &DensityArgs) -> Result<Outcome> {
    let cfg = channel(&a.channel)?;
    let q = fading(&a.fading)?;
    let ctrl = series(&a.series)?;
    let grid = match a.grid {
        Some(g) => g.values(),
        None => {
            let hi = default_range(&cfg).1;
            (0..200).map(|k| hi * k as f64 / 199.0).collect()
        }
    };
    let curve = density_curve(&grid, &cfg, q, &ctrl)?;
    let marginal = curve.marginal();
    let n = cfg.n as f64;

    let mut columns = vec!["lambda", "rho_analytic"];
    if a.asymptotic {
        columns.push("rho_mp");
    }
    let hist = if a.simulate {
        columns.extend(["rho_empirical", "stderr"]);
        let span = (grid[0], grid[grid.len() - 1]);
        Some(empirical_density(&cfg, q, a.samples, a.bins, Some(span), a.seed)?)
    } else {
        None
    };
    let mut report = Report::new("density", &columns);
    for (k, &lam) in grid.iter().enumerate() {
        let mut row: Vec<Cell> = vec![lam.into(), marginal[k].into()];
        if a.asymptotic {
            row.push((density_mp(lam, &cfg) / n).into());
        }
        if let Some(h) = &hist {
            let lo = h.bin_edges[0];
            let width = h.bin_width(0);
            let b = (((lam - lo) / width) as usize).min(h.bins() - 1);
            row.push(h.normalized_values[b].into());
            row.push(h.stderr(b).into());
        }
        report.push(row);
    }
    common_meta(&mut report, Some(&cfg), &ctrl);
    fading_meta(&mut report, q);
    report.meta("density", json!("marginal rho = R1 / N"));
    report.meta("trapezoid_integral", num(curve.trapezoid() / n));
    report.meta("mp_edges", json!(mp_edges(&cfg)));
    if let Some(h) = &hist {
        report.meta(
            "simulation",
            json!({"seed": a.seed, "samples": a.samples, "bins": h.bins(), "chunk_size": CHUNK_SIZE}),
        );
    }
    Ok(finish(report, &a.output, Format::Csv))
}

/// Linear powers and their dB labels.
fn powers(p: &PowerArgs) -> Result<Vec<(f64, f64)>> {
    if p.power_db.is_empty() {
        return Err(CliError::Usage("at least one power value is required".into()));
    }
    p.power_db
        .iter()
        .map(|&v| {
            let (lin, db) = if p.power_linear {
                (v, linear_to_db(v))
            } else {
                (db_to_linear(v), v)
            };
            if lin > 0.0 && lin.is_finite() {
                Ok((lin, db))
            } else {
                Err(CliError::Usage(format!("power {v} is not a positive finite value")))
            }
        })
        .collect()
}

fn capacity(a: &CapacityArgs) -> Result<Outcome> {
    let cfg = channel(&a.channel)?;
    let ctrl = series(&a.series)?;
    let qs: Vec<f64> = if !a.fading.q.is_empty() {
        a.fading.q.iter().map(|&q| q_of(Some(q), None)).collect::<Result<_>>()?
    } else {
        a.fading
            .tau
            .iter()
            .map(|&t| q_of(None, Some(t)))
            .collect::<Result<_>>()?
    };
    let ps = powers(&a.power)?;
    let rows = if a.power.power_linear {
        let cells: Vec<(f64, f64)> = qs.iter().flat_map(|&q| ps.iter().map(move |&(p, _)| (q, p))).collect();
        cells
            .par_iter()
            .map(|&(q, p)| ergodic_capacity(&cfg, q, p, &ctrl))
            .collect::<hoyt_core::Result<Vec<_>>>()?
    } else {
        let dbs: Vec<f64> = ps.iter().map(|&(_, db)| db).collect();
        capacity_sweep(&cfg, &qs, &dbs, &ctrl)?
    };
    let mut columns = vec!["q", "tau", "power_db", "power_linear", "capacity", "est_abs_error"];
    if a.asymptotic {
        columns.push("capacity_mp");
    }
    let mut report = Report::new("capacity", &columns);
    for (i, r) in rows.iter().enumerate() {
        let (lin, db) = ps[i % ps.len()];
        let mut row: Vec<Cell> = vec![
            r.q.into(),
            tau_from_q(r.q).into(),
            db.into(),
            lin.into(),
            r.capacity.into(),
            r.est_abs_error.into(),
        ];
        if a.asymptotic {
            row.push(mp_capacity(&cfg, lin)?.into());
        }
        report.push(row);
    }
    common_meta(&mut report, Some(&cfg), &ctrl);
    report.meta("units", json!({"capacity": "bits/s/Hz", "power_db": "10 log10(P)"}));
    Ok(finish(report, &a.output, Format::Csv))
}

fn degradation(a: &DegradationArgs) -> Result<Outcome> {
    let cfg = channel(&a.channel)?;
    let ctrl = series(&a.series)?;
    let ps = powers(&a.power)?;
    let caps = ps
        .par_iter()
        .map(|&(p, _)| {
            let c0 = ergodic_capacity(&cfg, 0.0, p, &ctrl)?.capacity;
            let c1 = ergodic_capacity(&cfg, 1.0, p, &ctrl)?.capacity;
            Ok((c0, c1))
        })
        .collect::<hoyt_core::Result<Vec<_>>>()?;
    let mut report = Report::new(
        "degradation",
        &["power_db", "power_linear", "capacity_q0", "capacity_q1", "degradation"],
    );
    for (&(lin, db), &(c0, c1)) in ps.iter().zip(&caps) {
        report.push(vec![
            db.into(),
            lin.into(),
            c0.into(),
            c1.into(),
            (1.0 - c0 / c1).into(),
        ]);
    }
    common_meta(&mut report, Some(&cfg), &ctrl);
    report.meta("definition", json!("1 - C(q=0) / C(q=1)"));
    Ok(finish(report, &a.output, Format::Csv))
}

fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    let cfg = channel(&a.channel)?;
    let q = fading(&a.fading)?;
    let ctrl = series(&a.series)?;
    let h = empirical_density(&cfg, q, a.samples, a.bins, a.range, a.seed)?;
    let exact = if a.compare {
        Some(analytic_bin_density(&h.bin_edges, &cfg, q, &ctrl)?)
    } else {
        None
    };
    let mut columns = vec!["bin_lo", "bin_hi", "density", "stderr"];
    if a.compare {
        columns.extend(["rho_analytic", "z"]);
    }
    let mut report = Report::new("simulate", &columns);
    for k in 0..h.bins() {
        let mut row: Vec<Cell> = vec![
            h.bin_edges[k].into(),
            h.bin_edges[k + 1].into(),
            h.normalized_values[k].into(),
            h.stderr(k).into(),
        ];
        if let Some(e) = &exact {
            row.push(e[k].into());
            let se = h.stderr(k);
            row.push(if se > 0.0 {
                ((h.normalized_values[k] - e[k]) / se).into()
            } else {
                Cell::Empty
            });
        }
        report.push(row);
    }
    common_meta(&mut report, Some(&cfg), &ctrl);
    fading_meta(&mut report, q);
    let expected = (cfg.nt * cfg.nr) as f64 * cfg.omega;
    report.meta("seed", json!(a.seed));
    report.meta("samples", json!(a.samples));
    report.meta("bins", json!(h.bins()));
    report.meta("chunk_size", json!(CHUNK_SIZE));
    report.meta("range", json!([h.bin_edges[0], h.bin_edges[h.bins()]]));
    report.meta("mass_in_range", json!(h.mass_in_range()));
    report.meta(
        "trace_check",
        json!({
            "mean": h.trace_mean,
            "stderr": h.trace_stderr,
            "expected": expected,
            "z": (h.trace_mean - expected) / h.trace_stderr,
        }),
    );
    if let Some(e) = &exact {
        let within = (0..h.bins())
            .filter(|&k| (h.normalized_values[k] - e[k]).abs() <= 3.0 * h.stderr(k))
            .count();
        report.meta("bins_within_3_stderr", json!(within));
    }
    Ok(finish(report, &a.output, Format::Csv))
}

fn validate(a: &ValidateArgs) -> Result<Outcome> {
    let ctrl = series(&a.series)?;
    let checks = run_suite(a.quick, &ctrl);
    let mut report = Report::new("validate", &["name", "passed", "value", "tolerance", "detail"]);
    for c in &checks {
        report.push(vec![
            c.name.clone().into(),
            c.passed.into(),
            c.value.into(),
            c.tolerance.into(),
            c.detail.clone().into(),
        ]);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    common_meta(&mut report, None, &ctrl);
    report.meta("quick", json!(a.quick));
    report.meta("checks", json!(checks.len()));
    report.meta("failed", json!(failed));
    report.meta("all_passed", json!(failed == 0));
    let mut out = finish(report, &a.output, Format::Json);
    out.failed = failed > 0;
    Ok(out)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointsInput {
    List(Vec<Vec<f64>>),
    Object { points: Vec<Vec<f64>> },
}

fn read_points(path: &PathBuf) -> Result<Vec<Vec<f64>>> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path)?;
    }
    let parsed: PointsInput = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("cannot parse points from {}: {e}", path.display())))?;
    let points = match parsed {
        PointsInput::List(p) | PointsInput::Object { points: p } => p,
    };
    if points.is_empty() {
        return Err(CliError::Usage("point list is empty".into()));
    }
    Ok(points)
}

fn correlations(a: &CorrelationArgs) -> Result<Outcome> {
    let cfg = channel(&a.channel)?;
    let q = fading(&a.fading)?;
    let ctrl = series(&a.series)?;
    let points = read_points(&a.points)?;
    let values = points
        .par_iter()
        .map(|p| {
            let r = correlation_fn(p, &cfg, q, &ctrl)?;
            // Coincident pairs must not exceed the product of densities.
            let repulsion = if p.len() == 2 && p[0] == p[1] {
                let r1 = level_density(p[0], &cfg, q, &ctrl)?;
                Some(r <= r1 * r1 * (1.0 + 1e-9))
            } else {
                None
            };
            Ok((r, repulsion))
        })
        .collect::<hoyt_core::Result<Vec<_>>>()?;
    let mut report = Report::new("correlations", &["index", "n", "points", "r_n", "repulsion_ok"]);
    for (i, (p, (r, rep))) in points.iter().zip(&values).enumerate() {
        let text = p.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ");
        report.push(vec![
            i.into(),
            p.len().into(),
            text.into(),
            (*r).into(),
            rep.map(Cell::Bool).unwrap_or(Cell::Empty),
        ]);
    }
    common_meta(&mut report, Some(&cfg), &ctrl);
    fading_meta(&mut report, q);
    let flagged = values.iter().filter(|(_, rep)| *rep == Some(false)).count();
    report.meta("repulsion_violations", json!(flagged));
    Ok(finish(report, &a.output, Format::Csv))
}
