//! Helpers shared by the acceptance suite and the golden-file generator.

#![allow(dead_code)]

use std::path::PathBuf;

use hoyt_core::capacity::{db_to_linear, degradation, ergodic_capacity};
use hoyt_core::ensemble::{level_density, mp_edges, ChannelConfig, SeriesControl};
use hoyt_core::quad::{integrate_to_infinity, QuadOptions};

pub fn cfg(nt: usize, nr: usize) -> ChannelConfig {
    ChannelConfig::new(nt, nr, 1.0).unwrap()
}

/// `∫₀^∞ f` through `x = u²`.
pub fn integrate_sq(f: impl Fn(f64) -> f64, opts: QuadOptions) -> f64 {
    integrate_to_infinity(|u| 2.0 * u * f(u * u), 0.0, opts).unwrap().value
}

/// A named table of floats.
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|v| format!("{v:?}")).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }

    pub fn parse(name: &'static str, text: &str) -> Table {
        let mut lines = text.lines();
        let header = lines.next().expect("golden file has a header");
        let columns = header.split(',').map(String::from).collect();
        let rows = lines
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.split(',')
                    .map(|v| v.parse::<f64>().expect("numeric golden cell"))
                    .collect()
            })
            .collect();
        Table { name, columns, rows }
    }
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|c| c.to_string()).collect()
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

pub const DENSITY_CONFIGS: [(usize, usize); 4] = [(2, 2), (3, 6), (4, 15), (16, 16)];
pub const DENSITY_QS: [f64; 6] = [0.0, 0.25, 0.3, 0.5, 0.75, 1.0];
pub const DENSITY_POINTS: usize = 48;

/// Level densities on `λ_k = k · 1.2 λ_max / 48`, `k = 1..=48`.
pub fn density_table() -> Table {
    let ctrl = SeriesControl::default();
    let mut rows = Vec::new();
    for (nt, nr) in DENSITY_CONFIGS {
        let c = cfg(nt, nr);
        let top = 1.2 * mp_edges(&c).1;
        for q in DENSITY_QS {
            for k in 1..=DENSITY_POINTS {
                let lam = top * k as f64 / DENSITY_POINTS as f64;
                let v = level_density(lam, &c, q, &ctrl).unwrap();
                rows.push(vec![nt as f64, nr as f64, q, lam, v]);
            }
        }
    }
    Table {
        name: "density.csv",
        columns: cols(&["nt", "nr", "q", "lambda", "level_density"]),
        rows,
    }
}

pub fn capacity_table() -> Table {
    let ctrl = SeriesControl::default();
    let mut rows = Vec::new();
    for (nt, nr) in [(2, 2), (3, 3), (4, 4), (2, 4)] {
        let c = cfg(nt, nr);
        for q in [0.0, 0.25, 0.5, 0.75, 1.0] {
            for db in [0.0, 5.0, 10.0, 15.0, 20.0] {
                let r = ergodic_capacity(&c, q, db_to_linear(db), &ctrl).unwrap();
                rows.push(vec![nt as f64, nr as f64, q, db, r.capacity]);
            }
        }
    }
    Table {
        name: "capacity.csv",
        columns: cols(&["nt", "nr", "q", "power_db", "capacity"]),
        rows,
    }
}

pub fn degradation_table() -> Table {
    let ctrl = SeriesControl::default();
    let mut rows = Vec::new();
    for n in [2, 3, 4] {
        let c = cfg(n, n);
        for db in [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0] {
            rows.push(vec![n as f64, db, degradation(&c, db_to_linear(db), &ctrl).unwrap()]);
        }
    }
    Table {
        name: "degradation.csv",
        columns: cols(&["n", "power_db", "degradation"]),
        rows,
    }
}

pub fn golden_tables() -> Vec<Table> {
    vec![density_table(), capacity_table(), degradation_table()]
}
