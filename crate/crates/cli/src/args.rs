use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hoyt",
    version,
    about = "Eigenvalue statistics and ergodic capacity of Nakagami-q (Hoyt) MIMO channels"
)]
pub struct Cli {
    /// Worker threads for grids, sweeps and sampling.
    #[arg(long, global = true, env = "HOYT_THREADS")]
    pub threads: Option<usize>,

    /// File of `key=value` lines mirroring the long flags. Flags given on the
    /// command line take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Marginal eigenvalue density on a grid.
    Density(DensityArgs),
    /// Ergodic capacity over a grid of q (or tau) and power values.
    Capacity(CapacityArgs),
    /// Relative capacity loss 1 - C(q=0)/C(q=1).
    Degradation(DegradationArgs),
    /// Monte Carlo eigenvalue histogram.
    Simulate(SimulateArgs),
    /// Analytic self-consistency checks.
    Validate(ValidateArgs),
    /// n-level correlation functions at user-supplied points.
    Correlations(CorrelationArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Transmit antennas.
    #[arg(long)]
    pub nt: usize,
    /// Receive antennas.
    #[arg(long)]
    pub nr: usize,
    /// Mean channel power per entry, sigma_x^2 + sigma_y^2.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct FadingArgs {
    /// Nakagami-q parameter sigma_y / sigma_x in [0, 1].
    #[arg(long)]
    pub q: Option<f64>,
    /// Crossover parameter tau = ln((1 + q^2) / (1 - q^2)) >= 0.
    #[arg(long)]
    pub tau: Option<f64>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct FadingListArgs {
    /// Comma-separated q values.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub q: Vec<f64>,
    /// Comma-separated tau values.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub tau: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    /// Relative tolerance of the infinite series.
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    /// Term budget of the infinite series.
    #[arg(long, default_value_t = 20_000)]
    pub max_terms: usize,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    /// Comma-separated transmit powers in dB (10 log10 P).
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "15")]
    pub power_db: Vec<f64>,
    /// Read the --power-db values as linear powers instead of dB.
    #[arg(long)]
    pub power_linear: bool,
}

/// `min:max:points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.max
                } else {
                    self.min + k as f64 * step
                }
            })
            .collect()
    }
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err("expected min:max:points".into());
    }
    let min: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| format!("bad grid minimum '{}'", parts[0]))?;
    let max: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| format!("bad grid maximum '{}'", parts[1]))?;
    let points: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| format!("bad point count '{}'", parts[2]))?;
    if !(min >= 0.0 && max > min && max.is_finite()) {
        return Err(format!("grid needs 0 <= min < max, got {min}:{max}"));
    }
    if points < 2 {
        return Err("grid needs at least 2 points".into());
    }
    Ok(Grid { min, max, points })
}

/// `min:max`.
pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected min:max")?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad range minimum '{a}'"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad range maximum '{b}'"))?;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(format!("range needs 0 <= min < max, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub fading: FadingArgs,
    /// Eigenvalue grid `min:max:points`; default `0:1.2*lambda_max:200`.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<Grid>,
    /// Add the Marchenko-Pastur density column.
    #[arg(long)]
    pub asymptotic: bool,
    /// Add a Monte Carlo column (histogram over the grid span).
    #[arg(long)]
    pub simulate: bool,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Histogram bins for --simulate.
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub fading: FadingListArgs,
    #[command(flatten)]
    pub power: PowerArgs,
    /// Add the capacity of the Marchenko-Pastur density.
    #[arg(long)]
    pub asymptotic: bool,
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DegradationArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub power: PowerArgs,
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub fading: FadingArgs,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
    /// Histogram span `min:max`; default `0:1.2*lambda_max`.
    #[arg(long, value_parser = parse_range)]
    pub range: Option<(f64, f64)>,
    /// Add the exact bin-averaged density and the per-bin z-score.
    #[arg(long)]
    pub compare: bool,
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Run the fast subset only.
    #[arg(long)]
    pub quick: bool,
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CorrelationArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub fading: FadingArgs,
    /// JSON file with a list of point tuples, e.g. `[[1.0], [0.5, 2.0]]`,
    /// or an object `{"points": [...]}`. `-` reads standard input.
    #[arg(long, value_name = "PATH")]
    pub points: PathBuf,
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0:8:5").unwrap();
        assert_eq!(g.values(), vec![0.0, 2.0, 4.0, 6.0, 8.0]);
        assert!(parse_grid("0:8").is_err());
        assert!(parse_grid("3:1:10").is_err());
        assert!(parse_grid("0:1:1").is_err());
        assert!(parse_grid("-1:1:10").is_err());
    }

    #[test]
    fn grid_ends_exactly_at_max() {
        let v = parse_grid("0.1:0.7:7").unwrap().values();
        assert_eq!(*v.last().unwrap(), 0.7);
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("0:2.5").unwrap(), (0.0, 2.5));
        assert!(parse_range("2:1").is_err());
    }

    #[test]
    fn q_and_tau_are_exclusive() {
        let r = Cli::try_parse_from(["hoyt", "density", "--nt", "2", "--nr", "2", "--q", "0.5", "--tau", "1"]);
        assert!(r.is_err());
        let r = Cli::try_parse_from(["hoyt", "density", "--nt", "2", "--nr", "2"]);
        assert!(r.is_err());
    }

    #[test]
    fn power_list_parses() {
        let cli =
            Cli::try_parse_from(["hoyt", "degradation", "--nt", "2", "--nr", "2", "--power-db", "0,15,30"]).unwrap();
        match cli.command {
            Command::Degradation(d) => assert_eq!(d.power.power_db, vec![0.0, 15.0, 30.0]),
            _ => unreachable!(),
        }
    }
}
