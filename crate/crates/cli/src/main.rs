//! `darwinism`: decoherence, receptivity and redundancy tables from the
//! command line.

mod commands;
mod output;
mod sweep;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use photon_darwinism::{Error, QuadratureOrder};

use output::{render, Format};
use sweep::{Axis, Range, Spacing};

/// Failure with the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: a configuration key or a flag value. Exit 2.
    Config { key: String, message: String },
    /// Enumeration size cap exceeded. Exit 3.
    ResourceCap(String),
    /// Anything else from the library or the filesystem. Exit 1.
    Other(String),
}

impl CliError {
    pub fn config(key: &str, message: impl Into<String>) -> Self {
        CliError::Config { key: key.into(), message: message.into() }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::ResourceCap(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { key, message } => write!(f, "invalid `{key}`: {message}"),
            CliError::ResourceCap(m) | CliError::Other(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { key, message } => CliError::Config { key, message },
            Error::Domain { name, .. } => CliError::Config { key: name.into(), message: e.to_string() },
            Error::Order(_) => CliError::Config { key: "order".into(), message: e.to_string() },
            Error::ResourceCap { .. } => CliError::ResourceCap(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "darwinism", version, about = "Decoherence and redundancy of a sphere under blackbody illumination")]
struct Cli {
    /// Scenario file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Gauss–Legendre points in cos θ; the azimuthal rule uses twice as many.
    #[arg(long, global = true, default_value_t = 64)]
    order: usize,
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decoherence rate of the configured scenario.
    Rate,
    /// Receptivity α and redundancy rate of the configured region.
    Alpha,
    /// Partial information curves, one block per (α, t).
    Pip {
        /// Times in units of τ_D.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 3.0, 10.0, 30.0, 100.0])]
        times: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.5, 0.01, 0.0])]
        alpha: Vec<f64>,
        /// Points on the fraction grid `0..=1`.
        #[arg(long, default_value_t = 101)]
        f_count: usize,
    },
    /// Redundancy against time: exact, estimate and lower bound.
    Redundancy {
        #[command(flatten)]
        range: RangeArgs,
        /// Receptivity; defaults to the configured region's, else 1.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
    },
    /// Runs the finite-model oracle battery.
    Oracle {
        /// Largest joint Hilbert-space dimension to enumerate.
        #[arg(long)]
        cap: Option<f64>,
        #[arg(long)]
        fragment_photons: Option<usize>,
        /// Random trials for the interval-bound check.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// One-dimensional parameter sweep.
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, default_value_t = 10.0)]
        t: f64,
        #[arg(long, default_value_t = 0.2)]
        f: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        /// Disk half-angle in degrees.
        #[arg(long, default_value_t = 90.0)]
        theta0: f64,
        /// Disk centre angle from Δx̂ in degrees.
        #[arg(long, default_value_t = 0.0)]
        chi: f64,
        #[arg(long, default_value_t = 0.5)]
        mu: f64,
        #[arg(long = "m", default_value_t = 3)]
        m: usize,
    },
}

#[derive(Args, Debug)]
struct RangeArgs {
    #[arg(long, default_value_t = 1.0)]
    start: f64,
    #[arg(long, default_value_t = 500.0)]
    stop: f64,
    #[arg(long, default_value_t = 500)]
    count: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Linear)]
    spacing: Spacing,
}

impl RangeArgs {
    fn range(&self) -> Result<Range, CliError> {
        Range::new(self.start, self.stop, self.count, self.spacing).map_err(|e| CliError::config(e.key, e.message))
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    let io = |e: std::io::Error, what: &str| CliError::Other(format!("{what}: {e}"));
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| io(e, &p.display().to_string())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| io(e, "stdout"))
        }
    }
}

/// Runs the command; `Ok(false)` means output was written but a check failed.
fn run(cli: &Cli) -> Result<bool, CliError> {
    let order = QuadratureOrder::from_points(cli.order)?;
    let config = cli.config.as_deref();
    let tables = match &cli.command {
        Command::Rate => commands::rate(config, order)?,
        Command::Alpha => commands::alpha(config, order)?,
        Command::Pip { times, alpha, f_count } => {
            commands::pip(&commands::PipArgs { times: times.clone(), alphas: alpha.clone(), f_count: *f_count })?
        }
        Command::Redundancy { range, alpha, delta } => {
            let alpha = commands::resolve_alpha(*alpha, config, order)?;
            commands::redundancy(&range.range()?, alpha, *delta)?
        }
        Command::Oracle { cap, fragment_photons, trials } => {
            let args = commands::OracleArgs { seed: cli.seed, cap: *cap, fragment_photons: *fragment_photons, trials: *trials };
            let report = commands::oracle(&args, order)?;
            for c in report.checks.iter().filter(|c| !c.passed) {
                log::error!("check {} failed: {} (value {}, threshold {})", c.name, c.detail, c.value, c.threshold);
            }
            let text = match cli.format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report).map_err(|e| CliError::Other(e.to_string()))?;
                    s.push('\n');
                    s
                }
                Format::Csv => render(&[commands::oracle_table(&report)], Format::Csv),
            };
            emit(&text, cli.out.as_deref())?;
            return Ok(report.all_passed());
        }
        Command::Sweep { axis, range, t, f, alpha, delta, theta0, chi, mu, m } => {
            let fixed = commands::Fixed {
                t: *t,
                f: *f,
                alpha: *alpha,
                delta: *delta,
                theta0_deg: *theta0,
                chi_deg: *chi,
                mu: *mu,
                m: *m,
            };
            let range = range.range()?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cli.jobs.unwrap_or(0))
                .build()
                .map_err(|e| CliError::config("jobs", e.to_string()))?;
            pool.install(|| commands::sweep(*axis, &range, &fixed, order, config))?
        }
    };
    emit(&render(&tables, cli.format), cli.out.as_deref())?;
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(Error::ResourceCap { requested: 1e9, cap: 1e6 }).code(), 3);
        let e = CliError::from(Error::Domain { name: "theta0", value: 7.0, domain: "[0, pi]" });
        assert_eq!(e.code(), 2);
        assert!(e.to_string().contains("theta0"));
        assert_eq!(CliError::from(Error::Undefined("x")).code(), 1);
    }
}
