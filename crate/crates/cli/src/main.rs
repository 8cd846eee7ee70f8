//! `cvmdi`: single-point rates, distance and monitor-tap sweeps, figure
//! presets and Monte Carlo estimation runs, all emitted as CSV.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical or I/O failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod error;
mod estimate;
mod reproduce;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cvmdi_core::RinModel;

use config::{parse_cases, parse_geometry, parse_pe_mode, RunConfig, Settings};
use error::CliError;
use sweep::{emit, inclusive_grid, render, Evaluator, Point, RinComparison};

#[derive(Parser, Debug)]
#[command(name = "cvmdi", version, about = "Key rates for CV-MDI QKD with source monitoring and RIN-aware calibration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rate at one distance.
    Rate {
        #[command(flatten)]
        common: Common,
        /// Total Alice-Bob distance in km.
        #[arg(long, default_value_t = 10.0)]
        distance: f64,
    },
    /// Rates over a distance grid.
    ScanDistance {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: DistanceGrid,
    },
    /// Rates over monitor tap transmittance and distance.
    ScanEta {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.1)]
        eta_from: f64,
        #[arg(long, default_value_t = 0.9)]
        eta_to: f64,
        #[arg(long, default_value_t = 0.1)]
        eta_step: f64,
        #[command(flatten)]
        grid: DistanceGrid,
    },
    /// Writes the curves of a figure preset (2, 3, 4, 5 or all) into a directory.
    Reproduce {
        figure: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override a config key, e.g. `--set eps_pe=1e-9`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        pe_mode: Option<String>,
        #[arg(long, default_value = "figures")]
        out: PathBuf,
    },
    /// Simulates estimation data and reports estimates and rates.
    Estimate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 18.0)]
        distance: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    /// `untrusted`, `alice`, `bob`, `both`, `all` or a comma-separated list.
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    geometry: Option<String>,
    /// `ideal` or `worst_case`.
    #[arg(long)]
    pe_mode: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Override a config key, e.g. `--set v_rin=0.2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Rate models to emit: `estimated`, `realistic` or both, comma-separated.
    #[arg(long, default_value = "realistic")]
    modes: String,
    #[arg(long, value_enum, default_value_t = RinComparison::Substitution)]
    rin_mode: RinComparison,
    /// Estimation samples per point in sample-level mode.
    #[arg(long, default_value_t = 1_000_000)]
    samples_per_point: u64,
}

#[derive(Args, Debug)]
struct DistanceGrid {
    #[arg(long, default_value_t = 2.0)]
    from: f64,
    #[arg(long, default_value_t = 50.0)]
    to: f64,
    #[arg(long, default_value_t = 0.5)]
    step: f64,
}

fn load(config: Option<&PathBuf>, overrides: &[String]) -> Result<Settings, CliError> {
    let mut settings = match config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    for o in overrides {
        settings.set(o)?;
    }
    Ok(settings)
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = load(self.config.as_ref(), &self.overrides)?.resolve()?;
        if let Some(c) = &self.case {
            cfg.cases = parse_cases(c)?;
        }
        if let Some(g) = &self.geometry {
            cfg.scenario.geometry = parse_geometry(g)?;
        }
        if let Some(p) = &self.pe_mode {
            cfg.scenario.pe_mode = parse_pe_mode(p)?;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }

    fn modes(&self) -> Result<Vec<RinModel>, CliError> {
        self.modes
            .split(',')
            .map(|m| m.trim().parse().map_err(|e: cvmdi_core::Error| CliError::Config(e.to_string())))
            .collect()
    }

    fn evaluator(&self, cfg: &RunConfig) -> Result<Evaluator, CliError> {
        if self.rin_mode == RinComparison::SampleLevel && self.samples_per_point < estimate::MIN_SAMPLES {
            return Err(CliError::Config(format!("--samples-per-point must be at least {}", estimate::MIN_SAMPLES)));
        }
        Ok(Evaluator { comparison: self.rin_mode, samples: self.samples_per_point, seed: cfg.seed })
    }

    /// Points ordered by distance, then case, then mode.
    fn points(&self, cfg: &RunConfig, distances: &[f64], eta_m: Option<f64>) -> Result<Vec<Point>, CliError> {
        let modes = self.modes()?;
        let mut points = Vec::new();
        for &l_ab_km in distances {
            if !(l_ab_km >= 0.0) {
                return Err(CliError::Config(format!("distance must be >= 0, got {l_ab_km}")));
            }
            for &case in &cfg.cases {
                for &mode in &modes {
                    let p = Point { scenario: cfg.scenario, case, l_ab_km, mode };
                    points.push(eta_m.map_or(p, |e| p.with_eta_m(e)));
                }
            }
        }
        Ok(points)
    }
}

impl DistanceGrid {
    fn values(&self) -> Result<Vec<f64>, CliError> {
        inclusive_grid(self.from, self.to, self.step)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Rate { common, distance } => {
            let cfg = common.resolve()?;
            let rows = common.evaluator(&cfg)?.rows(&common.points(&cfg, &[distance], None)?)?;
            emit(&render(&rows), common.out.as_deref())?;
            if let Some(r) = rows.iter().find(|r| r.status == sweep::Status::Skipped) {
                return Err(CliError::Numerical(cvmdi_core::Error::Estimation(format!(
                    "no rate for case {} at {distance} km",
                    r.case
                ))));
            }
            Ok(())
        }
        Command::ScanDistance { common, grid } => {
            let cfg = common.resolve()?;
            let points = common.points(&cfg, &grid.values()?, None)?;
            let rows = common.evaluator(&cfg)?.rows(&points)?;
            emit(&render(&rows), common.out.as_deref())
        }
        Command::ScanEta { common, eta_from, eta_to, eta_step, grid } => {
            let cfg = common.resolve()?;
            let etas = inclusive_grid(eta_from, eta_to, eta_step)?;
            if let Some(bad) = etas.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
                return Err(CliError::Config(format!("eta_m must lie in (0, 1), got {bad}")));
            }
            let distances = grid.values()?;
            let mut points = Vec::new();
            for eta in etas {
                points.extend(common.points(&cfg, &distances, Some(eta))?);
            }
            let rows = common.evaluator(&cfg)?.rows(&points)?;
            emit(&render(&rows), common.out.as_deref())
        }
        Command::Reproduce { figure, config, overrides, pe_mode, out } => {
            let mut cfg = load(config.as_ref(), &overrides)?.resolve()?;
            if let Some(p) = &pe_mode {
                cfg.scenario.pe_mode = parse_pe_mode(p)?;
            }
            let figures = if figure.eq_ignore_ascii_case("all") {
                reproduce::FIGURES.to_vec()
            } else {
                let f = figure
                    .trim_start_matches("fig")
                    .parse()
                    .map_err(|_| CliError::Config(format!("unknown figure `{figure}`")))?;
                vec![f]
            };
            for f in figures {
                let written = reproduce::run(f, &cfg.scenario, &out)?;
                eprintln!("figure {f}: {} files in {}", written.len(), out.display());
            }
            Ok(())
        }
        Command::Estimate { common, distance, samples } => {
            let cfg = common.resolve()?;
            let [case] = cfg.cases[..] else {
                return Err(CliError::Config("estimate runs one case at a time".into()));
            };
            let report = estimate::run(&cfg.scenario, case, distance, samples, cfg.seed)?;
            emit(&report.text, None)?;
            if let Some(path) = &common.out {
                emit(&report.csv, Some(path))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
