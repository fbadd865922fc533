//! Command-line front end for the soliton Toffoli gate simulator.
//!
//! Exit codes: 0 success, 1 gate logic failure, 2 configuration or i/o error,
//! 3 numerical failure.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Overrides, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "soliton-toffoli", version, about = "Soliton-scattering Toffoli gate simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve one (controls, target) scenario and write space-time densities.
    Simulate,
    /// Run all eight truth-table rows.
    TruthTable,
    /// Transport coefficients against initial velocity.
    ScanVelocity,
    /// Operational region maps over the (v, u) plane.
    ScanPlane,
    /// Bisect the velocity at which transmission crosses 0.5.
    CriticalVelocity,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration; omitted fields use the headline defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long = "t-final", global = true)]
    t_final: Option<f64>,
    #[arg(long = "grid-points", global = true)]
    grid_points: Option<usize>,
    #[arg(long = "domain-length", global = true)]
    domain_length: Option<f64>,
    #[arg(long, global = true)]
    u: Option<f64>,
    #[arg(long, global = true)]
    v: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    g12: Option<f64>,
    /// Control bits, e.g. `11`.
    #[arg(long, global = true)]
    controls: Option<String>,
    #[arg(long, global = true)]
    target: Option<u8>,
    #[arg(long = "theta-r", global = true)]
    theta_r: Option<f64>,
    #[arg(long = "theta-t", global = true)]
    theta_t: Option<f64>,
    /// Print per-row progress in a fixed order. Does not affect results.
    #[arg(long = "deterministic-order", global = true)]
    deterministic_order: bool,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            workers: self.workers,
            dt: self.dt,
            t_final: self.t_final,
            grid_points: self.grid_points,
            domain_length: self.domain_length,
            u: self.u,
            v: self.v,
            alpha: self.alpha,
            g12: self.g12,
            controls: self.controls.clone(),
            target: self.target,
            theta_r: self.theta_r,
            theta_t: self.theta_t,
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let mut cfg = RunConfig::load(cli.common.config.as_deref())?;
    cfg.apply(&cli.common.overrides());
    let ordered = cli.common.deterministic_order;
    let workers = cfg.workers;
    let job = move || match cli.command {
        Command::Simulate => commands::simulate(&cfg),
        Command::TruthTable => commands::truth_table(&cfg, ordered),
        Command::ScanVelocity => commands::scan_velocity(&cfg),
        Command::ScanPlane => commands::scan_plane(&cfg),
        Command::CriticalVelocity => commands::critical_velocity(&cfg),
    };
    soliton_toffoli::sweep::with_workers(workers, job)?
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
