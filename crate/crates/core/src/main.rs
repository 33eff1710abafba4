use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use beambound::backtrack::BoundKind;
use beambound::harness::{run_backtrack, run_bounds, run_mc, run_sweep, GridDeg, RunConfig};
use beambound::Error;

/// Guaranteed beampattern bounds under bounded element errors.
#[derive(Debug, Parser)]
#[command(name = "beambound", version)]
struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Cumulative representation tolerance in dB (overrides the config).
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol_db: Option<f64>,
    /// Angle grid `start:step:stop` in degrees (overrides the config).
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Upper and lower power bounds over the grid.
    Bounds,
    /// Error realization attaining a bound at one angle.
    Backtrack {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value = "upper")]
        bound: BoundKind,
    },
    /// Worst-case PSLL against nominal Chebyshev sidelobe level.
    Sweep {
        /// Comma-separated sidelobe levels in dB; defaults to the config.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        sll: Vec<f64>,
    },
    /// Monte Carlo containment check.
    Mc {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

const EXIT_VIOLATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CONSISTENCY: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Consistency(_) => EXIT_CONSISTENCY,
        _ => EXIT_CONFIG,
    }
}

fn load(cli: &Cli) -> Result<RunConfig, Error> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("--config is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(t) = cli.tol_db {
        cfg.run.tol_db = t;
    }
    if let Some(g) = &cli.grid {
        cfg.run.grid = g.parse::<GridDeg>()?;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let cfg = load(cli)?;
    let out = Some(cli.out.as_path());
    match &cli.cmd {
        Cmd::Bounds => {
            let r = run_bounds(&cfg, out)?;
            println!("{}", serde_json::to_string_pretty(&r.summary)?);
        }
        Cmd::Backtrack { theta, bound } => {
            let r = run_backtrack(&cfg, *theta, *bound, out)?;
            println!("{}", serde_json::to_string_pretty(&r.summary)?);
        }
        Cmd::Sweep { sll } => {
            let list = if sll.is_empty() { cfg.run.sweep_sll_db.clone() } else { sll.clone() };
            if list.is_empty() {
                return Err(Error::Config("no sidelobe levels given (--sll or run.sweep_sll_db)".into()));
            }
            for row in run_sweep(&cfg, &list, out)? {
                println!(
                    "{:>7.1} dB: nominal {:>8.3} exact {:>8.3} approx {:>8.3}",
                    row.sll_db, row.nominal_psll_db, row.exact_psll_db, row.approx_psll_db
                );
            }
        }
        Cmd::Mc { n, seed } => {
            let report = run_mc(&cfg, n.unwrap_or(cfg.run.n_monte_carlo), seed.unwrap_or(cfg.run.seed), out)?;
            println!("draws {} violations {}", report.n, report.violations);
            if report.violations > 0 {
                return Ok(EXIT_VIOLATION);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
