use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use viewcount_cli::{commands, CliError, Overrides, Result, RunConfig};
use viewcount_game::Scenario;

const UNITS: &str = "Units: time (tau, t) in days; rates (lambda_ps_g, lambda_ps_b, lambda_pu, gamma_th) \
in views/day; viewcounts, pool size and thresholds (alpha, beta) in views. Trend-product and \
side-information thresholds are in views^2/day and views^2 respectively.

Exit codes: 0 success, 1 numeric or verification failure, 2 usage or config error.";

#[derive(Parser)]
#[command(name = "viewcount", version, about = "Threshold game on content viewcounts", after_help = UNITS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Viewcount, its rate and the metric of both qualities over [0, tau] (CSV)
    Trajectory,
    /// Utility U(alpha, beta) over the strategy space (CSV)
    Surface,
    /// Closed-form best response to alpha (JSON)
    BestResponse,
    /// Symmetric equilibrium set (JSON), or the side-information phase table
    /// when the config has a `sweep` (CSV)
    Classify,
    /// Cross-check classify against the grid oracle on random draws
    Verify {
        /// Replace every reported set by a wrong one (negative control)
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Best-response population dynamics and event-level view simulation
    /// (writes a directory)
    Simulate,
}

/// Each flag overrides the config key of the same name.
#[derive(Args)]
struct Flags {
    /// JSON run config
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file (directory for simulate); stdout when absent
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Game variant, e.g. linear_fixed_horizon, side_information
    #[arg(long, global = true, value_name = "NAME", value_parser = parse_scenario)]
    scenario: Option<Scenario>,
    /// Population threshold (views, or the scenario's metric unit)
    #[arg(long, global = true, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Prior probability of good quality; sets belief = (pi_g, 1 - pi_g)
    #[arg(long, global = true, allow_negative_numbers = true)]
    pi_g: Option<f64>,
    /// Uniform thresholds in a surface
    #[arg(long, global = true)]
    n_grid: Option<usize>,
    /// Random draws checked by verify
    #[arg(long, global = true)]
    draws: Option<usize>,
    /// Cross-check classify against the grid oracle
    #[arg(long, global = true)]
    oracle: bool,
}

fn parse_scenario(s: &str) -> std::result::Result<Scenario, String> {
    s.parse().map_err(|e: viewcount_game::Error| e.to_string())
}

fn load(flags: Flags) -> Result<RunConfig> {
    let mut cfg = match &flags.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    cfg.apply(Overrides {
        scenario: flags.scenario,
        out: flags.out,
        seed: flags.seed,
        alpha: flags.alpha,
        pi_g: flags.pi_g,
        n_grid: flags.n_grid,
        draws: flags.draws,
        oracle: flags.oracle,
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, body).map_err(|e| CliError::io(path, e)),
        None => match std::io::stdout().lock().write_all(body.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::io("stdout", e)),
            _ => Ok(()),
        },
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load(cli.flags)?;
    let out = cfg.out.as_deref();
    match cli.command {
        Command::Trajectory => emit(out, &commands::trajectory(&cfg)?),
        Command::Surface => emit(out, &commands::surface(&cfg)?),
        Command::BestResponse => emit(out, &commands::best_response(&cfg)?),
        Command::Classify => emit(out, &commands::classify(&cfg)?),
        Command::Verify { corrupt } => {
            let v = commands::verify(&cfg, corrupt)?;
            emit(out, &v.report)?;
            if v.failed > 0 {
                return Err(CliError::Verification(format!("{} draw(s) failed", v.failed)));
            }
            Ok(())
        }
        Command::Simulate => {
            for path in commands::simulate(&cfg)? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
