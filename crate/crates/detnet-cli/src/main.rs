//! Command-line front end: angle sweeps, verification runs, and
//! crossover location. Angles are radians throughout. Exit codes:
//! 0 success, 1 verification failure, 2 invalid configuration,
//! 3 scenario evaluation error, 4 crossover bracket without a sign
//! change.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use detnet::error::DetnetError;
use detnet::oracle;
use detnet::scenarios::{crossover, ScenarioId, ScenarioParams};
use detnet::sweep::{self, fmt_sig15, SweepConfig};

#[derive(Parser)]
#[command(
    name = "detnet",
    version,
    about = "Detector-network state discrimination toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scenario over a theta grid and emit a table
    Sweep(SweepArgs),
    /// Run the verification suite and print one line per check
    Verify(VerifyArgs),
    /// Bisect for the angle where two success curves cross
    Crossover(CrossoverArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ScenarioFlags {
    /// Detector count for n-det-unambiguous
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Prior of the no-fire hypothesis for two-det-min-err
    #[arg(long, default_value_t = 0.5)]
    p0: f64,
    /// Prior of the fire hypothesis for two-det-min-err
    #[arg(long, default_value_t = 0.5)]
    p1: f64,
    /// Inconclusive-element scale on the no-fire sector
    #[arg(long, default_value_t = 0.25)]
    c0: f64,
    /// Inconclusive-element scale on the single-fire sectors
    #[arg(long, default_value_t = 0.25)]
    c1: f64,
    /// Inconclusive-element scale on the double-fire sectors
    #[arg(long, default_value_t = 0.25)]
    c2: f64,
    /// Simplex lattice resolution for overlap-analysis
    #[arg(long, default_value_t = 21)]
    grid_steps: usize,
}

impl ScenarioFlags {
    fn params(&self) -> ScenarioParams {
        ScenarioParams {
            n: self.n,
            p0: self.p0,
            p1: self.p1,
            c0: self.c0,
            c1: self.c1,
            c2: self.c2,
            grid_steps: self.grid_steps,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Scenario id, e.g. n-det-unambiguous
    #[arg(long)]
    scenario: String,
    /// First grid angle (radians)
    #[arg(long)]
    theta_start: f64,
    /// Last grid angle (radians, inclusive)
    #[arg(long)]
    theta_end: f64,
    /// Number of grid points (at least 2)
    #[arg(long)]
    steps: usize,
    #[command(flatten)]
    scenario_flags: ScenarioFlags,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this path instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Evaluate grid points on a single thread
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Override the agreement tolerances (default 1e-9 closed-form,
    /// 1e-8 quartic, exact fixture reproduction)
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct CrossoverArgs {
    /// Left bracket edge (radians)
    #[arg(long)]
    lo: f64,
    /// Right bracket edge (radians)
    #[arg(long)]
    hi: f64,
    /// Bracket half-width to converge to
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Scenario providing the first curve
    #[arg(long, default_value = "grouped-multifire-entangled")]
    first: String,
    /// Scenario providing the second curve
    #[arg(long, default_value = "grouped-multifire-product")]
    second: String,
    #[command(flatten)]
    scenario_flags: ScenarioFlags,
    /// Write to this path instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_BAD_CONFIG: u8 = 2;
const EXIT_SCENARIO_ERROR: u8 = 3;
const EXIT_NO_SIGN_CHANGE: u8 = 4;

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Crossover(args) => cmd_crossover(&args),
    }
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<(), std::io::Error> {
    match output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn cmd_sweep(args: &SweepArgs) -> ExitCode {
    let scenario: ScenarioId = match args.scenario.parse() {
        Ok(id) => id,
        Err(e) => return fail(EXIT_BAD_CONFIG, e),
    };
    let config = SweepConfig {
        scenario,
        theta_start: args.theta_start,
        theta_end: args.theta_end,
        steps: args.steps,
        params: args.scenario_flags.params(),
    };
    if let Err(e) = config.validate() {
        return fail(EXIT_BAD_CONFIG, e);
    }
    let table = if args.sequential {
        sweep::run_sequential(&config)
    } else {
        sweep::run(&config)
    };
    let table = match table {
        Ok(t) => t,
        // Prior validation happens inside the scenario: still a config error.
        Err(e @ DetnetError::BadPriors) => return fail(EXIT_BAD_CONFIG, e),
        Err(e) => return fail(EXIT_SCENARIO_ERROR, e),
    };
    let text = match args.format {
        Format::Csv => table.to_csv(),
        Format::Json => match table.to_json() {
            Ok(t) => t,
            Err(e) => return fail(EXIT_SCENARIO_ERROR, e),
        },
    };
    match emit(args.output.as_ref(), &text) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_BAD_CONFIG, e),
    }
}

fn cmd_verify(args: &VerifyArgs) -> ExitCode {
    if let Some(tol) = args.tol {
        if !tol.is_finite() || tol < 0.0 {
            return fail(EXIT_BAD_CONFIG, "tolerance must be a non-negative number");
        }
    }
    let reports = match oracle::run_all(args.tol) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_VERIFY_FAILED, e),
    };
    println!(
        "{:<42} {:>13} {:>10} {:>10}   result",
        "check", "max_abs_error", "tolerance", "worst_theta"
    );
    let mut all_pass = true;
    for r in &reports {
        let worst = r
            .worst_theta
            .map_or_else(|| "-".to_string(), |t| format!("{t:.4}"));
        println!(
            "{:<42} {:>13.3e} {:>10.1e} {:>10}   {}",
            r.name,
            r.max_abs_error,
            r.tolerance,
            worst,
            if r.pass { "PASS" } else { "FAIL" }
        );
        all_pass &= r.pass;
    }
    println!(
        "{} of {} checks passed",
        reports.iter().filter(|r| r.pass).count(),
        reports.len()
    );
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    }
}

fn cmd_crossover(args: &CrossoverArgs) -> ExitCode {
    let first: ScenarioId = match args.first.parse() {
        Ok(id) => id,
        Err(e) => return fail(EXIT_BAD_CONFIG, e),
    };
    let second: ScenarioId = match args.second.parse() {
        Ok(id) => id,
        Err(e) => return fail(EXIT_BAD_CONFIG, e),
    };
    let params = args.scenario_flags.params();
    let result = match crossover(first, second, args.lo, args.hi, args.tol, &params) {
        Ok(r) => r,
        Err(e @ DetnetError::NoSignChange) => return fail(EXIT_NO_SIGN_CHANGE, e),
        Err(e @ DetnetError::Invalid(_)) => return fail(EXIT_BAD_CONFIG, e),
        Err(e) => return fail(EXIT_SCENARIO_ERROR, e),
    };
    let text = format!(
        "theta_star,bracket_lo,bracket_hi,evaluations\n{},{},{},{}\n",
        fmt_sig15(result.theta_star),
        fmt_sig15(result.bracket_lo),
        fmt_sig15(result.bracket_hi),
        result.evaluations
    );
    match emit(args.output.as_ref(), &text) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_BAD_CONFIG, e),
    }
}
