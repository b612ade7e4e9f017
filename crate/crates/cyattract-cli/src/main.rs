mod commands;
mod config;
mod error;
mod num;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use config::RunConfig;
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "cyattract", version, about = "Periods, monodromy, attractor flows and zeta factors of hypergeometric Calabi-Yau families")]
pub struct Cli {
    /// TOML (or .json) file with run settings; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Fractional digits in emitted decimal strings.
    #[arg(long, global = true)]
    precision: Option<usize>,
    /// Seed for sampled checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON document here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Accepted for compatibility; output is always JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Include wall-clock timing (breaks byte-identical reruns).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Period vector of a family at a point.
    Periods(PeriodsArgs),
    /// Monodromy matrix around 0, 1 or infinity.
    Monodromy(MonodromyArgs),
    /// Gradient flow of |Z| for one charge.
    Flow(FlowArgs),
    /// Flows for every charge in a box from a grid of starts.
    Scan(ScanArgs),
    /// Weight filtration, LMHS type and boundary residuals.
    Boundary(BoundaryArgs),
    /// K3 x E attractor data for a charge pair.
    K3e(K3eArgs),
    /// Point counts and the split Frobenius quartic of the octic.
    Zeta(ZetaArgs),
    /// Quick invariant suite.
    Selftest,
}

#[derive(Args, Debug)]
pub struct PeriodsArgs {
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// frobenius, symplectic, conifold, tyurin or lcs.
    #[arg(long)]
    pub frame: Option<String>,
    /// Series truncation order.
    #[arg(long)]
    pub order: Option<usize>,
    /// Scale a of a local model.
    #[arg(long, allow_hyphen_values = true)]
    pub scale: Option<String>,
    /// TOML file with phi111, phi011, phi001, phi000 and constant.
    #[arg(long)]
    pub prepotential: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MonodromyArgs {
    #[arg(long)]
    pub family: Option<String>,
    /// 0, 1, inf or all.
    #[arg(long = "loop")]
    pub loop_: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub base: Option<String>,
    #[arg(long)]
    pub transport_tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct FlowArgs {
    /// Family preset (halfs-4) for the global model.
    #[arg(long)]
    pub family: Option<String>,
    /// family, conifold, tyurin or lcs.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub scale: Option<String>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub charge: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<String>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub grad_tol: Option<f64>,
    #[arg(long)]
    pub moment_samples: Option<usize>,
    #[arg(long)]
    pub moment_tol: Option<f64>,
    /// Also write the trajectory as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub prepotential: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub scale: Option<String>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long = "box")]
    pub box_: Option<i64>,
    /// grid:RxC or a ;-separated list of complex points.
    #[arg(long, allow_hyphen_values = true)]
    pub starts: Option<String>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub grad_tol: Option<f64>,
    #[arg(long)]
    pub prepotential: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundaryArgs {
    /// N1, N2 or N3.
    #[arg(long)]
    pub kind: Option<String>,
    /// Generator parameters as fractions: a,b,c,d (N1), a (N2), a,b,d or a 2x2 symmetric a,b,b,d (N3).
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: Option<String>,
    /// JSON Laurent period vector.
    #[arg(long)]
    pub periods: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct K3eArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub pp: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub pq: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub qq: Option<i64>,
}

#[derive(Args, Debug)]
pub struct ZetaArgs {
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub psi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    #[arg(long)]
    pub p: Option<u64>,
    /// Count over F_q with q = p^extension.
    #[arg(long)]
    pub extension: Option<usize>,
    /// jacobi or brute.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub generator_rank: Option<usize>,
    #[arg(long)]
    pub budget: Option<u64>,
}

fn run(cli: &Cli) -> Result<Value, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if cli.precision.is_some() {
        cfg.precision = cli.precision;
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.output.is_some() {
        cfg.output = cli.output.clone();
    }
    let start = Instant::now();
    let (name, result, echo) = commands::dispatch(&cli.command, cfg)?;
    let mut doc = json!({
        "command": name,
        "versions": { "cyattract": env!("CARGO_PKG_VERSION") },
        "config": serde_json::to_value(&echo).expect("plain data"),
        "seed": echo.seed(),
        "result": result,
    });
    if cli.timing {
        doc["timing_ms"] = json!(num::dec(start.elapsed().as_secs_f64() * 1e3, 3));
    }
    Ok(doc)
}

fn emit(cli: &Cli, doc: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(doc).expect("plain data") + "\n";
    let target = cli.output.clone().or_else(|| doc["config"]["output"].as_str().map(PathBuf::from));
    match target {
        Some(path) => std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fail(e: &CliError) -> ExitCode {
    let doc = json!({ "error": { "category": e.category(), "code": e.exit_code(), "message": e.to_string() } });
    eprintln!("{}", serde_json::to_string_pretty(&doc).expect("plain data"));
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.to_string().trim().to_string())),
    };
    match run(&cli).and_then(|doc| {
        emit(&cli, &doc)?;
        match doc["result"]["failed"].as_u64() {
            Some(n) if n > 0 && matches!(cli.command, Command::Selftest) => Err(CliError::SelfTest(n as usize)),
            _ => Ok(()),
        }
    }) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
