//! `lhvlab`: reproduce the constant-integral counterexample, verify LHV models,
//! extract noncommutativity witnesses and search CHSH settings.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lhvlab_core::chsh::StatePreset;
use lhvlab_core::operator::Axis;

use commands::{CommandError, DecompositionSource};
use config::{CommonArgs, RunConfig, SEED_ENV};

#[derive(Debug, Parser)]
#[command(
    name = "lhvlab",
    version,
    about = "Local hidden-variable models for separable two-qubit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep alpha over [0, 1] and integrate i[σx,σy] ⊗ i[σx,σy] against the U(alpha, 1-alpha) model
    #[command(name = "reproduce-eq5")]
    ReproduceEq5(ReproduceArgs),
    /// Check reproduction, measure and response validity of LHV models
    Verify(VerifyArgs),
    /// Noncommutativity witness event of the U(alpha, 1-alpha) model
    Witness(WitnessArgs),
    /// Maximize the CHSH value of a preset state
    Chsh(ChshArgs),
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    #[arg(long, default_value_t = 101)]
    alpha_steps: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// `random` or a path to a JSON model file
    #[arg(long = "decomposition", default_value = "random")]
    source: DecompositionSource,
    /// Random models to build; for a model file, rounds of probe pairs
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Random Hermitian probe pairs per round
    #[arg(long, default_value_t = 100)]
    probes: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct WitnessArgs {
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Operator pair at site 1, as two Pauli axes
    #[arg(long, default_value = "x,y", value_parser = parse_axis_pair)]
    site1: (Axis, Axis),
    /// Operator pair at site 2, as two Pauli axes
    #[arg(long, default_value = "x,y", value_parser = parse_axis_pair)]
    site2: (Axis, Axis),
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct ChshArgs {
    /// `u:<alpha>`, `singlet` or `mixed`
    #[arg(long, default_value = "singlet", value_parser = parse_state)]
    state: StatePreset,
    #[arg(long, default_value_t = 24)]
    grid_steps: usize,
    #[arg(long, default_value_t = 50)]
    refine_iters: usize,
    /// Search directions on the whole Bloch sphere instead of the x-z plane
    #[arg(long)]
    full_sphere: bool,
    /// Also write the planar grid scan as CSV to this path
    #[arg(long)]
    scan: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

fn parse_axis_pair(s: &str) -> Result<(Axis, Axis), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two axes like 'x,y', got '{s}'"))?;
    Ok((
        a.parse().map_err(|e| format!("{e}"))?,
        b.parse().map_err(|e| format!("{e}"))?,
    ))
}

fn parse_state(s: &str) -> Result<StatePreset, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn run(command: Command, env_seed: Option<&str>) -> Result<(RunConfig, commands::Outcome), String> {
    let config_for = |common: &CommonArgs, alpha_steps| RunConfig::from_args(common, alpha_steps, env_seed);
    Ok(match command {
        Command::ReproduceEq5(args) => {
            let config = config_for(&args.common, args.alpha_steps)?;
            let outcome = commands::cmd_reproduce_eq5(&config);
            (config, outcome)
        }
        Command::Verify(args) => {
            let config = config_for(&args.common, 2)?;
            let outcome = commands::cmd_verify(&config, &args.source, args.trials, args.probes);
            (config, outcome)
        }
        Command::Witness(args) => {
            let config = config_for(&args.common, 2)?;
            let outcome = commands::cmd_witness(&config, args.alpha, args.site1, args.site2);
            (config, outcome)
        }
        Command::Chsh(args) => {
            let config = config_for(&args.common, 2)?;
            let outcome = commands::cmd_chsh(
                &config,
                args.state,
                args.grid_steps,
                args.refine_iters,
                args.full_sphere,
                args.scan.as_deref(),
            );
            (config, outcome)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env_seed = std::env::var(SEED_ENV).ok();
    let (config, outcome) = match run(cli.command, env_seed.as_deref()) {
        Ok(v) => v,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };
    let (body, code) = match outcome {
        Ok(report) => (report.body, 0),
        Err(CommandError::Usage(message)) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
        Err(CommandError::Failed { body, message }) => {
            eprintln!("verification failed: {message}");
            (body, 1)
        }
    };
    if let Err(e) = output::emit(&body, config.output_path.as_deref()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
