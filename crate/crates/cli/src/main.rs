//! `infersched`: schedule inference jobs between on-device models and an edge server.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 infeasible result.

mod commands;
mod config;
mod overrides;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use infersched::sim::SweepAxis;
use infersched::Scheme;

use commands::SweepRequest;
use config::{parse_scheme_list, RunConfig};
use overrides::ParamOverrides;

const EXIT_CONFIG: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "infersched", version, about = "Selective offloading of inference jobs under time and energy budgets")]
struct Cli {
    /// Run configuration JSON.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for simulation cells.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Schedule one slot and print the assignment.
    Solve(SolveArgs),
    /// Run the slot loop for several schemes.
    Simulate(SimulateArgs),
    /// Count model assignments while one budget varies.
    Sweep(SweepArgs),
    /// Write a sizes file and a catalog template.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, default_value = "lgsto")]
    scheme: Scheme,
    /// Instance JSON with `jobs` and optional `catalog`, `channel`, `constraints`.
    /// Without it the first slot of the configured workload is used.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[command(flatten)]
    overrides: ParamOverrides,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Comma-separated scheme names.
    #[arg(long)]
    schemes: Option<String>,
    #[arg(long)]
    slots: Option<usize>,
    #[command(flatten)]
    overrides: ParamOverrides,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    axis: SweepAxis,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    step: f64,
    /// Energy budget held fixed on the time axis.
    #[arg(long)]
    fixed_energy: Option<f64>,
    /// Time budget held fixed on the energy axis.
    #[arg(long)]
    fixed_time: Option<f64>,
    #[arg(long, default_value = "lgsto")]
    scheme: Scheme,
    #[arg(long)]
    slots: Option<usize>,
    #[command(flatten)]
    overrides: ParamOverrides,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Number of sizes; defaults to the workload's job count.
    #[arg(long)]
    count: Option<usize>,
}

fn base_config(cli: &Cli) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    if let Some(threads) = cli.threads {
        config.threads = threads;
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<bool> {
    let mut config = base_config(&cli)?;
    match cli.command {
        Command::Solve(args) => {
            args.overrides.apply(&mut config.params, &[args.scheme]);
            config.validate()?;
            commands::solve(&config, args.scheme, args.instance.as_deref())
        }
        Command::Simulate(args) => {
            if let Some(list) = &args.schemes {
                config.schemes = parse_scheme_list(list)?;
            }
            if let Some(slots) = args.slots {
                config.slots = slots;
            }
            args.overrides.apply(&mut config.params, &config.schemes);
            config.validate()?;
            commands::simulate(&config)
        }
        Command::Sweep(args) => {
            if let Some(slots) = args.slots {
                config.slots = slots;
            }
            args.overrides.apply(&mut config.params, &[args.scheme]);
            config.validate()?;
            let fixed = match args.axis {
                SweepAxis::Time => {
                    if args.fixed_time.is_some() {
                        bail!("--fixed-time does not apply to the time axis");
                    }
                    args.fixed_energy.unwrap_or(config.constraints.energy_budget)
                }
                SweepAxis::Energy => {
                    if args.fixed_energy.is_some() {
                        bail!("--fixed-energy does not apply to the energy axis");
                    }
                    args.fixed_time.unwrap_or(config.constraints.time_budget_ms)
                }
            };
            let req = SweepRequest {
                axis: args.axis,
                from: args.from,
                to: args.to,
                step: args.step,
                fixed,
                scheme: args.scheme,
            };
            commands::sweep(&config, &req)
        }
        Command::Gen(args) => {
            config.validate()?;
            commands::gen(&config, args.count)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("INFERSCHED_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_INFEASIBLE),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
