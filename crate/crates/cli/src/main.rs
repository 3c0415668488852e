//! `slipflow` command line: meshing, existence audits, Stokes and
//! Navier-Stokes solves, diagnostics, functional constants and validation.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration or data
//! (including incompatible boundary flux), 3 solver failure.

mod commands;
mod config;
mod expr;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use slipflow::Error;

use commands::{Benchmark, Ctx, Problem, ValidateArgs};

#[derive(Parser)]
#[command(name = "slipflow", version, about = "Slip-boundary Stokes and Navier-Stokes flow on multiply-connected domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory (default: `output.dir` of the config, else `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Single-threaded assembly and no timings in the artifacts, so repeated
    /// runs are byte-identical.
    #[arg(long, global = true)]
    deterministic: bool,
}

#[derive(Clone, Copy, Debug)]
struct Pin(usize, f64);

fn parse_pin(s: &str) -> Result<Pin, String> {
    let (c, v) = s.split_once('=').ok_or("expected COMPONENT=VALUE, e.g. 1=2*pi")?;
    let c = c.trim().parse::<usize>().map_err(|e| format!("component: {e}"))?;
    let v = expr::constant(v.trim(), "pin").map_err(|e| e.to_string())?;
    Ok(Pin(c, v))
}

#[derive(Subcommand)]
enum Command {
    /// Build the mesh and write `.node`, `.ele`, `.bnd` files.
    Mesh {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate the existence conditions and write `audit.json`.
    Audit {
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve and write `solution.vtk`, `boundary.csv`, `solution.json` and `trace.csv`.
    Solve {
        #[arg(value_enum)]
        problem: Problem,
        #[arg(long)]
        config: PathBuf,
        /// Prescribe the circulation on a boundary component, `--pin 1=2*pi`.
        #[arg(long = "pin", value_parser = parse_pin)]
        pins: Vec<Pin>,
    },
    /// Solve, then write vorticity, stream function and head diagnostics.
    Diagnose {
        #[arg(value_enum, default_value = "ns")]
        problem: Problem,
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "pin", value_parser = parse_pin)]
        pins: Vec<Pin>,
    },
    /// Korn and Sobolev constant estimates, written to `constants.json`.
    Korn {
        #[arg(long)]
        config: PathBuf,
    },
    /// Convergence study against an exact solution on annulus meshes.
    Validate {
        #[arg(value_enum)]
        benchmark: Benchmark,
        /// Comma separated `n_radial x n_angular` levels.
        #[arg(long, default_value = "8x16,16x32,32x64")]
        levels: String,
        /// Swirl parameter of the Hamel family.
        #[arg(long, default_value_t = 0.0)]
        k: f64,
        /// Keep the convective term (Couette and manufactured benchmarks).
        #[arg(long)]
        convective: bool,
        /// Seed of the oracle sampling (default: `seed` of the config, else 0).
        #[arg(long)]
        seed: Option<u64>,
        /// Optional run configuration; only its `solver` block and `seed` are
        /// used. Hamel pins are replaced by the branch selected with `--k`.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 1,
        e if e.is_data_error() => 2,
        _ => 3,
    }
}

fn out_dir(cli_out: &Option<PathBuf>, setup: Option<&commands::Setup>) -> PathBuf {
    cli_out
        .clone()
        .or_else(|| setup.and_then(|s| s.loaded.config.output.dir.as_ref().map(|d| s.loaded.base.join(d))))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn run(cli: Cli) -> slipflow::Result<()> {
    if cli.deterministic {
        slipflow::parallel::set_sequential(true);
    }
    let pins = |p: &[Pin]| p.iter().map(|p| (p.0, p.1)).collect::<Vec<_>>();
    let with_setup = |config: &PathBuf, p: &[Pin]| -> slipflow::Result<(Ctx, commands::Setup)> {
        let s = commands::setup(config, &pins(p))?;
        let mut hashed = s.loaded.raw.clone();
        // pins given on the command line change the run, so they enter the hash
        for p in p {
            hashed.extend_from_slice(format!("\npin {}={:?}", p.0, p.1).as_bytes());
        }
        let ctx = Ctx::new(out_dir(&cli.out, Some(&s)), &hashed, cli.deterministic)?;
        Ok((ctx, s))
    };
    match &cli.command {
        Command::Mesh { config } => {
            let (ctx, s) = with_setup(config, &[])?;
            commands::cmd_mesh(&ctx, &s)
        }
        Command::Audit { config } => {
            let (ctx, s) = with_setup(config, &[])?;
            commands::cmd_audit(&ctx, &s).map(|_| ())
        }
        Command::Solve { problem, config, pins } => {
            let (ctx, s) = with_setup(config, pins)?;
            commands::cmd_solve(&ctx, &s, *problem)
        }
        Command::Diagnose { problem, config, pins } => {
            let (ctx, s) = with_setup(config, pins)?;
            commands::cmd_diagnose(&ctx, &s, *problem)
        }
        Command::Korn { config } => {
            let (ctx, s) = with_setup(config, &[])?;
            commands::cmd_korn(&ctx, &s)
        }
        Command::Validate { benchmark, levels, k, convective, seed, config } => {
            let (solver, config_seed, mut hashed) = match config {
                Some(c) => {
                    let l = config::load(c)?;
                    l.config.solver.validate()?;
                    (l.config.solver, l.config.seed, l.raw)
                }
                None => (Default::default(), 0, Vec::new()),
            };
            let seed = seed.unwrap_or(config_seed);
            hashed.extend_from_slice(format!("\nvalidate {benchmark:?} levels={levels} k={k:?} convective={convective} seed={seed}").as_bytes());
            let ctx = Ctx::new(out_dir(&cli.out, None), &hashed, cli.deterministic)?;
            let args = ValidateArgs { benchmark: *benchmark, levels: commands::parse_levels(levels)?, k: *k, convective: *convective, seed, solver };
            commands::cmd_validate(&ctx, &args)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
