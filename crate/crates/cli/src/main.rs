use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hwm_cli::{run, Command, RunConfig};

/// Rational soliton solutions of the half-wave maps equation.
#[derive(Parser)]
#[command(name = "hwm", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a datum against every constraint and print the residuals.
    Validate(RunArgs),
    /// Sample m(t, x) on a time by space grid.
    Evolve(RunArgs),
    /// Poles and spins at each time of the grid.
    Poles(RunArgs),
    /// Traces of powers of the Lax matrix and their drift over the time grid.
    Conserved(RunArgs),
    /// Compare the explicit solution with an RK4 integration of the pole dynamics.
    OracleCompare(RunArgs),
    /// Write a valid datum file.
    SolitonGen(GenArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Datum file (TOML).
    input: PathBuf,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    t1: f64,
    #[arg(long, default_value_t = 11)]
    nt: usize,
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    xmin: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    xmax: f64,
    #[arg(long, default_value_t = 201)]
    nx: usize,
    /// Oracle step size.
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    /// Override the constraint and algebra tolerances.
    #[arg(long)]
    tol: Option<f64>,
    /// Run even if the datum fails validation.
    #[arg(long)]
    force: bool,
    /// Largest power k in Tr L^k (default 2N).
    #[arg(long)]
    kmax: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Number of poles; N >= 2 uses a seeded search.
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config(cmd: Cmd) -> (RunConfig, Option<PathBuf>) {
    let (command, args) = match cmd {
        Cmd::Validate(a) => (Command::Validate, a),
        Cmd::Evolve(a) => (Command::Evolve, a),
        Cmd::Poles(a) => (Command::Poles, a),
        Cmd::Conserved(a) => (Command::Conserved, a),
        Cmd::OracleCompare(a) => (Command::OracleCompare, a),
        Cmd::SolitonGen(g) => {
            let mut cfg = RunConfig::new(Command::SolitonGen);
            cfg.n = g.n;
            cfg.seed = g.seed;
            return (cfg, g.out);
        }
    };
    let cfg = RunConfig {
        input: Some(args.input),
        t0: args.t0,
        t1: args.t1,
        nt: args.nt,
        xmin: args.xmin,
        xmax: args.xmax,
        nx: args.nx,
        h: args.h,
        tol: args.tol,
        force: args.force,
        kmax: args.kmax,
        ..RunConfig::new(command)
    };
    (cfg, args.out)
}

fn main() -> ExitCode {
    let (cfg, out) = config(Cli::parse().command);
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("hwm: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let written = match out {
        Some(path) => std::fs::write(&path, &outcome.text),
        None => std::io::stdout().lock().write_all(outcome.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("hwm: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.code as u8)
}
