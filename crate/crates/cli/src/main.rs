//! `portsolve`: periodic steady states of monotone one-port circuits.
//!
//! Exit codes: 0 success, 1 bad input or configuration, 2 solver failure,
//! 3 no convergence (or a trivial fixed point), 4 monotonicity violation,
//! 5 replay mismatch.

mod manifest;
mod run;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "portsolve",
    version,
    about = "Operator-splitting solver for periodic circuit steady states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a netlist and write `<stem>_out.csv`, `<stem>_residuals.csv`
    /// and `<stem>_manifest.json`.
    Solve(run::SolveArgs),
    /// Van der Pol limit cycles, one `vdp_<mu>.csv` per damping value.
    Vdp(run::VdpArgs),
    /// Sampled monotonicity audit of every element in a netlist.
    Check(run::CheckArgs),
    /// Rerun a manifest and compare against its recorded outputs.
    Replay(run::ReplayArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { run::EXIT_INPUT } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Solve(a) => run::cmd_solve(a),
        Command::Vdp(a) => run::cmd_vdp(a),
        Command::Check(a) => run::cmd_check(a),
        Command::Replay(a) => run::cmd_replay(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
