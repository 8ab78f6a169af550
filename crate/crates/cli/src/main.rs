use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod bench;
mod family;
mod output;
mod report;
mod run;

#[derive(Parser)]
#[command(
    name = "induced-lab",
    version,
    about = "Lower-bound families, CONGEST runs, two-party protocols and distributed diamond listing",
    after_help = "Exit codes: 0 success, 1 verification failure, 2 usage or input error, 3 work budget exceeded.\n\
                  The brute-force oracles refuse work above INDUCED_WORK_BUDGET (default 1e9 steps)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one family member and write graph.txt, meta.json and inputs.json.
    GenFamily(family::GenArgs),
    /// Check the lower-bound family conditions over many input pairs.
    VerifyFamily(family::VerifyArgs),
    /// Run a node program in the CONGEST simulator.
    RunCongest(run::CongestArgs),
    /// Run a two-party listing protocol over a fixed partition.
    RunProtocol(run::ProtocolArgs),
    /// Decompose a graph and list its induced diamonds in CONGEST.
    RunDiamondListing(run::ListingArgs),
    /// Sweep sizes and seeds and emit CSV rows.
    Bench(bench::BenchArgs),
    /// Summarise JSON reports written by the other subcommands.
    Report {
        /// Report files.
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

/// Raised when a run completed but its checks did not hold.
#[derive(Debug)]
pub struct CheckFailed(pub String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<CheckFailed>().is_some() {
        return 1;
    }
    match err.downcast_ref::<induced_core::Error>() {
        Some(induced_core::Error::Budget { .. }) => 3,
        Some(induced_core::Error::Protocol(_) | induced_core::Error::Internal(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::GenFamily(a) => family::gen(&a),
        Command::VerifyFamily(a) => family::verify(&a),
        Command::RunCongest(a) => run::congest(&a),
        Command::RunProtocol(a) => run::protocol(&a),
        Command::RunDiamondListing(a) => run::listing(&a),
        Command::Bench(a) => bench::bench(&a),
        Command::Report { files } => report::report(&files),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
