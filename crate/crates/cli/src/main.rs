//! `riemopt` command-line driver.

mod error;
mod eval;
mod manifest;
mod regret;
mod train;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::{CliError, CliResult};
use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(
    name = "riemopt",
    version,
    about = "Riemannian adaptive optimization on product manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train Poincaré embeddings of a taxonomy.
    Train(train::TrainArgs),
    /// Compute reconstruction and link-prediction MAP of a checkpoint.
    Eval(eval::EvalArgs),
    /// Measure regret on a random online problem and check a bound.
    Regret(regret::RegretArgs),
    /// Rerun the command recorded in a manifest.
    Replay {
        manifest: PathBuf,
        /// Write outputs here instead of the recorded directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn replay(path: &Path, out: Option<PathBuf>) -> CliResult<()> {
    let m = RunManifest::read(path)?;
    m.verify_inputs()?;
    let mut args = m.args.clone();
    if let Some(out) = out {
        args["out"] = serde_json::to_value(out)?;
    }
    match m.command.as_str() {
        "train" => train::run(&serde_json::from_value(args)?),
        "eval" => eval::run(&serde_json::from_value(args)?),
        "regret" => regret::run(&serde_json::from_value(args)?),
        other => Err(CliError::Data(format!(
            "unknown command `{other}` in manifest"
        ))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(a) => train::run(a),
        Command::Eval(a) => eval::run(a),
        Command::Regret(a) => regret::run(a),
        Command::Replay { manifest, out } => replay(manifest, out.clone()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
