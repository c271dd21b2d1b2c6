//! `pseudoarc`: batch pipelines over the workbench library.
//!
//! Every command writes its artifacts, a `manifest.json` with their hashes
//! and verdicts, and a separate `timing.json` into `--out`.
//! Exit status is 0 on success, 1 when a verification came out negative
//! and 2 on error.

mod cmd;
mod parse;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use run::{Outcome, Run};

#[derive(Parser, Debug)]
#[command(name = "pseudoarc", version, about = "Crooked towers, odometer Cantor sets and entropy realization")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output directory.
    #[arg(long, global = true, default_value = "pseudoarc-out")]
    pub out: PathBuf,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Print a JSON summary instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Crooked inverse-limit towers.
    #[command(subcommand)]
    Tower(cmd::tower::TowerCmd),
    /// Certify a PL map crooked at a given eps.
    CheckCrooked(cmd::tower::CheckCrooked),
    /// The Cantor set K in the 2-adic odometer.
    #[command(subcommand)]
    Odometer(cmd::odometer::OdometerCmd),
    /// Rectangle families and the A-conditions.
    #[command(subcommand)]
    Rees(cmd::rees::ReesCmd),
    /// Lap, SFT and product-model entropy.
    #[command(subcommand)]
    Entropy(cmd::entropy::EntropyCmd),
    /// K, families, SFT, skew model and entropy check in one run.
    FullDemo(cmd::demo::FullDemo),
    /// Render chain covers as SVG or entropy tables as CSV.
    #[command(subcommand)]
    Export(cmd::export::ExportCmd),
}

impl Command {
    fn name(&self) -> String {
        match self {
            Command::Tower(c) => format!("tower {}", c.name()),
            Command::CheckCrooked(_) => "check-crooked".into(),
            Command::Odometer(c) => format!("odometer {}", c.name()),
            Command::Rees(c) => format!("rees {}", c.name()),
            Command::Entropy(c) => format!("entropy {}", c.name()),
            Command::FullDemo(_) => "full-demo".into(),
            Command::Export(c) => format!("export {}", c.name()),
        }
    }

    fn config(&self) -> serde_json::Value {
        match self {
            Command::Tower(c) => c.config(),
            Command::CheckCrooked(c) => c.config(),
            Command::Odometer(c) => c.config(),
            Command::Rees(c) => c.config(),
            Command::Entropy(c) => c.config(),
            Command::FullDemo(c) => c.config(),
            Command::Export(c) => c.config(),
        }
    }

    fn execute(&self, run: &mut Run, g: &Global) -> anyhow::Result<()> {
        match self {
            Command::Tower(c) => c.run(run),
            Command::CheckCrooked(c) => c.run(run),
            Command::Odometer(c) => c.run(run),
            Command::Rees(c) => c.run(run),
            Command::Entropy(c) => c.run(run),
            Command::FullDemo(c) => c.run(run, g.seed),
            Command::Export(c) => c.run(run),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut config = cli.command.config();
    config["seed"] = json!(cli.global.seed);
    let mut run = match Run::new(&cli.global.out, &cli.command.name(), config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match cli.command.execute(&mut run, &cli.global) {
        Ok(()) => match run.finish(cli.global.json) {
            Ok(Outcome::Success) => ExitCode::SUCCESS,
            Ok(Outcome::Negative) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            run.abandon(&e);
            ExitCode::from(2)
        }
    }
}
