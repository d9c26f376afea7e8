use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hypquake::error::Result;
use hypquake::harness::output::write_file;
use hypquake::harness::{exit_code, run, Command, CommandOutput, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "hypquake", version, about = "Seeded verification suites for earthquakes, inverse earthquakes and de Sitter duality")]
struct Cli {
    /// Run configuration (JSON, "schema_version": 1).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for the JSON summary and CSV tables.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    slack: Option<f64>,
    #[arg(long = "budget-radius", global = true)]
    budget_radius: Option<usize>,
    /// Comma-separated t grid.
    #[arg(long, global = true, value_delimiter = ',', num_args = 1)]
    grid: Option<Vec<f64>>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build holonomy from Fenchel-Nielsen coordinates and validate it.
    Surface,
    /// Length-estimate certificates along earthquakes on random configurations.
    VerifyLemma {
        /// Predict the slope with the wrong sign; the suite must then fail.
        #[arg(long)]
        wrong_sign: bool,
        #[arg(long)]
        configs: Option<usize>,
    },
    /// Convergence of the rescaled inverse earthquake as K tends to -1.
    Ukmap {
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Length-minimizing metric for a weighted sum of curves.
    Project,
    /// Plane/point duality dictionary and the equidistant curvature relation.
    Duality {
        #[arg(long)]
        pairs: Option<usize>,
    },
}

fn execute(cli: &Cli) -> Result<CommandOutput> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        seed: cli.seed,
        slack: cli.slack,
        budget_radius: cli.budget_radius,
        grid: cli.grid.clone(),
        wrong_sign: matches!(cli.command, Cmd::VerifyLemma { wrong_sign: true, .. }),
    });
    let command = match &cli.command {
        Cmd::Surface => Command::Surface,
        Cmd::VerifyLemma { configs, .. } => {
            if let Some(n) = configs {
                cfg.lemma.configs = *n;
            }
            Command::VerifyLemma
        }
        Cmd::Ukmap { pairs } => {
            if let Some(n) = pairs {
                cfg.ukmap.pairs = *n;
            }
            Command::Ukmap
        }
        Cmd::Project => Command::Project,
        Cmd::Duality { pairs } => {
            if let Some(n) = pairs {
                cfg.duality.pairs = *n;
            }
            Command::Duality
        }
    };
    let out = run(command, &cfg)?;
    if let Some(dir) = &cli.out {
        for (name, contents) in &out.files {
            write_file(dir, name, contents)?;
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            print!("{}", out.summary);
            ExitCode::from(out.outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
