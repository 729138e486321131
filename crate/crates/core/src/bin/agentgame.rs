use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use agentgame::config::load_config;
use agentgame::run::{run, VERSION};
use agentgame::RunError;

#[derive(Parser)]
#[command(name = "agentgame", about = "Run game-theoretic scenarios from TOML files", version = VERSION)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a scenario, run it and write its CSV outputs.
    Run {
        config: PathBuf,
        /// Output directory; overrides the scenario's `output` field.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Suppress the summary table.
        #[arg(long)]
        quiet: bool,
    },
    /// Load and validate a scenario without running it.
    Validate { config: PathBuf },
    /// Print the tool version.
    Version,
}

fn execute(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Run {
            config,
            out_dir,
            seed,
            quiet,
        } => {
            let mut scenario = load_config(&config)?;
            if let Some(s) = seed {
                scenario.seed = s;
            }
            let report = run(&scenario, out_dir.as_deref())?;
            if !quiet {
                print!("{}", report.render());
            }
        }
        Command::Validate { config } => {
            let scenario = load_config(&config)?;
            println!("{}: ok ({})", config.display(), scenario.kind().as_str());
        }
        Command::Version => println!("agentgame {VERSION}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
