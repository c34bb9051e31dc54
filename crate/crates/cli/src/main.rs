use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use horseshoe_thermo_cli as cli;

#[derive(Parser)]
#[command(name = "horseshoe-thermo", about = "Horseshoe thermodynamics experiment runner")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an experiment described by a JSON config file.
    Run {
        /// Path to the JSON config.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's RNG seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's worker thread count.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the available experiment names, one per line.
    ListExperiments,
}

fn main() -> ExitCode {
    match Args::parse().cmd {
        Cmd::ListExperiments => {
            for e in cli::Experiment::ALL {
                println!("{e}");
            }
            ExitCode::SUCCESS
        }
        Cmd::Run { config, out, seed, threads } => {
            let result = cli::load_config(&config).and_then(|mut cfg| {
                if let Some(out) = out {
                    cfg.output_dir = out;
                }
                if let Some(seed) = seed {
                    cfg.seed = seed;
                }
                if let Some(threads) = threads {
                    cfg.threads = threads;
                }
                cli::run(&cfg)
            });
            match &result {
                Ok(cli::Outcome::Success) => eprintln!("ok"),
                Ok(cli::Outcome::Inconclusive) => eprintln!("inconclusive"),
                Err(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(cli::exit_code(&result))
        }
    }
}
