use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wavestrich::{exit_code, presets_text, resolve_output, run, CliError, ExperimentConfig, OUTPUT_ENV};

#[derive(Parser)]
#[command(name = "wavestrich", version, about = "Numerical experiments on semiclassical parametrices and Strichartz estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment named in a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the environment and the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// List surface and velocity presets.
    Presets,
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Presets => {
            print!("{}", presets_text());
            ExitCode::SUCCESS
        }
        Command::Run { config, out, jobs } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", config.display());
                    return ExitCode::from(2);
                }
            };
            let cfg = match ExperimentConfig::parse(&text) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let dir = resolve_output(out.as_deref(), std::env::var_os(OUTPUT_ENV), cfg.output.as_deref());
            match run(&cfg, &dir, jobs) {
                Ok(report) => {
                    print!("{}", report.to_summary());
                    println!("wrote {}", dir.display());
                    ExitCode::from(exit_code(&report) as u8)
                }
                Err(e) => fail(&e),
            }
        }
    }
}
