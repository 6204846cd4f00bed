// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use plme_lab::cli::{self, ConfigFile, Overrides};
use plme_lab::Error;

#[derive(Parser)]
#[command(name = "plme-lab", version, about = "Pseudo-Lindblad master equations for a Rabi-driven qubit under Gaussian noise")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its CSV and JSON outputs.
    Run {
        config: PathBuf,
        /// Ensemble seed; overrides the file.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory; overrides the file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a configuration and print the resolved parameters.
    Validate { config: PathBuf },
    /// List the available scenarios and their parameters.
    Scenarios,
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(cli::exit_code(e) as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match args.command {
        Command::Scenarios => {
            for s in cli::list_scenarios() {
                println!("{}\n    {}", s.name, s.description);
                for (k, v) in s.parameters {
                    println!("    {k:<16} {v}");
                }
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => {
            let file = match ConfigFile::load(&config) {
                Ok(f) => f,
                Err(e) => return fail(&e),
            };
            let report = cli::validate(&file, &Overrides::default());
            println!("{report}");
            if report.errors.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Command::Run { config, seed, threads, out } => {
            if let Some(n) = threads {
                if n == 0 {
                    return fail(&Error::Config(vec!["--threads must be ≥ 1".into()]));
                }
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("warning: thread pool already initialised: {e}");
                }
            }
            let cfg = match ConfigFile::load(&config).and_then(|f| cli::validate(&f, &Overrides { seed, output_dir: out }).into_result()) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            match cli::run(&cfg, None) {
                Ok(r) => {
                    for p in r.csv.iter().chain(std::iter::once(&r.sidecar)) {
                        println!("{}", p.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
    }
}
