use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use subcrit::bernstein::{default_entries, CATALOG_NAMES};
use subcrit::config::{Axis, RunConfig};
use subcrit::report::num;
use subcrit::runner::{self, Outcome, RunError};

/// Criticality, Green forms and wave boundedness for subordinated
/// Schrödinger operators on weighted graphs.
#[derive(Parser)]
#[command(name = "subcrit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks listed in a config file.
    Run { config: PathBuf },
    /// Evaluate a cross-product sweep along one axis.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        axis: Axis,
    },
    /// Run the randomized invariant battery.
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Multiplier on the number of random instances.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value = "subcrit-check")]
        output: PathBuf,
    },
    /// List the Bernstein-function catalog.
    Catalog,
}

fn report(out: &Outcome) -> ExitCode {
    for f in &out.files {
        println!("wrote {}", f.display());
    }
    for v in &out.violations {
        eprintln!("violation: {v}");
    }
    ExitCode::from(out.exit_code() as u8)
}

fn fail(e: RunError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run { config } => match RunConfig::from_file(&config).map_err(RunError::from).and_then(|c| runner::run(&c)) {
            Ok(out) => report(&out),
            Err(e) => fail(e),
        },
        Command::Sweep { config, axis } => match RunConfig::from_file(&config).map_err(RunError::from).and_then(|c| runner::sweep(&c, axis)) {
            Ok(out) => report(&out),
            Err(e) => fail(e),
        },
        Command::Check { seed, scale, output } => {
            if !(scale > 0.0) {
                return fail(RunError::Usage(format!("scale must be positive, got {scale}")));
            }
            match runner::check(seed, scale, &output) {
                Ok((results, out)) => {
                    println!("seed: {seed}");
                    for r in &results {
                        println!(
                            "{} {:40} worst={} threshold={} cases={}",
                            if r.passed { "PASS" } else { "FAIL" },
                            r.name,
                            num(r.worst),
                            num(r.threshold),
                            r.cases
                        );
                    }
                    report(&out)
                }
                Err(e) => fail(e),
            }
        }
        Command::Catalog => {
            println!("families: {}", CATALOG_NAMES.join(", "));
            for e in default_entries() {
                println!("{}", e.describe());
            }
            ExitCode::SUCCESS
        }
    }
}
