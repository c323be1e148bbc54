use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use qmemsim::scenario::{list_scenarios, run, RunOptions, ScenarioError};

/// Run quantum-memory scenarios and write plot-ready artifacts.
#[derive(Parser)]
#[command(name = "qmemsim", version)]
struct Cli {
    /// List the bundled scenarios and exit.
    #[arg(long)]
    list: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file, or a bundled scenario by name.
    Run {
        config: PathBuf,
        /// Output directory (default: the scenario's `output`, else out/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Parse and validate only; write nothing.
        #[arg(long)]
        validate_only: bool,
        /// Multiply every grid density, for convergence studies.
        #[arg(long, default_value_t = 1.0)]
        grid_scale: f64,
        /// Fail with exit code 4 on numeric-regime warnings.
        #[arg(long)]
        strict: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        for e in list_scenarios() {
            println!("{:<26} {:<36} {}", e.name, e.figure, e.description);
        }
        return ExitCode::SUCCESS;
    }
    let Some(Command::Run { config, out, validate_only, grid_scale, strict }) = cli.command else {
        eprintln!("nothing to do: pass `run <config>` or `--list`");
        return ExitCode::from(ScenarioError::VALIDATION as u8);
    };
    let opts = RunOptions { out, validate_only, grid_scale, strict };
    match run(&config, &opts) {
        Ok(summary) => {
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            match summary.out_dir {
                Some(dir) => println!("{}: artifacts in {}", summary.scenario, dir.display()),
                None => println!("{}: valid", summary.scenario),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
