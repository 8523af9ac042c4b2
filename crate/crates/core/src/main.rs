use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nfdof::experiment::{run_eig, run_spectrum, run_sweep, ExperimentConfig, RunError};

#[derive(Parser)]
#[command(name = "nfdof", version, about = "Near-field line-of-sight DoF experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue spectrum, dominant count and closed-form prediction.
    Eig(RunArgs),
    /// Scaled spectrum g̃(ξ) and its measured bandwidth.
    Spectrum(RunArgs),
    /// Prediction and dominant count over a parameter sweep.
    Sweep(RunArgs),
    /// Check a config without running it.
    Validate { config: PathBuf },
}

#[derive(clap::Args)]
struct RunArgs {
    config: PathBuf,
    /// Output directory; overrides `outputs` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), RunError> {
    let (args, runner): (RunArgs, fn(&ExperimentConfig, &std::path::Path) -> _) = match cli.command {
        Command::Validate { config } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            println!("ok {}", cfg.hash());
            return Ok(());
        }
        Command::Eig(a) => (a, run_eig),
        Command::Spectrum(a) => (a, run_spectrum),
        Command::Sweep(a) => (a, run_sweep),
    };
    let cfg = ExperimentConfig::from_path(&args.config)?;
    let out = args.out.unwrap_or_else(|| cfg.outputs.clone());
    let bundle = runner(&cfg, &out)?;
    for f in &bundle.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
