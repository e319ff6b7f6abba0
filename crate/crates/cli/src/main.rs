use clap::Parser;
use qca_cli::{run, CliError, Command, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Weyl and Dirac automata on the BCC lattice: derivation, checks, spectra and dynamics.
#[derive(Debug, Parser)]
#[command(name = "qca", version)]
struct Args {
    command: Command,
    /// JSON run configuration; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for CSV artifacts and the JSON report.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn load(args: &Args) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(t) = args.tol {
        cfg.tol = Some(t);
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.output {
        cfg.output_path = o.clone();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { 2 } else { 0 };
            return ExitCode::from(code);
        }
    };
    let outcome = load(&args).and_then(|cfg| run(args.command, &cfg));
    match outcome {
        Ok(report) => {
            print!("{report}");
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("qca {}: {e}", args.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
