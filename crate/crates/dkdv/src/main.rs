use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dkdv::config::{parse_config_file, Command, Flags, RunConfig, OUTPUT_DIR_ENV};
use dkdv::{run, RunError};

#[derive(Parser)]
#[command(name = "dkdv", version, about = "Singularity patterns and degree growth for discrete KdV")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Classify the singularity pattern of u_k = 0 for φ_q
    Analyze(Flags),
    /// Characteristic polynomial and largest root from the express method
    Express(Flags),
    /// Diophantine estimate of the dynamical degree
    Dyndeg(Flags),
    /// Exact degree sequence by rational interpolation
    Degrees(Flags),
    /// Evolve a staircase on the lattice and render the pattern
    Lattice(Flags),
    /// Run another command over a range of q
    Sweep(Flags),
}

fn config(cli: Cli) -> Result<RunConfig, RunError> {
    let (command, flags) = match cli.command {
        Sub::Analyze(f) => (Command::Analyze, f),
        Sub::Express(f) => (Command::Express, f),
        Sub::Dyndeg(f) => (Command::Dyndeg, f),
        Sub::Degrees(f) => (Command::Degrees, f),
        Sub::Lattice(f) => (Command::Lattice, f),
        Sub::Sweep(f) => (Command::Sweep, f),
    };
    let file = match &flags.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| RunError::Io {
                path: p.display().to_string(),
                source,
            })?;
            parse_config_file(&text)?
        }
        None => Default::default(),
    };
    Ok(RunConfig::new(command, file, flags.to_map())?)
}

fn write(path: &PathBuf, text: &str) -> Result<(), RunError> {
    let io = |source| RunError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, text).map_err(io)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(cli).and_then(|cfg| {
        let out = run(&cfg)?;
        let env_dir = std::env::var(OUTPUT_DIR_ENV).ok();
        match cfg.output_path(env_dir.as_deref()) {
            Some(p) => {
                write(&p, &out.text())?;
                eprintln!("wrote {}", p.display());
            }
            None => print!("{}", out.text()),
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                RunError::Config(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
