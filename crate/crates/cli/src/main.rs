use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use eplab_cli::{run, CliError, RunConfig, Subcommand};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Integrate the one-dimensional background.
    Background,
    /// Solve the 2D problem in the velocity-potential formulation.
    SolvePotential,
    /// Solve the 2D problem in the stream-function formulation.
    SolveStream,
    /// Audit convexity of the admissible sets.
    AuditConvexity,
    /// Multistart uniqueness test with energy-identity check.
    UniquenessTest,
    /// Probe coercivity of the linearized energy form.
    CoercivityProbe,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::Background => Subcommand::Background,
            Command::SolvePotential => Subcommand::SolvePotential,
            Command::SolveStream => Subcommand::SolveStream,
            Command::AuditConvexity => Subcommand::AuditConvexity,
            Command::UniquenessTest => Subcommand::UniquenessTest,
            Command::CoercivityProbe => Subcommand::CoercivityProbe,
        }
    }
}

/// Steady subsonic Euler-Poisson nozzle lab.
#[derive(Debug, Parser)]
#[command(name = "eplab", version)]
struct Args {
    command: Command,
    /// key = value configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSVs and the run manifest.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the `seed` key.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = (|| -> Result<_, CliError> {
        let mut cfg = match &args.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        run(args.command.into(), &cfg, &args.out)
    })();
    match result {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            for s in &out.summary {
                println!("{s}");
            }
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
