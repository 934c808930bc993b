mod cache;
mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Exit status: 0 success, 1 numerical failure, 2 configuration error.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<alphaflow::Error> for CliError {
    fn from(e: alphaflow::Error) -> Self {
        use alphaflow::Error as E;
        match e {
            E::Config(_) | E::Precondition(_) | E::Format(_) => CliError::Config(e.to_string()),
            E::Numerical(_) | E::BlowUp { .. } => CliError::Numerical(e.to_string()),
            E::Io(io) => CliError::Io(io),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "alphaflow", version, about = "Alpha-regularized Navier-Stokes in a slip-walled channel")]
struct Cli {
    /// Cap the number of worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Five-way decomposition check on random fields or a field file.
    HodgeCheck {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Field snapshot to decompose instead of random samples.
        #[arg(long)]
        field: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lowest Stokes eigenvalues as CSV.
    Spectrum {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        modes: usize,
        /// Use the Navier-slip form instead of the vorticity-slip form.
        #[arg(long)]
        nsb: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate one configuration and write the energy ledger and snapshots.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Vanishing-alpha sweep against the alpha = 0 run.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2e-2, 1e-2, 5e-3, 2.5e-3])]
        alphas: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Boundary identity check on flat and spherical patches.
    GdCheck {
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::HodgeCheck { config, field, samples, seed, out } => {
            commands::hodge_check(config.as_deref(), field.as_deref(), samples, seed, &out)
        }
        Command::Spectrum { config, modes, nsb, out } => commands::spectrum(config.as_deref(), modes, nsb, out.as_deref()),
        Command::Simulate { config, out } => commands::simulate(&config, &out),
        Command::Sweep { config, alphas, out } => commands::sweep(&config, &alphas, &out),
        Command::GdCheck { samples, out } => commands::gd_check(samples, out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
