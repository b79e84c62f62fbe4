use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use entbase::protocol::raw_probabilities;
use entbase_cli::{cmd_run, cmd_sweep, validate, CliError};

const THREADS_VAR: &str = "ENTBASE_THREADS";

#[derive(Parser)]
#[command(name = "entbase", version, about = "Entanglement-assisted interferometry simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Observe the configured sky and reconstruct its intensity.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config's `output`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a gnuplot script next to the CSVs.
        #[arg(long)]
        gnuplot: bool,
    },
    /// Evaluate rates (and optionally estimator RMSE) over parameter values.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        gnuplot: bool,
    },
    /// Run the invariant suite.
    Validate {
        /// Skip Monte Carlo checks.
        #[arg(long)]
        fast: bool,
    },
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::config(THREADS_VAR, format!("must be a positive integer, got `{v}`")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Output(format!("cannot start thread pool: {e}")))
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let pool = thread_pool()?;
    pool.install(|| match cli.command {
        Command::Run { config, out, gnuplot } => {
            let dir = cmd_run(&config, out.as_deref(), gnuplot)?;
            println!("wrote {}", dir.display());
            Ok(true)
        }
        Command::Sweep { config, param, values, out, gnuplot } => {
            let dir = cmd_sweep(&config, &param, &values, out.as_deref(), gnuplot)?;
            println!("wrote {}", dir.join(entbase_cli::output::SWEEP_CSV).display());
            Ok(true)
        }
        Command::Validate { fast } => {
            let stdout = std::io::stdout();
            validate::run_validation(fast, raw_probabilities, &mut stdout.lock())
                .map_err(|e| CliError::Output(e.to_string()))
        }
    })
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
