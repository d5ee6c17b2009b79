use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use choquard_lattice::app::{self, RunConfig, CONFIG_KEYS};

#[derive(Parser)]
#[command(name = "choquard", version, about = "Ground states of the lattice fractional p-Laplacian Choquard equation", after_help = CONFIG_KEYS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Overrides solver.seed and verify.seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Write the per-iteration trace (solve).
    #[arg(long, global = true)]
    trace: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Build or load the Green's function table and print K_alpha, decay slope and refinement delta.
    Green,
    /// Compute and certify a ground state; writes report.toml, field.csv and optionally trace.jsonl.
    Solve,
    /// Run the property suite; writes verify.toml.
    Verify,
    /// Time direct and FFT convolution and energy evaluation across box sizes.
    Bench,
}

fn run(cli: &Cli) -> choquard_lattice::Result<u8> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| choquard_lattice::Error::Validation("--config <path> is required".into()))?;
    let mut config = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.override_seed(seed);
    }
    config.io.trace |= cli.trace;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(choquard_lattice::Error::Validation("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| choquard_lattice::Error::Validation(format!("thread pool: {e}")))?;
    }
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Green => app::run_green(&config, &mut out),
        Command::Solve => app::run_solve(&config, &mut out),
        Command::Verify => app::run_verify(&config, &mut out),
        Command::Bench => app::run_bench(&config, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(app::exit_code(&e))
        }
    }
}
