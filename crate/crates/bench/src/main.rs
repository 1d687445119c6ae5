use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dpscd_bench::{run_suite, BenchError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "bench", about = "Privacy-utility benchmarks for DP-SCD and baselines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tune and run every configured algorithm, then write the CSV reports.
    Run {
        /// Flat `key = value` experiment file.
        #[arg(long)]
        config: PathBuf,
        /// Base seed for data generation, splitting and runs.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Comma-separated algorithm names, e.g. `sdca,dpscd`.
        #[arg(long)]
        algorithms: Option<String>,
        /// Comma-separated privacy levels, e.g. `0.1,1`.
        #[arg(long)]
        epsilons: Option<String>,
    },
}

fn run(cli: Cli) -> Result<(), BenchError> {
    let Command::Run {
        config,
        seed,
        out_dir,
        algorithms,
        epsilons,
    } = cli.command;
    let mut cfg = ExperimentConfig::load(&config)?;
    if let Some(seed) = seed {
        cfg.set("seed", &seed.to_string())?;
    }
    if let Some(dir) = out_dir {
        cfg.out_dir = dir;
    }
    if let Some(a) = algorithms {
        cfg.set("algorithms", &a)?;
    }
    if let Some(e) = epsilons {
        cfg.set("epsilons", &e)?;
    }
    let out = run_suite(&cfg)?;
    for path in [&out.tradeoff, &out.convergence, &out.lc_sweep] {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
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
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
