use std::path::PathBuf;
use std::process::ExitCode;

use blindspin_cli::{execute, figures, resolve_cache, CliError, CliResult, ExperimentConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "blindspin", version, about = "Thermal metastability experiments on spin rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON configuration.
    Run {
        config: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Regenerate the data behind a figure.
    Reproduce {
        figure: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
}

fn threads(k: Option<usize>) -> CliResult<()> {
    if let Some(k) = k {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn main_inner(cli: Cli) -> CliResult<Vec<PathBuf>> {
    let (cfg, t, cache) = match cli.command {
        Command::Run { config, threads, cache } => (ExperimentConfig::from_path(&config)?, threads, cache),
        Command::Reproduce { figure, out, threads, cache } => (figures::figure(&figure, &out)?, threads, cache),
    };
    threads(t)?;
    let cache = resolve_cache(cache.as_deref(), &cfg);
    log::info!("running {:?} (config {})", cfg.experiment, &cfg.hash_hex()[..12]);
    execute(cfg, cache)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match main_inner(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
