use clap::{Parser, Subcommand};
use lightray_cli::commands::{cmd_forward, cmd_phantom, cmd_reconstruct, cmd_slice, cmd_verify};
use lightray_cli::config::RunConfig;
use lightray_cli::suites::Suite;
use lightray_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lightray", version, about = "Momentum light ray transform toolkit")]
struct Cli {
    /// JSON run config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads (default: LIGHTRAY_THREADS, then logical cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override a config field, e.g. --set recon.zeta_count=10.
    #[arg(long = "set", value_name = "K=V", global = true)]
    sets: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate and normalize the configured phantom.
    Phantom,
    /// Export ray transform data as CSV.
    Forward,
    /// Run an identity suite: algebra, transform, slice or recon-geometry.
    Verify { suite: Suite },
    /// Fourier slice values at sampled frequencies.
    Slice,
    /// Recover the Fourier transform of a rank 1, 2 or 3 phantom.
    Reconstruct {
        #[arg(long, default_value_t = 1)]
        rank: usize,
    },
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("LIGHTRAY_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("LIGHTRAY_THREADS={v:?} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(n) = threads(cli.threads)? {
        if n == 0 {
            return Err(CliError::Usage("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let base = match cli.command {
        Command::Reconstruct { rank } => RunConfig::for_rank(rank),
        _ => RunConfig::default(),
    };
    let cfg = RunConfig::load(base, cli.config.as_deref(), &cli.sets, cli.seed)?;
    match cli.command {
        Command::Phantom => cmd_phantom(&cfg, &cli.out).map(|_| true),
        Command::Forward => cmd_forward(&cfg, &cli.out).map(|_| true),
        Command::Verify { suite } => cmd_verify(&cfg, suite, &cli.out),
        Command::Slice => cmd_slice(&cfg, &cli.out).map(|_| true),
        Command::Reconstruct { rank } => cmd_reconstruct(&cfg, rank, &cli.out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
