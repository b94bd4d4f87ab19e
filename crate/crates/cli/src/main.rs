//! Batch experiment driver for deterministic identification over linear
//! Gaussian channels.

mod codebook_io;
mod commands;
mod config;
mod csvout;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{cmd_bounds, cmd_construct, cmd_simulate, cmd_sweep, cmd_verify, CmdError, Ctx};
use config::ExperimentConfig;

#[derive(Parser)]
#[command(
    name = "digauss",
    version,
    about = "Rate-reliability analysis of deterministic identification codes over linear Gaussian channels"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: config's out_dir, else the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (affects speed only, never results).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate converse and achievability bounds over the configured grid.
    Bounds(Common),
    /// Build codebooks via the distance-decoding construction.
    Construct(Common),
    /// Estimate both identification error probabilities of a stored codebook.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Codebook file produced by `construct`.
        #[arg(long)]
        codebook: PathBuf,
    },
    /// Full pipeline per grid cell: bounds, construction, simulation, plots.
    Sweep(Common),
    /// Run the oracle suite and print a pass/fail table.
    Verify(Common),
}

impl Cmd {
    fn common(&self) -> &Common {
        match self {
            Cmd::Bounds(c) | Cmd::Construct(c) | Cmd::Sweep(c) | Cmd::Verify(c) => c,
            Cmd::Simulate { common, .. } => common,
        }
    }
}

fn build_ctx(common: &Common) -> Result<Ctx, CmdError> {
    let cfg = ExperimentConfig::load(&common.config).map_err(CmdError::from)?;
    let out_dir = common
        .out
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CmdError::Config(format!("creating {}: {e}", out_dir.display())))?;
    let master_seed = common.seed.unwrap_or(cfg.seed);
    Ok(Ctx {
        cfg,
        out_dir,
        master_seed,
    })
}

fn run(cli: &Cli) -> Result<(), CmdError> {
    let common = cli.cmd.common();
    if let Some(threads) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CmdError::Config(format!("thread pool: {e}")))?;
    }
    let ctx = build_ctx(common)?;
    match &cli.cmd {
        Cmd::Bounds(_) => cmd_bounds(&ctx),
        Cmd::Construct(_) => cmd_construct(&ctx),
        Cmd::Simulate { codebook, .. } => cmd_simulate(&ctx, codebook),
        Cmd::Sweep(_) => cmd_sweep(&ctx),
        Cmd::Verify(_) => cmd_verify(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
