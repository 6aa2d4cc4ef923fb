use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dilatation_lab::{run, RunOptions};

#[derive(Parser)]
#[command(name = "dilatation-lab", version, about = "Numerical experiments on dilatation structures")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment config and write its CSV report.
    Run {
        config: PathBuf,
        /// Write the report here instead of the config's `output` or stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// No verdict line on stderr.
        #[arg(long)]
        quiet: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("DILATATION_LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // an already-initialized pool is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let Cmd::Run { config, out, seed, quiet } = cli.command;
    let code = run(&RunOptions { config, out, seed, quiet });
    ExitCode::from(code as u8)
}
