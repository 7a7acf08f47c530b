use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hallsync_core::cli::{configure_threads, run, CliOptions};
use hallsync_core::io::config::Mode;

#[derive(Parser)]
#[command(name = "hallsync", version, about = "Hall-MHD twin synchronization experiments")]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// Run configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides `out_dir` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Single worker thread.
    #[arg(long, global = true)]
    serial: bool,

    /// Number of worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Single solution with energy and wavenumber diagnostics.
    Simulate,
    /// Hall-MHD twin experiment.
    Twin,
    /// EMHD twin experiment.
    EmhdTwin,
    /// Littlewood-Paley identity and inequality checks.
    LpCheck,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let Some(config) = args.config else {
        eprintln!("error: --config <path> is required");
        return ExitCode::from(2);
    };
    let mode = match args.command {
        Command::Simulate => Mode::Simulate,
        Command::Twin => Mode::Twin,
        Command::EmhdTwin => Mode::EmhdTwin,
        Command::LpCheck => Mode::LpCheck,
    };
    let opts = CliOptions {
        mode,
        config,
        out: args.out,
        serial: args.serial,
        threads: args.threads,
    };
    let result = configure_threads(opts.serial, opts.threads).and_then(|_| run(&opts));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
