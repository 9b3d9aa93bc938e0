mod args;
mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use manrec::RngSeed;

use args::{Cli, Command};
use commands::Context;
use config::{merge, FileConfig};
use error::CliError;

fn run(cli: Cli) -> Result<String, CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    if let Some(n) = cli.threads.or(file.threads) {
        if n == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::compute(format!("thread pool: {e}")))?;
    }
    let ctx = Context {
        out: cli
            .out
            .or(file.out.clone())
            .unwrap_or_else(|| PathBuf::from(".")),
        seed: RngSeed(cli.seed.or(file.seed).unwrap_or(0)),
    };
    commands::ensure_dir(&ctx.out)?;
    let name = cli.command.name();
    match cli.command {
        Command::Sample(a) => commands::sample(&ctx, merge(&a, &file, name)?),
        Command::FitKmeans(a) => commands::fit_kmeans(&ctx, merge(&a, &file, name)?),
        Command::FitKflats(a) => commands::fit_kflats(&ctx, merge(&a, &file, name)?),
        Command::Bounds(a) => commands::bounds(&ctx, merge(&a, &file, name)?),
        Command::Example1(a) => commands::example1(&ctx, merge(&a, &file, name)?),
        Command::Tradeoff(a) => commands::tradeoff(&ctx, merge(&a, &file, name)?),
        Command::Rates(a) => commands::rates(&ctx, merge(&a, &file, name)?),
        Command::SelectK(a) => commands::select_k_cmd(&ctx, merge(&a, &file, name)?),
        Command::OracleCheck(a) => commands::oracle_check(&ctx, merge(&a, &file, name)?),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on malformed arguments.
    let cli = Cli::parse();
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
