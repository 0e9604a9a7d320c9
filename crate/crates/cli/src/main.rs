mod config;
mod flow;
mod outcome;
mod pde;
mod shapes;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Mode, RunConfig};
use outcome::{CmdResult, Failure};

fn init_threads() -> CmdResult {
    let Ok(value) = std::env::var("CMSFLOW_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| {
            Failure::usage(format!(
                "CMSFLOW_THREADS must be a positive integer, got '{value}'"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::usage(format!("cannot start {threads} worker threads: {e}")))
}

fn run(cli: Cli) -> CmdResult {
    init_threads()?;
    let config = RunConfig::from_cli(cli).map_err(|e| Failure::usage(e.0))?;
    std::fs::create_dir_all(&config.out).map_err(|e| Failure::io(&config.out, e))?;
    match config.mode {
        Mode::Verify => verify::cmd_verify(&config),
        Mode::Flow => flow::cmd_flow(&config),
        Mode::PdeDemo => pde::cmd_pde_demo(&config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code)
        }
    }
}
