mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use phasezeros::Error;

use args::Cli;

/// 1 for bad input, 2 for numerical failure.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(
            Error::NoConvergence { .. }
            | Error::SingularJacobian { .. }
            | Error::SpuriousRoot { .. }
            | Error::ContourDegenerate { .. }
            | Error::UnresolvedCluster { .. }
            | Error::Resolution { .. }
            | Error::NotConvex { .. }
            | Error::NearSingular { .. },
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {} workers: {e}", cli.workers);
            return ExitCode::from(1);
        }
    };
    match pool.install(|| commands::run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
