use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod error;
mod report;
mod selftest;

use args::Cli;
use error::CliError;

fn init_threads(jobs: usize) {
    #[cfg(feature = "parallel")]
    if jobs > 0 {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    init_threads(cli.global.jobs);
    if cli.global.selftest {
        let dir = cli
            .global
            .golden_dir
            .clone()
            .unwrap_or_else(selftest::default_dir);
        return selftest::run(cli.command.name(), &dir, cli.global.bless);
    }
    let (cfg, report) = commands::execute(&cli.global, &cli.command)?;
    let text = report.render(&cfg)?;
    report::emit(&text, cli.global.output.as_deref())?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("expsmooth: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
