mod args;
mod backends;
mod commands;
mod context;
mod error;
mod inputs;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use context::Context;
use error::{CliError, CliResult};

fn run(cli: &Cli) -> CliResult {
    let ctx = Context::resolve(&cli.global)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.jobs)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {} workers: {e}", ctx.jobs)))?;
    pool.install(|| match &cli.command {
        Command::GcfBuild(a) => commands::gcf::run(a, &ctx),
        Command::Rewrite(a) => commands::rewrite::run(a, &ctx),
        Command::Assemble(a) => commands::assemble::run(a, &ctx),
        Command::Evaluate(a) => commands::evaluate::run(a, &ctx),
        Command::ServeAnnotation(a) => commands::serve::annotation(a, &ctx),
        Command::ServeBaselines(a) => commands::serve::baselines(a, &ctx),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
