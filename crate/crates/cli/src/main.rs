mod args;
mod commands;
mod model_file;
mod settings;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use settings::{Invalid, Settings};

/// Exit status for an error: 1 when caused by input, 2 otherwise.
fn exit_status(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<Invalid>().is_some() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<polcomp_core::Error>() {
            return if e.is_input_error() { 1 } else { 2 };
        }
        if let Some(e) = cause.downcast_ref::<polcomp_service::ServiceError>() {
            return match e {
                polcomp_service::ServiceError::Core(c) if !c.is_input_error() => 2,
                _ => 1,
            };
        }
    }
    2
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = Settings::load(cli.config.as_deref())?;
    if let Some(threads) = cfg.opt(cli.threads, "threads")? {
        if threads == 0 {
            return Err(settings::invalid("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    match cli.command {
        Command::Extract(a) => commands::extract(a, &cfg),
        Command::Tuples(a) => commands::tuples(a, &cfg),
        Command::ScoreBws(a) => commands::score_bws(a, &cfg),
        Command::Agreement(a) => commands::agreement(a),
        Command::MinePatterns(a) => commands::mine_patterns(a, &cfg),
        Command::Eval(a) => commands::eval(a, &cfg),
        Command::Train(a) => commands::train(a, &cfg),
        Command::Predict(a) => commands::predict(a),
        Command::Serve(a) => commands::serve(a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_status(&e))
        }
    }
}
