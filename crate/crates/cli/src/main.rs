mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn run(cli: &Cli) -> commands::CmdResult {
    let jobs = cli.jobs;
    match &cli.command {
        Command::Ingest(a) => commands::ingest(a, jobs),
        Command::Tokenize(a) => commands::tokenize(a),
        Command::Validate(a) => commands::validate_cmd(a),
        Command::Stats(a) => commands::stats_cmd(a),
        Command::Score(a) => commands::score(a),
        Command::Iaa(a) => commands::iaa(a),
        Command::Confusion(a) => commands::confusion_cmd(a),
        Command::Sublabel(a) => commands::sublabel(a, jobs),
        Command::Pipeline(a) => commands::pipeline(a, jobs),
        Command::Ontology(a) => commands::ontology(a),
    }
}

fn main() -> ExitCode {
    let argv = match config::expand_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
