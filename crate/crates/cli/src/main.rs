mod args;
mod commands;
mod error;
mod model;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Cmd};
use error::CliError;
use output::{config_value, emit, Meta};

fn run(cli: Cli) -> Result<(), CliError> {
    let name = cli.cmd.name();
    let (table, common, config, hbar) = match &cli.cmd {
        Cmd::Exponent(a) => (commands::exponent(a)?, &a.common, config_value(a), a.model.hbar),
        Cmd::Evolve(a) => (commands::evolve(a)?, &a.common, config_value(a), a.model.hbar),
        Cmd::Transition(a) => (commands::transition(a)?, &a.common, config_value(a), a.model.hbar),
        Cmd::Montecarlo(a) => (commands::montecarlo(a)?, &a.common, config_value(a), a.model.hbar),
        Cmd::Visibility(a) => (commands::visibility_over_time(a)?, &a.common, config_value(a), a.model.hbar),
    };
    let meta = Meta {
        command: name,
        config,
        units: commands::units(hbar),
    };
    emit(common.out.as_deref(), common.format, &meta, &table)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let result = args::expand_config(argv).and_then(|argv| {
        // clap prints usage and exits with status 2 on malformed arguments
        let cli = Cli::parse_from(argv);
        run(cli)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('\\', "\\\\").replace('"', "\\\"");
            eprintln!("error kind={} message=\"{message}\"", e.kind());
            ExitCode::from(2)
        }
    }
}
