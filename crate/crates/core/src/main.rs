use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use sepcrit::cli::{error_json, run, Cli};
use sepcrit::Error;

fn input_error(err: &Error) -> ExitCode {
    eprintln!("{}", error_json(err));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = Error::MalformedInput {
                location: "arguments".into(),
                message: e.render().to_string().trim().to_string(),
            };
            return input_error(&err);
        }
    };
    let outcome = match run(&cli.command) {
        Ok(o) => o,
        Err(e) => return input_error(&e),
    };
    let mut text = outcome.render(cli.pretty);
    if !text.ends_with('\n') {
        text.push('\n');
    }
    let written = match &cli.output {
        Some(path) => fs::write(path, &text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let err = Error::MalformedInput {
            location: cli
                .output
                .as_ref()
                .map_or("stdout".into(), |p| p.display().to_string()),
            message: e.to_string(),
        };
        return input_error(&err);
    }
    ExitCode::from(outcome.exit_code())
}
