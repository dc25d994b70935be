mod args;
mod report;
mod run;
mod table;

use std::io::Write as _;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format, Output};
use run::{CliError, CliResult};

const EXIT_INVALID: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;

fn emit(text: &str, output: &Output) -> CliResult<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(CliError::Io),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(CliError::Io)
        }
    }
}

fn render<T: serde::Serialize>(value: &T, csv: impl FnOnce() -> String, output: &Output) -> String {
    match output.format {
        Format::Json => serde_json::to_string_pretty(value).expect("reports serialize") + "\n",
        Format::Csv => csv(),
    }
}

fn execute(cli: Cli) -> CliResult<bool> {
    let (report, output) = match &cli.command {
        Command::Table(a) => {
            let t = table::table(a)?;
            emit(&render(&t, || t.to_csv(), &a.output), &a.output)?;
            return Ok(false);
        }
        Command::Search(a) => (run::search(a)?, &a.output),
        Command::Amplify(a) => (run::amplify(a)?, &a.output),
        Command::Derandomize(a) => (run::derandomize(a)?, &a.output),
        Command::Estimate(a) => (run::estimate(a)?, &a.output),
        Command::Count(a) => (run::count_cmd(a)?, &a.output),
        Command::ApproxCount(a) => (run::approx_count_cmd(a)?, &a.output),
        Command::ExactCount(a) => (run::exact_count_cmd(a)?, &a.output),
        Command::Decide(a) => (run::decide(a)?, &a.output),
        Command::Heuristic(a) => (run::heuristic(a)?, &a.output),
    };
    emit(
        &render(&report, || report.to_csv(output.timing), output),
        output,
    )?;
    Ok(report.all_exhausted())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("qamp: every trial exhausted its query budget");
            ExitCode::from(EXIT_EXHAUSTED)
        }
        Err(e) => {
            eprintln!("qamp: {e}");
            ExitCode::from(match e {
                CliError::Invalid(_) => EXIT_INVALID,
                CliError::Io(_) => 1,
            })
        }
    }
}
