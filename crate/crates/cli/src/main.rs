use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use sideinfo_cli::args::Cli;
use sideinfo_cli::{run, CliError, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED};

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let (command, common) = cli.command.split();
    let spec = common.to_spec(command)?;
    let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let outcome = run(&spec, &timestamp)?;
    let text = outcome.report.render(common.format())?;
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::from(EXIT_OK),
        Ok(false) => {
            eprintln!("sideinfo: verification failed");
            ExitCode::from(EXIT_VERIFY_FAILED)
        }
        Err(e) => {
            eprintln!("sideinfo: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
