use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use lastjump_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let text = report.render(cli.global.format);
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Failed(e.to_string())),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    if !report.ok {
        eprintln!("{}: verification failed", report.command);
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
