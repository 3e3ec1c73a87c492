use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use qspectra_cli::args::Cli;
use qspectra_cli::suite::tally;
use qspectra_cli::{run, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let code = match run(&cli) {
        Ok(outcome) => {
            let written = match &outcome.output_path {
                Some(path) => std::fs::write(path, &outcome.text).map_err(|e| format!("{}: {e}", path.display())),
                None => std::io::stdout().write_all(outcome.text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if !outcome.reports.is_empty() {
                let (pass, fail, domain) = tally(&outcome.reports);
                eprintln!("{pass} passed, {fail} failed, {domain} outside domain");
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code(cli.global.strict)
        }
    };
    ExitCode::from(code as u8)
}
