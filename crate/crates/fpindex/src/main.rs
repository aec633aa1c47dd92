use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use fpindex::cli::{self, Cli};
use fpindex::json;
use fpindex::CliError;

fn main() -> ExitCode {
    let args = Cli::parse();
    let failure = match cli::run(&args) {
        Ok(report) => {
            let text = json::render(&report.value);
            let written = match &args.out {
                Some(path) => fs::write(path, &text).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
                None => std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::Input(e.to_string())),
            };
            written.err().or(report.failure)
        }
        Err(e) => Some(e),
    };
    match failure {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprint!("{}", json::render(&e.to_json()));
            ExitCode::from(e.code() as u8)
        }
    }
}
