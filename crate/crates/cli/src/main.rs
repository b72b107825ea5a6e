use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use qinterp::cli::Cli;
use qinterp::config::ExperimentConfig;
use qinterp::{execute, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim();
            let line = serde_json::json!({
                "error": "invalid-config",
                "status": 2,
                "message": first.trim_start_matches("error: "),
            });
            eprintln!("{line}");
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let (command, flags) = cli.command.split();
    let mut cfg = match &flags.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.overlay(&flags.to_config(command));
    let settings = cfg.resolve()?;
    if flags.print_config {
        print!("{}", qinterp::output::to_json(&settings.to_config()));
        return Ok(());
    }
    let outcome = execute(&settings)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for path in &outcome.files {
        println!("wrote {}", path.display());
    }
    Ok(())
}
