mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::json;

use commands::{Cli, Failure, Output};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

fn emit(out: &Output, format: Format) -> std::io::Result<()> {
    let mut stdout = std::io::stdout().lock();
    match format {
        Format::Text => writeln!(stdout, "{}", out.text),
        Format::Json => writeln!(stdout, "{}", serde_json::to_string_pretty(&out.json).expect("json")),
    }
}

fn report(f: &Failure) -> ExitCode {
    let body = json!({"error": {"kind": f.kind, "message": f.message}});
    eprintln!("{}", serde_json::to_string(&body).expect("json"));
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return report(&Failure::usage(format!("cannot configure {n} workers: {e}")));
        }
    }
    match commands::run(&cli.command) {
        Ok(out) => {
            if emit(&out, cli.format).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(if out.passed { 0 } else { 1 })
        }
        Err(f) => report(&f),
    }
}
