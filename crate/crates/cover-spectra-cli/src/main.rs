mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Invalid("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Invalid(format!("thread pool: {e}")))?;
    }
    let (name, report) = match &cli.command {
        Command::Generate(a) => ("generate", commands::generate(a)?),
        Command::Spectrum(a) => ("spectrum", commands::spectrum(a)?),
        Command::Nonalon(a) => ("nonalon", commands::nonalon(a)?),
        Command::Tangles(a) => ("tangles", commands::tangles(a)?),
        Command::TraceScan(a) => ("trace-scan", commands::trace_scan_cmd(a)?),
        Command::Expect(a) => ("expect", commands::expect(a)?),
        Command::Shannon(a) => ("shannon", commands::shannon(a)?),
        Command::Bounds(a) => ("bounds", commands::bounds(a)?),
        Command::IharaCheck(a) => ("ihara-check", commands::ihara(a)?),
    };
    let t = &report.table;
    let body = if t.columns.is_empty() {
        // raw text, e.g. a graph file
        t.rows.iter().map(|r| r.join("\n") + "\n").collect()
    } else if report.markdown {
        t.to_markdown()
    } else {
        t.to_tsv()
    };
    output::emit(cli.out.as_deref(), name, report.config, report.summary, &t.columns, &body)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
