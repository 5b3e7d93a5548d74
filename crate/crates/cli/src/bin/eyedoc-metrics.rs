//! Computes the session report from an exported event log.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use eyedoc_core::{compute_metrics, export_report, ReportFormat};

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "eyedoc-metrics", version, about)]
struct Cli {
    /// Event log export (JSONL)
    #[arg(long)]
    log: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.log) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.log.display());
            return ExitCode::from(2);
        }
    };
    let format = match cli.format {
        Format::Json => ReportFormat::Json,
        Format::Csv => ReportFormat::Csv,
    };
    match compute_metrics(&text).and_then(|r| export_report(&r, format)) {
        Ok(doc) => {
            print!("{doc}");
            if !doc.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
