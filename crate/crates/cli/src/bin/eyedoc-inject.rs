//! Stamps the overlay script tag into every HTML page of a documentation tree,
//! or restores the tree from its backups.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eyedoc_core::inject::{inject, restore, InjectOptions, InjectReport, Profile};

#[derive(Parser)]
#[command(name = "eyedoc-inject", version, about, subcommand_negates_reqs = true, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Root of the generated documentation
    #[arg(long, required = true)]
    root: Option<PathBuf>,
    /// URL the pages load the overlay script from
    #[arg(long, required = true)]
    script_url: Option<String>,
    /// Base URL of the gaze service
    #[arg(long, required = true)]
    service_url: Option<String>,
    #[arg(long, default_value = "javadoc")]
    profile: Profile,
    /// Report what would change without writing
    #[arg(long)]
    dry_run: bool,
    /// Keep `<file>.eyedoc.bak` copies for `restore`
    #[arg(long)]
    backup: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Put every backed-up page back and remove the backups
    Restore {
        #[arg(long)]
        root: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Some(Command::Restore { root }) => restore(&root),
        None => {
            let opts = InjectOptions {
                script_url: cli.script_url.unwrap(),
                service_url: cli.service_url.unwrap(),
                profile: cli.profile,
                dry_run: cli.dry_run,
                backup: cli.backup,
            };
            inject(&cli.root.unwrap(), &opts)
        }
    };
    match result {
        Ok(report) => finish(&report),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn finish(report: &InjectReport) -> ExitCode {
    println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
    if report.failed > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
