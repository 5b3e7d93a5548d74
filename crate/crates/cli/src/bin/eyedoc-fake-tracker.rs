//! Serves a recorded trace over the tracker adapter protocol, for running the
//! service without hardware.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use eyedoc_core::sources::read_trace;
use eyedoc_core::sources::tracker::{encode_frame, FakeTracker, FakeTrackerScript};
use eyedoc_core::GazeSample;

#[derive(Parser)]
#[command(name = "eyedoc-fake-tracker", version, about)]
struct Cli {
    #[arg(long, default_value = "127.0.0.1:6555")]
    bind: String,
    /// Trace to stream (JSONL, one sample per line)
    #[arg(long)]
    trace: PathBuf,
    /// Delay between frames
    #[arg(long, default_value_t = 16)]
    interval_ms: u64,
    /// Serve this many client connections, each getting the whole trace
    #[arg(long, default_value_t = 1)]
    connections: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let samples: Vec<GazeSample> = match read_trace(&cli.trace) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let frames: Vec<String> = samples.iter().map(encode_frame).collect();
    let script = FakeTrackerScript {
        connections: vec![frames; cli.connections.max(1)],
        line_interval: Duration::from_millis(cli.interval_ms),
        hold_open: false,
    };
    match FakeTracker::spawn_on(&cli.bind, script) {
        Ok(tracker) => {
            eprintln!("serving {} frames on {}", samples.len(), tracker.endpoint());
            tracker.join();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: cannot bind {}: {e}", cli.bind);
            ExitCode::from(2)
        }
    }
}
