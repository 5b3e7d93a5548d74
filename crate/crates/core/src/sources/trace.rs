//! JSON Lines gaze traces and paced replay.

use std::fs;
use std::path::Path;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::pipeline::GazeSample;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace line {line}: {message}")]
    TraceParseError { line: usize, message: String },
    #[error("trace line {line}: timestamp does not increase")]
    TraceNonMonotonic { line: usize },
    #[error("cannot read trace: {0}")]
    Io(#[from] std::io::Error),
}

/// Parses a trace; `#` lines and blank lines are skipped. Line numbers are 1-based.
pub fn parse_trace<T>(text: &str) -> Result<Vec<GazeSample<T>>, TraceError>
where
    T: Scalar + DeserializeOwned,
{
    let mut out: Vec<GazeSample<T>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let sample: GazeSample<T> = serde_json::from_str(trimmed)
            .map_err(|e| TraceError::TraceParseError { line, message: e.to_string() })?;
        if out.last().is_some_and(|prev| sample.t_ms <= prev.t_ms) {
            return Err(TraceError::TraceNonMonotonic { line });
        }
        out.push(sample);
    }
    Ok(out)
}

pub fn read_trace<T>(path: impl AsRef<Path>) -> Result<Vec<GazeSample<T>>, TraceError>
where
    T: Scalar + DeserializeOwned,
{
    parse_trace(&fs::read_to_string(path)?)
}

/// One line per sample, each terminated by `\n`.
pub fn write_trace<T: Scalar + Serialize>(samples: &[GazeSample<T>]) -> String {
    let mut out = String::new();
    for s in samples {
        out.push_str(&serde_json::to_string(s).expect("gaze samples serialise"));
        out.push('\n');
    }
    out
}

/// Real-time delay before a sample `dt_ms` after its predecessor; `None` when
/// `speed` is 0 (as fast as possible).
pub fn pacing_delay(dt_ms: u64, speed: f64) -> Option<Duration> {
    (speed > 0.0).then(|| Duration::from_secs_f64(dt_ms as f64 / 1000.0 / speed))
}

/// Trace replay. Timestamps always come from the file; `speed` only changes pacing.
#[derive(Debug, Clone)]
pub struct Replay<T> {
    samples: Vec<GazeSample<T>>,
    speed: f64,
    next: usize,
}

pub fn open_replay<T>(path: impl AsRef<Path>, speed: f64) -> Result<Replay<T>, TraceError>
where
    T: Scalar + DeserializeOwned,
{
    Ok(Replay::new(read_trace(path)?, speed))
}

impl<T: Scalar> Replay<T> {
    pub fn new(samples: Vec<GazeSample<T>>, speed: f64) -> Self {
        Self { samples, speed: speed.max(0.0), next: 0 }
    }

    pub fn samples(&self) -> &[GazeSample<T>] {
        &self.samples
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn into_samples(self) -> Vec<GazeSample<T>> {
        self.samples
    }
}

/// Blocking iteration: sleeps between samples unless `speed` is 0.
impl<T: Scalar> Iterator for Replay<T> {
    type Item = GazeSample<T>;

    fn next(&mut self) -> Option<Self::Item> {
        let s = *self.samples.get(self.next)?;
        if self.next > 0 {
            let prev = self.samples[self.next - 1].t_ms;
            if let Some(d) = pacing_delay(s.t_ms - prev, self.speed) {
                std::thread::sleep(d);
            }
        }
        self.next += 1;
        Some(s)
    }
}
