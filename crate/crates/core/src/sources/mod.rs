//! Interchangeable gaze sample origins.

pub mod scenario;
pub mod trace;
pub mod tracker;

use serde::{Deserialize, Serialize};

pub use scenario::{generate_scenario, InvalidSpec, ScenarioSpec, Segment, SegmentKind};
pub use trace::{open_replay, pacing_delay, parse_trace, read_trace, write_trace, Replay, TraceError};
pub use tracker::{
    decode_frame, encode_frame, FakeTracker, FakeTrackerScript, FrameError, TrackerClient, TrackerError, TrackerOptions,
    TrackerStats,
};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Replay,
    Scenario,
    Tracker,
    Api,
}

impl SourceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceKind::Replay => "replay",
            SourceKind::Scenario => "scenario",
            SourceKind::Tracker => "tracker",
            SourceKind::Api => "api",
        }
    }

    /// Live sources may drop samples under backpressure; recorded ones never do.
    pub fn is_live(self) -> bool {
        matches!(self, SourceKind::Tracker | SourceKind::Api)
    }
}

fn one() -> f64 {
    1.0
}

/// Where a session's samples come from. `speed` is a playback multiplier, 0 = as fast as possible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub enum SourceDescriptor<T> {
    Replay {
        path: String,
        #[serde(default = "one")]
        speed: f64,
    },
    Scenario {
        spec: ScenarioSpec<T>,
        #[serde(default)]
        seed: u64,
        #[serde(default = "one")]
        speed: f64,
    },
    Tracker {
        endpoint: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        retry_budget: Option<u32>,
    },
    Api,
}

impl<T: Scalar> SourceDescriptor<T> {
    pub fn kind(&self) -> SourceKind {
        match self {
            SourceDescriptor::Replay { .. } => SourceKind::Replay,
            SourceDescriptor::Scenario { .. } => SourceKind::Scenario,
            SourceDescriptor::Tracker { .. } => SourceKind::Tracker,
            SourceDescriptor::Api => SourceKind::Api,
        }
    }

    pub fn speed(&self) -> Option<f64> {
        match self {
            SourceDescriptor::Replay { speed, .. } | SourceDescriptor::Scenario { speed, .. } => Some(*speed),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if let Some(speed) = self.speed() {
            if !(speed.is_finite() && speed >= 0.0) {
                return Err("speed must be a non-negative number".into());
            }
        }
        match self {
            SourceDescriptor::Scenario { spec, .. } => spec.validate().map_err(|e| e.to_string()),
            SourceDescriptor::Tracker { endpoint, .. } if endpoint.is_empty() => Err("tracker endpoint is empty".into()),
            SourceDescriptor::Replay { path, .. } if path.is_empty() => Err("replay path is empty".into()),
            _ => Ok(()),
        }
    }

    pub fn tracker_options(&self) -> Option<TrackerOptions> {
        match self {
            SourceDescriptor::Tracker { endpoint, retry_budget } => {
                let mut o = TrackerOptions::new(endpoint.clone());
                if let Some(b) = retry_budget {
                    o.retry_budget = *b;
                }
                Some(o)
            }
            _ => None,
        }
    }
}
