//! A session binds one gaze source to a pipeline, an interaction engine and an
//! event log. This is the transport-free core of the gaze service.

pub mod log;

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

pub use log::{export_jsonl, parse_log, EventLog, EventPage, LogEntry, LogError, LogRecord, PAGE_SIZE};

use crate::interaction::{EngineError, InteractionConfig, InteractionEngine, InteractionEvent, ScrollOffset, TargetRegion, TargetRegistry};
use crate::pipeline::{GazeEvent, GazePipeline, GazeSample, PipelineConfig, PipelineError};
use crate::scalar::Scalar;
use crate::sources::{SourceDescriptor, SourceKind};

/// Errors carry the wire code returned to clients.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error("{0}")]
    InvalidConfig(String),
    #[error("{0}")]
    SourceUnavailable(String),
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("since={since} is beyond the latest sequence number {latest}")]
    BadSeq { since: u64, latest: u64 },
    #[error("generation {got} does not follow current generation {current}")]
    GenerationSkew { current: u64, got: u64 },
    #[error("{0}")]
    SchemaError(String),
    #[error("gaze can only be pushed to api sessions; this session uses a {0} source")]
    WrongSourceKind(&'static str),
    #[error("timestamp {got} does not exceed previous timestamp {last}")]
    NonMonotonicTimestamp { last: u64, got: u64 },
}

impl SessionError {
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::InvalidConfig(_) => "InvalidConfig",
            SessionError::SourceUnavailable(_) => "SourceUnavailable",
            SessionError::UnknownSession(_) => "UnknownSession",
            SessionError::BadSeq { .. } => "BadSeq",
            SessionError::GenerationSkew { .. } => "GenerationSkew",
            SessionError::SchemaError(_) => "SchemaError",
            SessionError::WrongSourceKind(_) => "WrongSourceKind",
            SessionError::NonMonotonicTimestamp { .. } => "NonMonotonicTimestamp",
        }
    }
}

impl From<PipelineError> for SessionError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::NonMonotonicTimestamp { last, got } => SessionError::NonMonotonicTimestamp { last, got },
            other => SessionError::InvalidConfig(other.to_string()),
        }
    }
}

impl From<EngineError> for SessionError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::NonMonotonicTimestamp { last, got } => SessionError::NonMonotonicTimestamp { last, got },
            EngineError::GenerationSkew { current, got } => SessionError::GenerationSkew { current, got },
            EngineError::Schema(m) => SessionError::SchemaError(m),
            EngineError::InvalidConfig(m) => SessionError::InvalidConfig(m),
        }
    }
}

impl From<LogError> for SessionError {
    fn from(e: LogError) -> Self {
        match e {
            LogError::BadSeq { since, latest } => SessionError::BadSeq { since, latest },
            other => SessionError::SchemaError(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogOptions {
    /// Log every n-th smoothed point; 0 disables them.
    pub smoothed_stride: u32,
}

impl Default for LogOptions {
    fn default() -> Self {
        Self { smoothed_stride: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct SessionSpec<T> {
    #[serde(default)]
    pub pipeline: PipelineConfig<T>,
    #[serde(default)]
    pub interaction: InteractionConfig<T>,
    pub source: SourceDescriptor<T>,
    #[serde(default)]
    pub log: LogOptions,
}

/// Body of a target registration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct TargetsPayload<T> {
    pub generation: u64,
    #[serde(default)]
    pub scroll: ScrollOffset<T>,
    pub targets: Vec<TargetRegion<T>>,
}

/// 128 random bits, hex encoded.
pub fn new_session_id() -> String {
    let bytes: [u8; 16] = rand::rng().random();
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Session<T> {
    id: String,
    source: SourceDescriptor<T>,
    pipeline: GazePipeline<T>,
    engine: InteractionEngine<T>,
    log: Arc<EventLog>,
    opts: LogOptions,
    smoothed_seen: u64,
    ended: bool,
    gaze_buf: Vec<GazeEvent<T>>,
    interaction_buf: Vec<InteractionEvent>,
}

impl<T: Scalar> Session<T> {
    pub fn new(id: impl Into<String>, spec: SessionSpec<T>) -> Result<Self, SessionError> {
        spec.source.validate().map_err(SessionError::InvalidConfig)?;
        let pipeline = GazePipeline::new(spec.pipeline)?;
        let engine = InteractionEngine::new(spec.interaction)?;
        Ok(Self {
            id: id.into(),
            source: spec.source,
            pipeline,
            engine,
            log: Arc::new(EventLog::new()),
            opts: spec.log,
            smoothed_seen: 0,
            ended: false,
            gaze_buf: Vec::new(),
            interaction_buf: Vec::new(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn source(&self) -> &SourceDescriptor<T> {
        &self.source
    }

    pub fn log(&self) -> &Arc<EventLog> {
        &self.log
    }

    pub fn engine(&self) -> &InteractionEngine<T> {
        &self.engine
    }

    pub fn pipeline(&self) -> &GazePipeline<T> {
        &self.pipeline
    }

    pub fn poll(&self, since: u64) -> Result<EventPage, SessionError> {
        Ok(self.log.poll(since, PAGE_SIZE)?)
    }

    /// Feeds samples through pipeline and engine. The batch is rejected whole
    /// if any timestamp fails to increase.
    pub fn ingest(&mut self, samples: &[GazeSample<T>]) -> Result<usize, SessionError> {
        let mut last = self.pipeline.last_timestamp();
        for s in samples {
            if let Some(l) = last {
                if s.t_ms <= l {
                    return Err(SessionError::NonMonotonicTimestamp { last: l, got: s.t_ms });
                }
            }
            last = Some(s.t_ms);
        }
        for s in samples {
            self.gaze_buf.clear();
            self.pipeline.push_into(*s, &mut self.gaze_buf)?;
            self.dispatch()?;
        }
        Ok(samples.len())
    }

    /// Mouse-as-gaze and other API-pushed samples.
    pub fn push_sim_gaze(&mut self, samples: &[GazeSample<T>]) -> Result<usize, SessionError> {
        let kind = self.source.kind();
        if kind != SourceKind::Api {
            return Err(SessionError::WrongSourceKind(kind.as_str()));
        }
        self.ingest(samples)
    }

    /// Flushes the pipeline and records the end of a finite source. Runs once.
    pub fn end_of_stream(&mut self) -> Result<(), SessionError> {
        if self.ended {
            return Ok(());
        }
        self.ended = true;
        self.gaze_buf = self.pipeline.flush();
        self.dispatch()?;
        let t = self.pipeline.last_timestamp().unwrap_or(0);
        self.log.append(t, LogRecord::SourceEnd);
        Ok(())
    }

    pub fn put_targets(&mut self, payload: TargetsPayload<T>) -> Result<u64, SessionError> {
        let registry = TargetRegistry::new(payload.generation, payload.scroll, payload.targets)?;
        let cfg = self.pipeline.config();
        let off = registry.off_screen_ids(cfg.screen_w, cfg.screen_h, self.engine.config().margin_px);
        if !off.is_empty() {
            warn!(session = %self.id, targets = ?off, "targets extend beyond the screen");
        }
        let generation = registry.generation();
        let events = self.engine.replace_targets(registry)?;
        self.log_interaction(&events);
        Ok(generation)
    }

    pub fn update_config(&mut self, cfg: InteractionConfig<T>) -> Result<(), SessionError> {
        let events = self.engine.update_config(cfg)?;
        self.log_interaction(&events);
        Ok(())
    }

    pub fn record_dropped(&self, count: u64) {
        let t = self.pipeline.last_timestamp().unwrap_or(0);
        self.log.append(t, LogRecord::SamplesDropped { count });
    }

    pub fn record_source_error(&self, detail: impl Into<String>) {
        let t = self.pipeline.last_timestamp().unwrap_or(0);
        self.log.append(t, LogRecord::SourceError { detail: detail.into() });
    }

    fn dispatch(&mut self) -> Result<(), SessionError> {
        let gaze = std::mem::take(&mut self.gaze_buf);
        for ev in &gaze {
            self.interaction_buf.clear();
            self.engine.step_into(ev, &mut self.interaction_buf)?;
            let events = std::mem::take(&mut self.interaction_buf);
            // interaction events never postdate the gaze event that caused them
            self.log_interaction(&events);
            self.interaction_buf = events;
            self.log_gaze(ev);
        }
        self.gaze_buf = gaze;
        Ok(())
    }

    fn log_interaction(&self, events: &[InteractionEvent]) {
        for ev in events {
            let (t, rec) = LogRecord::from_interaction(ev);
            self.log.append(t, rec);
        }
    }

    fn log_gaze(&mut self, ev: &GazeEvent<T>) {
        let (t, rec) = match *ev {
            GazeEvent::Blink { t_start_ms, t_end_ms } => (t_start_ms, LogRecord::Blink { t_end_ms }),
            GazeEvent::LookawayStart { t_ms } => (t_ms, LogRecord::LookawayStart),
            GazeEvent::LookawayEnd { t_ms } => (t_ms, LogRecord::LookawayEnd),
            GazeEvent::SmoothedPoint { t_ms, x, y } => {
                let stride = u64::from(self.opts.smoothed_stride);
                let n = self.smoothed_seen;
                self.smoothed_seen += 1;
                if stride == 0 || n % stride != 0 {
                    return;
                }
                (t_ms, LogRecord::SmoothedPoint { x: x.as_f64(), y: y.as_f64() })
            }
            GazeEvent::FixationStart { .. } | GazeEvent::FixationEnd { .. } => return,
        };
        self.log.append(t, rec);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::interaction::{NavigationStyle, TargetKind};

    fn api_session() -> Session<f64> {
        let spec = SessionSpec {
            pipeline: PipelineConfig::default(),
            interaction: InteractionConfig::default(),
            source: SourceDescriptor::Api,
            log: LogOptions { smoothed_stride: 0 },
        };
        Session::new("s1", spec).unwrap()
    }

    fn link_payload(generation: u64) -> TargetsPayload<f64> {
        TargetsPayload {
            generation,
            scroll: ScrollOffset::default(),
            targets: vec![
                TargetRegion::new("a", TargetKind::Link, Rect::new(100.0, 100.0, 200.0, 30.0)).with_href("A.html"),
                TargetRegion::new("b", TargetKind::Link, Rect::new(100.0, 400.0, 200.0, 30.0)).with_href("B.html"),
            ],
        }
    }

    fn hover(from: u64, to: u64, x: f64, y: f64) -> Vec<GazeSample<f64>> {
        (from..to).step_by(10).map(|t| GazeSample::valid(t, x, y)).collect()
    }

    fn selections(log: &EventLog) -> Vec<(u64, String)> {
        log.snapshot()
            .into_iter()
            .filter_map(|e| match e.record {
                LogRecord::Selection { target_id, .. } => Some((e.t_ms, target_id)),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut spec = SessionSpec {
            pipeline: PipelineConfig::<f64>::default(),
            interaction: InteractionConfig { dwell_ms: 0, ..Default::default() },
            source: SourceDescriptor::Api,
            log: LogOptions::default(),
        };
        assert_eq!(Session::new("x", spec.clone()).err().map(|e| e.code()), Some("InvalidConfig"));
        spec.interaction.dwell_ms = 800;
        spec.pipeline.smoothing_window = 2;
        assert_eq!(Session::new("x", spec).err().map(|e| e.code()), Some("InvalidConfig"));
    }

    #[test]
    fn dwell_selection_lands_in_log() {
        let mut s = api_session();
        assert_eq!(s.put_targets(link_payload(1)).unwrap(), 1);
        s.push_sim_gaze(&hover(0, 1000, 150.0, 110.0)).unwrap();
        assert_eq!(selections(s.log()), vec![(800, "a".to_string())]);
        let entries = s.log().snapshot();
        assert!(entries.windows(2).all(|w| w[0].t_ms <= w[1].t_ms));
        assert!(entries.iter().enumerate().all(|(i, e)| e.seq == i as u64 + 1));
    }

    #[test]
    fn push_errors() {
        let mut s = api_session();
        s.push_sim_gaze(&hover(0, 100, 1.0, 1.0)).unwrap();
        let before = s.log().latest_seq();
        let err = s.push_sim_gaze(&[GazeSample::valid(200, 1.0, 1.0), GazeSample::valid(150, 1.0, 1.0)]);
        assert_eq!(err, Err(SessionError::NonMonotonicTimestamp { last: 200, got: 150 }));
        // rejected batches leave no trace
        assert_eq!(s.log().latest_seq(), before);
        assert_eq!(s.pipeline().last_timestamp(), Some(90));

        let spec = SessionSpec {
            pipeline: PipelineConfig::default(),
            interaction: InteractionConfig::default(),
            source: SourceDescriptor::Replay { path: "x.jsonl".into(), speed: 0.0 },
            log: LogOptions::default(),
        };
        let mut replay = Session::<f64>::new("r", spec).unwrap();
        assert_eq!(replay.push_sim_gaze(&[]).err().map(|e| e.code()), Some("WrongSourceKind"));
    }

    #[test]
    fn targets_errors() {
        let mut s = api_session();
        s.put_targets(link_payload(1)).unwrap();
        assert_eq!(s.put_targets(link_payload(3)).err().map(|e| e.code()), Some("GenerationSkew"));
        let mut dup = link_payload(2);
        dup.targets[1].id = "a".into();
        assert_eq!(s.put_targets(dup).err().map(|e| e.code()), Some("SchemaError"));
    }

    #[test]
    fn config_change_mid_session() {
        let mut s = api_session();
        s.put_targets(link_payload(1)).unwrap();
        s.push_sim_gaze(&hover(0, 1000, 150.0, 110.0)).unwrap();
        s.update_config(InteractionConfig { dwell_ms: 500, ..Default::default() }).unwrap();
        s.push_sim_gaze(&hover(1000, 1700, 150.0, 410.0)).unwrap();
        // b is entered at the first smoothed point inside it; from there 500 ms accrue
        let sel = selections(s.log());
        assert_eq!(sel.len(), 2);
        let enter_b = s
            .log()
            .snapshot()
            .into_iter()
            .find(|e| matches!(&e.record, LogRecord::TargetEnter { target_id } if target_id == "b"))
            .unwrap();
        assert_eq!(sel[1], (enter_b.t_ms + 500, "b".to_string()));

        s.update_config(InteractionConfig { navigation_style: NavigationStyle::Blink, ..Default::default() }).unwrap();
        s.push_sim_gaze(&hover(1700, 3500, 150.0, 110.0)).unwrap();
        assert_eq!(selections(s.log()).len(), 2);
        let bad = InteractionConfig { off_target_grace_ms: 900, ..Default::default() };
        assert_eq!(s.update_config(bad).err().map(|e| e.code()), Some("InvalidConfig"));
    }

    #[test]
    fn end_of_stream_once() {
        let mut s = api_session();
        s.ingest(&hover(0, 300, 5.0, 5.0)).unwrap();
        s.end_of_stream().unwrap();
        let n = s.log().latest_seq();
        s.end_of_stream().unwrap();
        assert_eq!(s.log().latest_seq(), n);
        assert_eq!(s.log().snapshot().last().unwrap().record, LogRecord::SourceEnd);
    }

    #[test]
    fn session_ids_are_long_and_distinct() {
        let a = new_session_id();
        assert_eq!(a.len(), 32);
        assert_ne!(a, new_session_id());
    }
}
