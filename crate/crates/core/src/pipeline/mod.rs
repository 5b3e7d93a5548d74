//! Raw gaze samples in, semantic gaze events out.
//!
//! Every decision is keyed to sample timestamps, so a stream replayed with the
//! same configuration yields the same events no matter how it is chunked or
//! how fast it arrives.

pub mod calibration;
pub mod idt;
pub mod smoothing;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use calibration::{fit_calibration, Calibration};
pub use idt::{Fixation, IdtEvent, StreamingIdt};
pub use smoothing::{median, MedianSmoother};

use crate::geometry::Point;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("timestamp {got} does not exceed previous timestamp {last}")]
    NonMonotonicTimestamp { last: u64, got: u64 },
    #[error("calibration needs at least 3 point pairs, got {pairs}")]
    InsufficientCalibration { pairs: usize },
    #[error("calibration points are collinear")]
    DegenerateCalibration,
    #[error("invalid pipeline config: {0}")]
    InvalidConfig(String),
}

/// One timestamped tracker reading. `point` is `None` when the tracker had no usable gaze.
///
/// Serialises to the trace line format
/// `{"t_ms":<int>,"x":<number|null>,"y":<number|null>,"valid":<bool>}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    into = "TraceRecord<T>",
    try_from = "TraceRecord<T>",
    bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct GazeSample<T> {
    pub t_ms: u64,
    pub point: Option<Point<T>>,
}

impl<T: Scalar> GazeSample<T> {
    pub fn valid(t_ms: u64, x: T, y: T) -> Self {
        Self { t_ms, point: Some(Point::new(x, y)) }
    }

    pub fn invalid(t_ms: u64) -> Self {
        Self { t_ms, point: None }
    }

    pub fn is_valid(&self) -> bool {
        self.point.is_some()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRecord<T> {
    pub t_ms: u64,
    pub x: Option<T>,
    pub y: Option<T>,
    pub valid: bool,
}

impl<T: Scalar> From<GazeSample<T>> for TraceRecord<T> {
    fn from(s: GazeSample<T>) -> Self {
        Self {
            t_ms: s.t_ms,
            x: s.point.map(|p| p.x),
            y: s.point.map(|p| p.y),
            valid: s.point.is_some(),
        }
    }
}

impl<T: Scalar> TryFrom<TraceRecord<T>> for GazeSample<T> {
    type Error = String;

    fn try_from(r: TraceRecord<T>) -> Result<Self, Self::Error> {
        match (r.valid, r.x, r.y) {
            (true, Some(x), Some(y)) if x.is_finite() && y.is_finite() => Ok(Self::valid(r.t_ms, x, y)),
            (true, Some(_), Some(_)) => Err("valid sample has non-finite coordinates".into()),
            (true, _, _) => Err("valid sample must carry both x and y".into()),
            (false, None, None) => Ok(Self::invalid(r.t_ms)),
            (false, _, _) => Err("invalid sample must have null x and y".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct PipelineConfig<T> {
    /// Odd number of samples in the median window.
    pub smoothing_window: usize,
    pub dispersion_px: T,
    pub min_fixation_ms: u64,
    pub blink_min_ms: u64,
    pub blink_max_ms: u64,
    pub screen_w: T,
    pub screen_h: T,
    pub calibration: Calibration<T>,
}

impl<T: Scalar> Default for PipelineConfig<T> {
    fn default() -> Self {
        Self {
            smoothing_window: 5,
            dispersion_px: T::lit(40.0),
            min_fixation_ms: 100,
            blink_min_ms: 70,
            blink_max_ms: 400,
            screen_w: T::lit(1920.0),
            screen_h: T::lit(1080.0),
            calibration: Calibration::identity(),
        }
    }
}

impl<T: Scalar> PipelineConfig<T> {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let fail = |m: &str| Err(PipelineError::InvalidConfig(m.to_string()));
        if self.smoothing_window == 0 || self.smoothing_window % 2 == 0 {
            return fail("smoothing_window must be odd and at least 1");
        }
        if !(self.dispersion_px.is_finite() && self.dispersion_px > T::zero()) {
            return fail("dispersion_px must be positive");
        }
        if self.min_fixation_ms == 0 || self.blink_min_ms == 0 {
            return fail("min_fixation_ms and blink_min_ms must be positive");
        }
        if self.blink_min_ms >= self.blink_max_ms {
            return fail("blink_min_ms must be less than blink_max_ms");
        }
        for v in [self.screen_w, self.screen_h] {
            if !(v.is_finite() && v > T::zero()) {
                return fail("screen_w and screen_h must be positive");
            }
        }
        if !self.calibration.is_invertible() {
            return fail("calibration is not invertible");
        }
        Ok(())
    }

    fn on_screen(&self, p: Point<T>) -> bool {
        p.is_finite() && p.x >= T::zero() && p.x < self.screen_w && p.y >= T::zero() && p.y < self.screen_h
    }
}

/// Pipeline output. Events come out in non-decreasing [`GazeEvent::t_ms`] order.
///
/// `FixationStart` is stamped with the sample that completed the minimum
/// window; `FixationEnd` with the fixation's last member, so its onset is
/// `t_ms - duration_ms`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GazeEvent<T> {
    SmoothedPoint { t_ms: u64, x: T, y: T },
    FixationStart { t_ms: u64, cx: T, cy: T },
    FixationEnd { t_ms: u64, cx: T, cy: T, duration_ms: u64 },
    Blink { t_start_ms: u64, t_end_ms: u64 },
    LookawayStart { t_ms: u64 },
    LookawayEnd { t_ms: u64 },
}

impl<T: Copy> GazeEvent<T> {
    /// Ordering timestamp; blinks order by their start.
    pub fn t_ms(&self) -> u64 {
        match *self {
            GazeEvent::SmoothedPoint { t_ms, .. }
            | GazeEvent::FixationStart { t_ms, .. }
            | GazeEvent::FixationEnd { t_ms, .. }
            | GazeEvent::LookawayStart { t_ms }
            | GazeEvent::LookawayEnd { t_ms } => t_ms,
            GazeEvent::Blink { t_start_ms, .. } => t_start_ms,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Gap {
    start_ms: u64,
    lookaway: bool,
}

/// Stateful single-stream pipeline: calibrate, smooth, detect fixations, classify gaps.
#[derive(Debug, Clone)]
pub struct GazePipeline<T> {
    cfg: PipelineConfig<T>,
    smoother: MedianSmoother<T>,
    idt: StreamingIdt<T>,
    gap: Option<Gap>,
    last_t: Option<u64>,
    scratch: Vec<IdtEvent<T>>,
}

impl<T: Scalar> GazePipeline<T> {
    pub fn new(cfg: PipelineConfig<T>) -> Result<Self, PipelineError> {
        cfg.validate()?;
        Ok(Self {
            smoother: MedianSmoother::new(cfg.smoothing_window),
            idt: StreamingIdt::new(cfg.dispersion_px, cfg.min_fixation_ms),
            cfg,
            gap: None,
            last_t: None,
            scratch: Vec::new(),
        })
    }

    pub fn config(&self) -> &PipelineConfig<T> {
        &self.cfg
    }

    pub fn last_timestamp(&self) -> Option<u64> {
        self.last_t
    }

    pub fn check_timestamp(&self, t_ms: u64) -> Result<(), PipelineError> {
        match self.last_t {
            Some(last) if t_ms <= last => Err(PipelineError::NonMonotonicTimestamp { last, got: t_ms }),
            _ => Ok(()),
        }
    }

    pub fn push(&mut self, s: GazeSample<T>) -> Result<Vec<GazeEvent<T>>, PipelineError> {
        let mut out = Vec::new();
        self.push_into(s, &mut out)?;
        Ok(out)
    }

    /// Like [`push`](Self::push), appending to `out`.
    pub fn push_into(&mut self, s: GazeSample<T>, out: &mut Vec<GazeEvent<T>>) -> Result<(), PipelineError> {
        self.check_timestamp(s.t_ms)?;
        self.last_t = Some(s.t_ms);
        let t = s.t_ms;
        let usable = self.cfg.calibration.apply(s).point.filter(|p| self.cfg.on_screen(*p));

        let Some(raw) = usable else {
            let gap = *self.gap.get_or_insert(Gap { start_ms: t, lookaway: false });
            if !gap.lookaway && t - gap.start_ms > self.cfg.blink_max_ms {
                self.break_stream(out);
                out.push(GazeEvent::LookawayStart { t_ms: gap.start_ms });
                self.gap = Some(Gap { lookaway: true, ..gap });
            }
            return Ok(());
        };

        if let Some(gap) = self.gap.take() {
            let duration = t - gap.start_ms;
            if gap.lookaway {
                out.push(GazeEvent::LookawayEnd { t_ms: t });
            } else if duration > self.cfg.blink_max_ms {
                self.break_stream(out);
                out.push(GazeEvent::LookawayStart { t_ms: gap.start_ms });
                out.push(GazeEvent::LookawayEnd { t_ms: t });
            } else if duration >= self.cfg.blink_min_ms {
                self.break_stream(out);
                out.push(GazeEvent::Blink { t_start_ms: gap.start_ms, t_end_ms: t });
            }
        }

        let p = self.smoother.push(raw);
        self.scratch.clear();
        self.idt.push(t, p, &mut self.scratch);
        for ev in self.scratch.drain(..) {
            out.push(match ev {
                IdtEvent::Started { detected_ms, centroid } => GazeEvent::FixationStart {
                    t_ms: detected_ms,
                    cx: centroid.x,
                    cy: centroid.y,
                },
                IdtEvent::Ended(f) => fixation_end(f),
            });
        }
        out.push(GazeEvent::SmoothedPoint { t_ms: t, x: p.x, y: p.y });
        Ok(())
    }

    /// Closes an open fixation and an open look-away. A second flush emits nothing.
    pub fn flush(&mut self) -> Vec<GazeEvent<T>> {
        let mut out = Vec::new();
        self.break_stream(&mut out);
        if let Some(gap) = self.gap.take() {
            if gap.lookaway {
                out.push(GazeEvent::LookawayEnd { t_ms: self.last_t.unwrap_or(gap.start_ms) });
            } else {
                // gap still open; it never ended, so it is neither blink nor look-away yet
                self.gap = Some(gap);
            }
        }
        out
    }

    /// Blinks and look-aways end the current fixation and restart smoothing.
    fn break_stream(&mut self, out: &mut Vec<GazeEvent<T>>) {
        if let Some(f) = self.idt.finish() {
            out.push(fixation_end(f));
        }
        self.smoother.reset();
    }
}

fn fixation_end<T: Scalar>(f: Fixation<T>) -> GazeEvent<T> {
    GazeEvent::FixationEnd {
        t_ms: f.end_ms,
        cx: f.centroid.x,
        cy: f.centroid.y,
        duration_ms: f.duration_ms(),
    }
}

/// Runs a whole trace through a fresh pipeline and flushes it.
pub fn detect_fixations_batch<T: Scalar>(
    trace: &[GazeSample<T>],
    cfg: &PipelineConfig<T>,
) -> Result<Vec<GazeEvent<T>>, PipelineError> {
    let mut pipeline = GazePipeline::new(*cfg)?;
    let mut out = Vec::new();
    for s in trace {
        pipeline.push_into(*s, &mut out)?;
    }
    out.extend(pipeline.flush());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PipelineConfig<f64> {
        PipelineConfig::default()
    }

    /// 60 Hz timestamps starting at `from`, for `dur` ms.
    fn ticks(from: u64, dur: u64) -> impl Iterator<Item = u64> {
        (0..).map(move |k: u64| from + (k * 2000 + 60) / 120).take_while(move |t| *t < from + dur)
    }

    fn fixations(events: &[GazeEvent<f64>]) -> Vec<(u64, u64, f64, f64)> {
        events
            .iter()
            .filter_map(|e| match *e {
                GazeEvent::FixationEnd { t_ms, cx, cy, duration_ms } => Some((t_ms - duration_ms, t_ms, cx, cy)),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn stationary_gaze_yields_one_fixation() {
        let trace: Vec<_> = ticks(0, 300).map(|t| GazeSample::valid(t, 100.0, 100.0)).collect();
        let ev = detect_fixations_batch(&trace, &cfg()).unwrap();
        let starts: Vec<_> = ev.iter().filter(|e| matches!(e, GazeEvent::FixationStart { .. })).collect();
        assert_eq!(starts.len(), 1);
        // detected once the window spans min_fixation_ms
        assert_eq!(starts[0].t_ms(), 100);
        assert_eq!(fixations(&ev), vec![(0, 283, 100.0, 100.0)]);
    }

    #[test]
    fn non_monotonic_rejected() {
        let mut p = GazePipeline::new(cfg()).unwrap();
        p.push(GazeSample::valid(10, 1.0, 1.0)).unwrap();
        assert_eq!(
            p.push(GazeSample::valid(10, 1.0, 1.0)),
            Err(PipelineError::NonMonotonicTimestamp { last: 10, got: 10 })
        );
    }

    #[test]
    fn blink_gap_between_fixations() {
        let mut trace: Vec<_> = ticks(0, 300).map(|t| GazeSample::valid(t, 100.0, 100.0)).collect();
        trace.extend(ticks(300, 150).map(GazeSample::invalid));
        trace.extend(ticks(450, 300).map(|t| GazeSample::valid(t, 100.0, 100.0)));
        let ev = detect_fixations_batch(&trace, &cfg()).unwrap();
        let blinks: Vec<_> = ev.iter().filter(|e| matches!(e, GazeEvent::Blink { .. })).collect();
        assert_eq!(blinks, vec![&GazeEvent::Blink { t_start_ms: 300, t_end_ms: 450 }]);
        assert_eq!(fixations(&ev).len(), 2);
        assert!(!ev.iter().any(|e| matches!(e, GazeEvent::LookawayStart { .. })));
    }

    #[test]
    fn long_gap_is_lookaway() {
        let mut trace: Vec<_> = ticks(0, 200).map(|t| GazeSample::valid(t, 100.0, 100.0)).collect();
        trace.extend(ticks(200, 1000).map(GazeSample::invalid));
        trace.extend(ticks(1200, 200).map(|t| GazeSample::valid(t, 100.0, 100.0)));
        let ev = detect_fixations_batch(&trace, &cfg()).unwrap();
        let gaps: Vec<_> = ev
            .iter()
            .filter(|e| matches!(e, GazeEvent::Blink { .. } | GazeEvent::LookawayStart { .. } | GazeEvent::LookawayEnd { .. }))
            .copied()
            .collect();
        assert_eq!(gaps, vec![GazeEvent::LookawayStart { t_ms: 200 }, GazeEvent::LookawayEnd { t_ms: 1200 }]);
    }

    #[test]
    fn short_gap_is_ignored_and_keeps_fixation() {
        let mut trace: Vec<_> = ticks(0, 200).map(|t| GazeSample::valid(t, 100.0, 100.0)).collect();
        trace.extend(ticks(200, 50).map(GazeSample::invalid));
        trace.extend(ticks(250, 200).map(|t| GazeSample::valid(t, 100.0, 100.0)));
        let ev = detect_fixations_batch(&trace, &cfg()).unwrap();
        assert_eq!(fixations(&ev).len(), 1);
        assert!(!ev.iter().any(|e| matches!(e, GazeEvent::Blink { .. } | GazeEvent::LookawayStart { .. })));
    }

    #[test]
    fn off_screen_samples_count_as_gap() {
        let mut trace: Vec<_> = ticks(0, 200).map(|t| GazeSample::valid(t, 100.0, 100.0)).collect();
        trace.extend(ticks(200, 100).map(|t| GazeSample::valid(t, -50.0, 100.0)));
        trace.extend(ticks(300, 200).map(|t| GazeSample::valid(t, 100.0, 100.0)));
        let ev = detect_fixations_batch(&trace, &cfg()).unwrap();
        assert!(ev.contains(&GazeEvent::Blink { t_start_ms: 200, t_end_ms: 300 }));
    }

    #[test]
    fn flush_rules() {
        let mut p = GazePipeline::new(cfg()).unwrap();
        for t in ticks(0, 250) {
            p.push(GazeSample::valid(t, 10.0, 10.0)).unwrap();
        }
        let first = p.flush();
        assert!(matches!(first.as_slice(), [GazeEvent::FixationEnd { .. }]));
        assert!(p.flush().is_empty());

        let mut p = GazePipeline::new(cfg()).unwrap();
        for t in ticks(0, 50) {
            p.push(GazeSample::valid(t, 10.0, 10.0)).unwrap();
        }
        assert!(p.flush().is_empty());
    }

    #[test]
    fn flush_closes_open_lookaway() {
        let mut p = GazePipeline::new(cfg()).unwrap();
        p.push(GazeSample::valid(0, 10.0, 10.0)).unwrap();
        p.push(GazeSample::invalid(10)).unwrap();
        let ev = p.push(GazeSample::invalid(500)).unwrap();
        assert_eq!(ev, vec![GazeEvent::LookawayStart { t_ms: 10 }]);
        assert_eq!(p.flush(), vec![GazeEvent::LookawayEnd { t_ms: 500 }]);
        assert!(p.flush().is_empty());
    }

    #[test]
    fn config_validation() {
        let mut c = cfg();
        c.smoothing_window = 4;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.blink_min_ms = 400;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.dispersion_px = 0.0;
        assert!(c.validate().is_err());
        assert!(PipelineConfig::<f32>::default().validate().is_ok());
    }

    #[test]
    fn trace_record_rules() {
        let ok: GazeSample<f64> = serde_json::from_str(r#"{"t_ms":3,"x":1.5,"y":2.0,"valid":true}"#).unwrap();
        assert_eq!(ok, GazeSample::valid(3, 1.5, 2.0));
        assert!(serde_json::from_str::<GazeSample<f64>>(r#"{"t_ms":3,"x":null,"y":2.0,"valid":true}"#).is_err());
        assert!(serde_json::from_str::<GazeSample<f64>>(r#"{"t_ms":3,"x":1.0,"y":null,"valid":false}"#).is_err());
        assert_eq!(
            serde_json::to_string(&GazeSample::<f64>::invalid(120)).unwrap(),
            r#"{"t_ms":120,"x":null,"y":null,"valid":false}"#
        );
        assert_eq!(
            serde_json::to_string(&GazeSample::valid(0, 100.0, 100.5)).unwrap(),
            r#"{"t_ms":0,"x":100.0,"y":100.5,"valid":true}"#
        );
    }
}
