//! Synthetic gaze scenarios for hardware-free runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point;
use crate::pipeline::GazeSample;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid scenario: {0}")]
pub struct InvalidSpec(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Fixate,
    Saccade,
    BlinkGap,
    LookawayGap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct Segment<T> {
    pub kind: SegmentKind,
    pub duration_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<Point<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<Point<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<Point<T>>,
    #[serde(default = "T::zero")]
    pub jitter_px: T,
}

impl<T: Scalar> Segment<T> {
    pub fn fixate(at: Point<T>, duration_ms: u64) -> Self {
        Self { kind: SegmentKind::Fixate, duration_ms, at: Some(at), from: None, to: None, jitter_px: T::zero() }
    }

    pub fn saccade(from: Point<T>, to: Point<T>, duration_ms: u64) -> Self {
        Self { kind: SegmentKind::Saccade, duration_ms, at: None, from: Some(from), to: Some(to), jitter_px: T::zero() }
    }

    pub fn blink_gap(duration_ms: u64) -> Self {
        Self { kind: SegmentKind::BlinkGap, duration_ms, at: None, from: None, to: None, jitter_px: T::zero() }
    }

    pub fn lookaway_gap(duration_ms: u64) -> Self {
        Self { kind: SegmentKind::LookawayGap, ..Self::blink_gap(duration_ms) }
    }

    pub fn with_jitter(mut self, jitter_px: T) -> Self {
        self.jitter_px = jitter_px;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ScenarioSpec<T> {
    #[serde(default = "default_rate")]
    pub sample_rate_hz: u32,
    pub segments: Vec<Segment<T>>,
}

fn default_rate() -> u32 {
    60
}

impl<T: Scalar> ScenarioSpec<T> {
    pub fn new(sample_rate_hz: u32, segments: Vec<Segment<T>>) -> Self {
        Self { sample_rate_hz, segments }
    }

    pub fn validate(&self) -> Result<(), InvalidSpec> {
        // above 1000 Hz two samples would share a millisecond
        if self.sample_rate_hz == 0 || self.sample_rate_hz > 1000 {
            return Err(InvalidSpec("sample_rate_hz must be in 1..=1000".into()));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            let fail = |m: &str| Err(InvalidSpec(format!("segment {i}: {m}")));
            if seg.duration_ms == 0 {
                return fail("duration_ms must be positive");
            }
            if !(seg.jitter_px.is_finite() && seg.jitter_px >= T::zero()) {
                return fail("jitter_px must be non-negative");
            }
            let finite = |p: &Option<Point<T>>| p.map_or(true, |p| p.is_finite());
            if !(finite(&seg.at) && finite(&seg.from) && finite(&seg.to)) {
                return fail("points must be finite");
            }
            match seg.kind {
                SegmentKind::Fixate if seg.at.is_none() => return fail("fixate requires `at`"),
                SegmentKind::Saccade if seg.from.is_none() || seg.to.is_none() => {
                    return fail("saccade requires `from` and `to`")
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn total_duration_ms(&self) -> u64 {
        self.segments.iter().map(|s| s.duration_ms).sum()
    }
}

/// Timestamp of the `k`-th sample: `k * 1000 / rate` rounded half-up, computed
/// from the exact product so rounding never accumulates.
pub fn sample_time_ms(k: u64, rate_hz: u32) -> u64 {
    let rate = u64::from(rate_hz);
    (2 * k * 1000 + rate) / (2 * rate)
}

/// Deterministic in `(spec, seed)`.
pub fn generate_scenario<T: Scalar>(spec: &ScenarioSpec<T>, seed: u64) -> Result<Vec<GazeSample<T>>, InvalidSpec> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut k = 0u64;
    let mut seg_start = 0u64;
    for seg in &spec.segments {
        let seg_end = seg_start + seg.duration_ms;
        loop {
            let t = sample_time_ms(k, spec.sample_rate_hz);
            if t >= seg_end {
                break;
            }
            k += 1;
            let base = match seg.kind {
                SegmentKind::Fixate => seg.at,
                SegmentKind::Saccade => {
                    let frac = T::from_ms(t - seg_start) / T::from_ms(seg.duration_ms);
                    Some(seg.from.unwrap().lerp(seg.to.unwrap(), frac))
                }
                SegmentKind::BlinkGap | SegmentKind::LookawayGap => None,
            };
            out.push(match base {
                Some(p) => {
                    let p = jitter(&mut rng, p, seg.jitter_px);
                    GazeSample::valid(t, p.x, p.y)
                }
                None => GazeSample::invalid(t),
            });
        }
        seg_start = seg_end;
    }
    Ok(out)
}

fn jitter<T: Scalar>(rng: &mut ChaCha8Rng, p: Point<T>, amount: T) -> Point<T> {
    if amount <= T::zero() {
        return p;
    }
    let j = amount.as_f64();
    let dx = rng.random_range(-j..=j);
    let dy = rng.random_range(-j..=j);
    Point::new(p.x + T::lit(dx), p.y + T::lit(dy))
}
