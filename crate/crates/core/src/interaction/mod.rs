//! Gaze events against registered targets: engagement, dwell accrual with a
//! grace window, dwell/blink selection and repeating scroll commands.
//!
//! On-target time is sample-and-hold: the interval between two consecutive
//! smoothed points is credited when the earlier one was on the engaged target.
//! Intervals that start off-target or span a blink are never credited.

pub mod targets;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use targets::{hit_test, ScrollOffset, TargetKind, TargetRegion, TargetRegistry};

use crate::geometry::Point;
use crate::pipeline::GazeEvent;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("event at {got} ms precedes previous event at {last} ms")]
    NonMonotonicTimestamp { last: u64, got: u64 },
    #[error("registry generation {got} does not follow current generation {current}")]
    GenerationSkew { current: u64, got: u64 },
    #[error("{0}")]
    Schema(String),
    #[error("invalid interaction config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NavigationStyle {
    Dwell,
    Blink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    Dwell,
    Blink,
}

impl Trigger {
    pub fn as_str(self) -> &'static str {
        match self {
            Trigger::Dwell => "dwell",
            Trigger::Blink => "blink",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScrollDirection {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct InteractionConfig<T> {
    pub dwell_ms: u64,
    pub off_target_grace_ms: u64,
    pub margin_px: T,
    pub navigation_style: NavigationStyle,
    pub scroll_repeat_ms: u64,
}

impl<T: Scalar> Default for InteractionConfig<T> {
    fn default() -> Self {
        Self {
            dwell_ms: 800,
            off_target_grace_ms: 150,
            margin_px: T::lit(8.0),
            navigation_style: NavigationStyle::Dwell,
            scroll_repeat_ms: 400,
        }
    }
}

impl<T: Scalar> InteractionConfig<T> {
    pub fn validate(&self) -> Result<(), EngineError> {
        let fail = |m: &str| Err(EngineError::InvalidConfig(m.to_string()));
        if self.dwell_ms == 0 {
            return fail("dwell_ms must be positive");
        }
        if self.off_target_grace_ms >= self.dwell_ms {
            return fail("off_target_grace_ms must be less than dwell_ms");
        }
        if !(self.margin_px.is_finite() && self.margin_px >= T::zero()) {
            return fail("margin_px must be non-negative");
        }
        if self.scroll_repeat_ms == 0 {
            return fail("scroll_repeat_ms must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InteractionEvent {
    TargetEnter { t_ms: u64, target_id: String },
    TargetLeave { t_ms: u64, target_id: String },
    DwellProgress { t_ms: u64, target_id: String, fraction: f64 },
    Selection { t_ms: u64, target_id: String, trigger: Trigger },
    ScrollCommand { t_ms: u64, direction: ScrollDirection },
}

impl InteractionEvent {
    pub fn t_ms(&self) -> u64 {
        match self {
            InteractionEvent::TargetEnter { t_ms, .. }
            | InteractionEvent::TargetLeave { t_ms, .. }
            | InteractionEvent::DwellProgress { t_ms, .. }
            | InteractionEvent::Selection { t_ms, .. }
            | InteractionEvent::ScrollCommand { t_ms, .. } => *t_ms,
        }
    }
}

#[derive(Debug, Clone)]
struct Engagement {
    target_id: String,
    kind: TargetKind,
    accrued_ms: u64,
    /// Timestamp of the previous on-target point, when the next interval may be credited.
    held_since: Option<u64>,
    /// First off-target timestamp of the current pause.
    off_since: Option<u64>,
    selected: bool,
    scrolls_fired: u64,
}

impl Engagement {
    fn new(target: &TargetRegion<impl Scalar>, t: u64) -> Self {
        Self {
            target_id: target.id.clone(),
            kind: target.kind,
            accrued_ms: 0,
            held_since: Some(t),
            off_since: None,
            selected: false,
            scrolls_fired: 0,
        }
    }

    fn credit(&mut self, t: u64) {
        if let Some(prev) = self.held_since.take() {
            self.accrued_ms += t - prev;
        }
    }
}

/// Selection state machine for one session.
#[derive(Debug, Clone)]
pub struct InteractionEngine<T> {
    cfg: InteractionConfig<T>,
    registry: TargetRegistry<T>,
    engagement: Option<Engagement>,
    last_t: Option<u64>,
}

impl<T: Scalar> InteractionEngine<T> {
    pub fn new(cfg: InteractionConfig<T>) -> Result<Self, EngineError> {
        cfg.validate()?;
        Ok(Self { cfg, registry: TargetRegistry::empty(), engagement: None, last_t: None })
    }

    pub fn config(&self) -> &InteractionConfig<T> {
        &self.cfg
    }

    pub fn registry(&self) -> &TargetRegistry<T> {
        &self.registry
    }

    pub fn engaged_target(&self) -> Option<&str> {
        self.engagement.as_ref().map(|e| e.target_id.as_str())
    }

    pub fn step(&mut self, ev: &GazeEvent<T>) -> Result<Vec<InteractionEvent>, EngineError> {
        let mut out = Vec::new();
        self.step_into(ev, &mut out)?;
        Ok(out)
    }

    pub fn step_into(&mut self, ev: &GazeEvent<T>, out: &mut Vec<InteractionEvent>) -> Result<(), EngineError> {
        let t = ev.t_ms();
        if let Some(last) = self.last_t {
            if t < last {
                return Err(EngineError::NonMonotonicTimestamp { last, got: t });
            }
        }
        self.last_t = Some(t);
        self.expire(t, out);

        match *ev {
            GazeEvent::SmoothedPoint { t_ms, x, y } => self.on_point(t_ms, Point::new(x, y), out),
            GazeEvent::Blink { t_start_ms, .. } => self.on_blink(t_start_ms, out),
            GazeEvent::LookawayStart { t_ms } => self.end_engagement(t_ms, out),
            GazeEvent::LookawayEnd { .. } | GazeEvent::FixationStart { .. } | GazeEvent::FixationEnd { .. } => {}
        }
        Ok(())
    }

    /// Installs the next generation of targets. Any engagement ends.
    pub fn replace_targets(&mut self, reg: TargetRegistry<T>) -> Result<Vec<InteractionEvent>, EngineError> {
        let current = self.registry.generation();
        if reg.generation() != current + 1 {
            return Err(EngineError::GenerationSkew { current, got: reg.generation() });
        }
        let mut out = Vec::new();
        self.end_engagement(self.last_t.unwrap_or(0), &mut out);
        self.registry = reg;
        Ok(out)
    }

    /// Swaps the configuration; the active engagement is reset.
    pub fn update_config(&mut self, cfg: InteractionConfig<T>) -> Result<Vec<InteractionEvent>, EngineError> {
        cfg.validate()?;
        let mut out = Vec::new();
        self.end_engagement(self.last_t.unwrap_or(0), &mut out);
        self.cfg = cfg;
        Ok(out)
    }

    /// Ends a paused engagement whose grace window closed before `t`.
    fn expire(&mut self, t: u64, out: &mut Vec<InteractionEvent>) {
        let grace = self.cfg.off_target_grace_ms;
        if let Some(off) = self.engagement.as_ref().and_then(|e| e.off_since) {
            if t - off > grace {
                self.end_engagement(off + grace, out);
            }
        }
    }

    fn end_engagement(&mut self, t: u64, out: &mut Vec<InteractionEvent>) {
        if let Some(e) = self.engagement.take() {
            out.push(InteractionEvent::TargetLeave { t_ms: t, target_id: e.target_id });
        }
    }

    fn on_point(&mut self, t: u64, p: Point<T>, out: &mut Vec<InteractionEvent>) {
        let hit = hit_test(p, &self.registry, self.cfg.margin_px);
        match (self.engagement.as_mut(), hit) {
            (Some(e), Some(target)) if e.target_id == target.id => {
                e.credit(t);
                e.off_since = None;
                e.held_since = Some(t);
                self.advance(t, out);
            }
            (Some(e), None) => {
                if e.off_since.is_none() {
                    e.credit(t);
                    e.off_since = Some(t);
                }
            }
            (engaged, Some(target)) => {
                let was_engaged = engaged.is_some();
                let target = target.clone();
                if was_engaged {
                    self.end_engagement(t, out);
                }
                out.push(InteractionEvent::TargetEnter { t_ms: t, target_id: target.id.clone() });
                self.engagement = Some(Engagement::new(&target, t));
                self.advance(t, out);
            }
            (None, None) => {}
        }
    }

    fn advance(&mut self, t: u64, out: &mut Vec<InteractionEvent>) {
        let cfg = self.cfg;
        let Some(e) = self.engagement.as_mut() else { return };
        if let Some(direction) = scroll_direction(e.kind) {
            while e.accrued_ms >= (e.scrolls_fired + 1) * cfg.scroll_repeat_ms {
                e.scrolls_fired += 1;
                out.push(InteractionEvent::ScrollCommand { t_ms: t, direction });
            }
            return;
        }
        if cfg.navigation_style != NavigationStyle::Dwell || e.selected {
            return;
        }
        let fraction = (e.accrued_ms as f64 / cfg.dwell_ms as f64).min(1.0);
        out.push(InteractionEvent::DwellProgress { t_ms: t, target_id: e.target_id.clone(), fraction });
        if e.accrued_ms >= cfg.dwell_ms {
            e.selected = true;
            out.push(InteractionEvent::Selection { t_ms: t, target_id: e.target_id.clone(), trigger: Trigger::Dwell });
        }
    }

    fn on_blink(&mut self, t_start: u64, out: &mut Vec<InteractionEvent>) {
        let style = self.cfg.navigation_style;
        let Some(e) = self.engagement.as_mut() else { return };
        // eyes were closed: the interval spanning the blink is not on-target time
        e.held_since = None;
        if e.off_since.is_some() || style != NavigationStyle::Blink {
            return;
        }
        if let Some(direction) = scroll_direction(e.kind) {
            out.push(InteractionEvent::ScrollCommand { t_ms: t_start, direction });
        } else if !e.selected {
            e.selected = true;
            out.push(InteractionEvent::Selection {
                t_ms: t_start,
                target_id: e.target_id.clone(),
                trigger: Trigger::Blink,
            });
        }
    }
}

fn scroll_direction(kind: TargetKind) -> Option<ScrollDirection> {
    match kind {
        TargetKind::ScrollUp => Some(ScrollDirection::Up),
        TargetKind::ScrollDown => Some(ScrollDirection::Down),
        TargetKind::Link | TargetKind::Button => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;

    const ON: (f64, f64) = (50.0, 50.0);
    const OFF: (f64, f64) = (500.0, 500.0);

    fn engine(style: NavigationStyle, dwell_ms: u64) -> InteractionEngine<f64> {
        let cfg = InteractionConfig { dwell_ms, navigation_style: style, ..Default::default() };
        let mut e = InteractionEngine::new(cfg).unwrap();
        let reg = TargetRegistry::new(
            1,
            ScrollOffset::default(),
            vec![
                TargetRegion::new("m3", TargetKind::Link, Rect::new(0.0, 0.0, 100.0, 100.0)).with_href("Widget.html"),
                TargetRegion::new("down", TargetKind::ScrollDown, Rect::new(0.0, 1000.0, 1920.0, 80.0)),
            ],
        )
        .unwrap();
        e.replace_targets(reg).unwrap();
        e
    }

    fn point(t: u64, (x, y): (f64, f64)) -> GazeEvent<f64> {
        GazeEvent::SmoothedPoint { t_ms: t, x, y }
    }

    /// Feeds points every 10 ms over `[from, to)` (or `[from, to]` when `inclusive`).
    fn feed(e: &mut InteractionEngine<f64>, from: u64, to: u64, inclusive: bool, at: (f64, f64)) -> Vec<InteractionEvent> {
        let end = if inclusive { to + 1 } else { to };
        (from..end).step_by(10).flat_map(|t| e.step(&point(t, at)).unwrap()).collect()
    }

    fn selections(ev: &[InteractionEvent]) -> Vec<(u64, Trigger)> {
        ev.iter()
            .filter_map(|e| match e {
                InteractionEvent::Selection { t_ms, trigger, .. } => Some((*t_ms, *trigger)),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn dwell_resumes_within_grace() {
        let mut e = engine(NavigationStyle::Dwell, 500);
        let mut ev = feed(&mut e, 0, 200, false, ON);
        ev.extend(feed(&mut e, 200, 300, false, OFF));
        ev.extend(feed(&mut e, 300, 600, true, ON));
        assert_eq!(selections(&ev), vec![(600, Trigger::Dwell)]);
        assert!(!ev.iter().any(|x| matches!(x, InteractionEvent::TargetLeave { .. })));
    }

    #[test]
    fn pause_beyond_grace_resets() {
        let mut e = engine(NavigationStyle::Dwell, 500);
        let mut ev = feed(&mut e, 0, 200, false, ON);
        // off-target from 200 through 350: 151 ms > 150 ms grace by the time gaze returns at 351
        ev.extend(feed(&mut e, 200, 351, false, OFF));
        ev.extend(e.step(&point(351, ON)).unwrap());
        let leave = ev.iter().position(|x| matches!(x, InteractionEvent::TargetLeave { .. })).unwrap();
        assert_eq!(ev[leave], InteractionEvent::TargetLeave { t_ms: 350, target_id: "m3".into() });
        assert_eq!(ev[leave + 1], InteractionEvent::TargetEnter { t_ms: 351, target_id: "m3".into() });
        assert_eq!(
            ev[leave + 2],
            InteractionEvent::DwellProgress { t_ms: 351, target_id: "m3".into(), fraction: 0.0 }
        );
    }

    #[test]
    fn no_targets_no_events() {
        let mut e = InteractionEngine::<f64>::new(InteractionConfig::default()).unwrap();
        assert!(feed(&mut e, 0, 2000, false, ON).is_empty());
    }

    #[test]
    fn blink_selects_only_when_engaged() {
        let mut e = engine(NavigationStyle::Blink, 800);
        let mut ev = feed(&mut e, 0, 400, false, ON);
        ev.extend(e.step(&GazeEvent::Blink { t_start_ms: 400, t_end_ms: 550 }).unwrap());
        assert_eq!(selections(&ev), vec![(400, Trigger::Blink)]);
        assert!(!ev.iter().any(|x| matches!(x, InteractionEvent::DwellProgress { .. })));

        let mut e = engine(NavigationStyle::Blink, 800);
        let mut ev = feed(&mut e, 0, 400, false, OFF);
        ev.extend(e.step(&GazeEvent::Blink { t_start_ms: 400, t_end_ms: 550 }).unwrap());
        assert!(selections(&ev).is_empty());
    }

    #[test]
    fn blink_mode_never_dwell_selects() {
        let mut e = engine(NavigationStyle::Blink, 300);
        assert!(selections(&feed(&mut e, 0, 3000, false, ON)).is_empty());
    }

    #[test]
    fn single_selection_per_engagement() {
        let mut e = engine(NavigationStyle::Dwell, 300);
        let ev = feed(&mut e, 0, 3000, false, ON);
        assert_eq!(selections(&ev), vec![(300, Trigger::Dwell)]);
        let ones = ev
            .iter()
            .filter(|x| matches!(x, InteractionEvent::DwellProgress { fraction, .. } if *fraction == 1.0))
            .count();
        assert_eq!(ones, 1);
    }

    #[test]
    fn scroll_band_repeats() {
        let mut e = engine(NavigationStyle::Dwell, 800);
        let ev = feed(&mut e, 0, 1000, false, (960.0, 1040.0));
        let scrolls: Vec<_> = ev
            .iter()
            .filter_map(|x| match x {
                InteractionEvent::ScrollCommand { t_ms, direction } => Some((*t_ms, *direction)),
                _ => None,
            })
            .collect();
        assert_eq!(scrolls, vec![(400, ScrollDirection::Down), (800, ScrollDirection::Down)]);
        assert!(selections(&ev).is_empty());
    }

    #[test]
    fn lookaway_ends_engagement() {
        let mut e = engine(NavigationStyle::Dwell, 800);
        feed(&mut e, 0, 100, false, ON);
        let ev = e.step(&GazeEvent::LookawayStart { t_ms: 100 }).unwrap();
        assert_eq!(ev, vec![InteractionEvent::TargetLeave { t_ms: 100, target_id: "m3".into() }]);
    }

    #[test]
    fn replace_targets_rules() {
        let mut e = engine(NavigationStyle::Dwell, 800);
        feed(&mut e, 0, 100, false, ON);
        let ev = e.replace_targets(TargetRegistry::new(2, ScrollOffset::default(), vec![]).unwrap()).unwrap();
        assert_eq!(ev, vec![InteractionEvent::TargetLeave { t_ms: 90, target_id: "m3".into() }]);
        assert_eq!(e.engaged_target(), None);
        let skew = e.replace_targets(TargetRegistry::new(5, ScrollOffset::default(), vec![]).unwrap());
        assert_eq!(skew, Err(EngineError::GenerationSkew { current: 2, got: 5 }));
    }

    #[test]
    fn same_id_new_generation_restarts_dwell() {
        let mut e = engine(NavigationStyle::Dwell, 500);
        feed(&mut e, 0, 400, false, ON);
        let reg = TargetRegistry::new(
            2,
            ScrollOffset::default(),
            vec![TargetRegion::new("m3", TargetKind::Link, Rect::new(0.0, 0.0, 100.0, 100.0))],
        )
        .unwrap();
        e.replace_targets(reg).unwrap();
        let ev = feed(&mut e, 400, 800, false, ON);
        assert_eq!(ev[0], InteractionEvent::TargetEnter { t_ms: 400, target_id: "m3".into() });
        assert!(selections(&ev).is_empty());
    }

    #[test]
    fn moving_to_other_target_switches_immediately() {
        let mut e = engine(NavigationStyle::Dwell, 800);
        feed(&mut e, 0, 100, false, ON);
        let ev = e.step(&point(100, (960.0, 1040.0))).unwrap();
        assert_eq!(ev[0], InteractionEvent::TargetLeave { t_ms: 100, target_id: "m3".into() });
        assert_eq!(ev[1], InteractionEvent::TargetEnter { t_ms: 100, target_id: "down".into() });
    }

    #[test]
    fn config_validation_and_update() {
        let bad = InteractionConfig::<f64> { dwell_ms: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = InteractionConfig::<f64> { off_target_grace_ms: 800, ..Default::default() };
        assert!(bad.validate().is_err());

        let mut e = engine(NavigationStyle::Dwell, 800);
        feed(&mut e, 0, 100, false, ON);
        let ev = e.update_config(InteractionConfig { dwell_ms: 500, ..Default::default() }).unwrap();
        assert_eq!(ev.len(), 1);
        let ev = feed(&mut e, 100, 700, false, ON);
        assert_eq!(selections(&ev), vec![(600, Trigger::Dwell)]);
    }

    #[test]
    fn rejects_time_regression() {
        let mut e = engine(NavigationStyle::Dwell, 800);
        e.step(&point(100, ON)).unwrap();
        assert_eq!(e.step(&point(50, ON)), Err(EngineError::NonMonotonicTimestamp { last: 100, got: 50 }));
    }
}
