//! Sample-level step-through of the dwell rules, written independently of the
//! engine: time between two consecutive smoothed points is credited to the
//! engaged target when the earlier point was on it and no blink intervened.

use eyedoc_core::{GazeEvent, Point, TargetRegion};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Enter(u64, String),
    Leave(u64, String),
    Select(u64, String),
}

/// Smallest-area hit among all targets (ties by id), found by full scan.
pub fn exhaustive_hit<'a>(p: Point, targets: &'a [TargetRegion], margin: f64) -> Option<&'a TargetRegion> {
    targets
        .iter()
        .filter(|t| {
            p.x >= t.rect.x - margin
                && p.x <= t.rect.x + t.rect.w + margin
                && p.y >= t.rect.y - margin
                && p.y <= t.rect.y + t.rect.h + margin
        })
        .min_by(|a, b| {
            let (aa, ab) = (a.rect.w * a.rect.h, b.rect.w * b.rect.h);
            aa.partial_cmp(&ab).unwrap().then_with(|| a.id.cmp(&b.id))
        })
}

struct Engaged {
    id: String,
    accrued: u64,
    pause_from: Option<u64>,
    selected: bool,
}

/// Link/button targets only; dwell navigation style.
pub struct DwellReference<'a> {
    pub targets: &'a [TargetRegion],
    pub dwell_ms: u64,
    pub grace_ms: u64,
    pub margin: f64,
    /// (time, was on the engaged target) of the previous smoothed point
    prev: Option<(u64, bool)>,
    cur: Option<Engaged>,
    pub steps: Vec<Step>,
    /// accrued on-target time at every selection
    pub accrued_at_selection: Vec<u64>,
}

impl<'a> DwellReference<'a> {
    pub fn new(targets: &'a [TargetRegion], dwell_ms: u64, grace_ms: u64, margin: f64) -> Self {
        Self { targets, dwell_ms, grace_ms, margin, prev: None, cur: None, steps: Vec::new(), accrued_at_selection: Vec::new() }
    }

    fn leave(&mut self, t: u64) {
        if let Some(e) = self.cur.take() {
            self.steps.push(Step::Leave(t, e.id));
        }
        self.prev = None;
    }

    fn check_pause(&mut self, t: u64) {
        let expired = matches!(&self.cur, Some(Engaged { pause_from: Some(p), .. }) if t > p + self.grace_ms);
        if expired {
            let p = self.cur.as_ref().unwrap().pause_from.unwrap();
            self.leave(p + self.grace_ms);
        }
    }

    pub fn feed(&mut self, ev: &GazeEvent) {
        match *ev {
            GazeEvent::SmoothedPoint { t_ms, x, y } => {
                self.check_pause(t_ms);
                self.point(t_ms, Point::new(x, y));
            }
            GazeEvent::Blink { t_start_ms, .. } => {
                self.check_pause(t_start_ms);
                self.prev = None;
            }
            GazeEvent::LookawayStart { t_ms } => {
                self.check_pause(t_ms);
                self.leave(t_ms);
            }
            _ => {}
        }
    }

    fn point(&mut self, t: u64, p: Point) {
        let hit = exhaustive_hit(p, self.targets, self.margin).map(|h| h.id.clone());
        let engaged_id = self.cur.as_ref().map(|e| e.id.clone());
        match (engaged_id, hit) {
            (Some(id), Some(h)) if id == h => {
                let e = self.cur.as_mut().unwrap();
                if let Some((pt, true)) = self.prev {
                    e.accrued += t - pt;
                }
                e.pause_from = None;
                self.prev = Some((t, true));
                if !e.selected && e.accrued >= self.dwell_ms {
                    e.selected = true;
                    self.accrued_at_selection.push(e.accrued);
                    self.steps.push(Step::Select(t, id));
                }
            }
            (Some(_), None) => {
                let e = self.cur.as_mut().unwrap();
                if e.pause_from.is_none() {
                    if let Some((pt, true)) = self.prev {
                        e.accrued += t - pt;
                    }
                    e.pause_from = Some(t);
                }
                self.prev = Some((t, false));
            }
            (_, Some(h)) => {
                self.leave(t);
                self.steps.push(Step::Enter(t, h.clone()));
                let selected = self.dwell_ms == 0;
                self.cur = Some(Engaged { id: h, accrued: 0, pause_from: None, selected });
                self.prev = Some((t, true));
            }
            (None, None) => {
                self.prev = None;
            }
        }
    }
}
