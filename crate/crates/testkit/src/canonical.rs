//! The canonical end-to-end scenario: dwell-select link A, a short glance at
//! link B that is abandoned (the reset), a full dwell on B, a two-second look
//! away, then a dwell in the bottom scroll band.

use eyedoc_core::geometry::Rect;
use eyedoc_core::interaction::{ScrollOffset, TargetKind};
use eyedoc_core::sources::scenario::Segment;
use eyedoc_core::{Point, ScenarioSpec, TargetRegion, TargetsPayload};

pub const SEED: u64 = 20_140_531;
pub const JITTER_PX: f64 = 3.0;

pub const LINK_A: (f64, f64) = (280.0, 312.0);
pub const LINK_B: (f64, f64) = (1000.0, 512.0);
pub const BLANK: (f64, f64) = (1000.0, 760.0);
pub const SCROLL_DOWN: (f64, f64) = (960.0, 1050.0);
pub const CENTER: (f64, f64) = (960.0, 540.0);

fn p((x, y): (f64, f64)) -> Point {
    Point::new(x, y)
}

pub fn scenario() -> ScenarioSpec {
    let j = JITTER_PX;
    ScenarioSpec::new(
        60,
        vec![
            Segment::fixate(p(LINK_A), 1000).with_jitter(j),
            Segment::saccade(p(LINK_A), p(LINK_B), 120),
            Segment::fixate(p(LINK_B), 300).with_jitter(j),
            // glance away long enough to exhaust the grace window
            Segment::saccade(p(LINK_B), p(BLANK), 60),
            Segment::fixate(p(BLANK), 300).with_jitter(j),
            Segment::saccade(p(BLANK), p(LINK_B), 60),
            Segment::fixate(p(LINK_B), 1000).with_jitter(j),
            Segment::lookaway_gap(2000),
            Segment::saccade(p(CENTER), p(SCROLL_DOWN), 120),
            Segment::fixate(p(SCROLL_DOWN), 1000).with_jitter(j),
        ],
    )
}

pub fn targets() -> TargetsPayload {
    TargetsPayload {
        generation: 1,
        scroll: ScrollOffset { x: 0.0, y: 0.0 },
        targets: vec![
            TargetRegion::new("link-a", TargetKind::Link, Rect::new(200.0, 300.0, 160.0, 24.0)).with_href("A.html"),
            TargetRegion::new("link-b", TargetKind::Link, Rect::new(900.0, 500.0, 200.0, 24.0)).with_href("B.html"),
            TargetRegion::new("scroll-up", TargetKind::ScrollUp, Rect::new(0.0, 0.0, 1920.0, 60.0)),
            TargetRegion::new("scroll-down", TargetKind::ScrollDown, Rect::new(0.0, 1020.0, 1920.0, 60.0)),
        ],
    }
}
