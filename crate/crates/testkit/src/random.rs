//! Seeded random scenario specs and target layouts.

use eyedoc_core::geometry::Rect;
use eyedoc_core::interaction::TargetKind;
use eyedoc_core::sources::scenario::Segment;
use eyedoc_core::{Point, ScenarioSpec, TargetRegion};
use rand::Rng;

fn point(rng: &mut impl Rng, w: f64, h: f64) -> Point {
    Point::new(rng.random_range(0.0..w), rng.random_range(0.0..h))
}

/// Mix of fixations (some off-screen), saccades and gaps of every class.
pub fn random_scenario(rng: &mut impl Rng) -> ScenarioSpec {
    let rate = [30u32, 60, 90, 120, 250][rng.random_range(0..5)];
    let n = rng.random_range(3..14);
    let mut at = point(rng, 1920.0, 1080.0);
    let mut segments = Vec::with_capacity(n);
    for _ in 0..n {
        let seg = match rng.random_range(0..10) {
            0..=4 => {
                let jitter = [0.0, 2.0, 8.0, 25.0, 60.0][rng.random_range(0..5)];
                Segment::fixate(at, rng.random_range(30..900)).with_jitter(jitter)
            }
            5 | 6 => {
                let to = point(rng, 1920.0, 1080.0);
                let s = Segment::saccade(at, to, rng.random_range(20..200)).with_jitter(1.0);
                at = to;
                s
            }
            7 => Segment::blink_gap(rng.random_range(5..450)),
            8 => Segment::lookaway_gap(rng.random_range(300..1500)),
            _ => Segment::fixate(Point::new(-50.0, at.y), rng.random_range(20..300)),
        };
        segments.push(seg);
    }
    ScenarioSpec::new(rate, segments)
}

/// A handful of links, some overlapping.
pub fn random_links(rng: &mut impl Rng) -> Vec<TargetRegion> {
    let n = rng.random_range(1..7);
    (0..n)
        .map(|i| {
            let r = Rect::new(
                rng.random_range(0.0..1700.0),
                rng.random_range(0.0..1000.0),
                rng.random_range(10.0..300.0),
                rng.random_range(10.0..120.0),
            );
            TargetRegion::new(format!("t{i}"), TargetKind::Link, r)
        })
        .collect()
}

/// Scenario that mostly dwells in, near and between the given targets.
pub fn targeted_scenario(rng: &mut impl Rng, targets: &[TargetRegion]) -> ScenarioSpec {
    let n = rng.random_range(4..16);
    let mut segments = Vec::with_capacity(n);
    let mut at = Point::new(960.0, 540.0);
    for _ in 0..n {
        let t = &targets[rng.random_range(0..targets.len())];
        let seg = match rng.random_range(0..10) {
            0..=4 => {
                let edge = rng.random_bool(0.3);
                at = if edge {
                    Point::new(t.rect.x + t.rect.w, t.rect.y + t.rect.h / 2.0)
                } else {
                    Point::new(t.rect.x + t.rect.w / 2.0, t.rect.y + t.rect.h / 2.0)
                };
                let jitter = if edge { 15.0 } else { [0.0, 3.0, 10.0][rng.random_range(0..3)] };
                Segment::fixate(at, rng.random_range(50..1500)).with_jitter(jitter)
            }
            5 | 6 => {
                let to = point(rng, 1920.0, 1080.0);
                let s = Segment::saccade(at, to, rng.random_range(20..400));
                at = to;
                s
            }
            7 => Segment::blink_gap(rng.random_range(10..400)),
            8 => Segment::lookaway_gap(rng.random_range(300..1200)),
            _ => Segment::fixate(at, rng.random_range(50..400)).with_jitter(40.0),
        };
        segments.push(seg);
    }
    ScenarioSpec::new([60u32, 120][rng.random_range(0..2)], segments)
}
