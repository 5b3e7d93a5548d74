//! Registered on-screen targets and hit testing.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::geometry::{Point, Rect};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Link,
    ScrollUp,
    ScrollDown,
    Button,
}

impl TargetKind {
    pub fn is_scroll(self) -> bool {
        matches!(self, TargetKind::ScrollUp | TargetKind::ScrollDown)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct TargetRegion<T> {
    pub id: String,
    pub kind: TargetKind,
    pub rect: Rect<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub href: Option<String>,
}

impl<T: Scalar> TargetRegion<T> {
    pub fn new(id: impl Into<String>, kind: TargetKind, rect: Rect<T>) -> Self {
        Self { id: id.into(), kind, rect, href: None }
    }

    pub fn with_href(mut self, href: impl Into<String>) -> Self {
        self.href = Some(href.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScrollOffset<T> {
    pub x: T,
    pub y: T,
}

/// One generation of targets. Targets are kept ordered by (area, id), so the
/// first margin-expanded hit is also the most specific one.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetRegistry<T> {
    generation: u64,
    scroll: ScrollOffset<T>,
    targets: Vec<TargetRegion<T>>,
}

impl<T: Scalar> Default for TargetRegistry<T> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<T: Scalar> TargetRegistry<T> {
    /// Generation 0, no targets.
    pub fn empty() -> Self {
        Self { generation: 0, scroll: ScrollOffset::default(), targets: Vec::new() }
    }

    /// Builds a registry, rejecting empty or duplicate ids and non-positive sizes.
    pub fn new(generation: u64, scroll: ScrollOffset<T>, targets: Vec<TargetRegion<T>>) -> Result<Self, EngineError> {
        let mut seen = HashSet::new();
        for t in &targets {
            if t.id.is_empty() {
                return Err(EngineError::Schema("target id must not be empty".into()));
            }
            if !seen.insert(t.id.as_str()) {
                return Err(EngineError::Schema(format!("duplicate target id {:?}", t.id)));
            }
            let r = &t.rect;
            if !(r.x.is_finite() && r.y.is_finite() && r.w.is_finite() && r.h.is_finite()) {
                return Err(EngineError::Schema(format!("target {:?} has a non-finite rect", t.id)));
            }
            if r.w <= T::zero() || r.h <= T::zero() {
                return Err(EngineError::Schema(format!("target {:?} must have positive width and height", t.id)));
            }
        }
        let mut targets = targets;
        targets.sort_by(specificity);
        Ok(Self { generation, scroll, targets })
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn scroll(&self) -> ScrollOffset<T> {
        self.scroll
    }

    /// Targets in hit-test priority order.
    pub fn targets(&self) -> &[TargetRegion<T>] {
        &self.targets
    }

    pub fn get(&self, id: &str) -> Option<&TargetRegion<T>> {
        self.targets.iter().find(|t| t.id == id)
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Ids of targets that stick out of the screen by more than `margin`.
    pub fn off_screen_ids(&self, screen_w: T, screen_h: T, margin: T) -> Vec<&str> {
        self.targets
            .iter()
            .filter(|t| !t.rect.within_screen(screen_w, screen_h, margin))
            .map(|t| t.id.as_str())
            .collect()
    }
}

fn specificity<T: Scalar>(a: &TargetRegion<T>, b: &TargetRegion<T>) -> Ordering {
    a.rect
        .area()
        .partial_cmp(&b.rect.area())
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.id.cmp(&b.id))
}

/// The target whose margin-expanded rect contains `p`. Overlaps resolve to the
/// smaller unexpanded area, then the lexicographically smaller id.
pub fn hit_test<'r, T: Scalar>(p: Point<T>, reg: &'r TargetRegistry<T>, margin_px: T) -> Option<&'r TargetRegion<T>> {
    reg.targets.iter().find(|t| t.rect.contains_with_margin(p, margin_px))
}
