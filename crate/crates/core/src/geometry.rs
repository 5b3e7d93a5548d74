//! Screen-space points and rectangles.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Linear interpolation, `frac` in `[0, 1]`.
    pub fn lerp(self, to: Self, frac: T) -> Self {
        Self {
            x: self.x + (to.x - self.x) * frac,
            y: self.y + (to.y - self.y) * frac,
        }
    }
}

/// Axis-aligned rectangle: origin at the top-left corner, `w`/`h` extend right and down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect<T> {
    pub x: T,
    pub y: T,
    pub w: T,
    pub h: T,
}

impl<T: Scalar> Rect<T> {
    pub fn new(x: T, y: T, w: T, h: T) -> Self {
        Self { x, y, w, h }
    }

    pub fn area(&self) -> T {
        self.w * self.h
    }

    /// Closed containment test against the rectangle grown by `margin` on every side.
    pub fn contains_with_margin(&self, p: Point<T>, margin: T) -> bool {
        p.x >= self.x - margin
            && p.x <= self.x + self.w + margin
            && p.y >= self.y - margin
            && p.y <= self.y + self.h + margin
    }

    /// True when the rectangle lies within `[0, w] x [0, h]` grown by `margin`.
    pub fn within_screen(&self, screen_w: T, screen_h: T, margin: T) -> bool {
        self.x >= -margin
            && self.y >= -margin
            && self.x + self.w <= screen_w + margin
            && self.y + self.h <= screen_h + margin
    }

    pub fn translate(&self, dx: T, dy: T) -> Self {
        Self { x: self.x + dx, y: self.y + dy, ..*self }
    }
}
