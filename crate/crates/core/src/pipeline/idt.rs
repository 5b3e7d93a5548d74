//! Streaming dispersion-threshold (I-DT) fixation detection.
//!
//! Dispersion of a point set is `max(max_x - min_x, max_y - min_y)`. A candidate
//! window starts at the oldest unconsumed point and is the shortest run whose
//! time span reaches the minimum duration. If it is tight enough it opens a
//! fixation that grows until a point would break the threshold; otherwise the
//! oldest point is discarded and the next start is tried.

use std::collections::VecDeque;

use crate::geometry::Point;
use crate::scalar::Scalar;

/// A closed fixation: member points span `[start_ms, end_ms]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixation<T> {
    pub start_ms: u64,
    pub end_ms: u64,
    pub centroid: Point<T>,
    pub samples: usize,
}

impl<T> Fixation<T> {
    pub fn duration_ms(&self) -> u64 {
        self.end_ms - self.start_ms
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IdtEvent<T> {
    /// Fixation recognised at `detected_ms`; `centroid` covers the initial window.
    Started { detected_ms: u64, centroid: Point<T> },
    Ended(Fixation<T>),
}

#[derive(Debug, Clone, Copy)]
struct Extent<T> {
    min: Point<T>,
    max: Point<T>,
    sum: Point<T>,
    count: usize,
    start_ms: u64,
    end_ms: u64,
}

impl<T: Scalar> Extent<T> {
    fn new(t: u64, p: Point<T>) -> Self {
        Self { min: p, max: p, sum: p, count: 1, start_ms: t, end_ms: t }
    }

    fn dispersion_with(&self, p: Point<T>) -> T {
        let wx = self.max.x.max(p.x) - self.min.x.min(p.x);
        let wy = self.max.y.max(p.y) - self.min.y.min(p.y);
        wx.max(wy)
    }

    fn add(&mut self, t: u64, p: Point<T>) {
        self.min = Point::new(self.min.x.min(p.x), self.min.y.min(p.y));
        self.max = Point::new(self.max.x.max(p.x), self.max.y.max(p.y));
        self.sum = Point::new(self.sum.x + p.x, self.sum.y + p.y);
        self.count += 1;
        self.end_ms = t;
    }

    fn centroid(&self) -> Point<T> {
        let n = T::from_usize(self.count).unwrap();
        Point::new(self.sum.x / n, self.sum.y / n)
    }

    fn close(&self) -> Fixation<T> {
        Fixation {
            start_ms: self.start_ms,
            end_ms: self.end_ms,
            centroid: self.centroid(),
            samples: self.count,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StreamingIdt<T> {
    dispersion: T,
    min_duration_ms: u64,
    pending: VecDeque<(u64, Point<T>)>,
    open: Option<Extent<T>>,
}

impl<T: Scalar> StreamingIdt<T> {
    pub fn new(dispersion: T, min_duration_ms: u64) -> Self {
        Self { dispersion, min_duration_ms, pending: VecDeque::new(), open: None }
    }

    pub fn is_open(&self) -> bool {
        self.open.is_some()
    }

    /// Feeds one point. `t` must exceed every previously fed timestamp.
    pub fn push(&mut self, t: u64, p: Point<T>, out: &mut Vec<IdtEvent<T>>) {
        if let Some(open) = self.open.as_mut() {
            if open.dispersion_with(p) <= self.dispersion {
                open.add(t, p);
                return;
            }
            out.push(IdtEvent::Ended(open.close()));
            self.open = None;
        }
        self.pending.push_back((t, p));
        self.search(t, out);
    }

    /// Closes any open fixation and forgets pending points.
    pub fn finish(&mut self) -> Option<Fixation<T>> {
        self.pending.clear();
        self.open.take().map(|e| e.close())
    }

    fn search(&mut self, now: u64, out: &mut Vec<IdtEvent<T>>) {
        while let Some(&(start, first)) = self.pending.front() {
            let Some(end) = self.pending.iter().position(|(t, _)| t - start >= self.min_duration_ms) else {
                return;
            };
            let mut extent = Extent::new(start, first);
            let mut tight = true;
            for &(t, p) in self.pending.iter().take(end + 1).skip(1) {
                if extent.dispersion_with(p) > self.dispersion {
                    tight = false;
                    break;
                }
                extent.add(t, p);
            }
            if !tight {
                self.pending.pop_front();
                continue;
            }
            out.push(IdtEvent::Started { detected_ms: now, centroid: extent.centroid() });
            let mut next = end + 1;
            while let Some(&(t, p)) = self.pending.get(next) {
                if extent.dispersion_with(p) > self.dispersion {
                    break;
                }
                extent.add(t, p);
                next += 1;
            }
            if next < self.pending.len() {
                out.push(IdtEvent::Ended(extent.close()));
                self.pending.drain(..next);
            } else {
                self.pending.clear();
                self.open = Some(extent);
                return;
            }
        }
    }
}
