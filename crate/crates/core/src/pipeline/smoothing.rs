//! Per-axis moving median over the most recent valid samples.

use std::collections::VecDeque;

use super::GazeSample;
use crate::geometry::Point;
use crate::scalar::Scalar;

/// Median of `values`; even counts average the two middle elements.
///
/// Sorts in place. `values` must be non-empty and NaN-free.
pub fn median<T: Scalar>(values: &mut [T]) -> T {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / T::lit(2.0)
    }
}

#[derive(Debug, Clone)]
pub struct MedianSmoother<T> {
    capacity: usize,
    window: VecDeque<Point<T>>,
    xs: Vec<T>,
    ys: Vec<T>,
}

impl<T: Scalar> MedianSmoother<T> {
    pub fn new(capacity: usize) -> Self {
        let capacity = capacity.max(1);
        Self {
            capacity,
            window: VecDeque::with_capacity(capacity),
            xs: Vec::with_capacity(capacity),
            ys: Vec::with_capacity(capacity),
        }
    }

    /// Smooths one sample. Invalid samples produce nothing and leave the window alone.
    pub fn smooth(&mut self, s: &GazeSample<T>) -> Option<Point<T>> {
        s.point.map(|p| self.push(p))
    }

    pub fn push(&mut self, p: Point<T>) -> Point<T> {
        if self.window.len() == self.capacity {
            self.window.pop_front();
        }
        self.window.push_back(p);
        self.xs.clear();
        self.ys.clear();
        for q in &self.window {
            self.xs.push(q.x);
            self.ys.push(q.y);
        }
        Point::new(median(&mut self.xs), median(&mut self.ys))
    }

    pub fn reset(&mut self) {
        self.window.clear();
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_stream_is_fixed_point() {
        let mut sm = MedianSmoother::new(5);
        for t in 0..20 {
            let out = sm.smooth(&GazeSample::valid(t, 100.0, 100.0)).unwrap();
            assert_eq!(out, Point::new(100.0, 100.0));
        }
    }

    #[test]
    fn single_outlier_suppressed() {
        let mut sm = MedianSmoother::new(5);
        let xs = [100.0, 100.0, 900.0, 100.0, 100.0];
        let mut last = None;
        for (t, x) in xs.iter().enumerate() {
            last = sm.smooth(&GazeSample::valid(t as u64, *x, 50.0));
        }
        // sorted window: [100, 100, 100, 100, 900]
        assert_eq!(last.unwrap().x, 100.0);
    }

    #[test]
    fn partial_window_uses_available_samples() {
        let mut sm = MedianSmoother::new(5);
        assert_eq!(sm.push(Point::new(10.0, 0.0)).x, 10.0);
        // two samples: mean of the middle pair
        assert_eq!(sm.push(Point::new(20.0, 0.0)).x, 15.0);
        assert_eq!(sm.push(Point::new(90.0, 0.0)).x, 20.0);
    }

    #[test]
    fn invalid_sample_skipped() {
        let mut sm = MedianSmoother::<f64>::new(5);
        assert!(sm.smooth(&GazeSample::invalid(3)).is_none());
        assert!(sm.is_empty());
    }
}
