//! Affine raw-to-screen calibration and its least-squares fit.

use serde::{Deserialize, Serialize};

use super::{GazeSample, PipelineError};
use crate::geometry::Point;
use crate::scalar::Scalar;

/// Affine map `x' = a*x + b*y + c`, `y' = d*x + e*y + f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub e: T,
    pub f: T,
}

impl<T: Scalar> Default for Calibration<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Scalar> Calibration<T> {
    pub fn identity() -> Self {
        Self::from_coefficients([T::one(), T::zero(), T::zero(), T::zero(), T::one(), T::zero()])
    }

    pub fn from_coefficients([a, b, c, d, e, f]: [T; 6]) -> Self {
        Self { a, b, c, d, e, f }
    }

    pub fn coefficients(&self) -> [T; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }

    pub fn determinant(&self) -> T {
        self.a * self.e - self.b * self.d
    }

    pub fn is_invertible(&self) -> bool {
        let det = self.determinant();
        det.is_finite() && det != T::zero() && self.coefficients().iter().all(|v| v.is_finite())
    }

    pub fn map_point(&self, p: Point<T>) -> Point<T> {
        Point {
            x: self.a * p.x + self.b * p.y + self.c,
            y: self.d * p.x + self.e * p.y + self.f,
        }
    }

    /// Maps valid samples; invalid samples pass through untouched.
    pub fn apply(&self, s: GazeSample<T>) -> GazeSample<T> {
        GazeSample {
            t_ms: s.t_ms,
            point: s.point.map(|p| self.map_point(p)),
        }
    }
}

/// Least-squares affine fit from `(raw, screen)` correspondences.
///
/// The raw points are centred before forming the normal equations, which
/// decouples the translation terms and leaves one 2x2 system per output axis.
pub fn fit_calibration<T: Scalar>(pairs: &[(Point<T>, Point<T>)]) -> Result<Calibration<T>, PipelineError> {
    if pairs.len() < 3 {
        return Err(PipelineError::InsufficientCalibration { pairs: pairs.len() });
    }
    let n = T::from_usize(pairs.len()).unwrap();
    let (mut mx, mut my, mut mu, mut mv) = (T::zero(), T::zero(), T::zero(), T::zero());
    for (raw, screen) in pairs {
        mx += raw.x;
        my += raw.y;
        mu += screen.x;
        mv += screen.y;
    }
    mx /= n;
    my /= n;
    mu /= n;
    mv /= n;

    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    let (mut sxu, mut syu, mut sxv, mut syv) = (T::zero(), T::zero(), T::zero(), T::zero());
    for (raw, screen) in pairs {
        let (dx, dy) = (raw.x - mx, raw.y - my);
        let (du, dv) = (screen.x - mu, screen.y - mv);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
        sxu += dx * du;
        syu += dy * du;
        sxv += dx * dv;
        syv += dy * dv;
    }

    let det = sxx * syy - sxy * sxy;
    let scale = sxx * syy;
    if !det.is_finite() || scale <= T::zero() || det <= scale * T::epsilon() * T::lit(1024.0) {
        return Err(PipelineError::DegenerateCalibration);
    }

    let a = (syy * sxu - sxy * syu) / det;
    let b = (sxx * syu - sxy * sxu) / det;
    let d = (syy * sxv - sxy * syv) / det;
    let e = (sxx * syv - sxy * sxv) / det;
    let c = mu - a * mx - b * my;
    let f = mv - d * mx - e * my;
    Ok(Calibration { a, b, c, d, e, f })
}
