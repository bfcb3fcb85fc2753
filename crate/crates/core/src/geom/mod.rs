//! Planar geometry: points, segments, polygons and the admissibility class.

mod background;
mod clip;
mod hausdorff;
mod matching;
mod polygon;

pub use background::LayeredBackground;
pub use clip::{
    area_in_band, clip_halfplane, clip_to_band, intersection_area, symmetric_difference_area,
    symmetric_difference_by_band, triangulate_simple,
};
pub use hausdorff::hausdorff_distance;
pub use matching::{match_vertices, MarkedKind, MarkedPoint, VertexCorrespondence};
pub use polygon::{
    interface_crossings, is_convex, validate_polygon, ClassAReport, Constraint, ConstraintCheck,
    Crossing, Polygon,
};

use serde::{Deserialize, Serialize};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

pub const fn point(x: f64, y: f64) -> Point {
    Point { x, y }
}

impl From<[f64; 2]> for Point {
    fn from(a: [f64; 2]) -> Self {
        point(a[0], a[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Point {
    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product `self x o`.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Point {
        let n = self.norm();
        point(self.x / n, self.y / n)
    }

    /// Rotation by +90 degrees.
    pub fn perp(self) -> Point {
        point(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        point(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        point(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        point(self.x * s, self.y * s)
    }
}

impl Div<f64> for Point {
    type Output = Point;
    fn div(self, s: f64) -> Point {
        point(self.x / s, self.y / s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        point(-self.x, -self.y)
    }
}

/// Geometric tolerance used by predicates that are not exact.
pub const GEOM_EPS: f64 = 1e-12;

// Error-free transforms used by the robust orientation fallback.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = f64::mul_add(a, b, -p);
    (p, err)
}

/// Sign of the signed area of triangle (a, b, c): > 0 counterclockwise.
///
/// Filtered f64 evaluation with a double-double fallback near zero. The
/// fallback is exact in the translated coordinates (a-c, b-c); translation
/// rounding is at ulp scale, far below the 1e-12 tolerance policy.
pub fn orient2d(a: Point, b: Point, c: Point) -> f64 {
    let acx = a.x - c.x;
    let acy = a.y - c.y;
    let bcx = b.x - c.x;
    let bcy = b.y - c.y;
    let det = acx * bcy - acy * bcx;
    let detsum = (acx * bcy).abs() + (acy * bcx).abs();
    // 3.33e-16 ~ (3 + 16 eps) eps, the standard first-stage filter bound.
    if det.abs() > 3.3306690738754716e-16 * detsum {
        return det;
    }
    // Double-double expansion of acx*bcy - acy*bcx.
    let (p1, e1) = two_prod(acx, bcy);
    let (p2, e2) = two_prod(acy, bcx);
    let (d, e3) = two_sum(p1, -p2);
    let tail = e1 - e2 + e3;
    let exact = d + tail;
    if exact != 0.0 {
        exact
    } else {
        0.0
    }
}

/// Closest point of segment [a, b] to p, returned with its parameter t in [0, 1].
pub fn closest_point_on_segment(p: Point, a: Point, b: Point) -> (Point, f64) {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return (a, 0.0);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    (a + ab * t, t)
}

pub fn dist_point_segment(p: Point, a: Point, b: Point) -> f64 {
    closest_point_on_segment(p, a, b).0.dist(p)
}

/// Do closed segments [a,b] and [c,d] intersect?
///
/// `strict` excludes contacts that only touch at shared endpoints.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point, strict: bool) -> bool {
    let d1 = orient2d(c, d, a);
    let d2 = orient2d(c, d, b);
    let d3 = orient2d(a, b, c);
    let d4 = orient2d(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    if strict {
        return false;
    }
    let on = |p: Point, q: Point, r: Point| -> bool {
        orient2d(p, q, r) == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    (d1 == 0.0 && on(c, d, a))
        || (d2 == 0.0 && on(c, d, b))
        || (d3 == 0.0 && on(a, b, c))
        || (d4 == 0.0 && on(a, b, d))
}

/// Intersection parameter of segment [a,b] with the horizontal line y = h,
/// when the segment crosses it transversally.
pub fn segment_horizontal_crossing(a: Point, b: Point, h: f64) -> Option<Point> {
    let (lo, hi) = if a.y < b.y { (a.y, b.y) } else { (b.y, a.y) };
    if h <= lo || h >= hi {
        return None;
    }
    let t = (h - a.y) / (b.y - a.y);
    Some(point(a.x + t * (b.x - a.x), h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_signs() {
        assert!(orient2d(point(0., 0.), point(1., 0.), point(0., 1.)) > 0.0);
        assert!(orient2d(point(0., 0.), point(0., 1.), point(1., 0.)) < 0.0);
        assert_eq!(orient2d(point(0., 0.), point(1., 1.), point(2., 2.)), 0.0);
    }

    #[test]
    fn orientation_near_degenerate_is_signed_consistently() {
        // Points almost collinear; the filtered path must agree with the
        // exact sign of the translated determinant.
        let a = point(0.5, 0.5);
        let b = point(12.0, 12.0);
        let c = point(24.0, 24.0 + 1e-30);
        let s1 = orient2d(a, b, c);
        let s2 = orient2d(b, c, a);
        let s3 = orient2d(c, a, b);
        assert!(s1 * s2 > 0.0 || (s1 == 0.0 && s2 == 0.0));
        assert!(s2 * s3 > 0.0 || (s2 == 0.0 && s3 == 0.0));
    }

    #[test]
    fn segment_predicates() {
        assert!(segments_intersect(
            point(0., 0.),
            point(1., 1.),
            point(0., 1.),
            point(1., 0.),
            true
        ));
        assert!(!segments_intersect(
            point(0., 0.),
            point(1., 0.),
            point(0., 1.),
            point(1., 1.),
            false
        ));
        // Shared endpoint counts only in non-strict mode.
        assert!(segments_intersect(
            point(0., 0.),
            point(1., 0.),
            point(1., 0.),
            point(2., 1.),
            false
        ));
        assert!(!segments_intersect(
            point(0., 0.),
            point(1., 0.),
            point(1., 0.),
            point(2., 1.),
            true
        ));
    }

    #[test]
    fn point_segment_distance() {
        let d = dist_point_segment(point(0., 1.), point(-1., 0.), point(1., 0.));
        assert!((d - 1.0).abs() < 1e-15);
        let d = dist_point_segment(point(3., 4.), point(-1., 0.), point(1., 0.));
        assert!((d - (2.0f64.powi(2) + 16.0).sqrt()).abs() < 1e-12);
    }
}
