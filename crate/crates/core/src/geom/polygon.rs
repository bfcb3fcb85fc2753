//! Simple polygons, admissibility validation and interface crossings.

use super::{
    dist_point_segment, orient2d, segment_horizontal_crossing, segments_intersect, Point, GEOM_EPS,
};
use crate::apriori::AprioriData;
use crate::geom::LayeredBackground;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A simple polygon given by its vertex cycle in counterclockwise order.
/// The closing side from the last vertex back to the first is implicit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Builds a polygon, normalizing the cycle to counterclockwise
    /// orientation. Simplicity is not enforced here: `validate_polygon`
    /// reports it as a constraint so that violations stay observable.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidPolygon(format!(
                "non-finite vertex ({}, {})",
                p.x, p.y
            )));
        }
        let mut vertices = vertices;
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i % self.vertices.len()]
    }

    /// Sides as (start, end) pairs in traversal order.
    pub fn sides(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.sides().map(|(a, b)| a.dist(b)).sum()
    }

    /// First pair of non-adjacent sides that intersect, if any.
    pub fn self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.vertices.len();
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            for j in i + 1..n {
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let (c, d) = (self.vertices[j], self.vertices[(j + 1) % n]);
                if segments_intersect(a, b, c, d, false) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_simple(&self) -> bool {
        self.self_intersection().is_none()
    }

    /// Even-odd point containment test; points on the boundary give an
    /// arbitrary but deterministic answer.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        let n = self.vertices.len();
        let mut j = n - 1;
        for i in 0..n {
            let vi = self.vertices[i];
            let vj = self.vertices[j];
            if (vi.y > p.y) != (vj.y > p.y) {
                let x_cross = vj.x + (p.y - vj.y) / (vi.y - vj.y) * (vi.x - vj.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        self.sides()
            .map(|(a, b)| dist_point_segment(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Interior angle at vertex i, in (0, 2 pi).
    pub fn interior_angle(&self, i: usize) -> f64 {
        let n = self.vertices.len();
        let prev = self.vertices[(i + n - 1) % n];
        let v = self.vertices[i];
        let next = self.vertices[(i + 1) % n];
        let u = prev - v;
        let w = next - v;
        // Counterclockwise cycle: the interior lies to the left of v -> next.
        let ang = (w.cross(u)).atan2(w.dot(u));
        if ang < 0.0 {
            ang + 2.0 * std::f64::consts::PI
        } else {
            ang
        }
    }

    pub fn translated(&self, d: Point) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|&v| v + d).collect(),
        }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        (lo, hi)
    }

    /// Axis-aligned rectangle helper.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon {
        Polygon::new(vec![
            super::point(x0, y0),
            super::point(x1, y0),
            super::point(x1, y1),
            super::point(x0, y1),
        ])
        .expect("rectangle is a valid polygon")
    }
}

fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut a = 0.0;
    for i in 0..n {
        a += vertices[i].cross(vertices[(i + 1) % n]);
    }
    0.5 * a
}

/// Admissibility constraints checked by `validate_polygon`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraint {
    NonSimplePolygon,
    TooManySides,
    SideTooShort,
    LipschitzClass,
    AngleViolation,
    BoundaryTooClose,
    VertexNearInterface,
    ContrastTooLow,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub constraint: Constraint,
    pub passed: bool,
    /// Worst measured quantity for the constraint.
    pub measured: f64,
    /// The bound it is compared against.
    pub requirement: f64,
    pub detail: String,
}

/// Outcome of validating a polygon against the admissible class.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassAReport {
    pub checks: Vec<ConstraintCheck>,
}

impl ClassAReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn violations(&self) -> impl Iterator<Item = &ConstraintCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, c: Constraint) -> Option<&ConstraintCheck> {
        self.checks.iter().find(|x| x.constraint == c)
    }
}

/// Validates every admissibility constraint and reports the measured
/// quantities. Violations are reported, never thrown.
///
/// The Lipschitz-class constraint has no independent algorithmic test for
/// simple polygons; it is reported as a derived pass whenever the side-length
/// and angle constraints hold.
pub fn validate_polygon(p: &Polygon, bg: &LayeredBackground, a: &AprioriData) -> ClassAReport {
    let mut checks = Vec::new();

    let simple = p.self_intersection();
    checks.push(ConstraintCheck {
        constraint: Constraint::NonSimplePolygon,
        passed: simple.is_none(),
        measured: if simple.is_some() { 1.0 } else { 0.0 },
        requirement: 0.0,
        detail: match simple {
            Some((i, j)) => format!("sides {i} and {j} intersect"),
            None => "simple".into(),
        },
    });

    checks.push(ConstraintCheck {
        constraint: Constraint::TooManySides,
        passed: p.len() <= a.n0,
        measured: p.len() as f64,
        requirement: a.n0 as f64,
        detail: format!("{} sides, at most {} allowed", p.len(), a.n0),
    });

    let (min_side, min_side_idx) = p
        .sides()
        .enumerate()
        .map(|(i, (u, v))| (u.dist(v), i))
        .fold((f64::INFINITY, 0), |acc, (d, i)| if d < acc.0 { (d, i) } else { acc });
    let sides_ok = min_side >= a.d0 - GEOM_EPS;
    checks.push(ConstraintCheck {
        constraint: Constraint::SideTooShort,
        passed: sides_ok,
        measured: min_side,
        requirement: a.d0,
        detail: format!("shortest side {min_side_idx} has length {min_side:.6}"),
    });

    let mut worst_angle_slack = f64::INFINITY;
    let mut worst_angle = 0.0;
    let mut worst_idx = 0;
    for i in 0..p.len() {
        let beta = p.interior_angle(i);
        let slack = (beta - a.beta0)
            .min(2.0 * std::f64::consts::PI - a.beta0 - beta)
            .min((beta - std::f64::consts::PI).abs() - a.beta0);
        if slack < worst_angle_slack {
            worst_angle_slack = slack;
            worst_angle = beta;
            worst_idx = i;
        }
    }
    let angles_ok = worst_angle_slack >= -GEOM_EPS;
    checks.push(ConstraintCheck {
        constraint: Constraint::AngleViolation,
        passed: angles_ok,
        measured: worst_angle,
        requirement: a.beta0,
        detail: format!("vertex {worst_idx} has interior angle {worst_angle:.6} rad"),
    });

    checks.push(ConstraintCheck {
        constraint: Constraint::LipschitzClass,
        passed: sides_ok && angles_ok,
        measured: if sides_ok && angles_ok { 1.0 } else { 0.0 },
        requirement: 1.0,
        detail: "derived from side-length and angle constraints".into(),
    });

    // Distance to the outer boundary of (-L, L)^2.
    let mut bdist = f64::INFINITY;
    for &v in p.vertices() {
        bdist = bdist
            .min(a.l - v.x.abs())
            .min(a.l - v.y.abs());
    }
    checks.push(ConstraintCheck {
        constraint: Constraint::BoundaryTooClose,
        passed: bdist >= a.d0 - GEOM_EPS,
        measured: bdist,
        requirement: a.d0,
        detail: format!("distance to the outer boundary is {bdist:.6}"),
    });

    let mut idist = f64::INFINITY;
    for &v in p.vertices() {
        for &w in bg.interior_interfaces() {
            idist = idist.min((v.y - w).abs());
        }
    }
    checks.push(ConstraintCheck {
        constraint: Constraint::VertexNearInterface,
        passed: idist >= a.d0 / 2.0 - GEOM_EPS,
        measured: idist,
        requirement: a.d0 / 2.0,
        detail: format!("closest vertex-interface distance is {idist:.6}"),
    });

    let mut contrast = f64::INFINITY;
    for &g in &bg.gammas {
        contrast = contrast.min((a.k - g).abs());
    }
    checks.push(ConstraintCheck {
        constraint: Constraint::ContrastTooLow,
        passed: contrast >= a.c0 - 1e-14,
        measured: contrast,
        requirement: a.c0,
        detail: format!("minimum contrast |k - gamma_i| = {contrast:.6}"),
    });

    ClassAReport { checks }
}

/// An intersection of the polygon boundary with an interior interface.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Crossing {
    pub point: Point,
    /// Side index of the polygon the crossing lies on.
    pub side: usize,
    /// Interior interface index (0-based into `interior_interfaces`).
    pub interface: usize,
    /// Parameter along the side, strictly in (0, 1).
    pub t: f64,
}

/// Intersections of the polygon boundary with the interfaces, listed in
/// traversal order of the boundary.
pub fn interface_crossings(p: &Polygon, bg: &LayeredBackground) -> Result<Vec<Crossing>> {
    for (i, v) in p.vertices().iter().enumerate() {
        for &w in bg.interior_interfaces() {
            if (v.y - w).abs() < GEOM_EPS {
                return Err(Error::VertexOnInterface { index: i, omega: w });
            }
        }
    }
    let mut out = Vec::new();
    for (side, (u, v)) in p.sides().enumerate() {
        let mut on_side: Vec<Crossing> = Vec::new();
        for (k, &w) in bg.interior_interfaces().iter().enumerate() {
            if let Some(q) = segment_horizontal_crossing(u, v, w) {
                let t = (q - u).norm() / (v - u).norm();
                on_side.push(Crossing { point: q, side, interface: k, t });
            }
        }
        on_side.sort_by(|a, b| a.t.total_cmp(&b.t));
        out.extend(on_side);
    }
    Ok(out)
}

/// Convexity test used by clipping helpers.
pub fn is_convex(p: &Polygon) -> bool {
    let n = p.len();
    (0..n).all(|i| orient2d(p.vertex(i), p.vertex(i + 1), p.vertex(i + 2)) >= 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::point;

    fn apriori() -> AprioriData {
        AprioriData {
            n0: 10,
            d0: 0.2,
            r0: 0.1,
            k0: 1.0,
            l: 1.0,
            beta0: std::f64::consts::FRAC_PI_4,
            c0: 0.5,
            k: 2.0,
            m: 2,
        }
    }

    fn bg() -> LayeredBackground {
        LayeredBackground::new(1.0, vec![-1.0, 0.0, 1.0], vec![1.0, 3.0]).unwrap()
    }

    #[test]
    fn orientation_normalized() {
        let p = Polygon::new(vec![point(0., 0.), point(0., 1.), point(1., 0.)]).unwrap();
        assert!(p.signed_area() > 0.0);
    }

    #[test]
    fn interior_angles_of_square() {
        let p = Polygon::rectangle(0., 0., 1., 1.);
        for i in 0..4 {
            assert!((p.interior_angle(i) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        }
    }

    #[test]
    fn reflex_angle_measured() {
        // An arrowhead with one reflex vertex.
        let p = Polygon::new(vec![
            point(0., 0.),
            point(2., 0.),
            point(1., 0.5),
            point(2., 2.),
        ])
        .unwrap();
        let reflex = (0..4).map(|i| p.interior_angle(i)).fold(0.0, f64::max);
        assert!(reflex > std::f64::consts::PI);
    }

    #[test]
    fn validation_all_pass_on_reference_square() {
        // Square of side 0.6 sitting above the interface at y = 0.
        let p = Polygon::rectangle(-0.3, 0.1, 0.3, 0.7);
        let report = validate_polygon(&p, &bg(), &apriori());
        assert!(report.passed(), "{:#?}", report.violations().collect::<Vec<_>>());
        let side = report.check(Constraint::SideTooShort).unwrap();
        assert!((side.measured - 0.6).abs() < 1e-12);
        let idist = report.check(Constraint::VertexNearInterface).unwrap();
        assert!((idist.measured - 0.1).abs() < 1e-12);
        let bdist = report.check(Constraint::BoundaryTooClose).unwrap();
        assert!((bdist.measured - 0.3).abs() < 1e-12);
    }

    #[test]
    fn short_side_detected() {
        let p = Polygon::new(vec![
            point(-0.3, 0.1),
            point(0.3, 0.1),
            point(0.3, 0.15), // side of length 0.05 < d0
            point(-0.3, 0.7),
        ])
        .unwrap();
        let report = validate_polygon(&p, &bg(), &apriori());
        let c = report.check(Constraint::SideTooShort).unwrap();
        assert!(!c.passed);
        assert!((c.measured - 0.05).abs() < 1e-12);
    }

    #[test]
    fn thin_triangle_fails_angles() {
        // Apex angle 0.05 rad at vertex 2.
        let half_base = 0.6 * (0.025f64).tan();
        let p = Polygon::new(vec![
            point(-half_base, 0.1),
            point(half_base, 0.1),
            point(0.0, 0.7),
        ])
        .unwrap();
        let apex = p.interior_angle(2);
        assert!((apex - 0.05).abs() < 1e-12);
        let report = validate_polygon(&p, &bg(), &apriori());
        assert!(!report.check(Constraint::AngleViolation).unwrap().passed);
    }

    #[test]
    fn non_simple_reported_not_thrown() {
        let bowtie = Polygon::new(vec![
            point(0., 0.),
            point(1., 1.),
            point(1., 0.),
            point(0., 1.),
        ])
        .unwrap();
        let report = validate_polygon(&bowtie, &bg(), &apriori());
        assert!(!report.check(Constraint::NonSimplePolygon).unwrap().passed);
    }

    #[test]
    fn crossings_of_straddling_square() {
        let p = Polygon::rectangle(-0.3, -0.3, 0.3, 0.3);
        let cr = interface_crossings(&p, &bg()).unwrap();
        assert_eq!(cr.len(), 2);
        // Traversal order: right side going up crosses first, then left side.
        assert!((cr[0].point.x - 0.3).abs() < 1e-14 && cr[0].point.y.abs() < 1e-14);
        assert!((cr[1].point.x + 0.3).abs() < 1e-14 && cr[1].point.y.abs() < 1e-14);
    }

    #[test]
    fn no_crossings_above_interface() {
        let p = Polygon::rectangle(-0.3, 0.1, 0.3, 0.7);
        assert!(interface_crossings(&p, &bg()).unwrap().is_empty());
    }

    #[test]
    fn vertex_on_interface_is_an_error() {
        let p = Polygon::rectangle(-0.3, 0.0, 0.3, 0.7);
        assert!(matches!(
            interface_crossings(&p, &bg()),
            Err(Error::VertexOnInterface { .. })
        ));
    }
}
