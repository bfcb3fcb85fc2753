//! The piecewise-affine displacement field carrying one admissible polygon
//! to another, supported on a tubular strip around the base boundary.
//!
//! Construction: the strip of width d0/4 around the boundary chain is
//! triangulated (with the chain and the interface pieces outside the polygon
//! as constraint edges), nodal values are the chain displacement at the
//! closest chain point scaled by a linear cutoff in the distance, and nodes
//! on an interface outside the polygon keep only their horizontal component.
//! Everything downstream evaluates the field by point location in the strip.

mod family;
mod verify;

pub use family::FamilyMap;
pub use verify::{verify_phi_properties, PropertyCheck, PropertyReport};

use crate::apriori::AprioriData;
use crate::geom::{
    closest_point_on_segment, point, segments_intersect, LayeredBackground, MarkedPoint, Point,
    Polygon, VertexCorrespondence,
};
use crate::mesh::{self, EdgeKind, Mesh, MeshOptions, RegionTag, Sizing};
use crate::{Error, Result};
use nalgebra::Matrix2;

#[derive(Clone)]
pub struct DisplacementField {
    /// Triangulated strip (its outline is the outer offset loop).
    pub strip: Mesh,
    /// Displacement vector per strip node.
    pub nodal: Vec<Point>,
    /// Hausdorff distance of the pair the field interpolates.
    pub d_h: f64,
    /// Matching constant C0; together with d_h it scales the field bound.
    pub c0: f64,
    pub d0: f64,
    /// Cached displacement gradient per strip triangle.
    grads: Vec<Matrix2<f64>>,
}

impl DisplacementField {
    /// Displacement at x (zero outside the strip).
    pub fn eval(&self, x: Point) -> Point {
        match self.strip.locate(x) {
            None => point(0.0, 0.0),
            Some(t) => {
                let tri = self.strip.triangles[t];
                let [a, b, c] = self.strip.tri_points(t);
                let area2 = (b - a).cross(c - a);
                let wa = (b - x).cross(c - x) / area2;
                let wb = (c - x).cross(a - x) / area2;
                let wc = 1.0 - wa - wb;
                self.nodal[tri[0]] * wa + self.nodal[tri[1]] * wb + self.nodal[tri[2]] * wc
            }
        }
    }

    /// Displacement gradient at x (zero outside; constant per triangle).
    pub fn grad(&self, x: Point) -> Matrix2<f64> {
        match self.strip.locate(x) {
            None => Matrix2::zeros(),
            Some(t) => self.grads[t],
        }
    }

    pub fn grad_of_tri(&self, t: usize) -> Matrix2<f64> {
        self.grads[t]
    }

    /// div(U) I - (DU + DU^T), constant per strip triangle.
    pub fn cal_a(&self, x: Point) -> Matrix2<f64> {
        cal_a_from(self.grad(x))
    }

    pub fn sup_norm(&self) -> f64 {
        self.nodal.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest spectral norm of the displacement gradient.
    pub fn sup_grad_norm(&self) -> f64 {
        self.grads.iter().map(spectral_norm).fold(0.0, f64::max)
    }

    /// The construction bound sup|U| + (d0/8) sup|DU| <= C0 d_H.
    pub fn bound_slack(&self) -> f64 {
        self.c0 * self.d_h - (self.sup_norm() + self.d0 / 8.0 * self.sup_grad_norm())
    }

    /// Triangles with a nonzero contribution, with their region tags
    /// inherited from the carrying strip mesh.
    pub fn active_triangles(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.strip.n_triangles()).filter(move |&t| {
            let tri = self.strip.triangles[t];
            tri.iter().any(|&v| self.nodal[v].norm_sq() > 0.0)
        })
    }

    /// Scales the field (used for unit direction fields).
    pub fn scaled(&self, s: f64) -> DisplacementField {
        DisplacementField {
            strip: self.strip.clone(),
            nodal: self.nodal.iter().map(|&v| v * s).collect(),
            d_h: self.d_h * s.abs(),
            c0: self.c0,
            d0: self.d0,
            grads: self.grads.iter().map(|g| g * s).collect(),
        }
    }
}

pub fn cal_a_from(du: Matrix2<f64>) -> Matrix2<f64> {
    let div = du[(0, 0)] + du[(1, 1)];
    Matrix2::identity() * div - (du + du.transpose())
}

pub(crate) fn spectral_norm(m: &Matrix2<f64>) -> f64 {
    // Largest singular value of a 2x2 matrix, closed form.
    let a = m[(0, 0)];
    let b = m[(0, 1)];
    let c = m[(1, 0)];
    let d = m[(1, 1)];
    let q = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let s = ((q + 2.0 * det.abs()) * (q - 2.0 * det.abs()).max(0.0)).sqrt();
    (0.5 * (q + s)).sqrt()
}

/// Builds the displacement field for a matched pair. The correspondence must
/// come from the small-distance regime (d_H at most delta0 / 5).
pub fn build_displacement(
    corr: &VertexCorrespondence,
    p0: &Polygon,
    bg: &LayeredBackground,
    a: &AprioriData,
) -> Result<DisplacementField> {
    let delta0 = a.delta0();
    if corr.d_h > delta0 / 5.0 + 1e-15 {
        return Err(Error::DistanceTooLarge { d_h: corr.d_h, delta0: delta0 / 5.0 });
    }
    let width = a.d0 / 4.0;
    for attempt in 0..2 {
        let h_strip = a.d0 / 8.0 / (1.0 + attempt as f64);
        let field = build_once(corr, p0, bg, a, width, h_strip)?;
        if field.bound_slack() >= -1e-12 || corr.norm_v() == 0.0 {
            return Ok(field);
        }
    }
    Err(Error::InvalidInput(
        "displacement field exceeds its construction bound after refinement".into(),
    ))
}

fn build_once(
    corr: &VertexCorrespondence,
    p0: &Polygon,
    bg: &LayeredBackground,
    a: &AprioriData,
    width: f64,
    h_strip: f64,
) -> Result<DisplacementField> {
    let chain = &corr.chain;
    let loop_pts = offset_loop(p0, width)?;

    // Interface pieces inside the loop and outside the polygon.
    let mut segments: Vec<(Point, Point, EdgeKind)> = Vec::new();
    for w in 0..chain.len() {
        let (u, v) = (chain[w].base, chain[(w + 1) % chain.len()].base);
        segments.push((u, v, EdgeKind::Inclusion));
    }
    for &wy in bg.interior_interfaces() {
        let mut xs: Vec<f64> = Vec::new();
        let n = loop_pts.len();
        for i in 0..n {
            let (u, v) = (loop_pts[i], loop_pts[(i + 1) % n]);
            if let Some(q) = crate::geom::segment_horizontal_crossing(u, v, wy) {
                xs.push(q.x);
            }
        }
        // Crossing points of the chain with this interface are chain nodes.
        for m in chain {
            if (m.base.y - wy).abs() < 1e-12 {
                xs.push(m.base.x);
            }
        }
        xs.sort_by(|p, q| p.total_cmp(q));
        xs.dedup_by(|p, q| (*p - *q).abs() < 1e-13);
        for w2 in xs.windows(2) {
            let mid = point(0.5 * (w2[0] + w2[1]), wy);
            let inside_loop = point_in_loop(mid, &loop_pts);
            if inside_loop && !p0.contains(mid) {
                segments.push((point(w2[0], wy), point(w2[1], wy), EdgeKind::Interface));
            }
        }
    }

    // Subdivide constraints to the strip size.
    let mut sub: Vec<(Point, Point, EdgeKind)> = Vec::new();
    for (u, v, kind) in segments {
        let n = (u.dist(v) / h_strip).ceil().max(1.0) as usize;
        for k in 0..n {
            sub.push((
                u + (v - u) * (k as f64 / n as f64),
                u + (v - u) * ((k + 1) as f64 / n as f64),
                kind,
            ));
        }
    }
    // Outline chain subdivided to the strip size.
    let mut outline_chain: Vec<Point> = Vec::new();
    let n = loop_pts.len();
    for i in 0..n {
        let (u, v) = (loop_pts[i], loop_pts[(i + 1) % n]);
        let steps = (u.dist(v) / h_strip).ceil().max(1.0) as usize;
        for k in 0..steps {
            outline_chain.push(u + (v - u) * (k as f64 / steps as f64));
        }
    }

    let mut opts = MeshOptions::new(h_strip);
    opts.sizing = Sizing::Uniform(h_strip);
    let input = mesh::PslgInput { outline_chain, segments: sub };
    let strip = mesh::build_mesh(
        &input,
        &opts,
        |a, b| {
            let mid = (a + b) / 2.0;
            if bg
                .interior_interfaces()
                .iter()
                .any(|&w| (mid.y - w).abs() < 1e-10)
            {
                EdgeKind::Interface
            } else {
                EdgeKind::Inclusion
            }
        },
        |c| RegionTag { layer: bg.layer_of(c.y), inside: p0.contains(c) },
    )?;

    // Nodal values.
    let interfaces = bg.interior_interfaces();
    let mut nodal = Vec::with_capacity(strip.n_nodes());
    for &x in &strip.nodes {
        let (dist, u_b) = chain_value(chain, x);
        let eta = (1.0 - dist / width).max(0.0);
        let mut v = u_b * eta;
        let on_interface = interfaces.iter().any(|&w| (x.y - w).abs() < 1e-12);
        if on_interface {
            let strictly_inside = p0.contains(x) && p0.distance_to_boundary(x) > 1e-12;
            if !strictly_inside {
                v = point(v.x, 0.0);
            }
        }
        nodal.push(v);
    }

    let grads = (0..strip.n_triangles())
        .map(|t| {
            let pts = strip.tri_points(t);
            let (g, _) = crate::forward::element_gradients(&pts);
            let tri = strip.triangles[t];
            let mut m = Matrix2::zeros();
            for (gi, &vi) in g.iter().zip(tri.iter()) {
                let val = nodal[vi];
                m[(0, 0)] += val.x * gi.x;
                m[(0, 1)] += val.x * gi.y;
                m[(1, 0)] += val.y * gi.x;
                m[(1, 1)] += val.y * gi.y;
            }
            m
        })
        .collect();

    Ok(DisplacementField {
        strip,
        nodal,
        d_h: corr.d_h,
        c0: corr.c0,
        d0: a.d0,
        grads,
    })
}

/// Distance to the chain polyline and the chain displacement at the closest
/// point (affine per sub-segment).
fn chain_value(chain: &[MarkedPoint], x: Point) -> (f64, Point) {
    let mut best = (f64::INFINITY, point(0.0, 0.0));
    let m = chain.len();
    for i in 0..m {
        let (a, b) = (chain[i], chain[(i + 1) % m]);
        let (q, t) = closest_point_on_segment(x, a.base, b.base);
        let d = q.dist(x);
        if d < best.0 {
            let val = a.displacement() * (1.0 - t) + b.displacement() * t;
            best = (d, val);
        }
    }
    best
}

/// Outward offset loop of the polygon at the given distance, with fan joins
/// at convex vertices and miter joins at reflex ones.
fn offset_loop(p: &Polygon, r: f64) -> Result<Vec<Point>> {
    let n = p.len();
    let mut loop_pts: Vec<Point> = Vec::new();
    for i in 0..n {
        let prev = p.vertex(i + n - 1);
        let v = p.vertex(i);
        let next = p.vertex(i + 1);
        let d_in = (v - prev).normalized();
        let d_out = (next - v).normalized();
        // Outward normals for a ccw polygon point right of the direction.
        let n_in = point(d_in.y, -d_in.x);
        let n_out = point(d_out.y, -d_out.x);
        let turn = d_in.cross(d_out);
        if turn >= 0.0 {
            // Convex vertex: fan from n_in to n_out.
            let a0 = n_in.y.atan2(n_in.x);
            let mut a1 = n_out.y.atan2(n_out.x);
            while a1 > a0 {
                a1 -= 2.0 * std::f64::consts::PI;
            }
            let steps = (((a0 - a1) / 0.6).ceil() as usize).max(1);
            for k in 0..=steps {
                let ang = a0 + (a1 - a0) * (k as f64 / steps as f64);
                loop_pts.push(v + point(ang.cos(), ang.sin()) * r);
            }
        } else {
            // Reflex vertex: offset lines intersect at the miter point.
            let bis = (n_in + n_out).normalized();
            let denom = bis.dot(n_in);
            let miter = v + bis * (r / denom.max(0.2));
            loop_pts.push(miter);
        }
    }
    // Orientation: keep ccw.
    let poly = Polygon::new(loop_pts)?;
    let pts = poly.vertices().to_vec();
    // Simplicity check; a failure means the strip would self-intersect.
    let m = pts.len();
    for i in 0..m {
        let (a, b) = (pts[i], pts[(i + 1) % m]);
        for j in i + 1..m {
            if j == i || (j + 1) % m == i || (i + 1) % m == j {
                continue;
            }
            let (c, d) = (pts[j], pts[(j + 1) % m]);
            if segments_intersect(a, b, c, d, true) {
                return Err(Error::StripCollision { width: r });
            }
        }
    }
    Ok(pts)
}

fn point_in_loop(x: Point, loop_pts: &[Point]) -> bool {
    let mut inside = false;
    let n = loop_pts.len();
    let mut j = n - 1;
    for i in 0..n {
        let (vi, vj) = (loop_pts[i], loop_pts[j]);
        if (vi.y > x.y) != (vj.y > x.y) {
            let xc = vj.x + (x.y - vj.y) / (vi.y - vj.y) * (vi.x - vj.x);
            if x.x < xc {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}
