//! Vertex correspondence between two nearby admissible polygons.
//!
//! For d_H below the matching threshold delta0 the polygons have the same
//! number of vertices and the nearest-neighbour pairing preserves the cyclic
//! order, with every pair within C0 d_H. Interface crossing points are
//! appended side by side so the full marked chain can drive the displacement
//! construction.

use super::{hausdorff_distance, interface_crossings, validate_polygon, Point, Polygon};
use crate::apriori::AprioriData;
use crate::geom::LayeredBackground;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarkedKind {
    /// Polygon vertex with its original index.
    Vertex(usize),
    /// Interface crossing on the given interior interface.
    Crossing(usize),
}

/// One matched pair along the boundary chain.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub base: Point,
    pub target: Point,
    pub kind: MarkedKind,
}

impl MarkedPoint {
    pub fn displacement(&self) -> Point {
        self.target - self.base
    }
}

/// Matched vertex and crossing pairs of two polygons, ordered by traversal
/// of the base boundary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexCorrespondence {
    /// Marked points in traversal order of the base polygon boundary:
    /// vertices and crossings interleaved as they occur.
    pub chain: Vec<MarkedPoint>,
    /// Number of polygon vertices (crossings excluded).
    pub n_vertices: usize,
    /// Hausdorff distance of the pair.
    pub d_h: f64,
    /// Matching constant C0 used for the per-pair bound.
    pub c0: f64,
}

impl VertexCorrespondence {
    /// Total number of marked points M = N + k.
    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    /// Concatenated displacement vector V = (P1_j - P0_j)_j as a flat array.
    pub fn displacement_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.chain.len());
        for m in &self.chain {
            let d = m.displacement();
            v.push(d.x);
            v.push(d.y);
        }
        v
    }

    /// Euclidean length |V|.
    pub fn norm_v(&self) -> f64 {
        self.chain
            .iter()
            .map(|m| m.displacement().norm_sq())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_pair_distance(&self) -> f64 {
        self.chain
            .iter()
            .map(|m| m.displacement().norm())
            .fold(0.0, f64::max)
    }

    /// Builds a correspondence directly from a base polygon and explicit
    /// per-vertex displacements (crossing pairs derived from the geometry).
    /// Used for synthetic direction fields and re-based derivatives.
    pub fn from_vertex_displacements(
        p0: &Polygon,
        displacements: &[Point],
        bg: &LayeredBackground,
        c0: f64,
        d_h: f64,
    ) -> Result<Self> {
        if displacements.len() != p0.len() {
            return Err(Error::DimensionMismatch {
                expected: p0.len(),
                got: displacements.len(),
            });
        }
        let p1 = Polygon::new(
            p0.vertices()
                .iter()
                .zip(displacements)
                .map(|(&v, &d)| v + d)
                .collect(),
        )?;
        build_chain(p0, &p1, |i| i, bg, c0, d_h)
    }
}

/// Matches vertices of two admissible polygons and appends interface
/// crossing pairs, in traversal order of the base boundary.
pub fn match_vertices(
    p0: &Polygon,
    p1: &Polygon,
    bg: &LayeredBackground,
    a: &AprioriData,
) -> Result<VertexCorrespondence> {
    for (name, p) in [("base", p0), ("other", p1)] {
        let report = validate_polygon(p, bg, a);
        if !report.passed() {
            let worst = report.violations().next().unwrap();
            return Err(Error::InvalidPolygon(format!(
                "{name} polygon violates {:?}: {}",
                worst.constraint, worst.detail
            )));
        }
    }
    let d_h = hausdorff_distance(p0, p1);
    let delta0 = a.delta0();
    if d_h > delta0 {
        return Err(Error::DistanceTooLarge { d_h, delta0 });
    }
    if p0.len() != p1.len() {
        return Err(Error::InvalidPolygon(format!(
            "vertex counts differ ({} vs {}) despite d_H <= delta0; inputs are not both admissible",
            p0.len(),
            p1.len()
        )));
    }
    let n = p0.len();
    // Nearest neighbour per base vertex, smallest index on ties.
    let mut assign = vec![0usize; n];
    for i in 0..n {
        let v = p0.vertex(i);
        let mut best = (f64::INFINITY, 0usize);
        for j in 0..n {
            let d = v.dist(p1.vertex(j));
            if d < best.0 - 1e-15 {
                best = (d, j);
            }
        }
        assign[i] = best.1;
    }
    // Bijectivity and cyclic-order preservation.
    let mut seen = vec![false; n];
    for &j in &assign {
        if seen[j] {
            return Err(Error::InvalidPolygon(
                "nearest-neighbour vertex matching is not a bijection".into(),
            ));
        }
        seen[j] = true;
    }
    let shift = assign[0];
    for i in 0..n {
        if assign[i] != (shift + i) % n {
            return Err(Error::InvalidPolygon(
                "vertex matching does not preserve the cyclic order".into(),
            ));
        }
    }
    let c0 = a.matching_constant();
    let bound = c0 * d_h;
    for i in 0..n {
        let d = p0.vertex(i).dist(p1.vertex(assign[i]));
        if d > bound + 1e-12 {
            return Err(Error::InvalidPolygon(format!(
                "matched pair {i} at distance {d:.3e} exceeds C0 d_H = {bound:.3e}"
            )));
        }
    }
    build_chain(p0, p1, |i| assign[i], bg, c0, d_h)
}

/// Assembles the marked chain (vertices + crossings in traversal order).
fn build_chain(
    p0: &Polygon,
    p1: &Polygon,
    assign: impl Fn(usize) -> usize,
    bg: &LayeredBackground,
    c0: f64,
    d_h: f64,
) -> Result<VertexCorrespondence> {
    let n = p0.len();
    let cr0 = interface_crossings(p0, bg)?;
    let cr1 = interface_crossings(p1, bg)?;
    if cr0.len() != cr1.len() {
        return Err(Error::CrossingMismatch(cr0.len(), cr1.len()));
    }
    let mut chain = Vec::with_capacity(n + cr0.len());
    for i in 0..n {
        chain.push(MarkedPoint {
            base: p0.vertex(i),
            target: p1.vertex(assign(i)),
            kind: MarkedKind::Vertex(i),
        });
        // Crossings on side i of the base, paired with crossings on the
        // corresponding side of the target.
        let on0: Vec<_> = cr0.iter().filter(|c| c.side == i).collect();
        let on1: Vec<_> = cr1.iter().filter(|c| c.side == assign(i) % n).collect();
        if on0.len() != on1.len() {
            return Err(Error::CrossingMismatch(on0.len(), on1.len()));
        }
        for (c0x, c1x) in on0.iter().zip(on1.iter()) {
            if c0x.interface != c1x.interface {
                return Err(Error::CrossingMismatch(c0x.interface, c1x.interface));
            }
            chain.push(MarkedPoint {
                base: c0x.point,
                target: c1x.point,
                kind: MarkedKind::Crossing(c0x.interface),
            });
        }
    }
    Ok(VertexCorrespondence { chain, n_vertices: n, d_h, c0 })
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
            beta0: std::f64::consts::FRAC_PI_2,
            c0: 0.5,
            k: 2.0,
            m: 2,
        }
    }

    fn bg() -> LayeredBackground {
        LayeredBackground::new(1.0, vec![-1.0, 0.0, 1.0], vec![1.0, 3.0]).unwrap()
    }

    #[test]
    fn translated_square_pairs() {
        let a = apriori();
        assert!(a.delta0() >= 0.0125 - 1e-15);
        let p0 = Polygon::rectangle(-0.3, 0.1, 0.3, 0.7);
        let p1 = p0.translated(point(0.01, 0.0));
        let corr = match_vertices(&p0, &p1, &bg(), &a).unwrap();
        assert_eq!(corr.len(), 4);
        assert_eq!(corr.n_vertices, 4);
        for m in &corr.chain {
            assert!((m.displacement().norm() - 0.01).abs() < 1e-14);
        }
        assert!((corr.norm_v() - 0.02).abs() < 1e-14);
    }

    #[test]
    fn crossing_pairs_appended_in_order() {
        let a = apriori();
        let p0 = Polygon::rectangle(-0.3, -0.3, 0.3, 0.3);
        let p1 = p0.translated(point(0.005, 0.0));
        let corr = match_vertices(&p0, &p1, &bg(), &a).unwrap();
        assert_eq!(corr.len(), 6);
        let crossings: Vec<_> = corr
            .chain
            .iter()
            .filter(|m| matches!(m.kind, MarkedKind::Crossing(_)))
            .collect();
        assert_eq!(crossings.len(), 2);
        for c in crossings {
            // Crossing displacements are horizontal by construction.
            assert!(c.displacement().y.abs() < 1e-14);
            assert!((c.displacement().x - 0.005).abs() < 1e-14);
        }
    }

    #[test]
    fn too_far_apart_is_rejected() {
        let a = apriori();
        let p0 = Polygon::rectangle(-0.3, 0.1, 0.3, 0.7);
        let p1 = p0.translated(point(2.0 * a.delta0(), 0.0));
        assert!(matches!(
            match_vertices(&p0, &p1, &bg(), &a),
            Err(Error::DistanceTooLarge { .. })
        ));
    }
}
