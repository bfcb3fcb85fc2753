//! Polygon boolean areas via triangle decomposition and convex clipping.
//!
//! Both polygons are ear-clipped into triangles; pairwise triangle
//! intersections are convex, so Sutherland-Hodgman clipping followed by the
//! shoelace formula gives the intersection area exactly (up to rounding).

use super::{orient2d, point, Point};
use crate::geom::Polygon;

/// Ear-clipping triangulation of a simple polygon (counterclockwise cycle).
pub fn triangulate_simple(p: &Polygon) -> Vec<[Point; 3]> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    let v = p.vertices();
    let mut tris = Vec::with_capacity(p.len().saturating_sub(2));
    let mut guard = 0usize;
    while idx.len() > 3 {
        let n = idx.len();
        let mut clipped = false;
        for i in 0..n {
            let (ia, ib, ic) = (idx[(i + n - 1) % n], idx[i], idx[(i + 1) % n]);
            let (a, b, c) = (v[ia], v[ib], v[ic]);
            if orient2d(a, b, c) <= 0.0 {
                continue;
            }
            // No other remaining vertex may lie inside the candidate ear.
            let ear_ok = idx.iter().all(|&j| {
                if j == ia || j == ib || j == ic {
                    true
                } else {
                    !point_in_triangle_closed(v[j], a, b, c)
                }
            });
            if ear_ok {
                tris.push([a, b, c]);
                idx.remove(i);
                clipped = true;
                break;
            }
        }
        if !clipped {
            // Degenerate input (collinear runs); drop the flattest corner to
            // make progress. Zero-area ears contribute nothing.
            let n = idx.len();
            let mut best = (f64::INFINITY, 0usize);
            for i in 0..n {
                let (a, b, c) = (
                    v[idx[(i + n - 1) % n]],
                    v[idx[i]],
                    v[idx[(i + 1) % n]],
                );
                let ar = orient2d(a, b, c).abs();
                if ar < best.0 {
                    best = (ar, i);
                }
            }
            idx.remove(best.1);
            guard += 1;
            if guard > 2 * p.len() {
                break;
            }
        }
    }
    if idx.len() == 3 {
        let t = [v[idx[0]], v[idx[1]], v[idx[2]]];
        if orient2d(t[0], t[1], t[2]) > 0.0 {
            tris.push(t);
        }
    }
    tris
}

fn point_in_triangle_closed(p: Point, a: Point, b: Point, c: Point) -> bool {
    orient2d(a, b, p) >= 0.0 && orient2d(b, c, p) >= 0.0 && orient2d(c, a, p) >= 0.0
}

/// Clips a convex polygon (as a vertex list) against the half-plane to the
/// left of the directed line a -> b.
pub fn clip_halfplane(poly: &[Point], a: Point, b: Point) -> Vec<Point> {
    if poly.len() < 3 {
        return Vec::new();
    }
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let s = poly[i];
        let e = poly[(i + 1) % n];
        let sc = orient2d(a, b, s);
        let ec = orient2d(a, b, e);
        if sc >= 0.0 {
            out.push(s);
        }
        if (sc > 0.0 && ec < 0.0) || (sc < 0.0 && ec > 0.0) {
            let t = sc / (sc - ec);
            out.push(s + (e - s) * t);
        }
    }
    out
}

fn poly_area(pts: &[Point]) -> f64 {
    if pts.len() < 3 {
        return 0.0;
    }
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        s += pts[i].cross(pts[(i + 1) % n]);
    }
    0.5 * s.abs()
}

/// Area of the intersection of a convex piece with a triangle.
fn clip_convex_by_triangle(piece: &[Point], t: &[Point; 3]) -> Vec<Point> {
    let mut cur = piece.to_vec();
    for i in 0..3 {
        cur = clip_halfplane(&cur, t[i], t[(i + 1) % 3]);
        if cur.len() < 3 {
            return Vec::new();
        }
    }
    cur
}

/// |P0 n P1| by summing areas of pairwise triangle intersections.
pub fn intersection_area(p0: &Polygon, p1: &Polygon) -> f64 {
    let t0 = triangulate_simple(p0);
    let t1 = triangulate_simple(p1);
    let mut area = 0.0;
    for ta in &t0 {
        for tb in &t1 {
            area += poly_area(&clip_convex_by_triangle(ta, tb));
        }
    }
    area
}

/// |P0 delta P1| = |P0| + |P1| - 2 |P0 n P1|.
pub fn symmetric_difference_area(p0: &Polygon, p1: &Polygon) -> f64 {
    (p0.area() + p1.area() - 2.0 * intersection_area(p0, p1)).max(0.0)
}

/// Clips a convex piece to the horizontal band lo <= y <= hi.
pub fn clip_to_band(piece: &[Point], lo: f64, hi: f64) -> Vec<Point> {
    let keep_lo = clip_halfplane(piece, point(0.0, lo), point(1.0, lo));
    clip_halfplane(&keep_lo, point(1.0, hi), point(0.0, hi))
}

/// Area of `p` inside the band lo <= y <= hi.
pub fn area_in_band(p: &Polygon, lo: f64, hi: f64) -> f64 {
    triangulate_simple(p)
        .iter()
        .map(|t| poly_area(&clip_to_band(t, lo, hi)))
        .sum()
}

/// Per-band areas of the symmetric difference P0 delta P1, for bands given by
/// consecutive entries of `heights`.
pub fn symmetric_difference_by_band(p0: &Polygon, p1: &Polygon, heights: &[f64]) -> Vec<f64> {
    let t0 = triangulate_simple(p0);
    let t1 = triangulate_simple(p1);
    let mut out = Vec::with_capacity(heights.len().saturating_sub(1));
    for w in heights.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let a0: f64 = t0.iter().map(|t| poly_area(&clip_to_band(t, lo, hi))).sum();
        let a1: f64 = t1.iter().map(|t| poly_area(&clip_to_band(t, lo, hi))).sum();
        let mut inter = 0.0;
        for ta in &t0 {
            for tb in &t1 {
                let piece = clip_convex_by_triangle(ta, tb);
                if piece.len() >= 3 {
                    inter += poly_area(&clip_to_band(&piece, lo, hi));
                }
            }
        }
        out.push((a0 + a1 - 2.0 * inter).max(0.0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangulation_covers_area() {
        let p = Polygon::new(vec![
            point(0., 0.),
            point(2., 0.),
            point(2., 1.),
            point(1., 0.5), // reflex vertex
            point(0., 1.),
        ])
        .unwrap();
        let tris = triangulate_simple(&p);
        let sum: f64 = tris
            .iter()
            .map(|t| 0.5 * orient2d(t[0], t[1], t[2]).abs())
            .sum();
        assert!((sum - p.area()).abs() < 1e-12);
    }

    #[test]
    fn identical_polygons() {
        let p = Polygon::rectangle(0., 0., 1., 1.);
        assert!((intersection_area(&p, &p) - 1.0).abs() < 1e-12);
        assert!(symmetric_difference_area(&p, &p).abs() < 1e-12);
    }

    #[test]
    fn shifted_unit_square() {
        let p = Polygon::rectangle(0., 0., 1., 1.);
        let q = p.translated(point(0.1, 0.0));
        assert!((symmetric_difference_area(&p, &q) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn band_areas_partition() {
        let p = Polygon::rectangle(-0.3, -0.3, 0.3, 0.3);
        let below = area_in_band(&p, -1.0, 0.0);
        let above = area_in_band(&p, 0.0, 1.0);
        assert!((below - 0.18).abs() < 1e-12);
        assert!((above - 0.18).abs() < 1e-12);
    }
}
