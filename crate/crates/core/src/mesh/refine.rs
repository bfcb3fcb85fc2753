//! Ruppert-style quality and size refinement on the constrained
//! triangulation. Outer boundary edges are frozen so the boundary trace
//! space is shared across meshes; interior constraint edges split at their
//! midpoints; bad triangles are fixed by circumcenter insertion with the
//! usual encroachment fallback.

use super::delaunay::{key, Triangulation, NONE};
use super::MeshOptions;
use crate::geom::{orient2d, Point};
use crate::{Error, Result};
use std::collections::HashSet;

pub struct RefineStats {
    pub inserted: usize,
    pub passes: usize,
    pub achieved_min_angle_deg: f64,
}

fn circumcenter(a: Point, b: Point, c: Point) -> Option<Point> {
    let d = 2.0 * ((b - a).cross(c - a));
    if d.abs() < 1e-30 {
        return None;
    }
    let asq = a.norm_sq();
    let bsq = b.norm_sq();
    let csq = c.norm_sq();
    let ux = (asq * (b.y - c.y) + bsq * (c.y - a.y) + csq * (a.y - b.y)) / d;
    let uy = (asq * (c.x - b.x) + bsq * (a.x - c.x) + csq * (b.x - a.x)) / d;
    Some(Point { x: ux, y: uy })
}

fn min_angle_rad(a: Point, b: Point, c: Point) -> (f64, usize) {
    let p = [a, b, c];
    let mut best = (f64::INFINITY, 0usize);
    for i in 0..3 {
        let u = (p[(i + 1) % 3] - p[i]).normalized();
        let w = (p[(i + 2) % 3] - p[i]).normalized();
        let ang = u.dot(w).clamp(-1.0, 1.0).acos();
        if ang < best.0 {
            best = (ang, i);
        }
    }
    best
}

/// q strictly inside the diametral circle of (a, b).
fn encroaches(q: Point, a: Point, b: Point) -> bool {
    (q - a).dot(q - b) < -1e-14 * a.dist(b).powi(2)
}

pub fn refine(
    tr: &mut Triangulation,
    outer: &HashSet<(usize, usize)>,
    opts: &MeshOptions,
) -> Result<RefineStats> {
    let target_rad = (opts.min_angle_deg + 1.0).to_radians();
    let mut inserted = 0usize;
    let mut passes = 0usize;

    for pass in 0..60 {
        passes = pass + 1;
        let mut changed = false;

        // Interior constrained edges: split when oversized or encroached.
        let mut snapshot: Vec<(usize, usize)> = tr
            .constrained
            .iter()
            .copied()
            .filter(|e| !outer.contains(e))
            .collect();
        snapshot.sort_unstable();
        for (a, b) in snapshot {
            if tr.find_edge(a, b).is_none() {
                continue; // replaced by earlier splits this pass
            }
            let (pa, pb) = (tr.points[a], tr.points[b]);
            let mid = (pa + pb) / 2.0;
            let oversized = pa.dist(pb) > opts.sizing.at(mid).max(1e-9) * 1.2;
            let encroached = edge_encroached(tr, a, b);
            if oversized || encroached {
                tr.split_constrained_edge(a, b, mid)?;
                inserted += 1;
                changed = true;
                if inserted > opts.max_insertions {
                    return Err(stall(tr, opts));
                }
            }
        }

        // Bucket grid over constrained edges for local encroachment queries.
        let grid = EdgeGrid::build(tr, opts.sizing.base());

        // Bad triangles by size or quality.
        let candidates: Vec<usize> = (0..tr.tris.len())
            .filter(|&t| tr.tris[t].alive && tr.tris[t].v.iter().all(|&v| v >= 3))
            .collect();
        for t in candidates {
            if !tr.tris[t].alive {
                continue;
            }
            let tv = tr.tris[t].v;
            let (pa, pb, pc) = (tr.points[tv[0]], tr.points[tv[1]], tr.points[tv[2]]);
            if orient2d(pa, pb, pc) <= 0.0 {
                continue;
            }
            let centroid = (pa + pb + pc) / 3.0;
            let hloc = opts.sizing.at(centroid).max(1e-9);
            let longest = pa.dist(pb).max(pb.dist(pc)).max(pc.dist(pa));
            let (ang, ang_vertex) = min_angle_rad(pa, pb, pc);
            let oversized = longest > 1.2 * hloc;
            let mut poor = ang < target_rad;
            if poor && corner_exempt(tr, t, ang_vertex) {
                poor = false;
            }
            if !oversized && !poor {
                continue;
            }
            let Some(cc) = circumcenter(pa, pb, pc) else {
                continue;
            };
            // Encroachment fallback: split the offended constrained edge
            // instead of inserting; skip the triangle if that edge is outer.
            let mut handled = false;
            let mut skip = false;
            for (ea, eb) in grid.near(cc) {
                if tr.find_edge(ea, eb).is_none() {
                    continue;
                }
                let (qa, qb) = (tr.points[ea], tr.points[eb]);
                let near_edge = crate::geom::dist_point_segment(cc, qa, qb) < 1e-9 * qa.dist(qb);
                if encroaches(cc, qa, qb) || near_edge {
                    if outer.contains(&key(ea, eb)) {
                        skip = true;
                    } else {
                        tr.split_constrained_edge(ea, eb, (qa + qb) / 2.0)?;
                        inserted += 1;
                        changed = true;
                        handled = true;
                    }
                    break;
                }
            }
            if handled || skip {
                if inserted > opts.max_insertions {
                    return Err(stall(tr, opts));
                }
                continue;
            }
            if tr.insert(cc).is_ok() {
                inserted += 1;
                changed = true;
                if inserted > opts.max_insertions {
                    return Err(stall(tr, opts));
                }
            }
        }

        if !changed {
            break;
        }
    }

    let achieved = achieved_min_angle(tr, outer);
    if achieved < opts.min_angle_deg - 0.5 {
        return Err(Error::RefinementStall {
            achieved_deg: achieved,
            target_deg: opts.min_angle_deg,
        });
    }
    Ok(RefineStats { inserted, passes, achieved_min_angle_deg: achieved })
}

fn stall(tr: &Triangulation, opts: &MeshOptions) -> Error {
    Error::RefinementStall {
        achieved_deg: achieved_min_angle(tr, &HashSet::new()),
        target_deg: opts.min_angle_deg,
    }
}

/// Smallest angle over non-exempt live triangles, degrees.
fn achieved_min_angle(tr: &Triangulation, _outer: &HashSet<(usize, usize)>) -> f64 {
    let mut worst = f64::INFINITY;
    for t in 0..tr.tris.len() {
        if !tr.tris[t].alive || tr.tris[t].v.iter().any(|&v| v < 3) {
            continue;
        }
        let tv = tr.tris[t].v;
        let (ang, vtx) = min_angle_rad(tr.points[tv[0]], tr.points[tv[1]], tr.points[tv[2]]);
        if corner_exempt(tr, t, vtx) {
            continue;
        }
        worst = worst.min(ang.to_degrees());
    }
    worst
}

/// A triangle whose smallest angle sits between two constrained edges
/// inherits that angle from the input geometry and is exempt from the
/// quality target.
fn corner_exempt(tr: &Triangulation, t: usize, ang_vertex: usize) -> bool {
    let tv = tr.tris[t].v;
    let v = tv[ang_vertex];
    let u = tv[(ang_vertex + 1) % 3];
    let w = tv[(ang_vertex + 2) % 3];
    tr.constrained.contains(&key(v, u)) && tr.constrained.contains(&key(v, w))
}

/// Uniform bucket grid over constrained-edge midpoints. Constraint edges are
/// pre-split to the local size each pass, so any edge whose diametral disk
/// can reach a query point lies within one cell of it.
struct EdgeGrid {
    lo: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<(usize, usize)>>,
}

impl EdgeGrid {
    fn build(tr: &Triangulation, h: f64) -> Self {
        let mut edges: Vec<(usize, usize)> = tr.constrained.iter().copied().collect();
        edges.sort_unstable();
        let mut lo = Point { x: f64::INFINITY, y: f64::INFINITY };
        let mut hi = Point { x: f64::NEG_INFINITY, y: f64::NEG_INFINITY };
        for &(a, b) in &edges {
            for p in [tr.points[a], tr.points[b]] {
                lo.x = lo.x.min(p.x);
                lo.y = lo.y.min(p.y);
                hi.x = hi.x.max(p.x);
                hi.y = hi.y.max(p.y);
            }
        }
        let cell = (2.0 * h).max(1e-9);
        let nx = (((hi.x - lo.x) / cell).ceil() as usize + 1).max(1);
        let ny = (((hi.y - lo.y) / cell).ceil() as usize + 1).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for &(a, b) in &edges {
            let mid = (tr.points[a] + tr.points[b]) / 2.0;
            let i = (((mid.x - lo.x) / cell) as usize).min(nx - 1);
            let j = (((mid.y - lo.y) / cell) as usize).min(ny - 1);
            buckets[j * nx + i].push((a, b));
        }
        Self { lo, cell, nx, ny, buckets }
    }

    fn near(&self, p: Point) -> Vec<(usize, usize)> {
        let i = (((p.x - self.lo.x) / self.cell).max(0.0) as usize).min(self.nx - 1);
        let j = (((p.y - self.lo.y) / self.cell).max(0.0) as usize).min(self.ny - 1);
        let mut out = Vec::new();
        for dj in -1i64..=1 {
            for di in -1i64..=1 {
                let ii = i as i64 + di;
                let jj = j as i64 + dj;
                if ii < 0 || jj < 0 || ii >= self.nx as i64 || jj >= self.ny as i64 {
                    continue;
                }
                out.extend(&self.buckets[jj as usize * self.nx + ii as usize]);
            }
        }
        out
    }
}

/// Edge (a, b) encroached by the apex of either adjacent triangle.
fn edge_encroached(tr: &Triangulation, a: usize, b: usize) -> bool {
    let Some((t, j)) = tr.find_edge(a, b) else {
        return false;
    };
    let (pa, pb) = (tr.points[a], tr.points[b]);
    let apex = tr.tris[t].v[j];
    if encroaches(tr.points[apex], pa, pb) {
        return true;
    }
    let n = tr.tris[t].nb[j];
    if n != NONE {
        if let Some(jj) = (0..3).find(|&jj| {
            let e = (tr.tris[n].v[(jj + 1) % 3], tr.tris[n].v[(jj + 2) % 3]);
            key(e.0, e.1) == key(a, b)
        }) {
            let apex2 = tr.tris[n].v[jj];
            if encroaches(tr.points[apex2], pa, pb) {
                return true;
            }
        }
    }
    false
}
