//! Incremental constrained Delaunay triangulation.
//!
//! Bowyer-Watson insertion over a super-triangle, segment recovery by
//! corridor retriangulation, then removal of everything outside the domain
//! outline. Insertion order is fixed by the caller so meshes are
//! bit-reproducible.

use crate::geom::{orient2d, Point};
use crate::{Error, Result};
use std::collections::{BTreeSet, HashMap, HashSet};

pub const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct Tri {
    /// Vertex indices, counterclockwise.
    pub v: [usize; 3],
    /// Neighbor opposite each vertex (NONE on the hull).
    pub nb: [usize; 3],
    pub alive: bool,
}

impl Tri {
    /// Edge opposite vertex j, as an ordered pair (ccw).
    fn edge(&self, j: usize) -> (usize, usize) {
        (self.v[(j + 1) % 3], self.v[(j + 2) % 3])
    }
}

pub struct Triangulation {
    pub points: Vec<Point>,
    pub tris: Vec<Tri>,
    /// Constrained edges as sorted vertex pairs.
    pub constrained: HashSet<(usize, usize)>,
    /// One live triangle incident to each vertex (lazily maintained).
    vert_tri: Vec<usize>,
    last_located: usize,
}

pub fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Strictly positive when d lies inside the circumcircle of ccw (a, b, c).
/// Ties and near-ties resolve to zero; input points are well separated so
/// this only affects symmetric grids, where any resolution is valid.
fn incircle(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let adx = a.x - d.x;
    let ady = a.y - d.y;
    let bdx = b.x - d.x;
    let bdy = b.y - d.y;
    let cdx = c.x - d.x;
    let cdy = c.y - d.y;
    let ad = adx * adx + ady * ady;
    let bd = bdx * bdx + bdy * bdy;
    let cd = cdx * cdx + cdy * cdy;
    let det =
        adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
    let perm = adx.abs() * (bdy.abs() * cd + bd * cdy.abs())
        + ady.abs() * (bdx.abs() * cd + bd * cdx.abs())
        + ad * (bdx.abs() * cdy.abs() + bdy.abs() * cdx.abs());
    if det.abs() <= 1e-12 * perm {
        0.0
    } else {
        det
    }
}

impl Triangulation {
    /// Starts from a super-triangle enclosing a disk of radius `span`
    /// around the origin.
    pub fn new(span: f64) -> Self {
        let s = 64.0 * span.max(1.0);
        let points = vec![
            Point { x: -s, y: -s },
            Point { x: s, y: -s },
            Point { x: 0.0, y: s },
        ];
        let tris = vec![Tri { v: [0, 1, 2], nb: [NONE, NONE, NONE], alive: true }];
        Self {
            points,
            tris,
            constrained: HashSet::new(),
            vert_tri: vec![0, 0, 0],
            last_located: 0,
        }
    }

    fn edge_index(&self, t: usize, a: usize, b: usize) -> Option<usize> {
        (0..3).find(|&j| {
            let (u, w) = self.tris[t].edge(j);
            (u == a && w == b) || (u == b && w == a)
        })
    }

    /// Live triangles incident to vertex v (ring walk with scan fallback).
    fn triangles_around(&self, v: usize) -> Vec<usize> {
        let mut seed = self.vert_tri[v];
        if seed >= self.tris.len() || !self.tris[seed].alive || !self.tris[seed].v.contains(&v) {
            match self
                .tris
                .iter()
                .position(|t| t.alive && t.v.contains(&v))
            {
                Some(t) => seed = t,
                None => return Vec::new(),
            }
        }
        let mut out = vec![seed];
        let mut seen = HashSet::from([seed]);
        let mut stack = vec![seed];
        while let Some(t) = stack.pop() {
            for j in 0..3 {
                if self.tris[t].v[j] == v {
                    continue;
                }
                let n = self.tris[t].nb[j];
                if n != NONE && self.tris[n].alive && self.tris[n].v.contains(&v) && seen.insert(n)
                {
                    out.push(n);
                    stack.push(n);
                }
            }
        }
        out
    }

    pub fn find_edge(&self, a: usize, b: usize) -> Option<(usize, usize)> {
        for t in self.triangles_around(a) {
            if let Some(j) = self.edge_index(t, a, b) {
                return Some((t, j));
            }
        }
        None
    }

    /// Walks from a live triangle to one containing p.
    fn locate(&self, p: Point) -> Result<usize> {
        let mut t = if self.last_located < self.tris.len() && self.tris[self.last_located].alive {
            self.last_located
        } else {
            self.tris.iter().position(|t| t.alive).unwrap()
        };
        let mut prev = NONE;
        let max_steps = 8 * self.tris.len().max(16);
        for _ in 0..max_steps {
            let tri = &self.tris[t];
            let mut next = NONE;
            let mut inside = true;
            for j in 0..3 {
                let (u, w) = tri.edge(j);
                if orient2d(self.points[u], self.points[w], p) < 0.0 {
                    inside = false;
                    if tri.nb[j] != NONE && tri.nb[j] != prev {
                        next = tri.nb[j];
                        break;
                    }
                }
            }
            if inside {
                return Ok(t);
            }
            if next == NONE {
                // Allow backtracking as a last resort.
                for j in 0..3 {
                    let (u, w) = tri.edge(j);
                    if orient2d(self.points[u], self.points[w], p) < 0.0 && tri.nb[j] != NONE {
                        next = tri.nb[j];
                        break;
                    }
                }
            }
            if next == NONE {
                return Err(Error::InvalidInput(format!(
                    "point ({}, {}) lies outside the triangulation",
                    p.x, p.y
                )));
            }
            prev = t;
            t = next;
        }
        Err(Error::InvalidInput("point location walk did not terminate".into()))
    }

    /// Inserts a point and returns its index; coincident points return the
    /// existing index. Cavity growth never crosses constrained edges.
    pub fn insert(&mut self, p: Point) -> Result<usize> {
        let start = self.locate(p)?;
        for &vi in &self.tris[start].v {
            if self.points[vi] == p {
                return Ok(vi);
            }
        }
        let pi = self.points.len();
        self.points.push(p);
        self.vert_tri.push(0);

        let mut in_cavity = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            for j in 0..3 {
                let n = self.tris[t].nb[j];
                if n == NONE || in_cavity.contains(&n) {
                    continue;
                }
                let (a, b) = self.tris[t].edge(j);
                if self.constrained.contains(&key(a, b)) {
                    continue;
                }
                let tv = self.tris[n].v;
                if incircle(self.points[tv[0]], self.points[tv[1]], self.points[tv[2]], p) > 0.0 {
                    in_cavity.insert(n);
                    stack.push(n);
                }
            }
        }

        let mut boundary: Vec<(usize, usize, usize)> = Vec::new();
        for &t in &in_cavity {
            for j in 0..3 {
                let n = self.tris[t].nb[j];
                if n == NONE || !in_cavity.contains(&n) {
                    let (a, b) = self.tris[t].edge(j);
                    boundary.push((a, b, n));
                }
            }
        }
        for &t in &in_cavity {
            self.tris[t].alive = false;
        }
        // Cavity boundary edges form a cycle around pi: each vertex starts
        // exactly one directed boundary edge.
        let mut starts_at: HashMap<usize, usize> = HashMap::new();
        let mut ends_at: HashMap<usize, usize> = HashMap::new();
        let mut new_tris = Vec::with_capacity(boundary.len());
        for &(a, b, outside) in &boundary {
            let ti = self.tris.len();
            self.tris.push(Tri { v: [pi, a, b], nb: [outside, NONE, NONE], alive: true });
            if outside != NONE {
                let j = self
                    .edge_index(outside, a, b)
                    .expect("cavity boundary adjacency");
                self.tris[outside].nb[j] = ti;
            }
            starts_at.insert(a, ti);
            ends_at.insert(b, ti);
            new_tris.push(ti);
            self.vert_tri[a] = ti;
            self.vert_tri[b] = ti;
        }
        self.vert_tri[pi] = new_tris[0];
        for &ti in &new_tris {
            let [_, a, b] = self.tris[ti].v;
            if let Some(&tn) = starts_at.get(&b) {
                self.tris[ti].nb[1] = tn; // opposite a: edge (b, pi)
            }
            if let Some(&tn) = ends_at.get(&a) {
                self.tris[ti].nb[2] = tn; // opposite b: edge (pi, a)
            }
        }
        self.last_located = new_tris[0];
        Ok(pi)
    }

    /// Enforces segment (a, b) as a union of constrained edges; vertices
    /// lying exactly on the open segment split it recursively.
    pub fn insert_segment(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Ok(());
        }
        if self.find_edge(a, b).is_some() {
            self.constrained.insert(key(a, b));
            return Ok(());
        }
        let pa = self.points[a];
        let pb = self.points[b];

        // Entry triangle: b's direction lies in the wedge at a.
        let mut cur = NONE;
        let mut right = NONE;
        let mut left = NONE;
        for t in self.triangles_around(a) {
            let tv = self.tris[t].v;
            let j = (0..3).find(|&j| tv[j] == a).unwrap();
            let (u, w) = (tv[(j + 1) % 3], tv[(j + 2) % 3]);
            for &m in &[u, w] {
                if m != b
                    && orient2d(pa, pb, self.points[m]) == 0.0
                    && (self.points[m] - pa).dot(pb - pa) > 0.0
                    && (self.points[m] - pb).dot(pa - pb) > 0.0
                {
                    self.insert_segment(a, m)?;
                    self.insert_segment(m, b)?;
                    return Ok(());
                }
            }
            let o_u = orient2d(pa, pb, self.points[u]);
            let o_w = orient2d(pa, pb, self.points[w]);
            // Exit through edge (u, w): u strictly right, w strictly left.
            if o_u < 0.0 && o_w > 0.0 {
                cur = t;
                right = u;
                left = w;
                break;
            }
        }
        if cur == NONE {
            return Err(Error::InvalidInput(format!(
                "cannot recover constraint segment {a}-{b}"
            )));
        }

        let mut right_chain = vec![a, right];
        let mut left_chain = vec![a, left];
        let mut dead = vec![cur];
        loop {
            if self.constrained.contains(&key(right, left)) {
                return Err(Error::InvalidInput(
                    "constraint segments cross; inputs must be pre-split at intersections".into(),
                ));
            }
            let t = *dead.last().unwrap();
            let j = self.edge_index(t, right, left).unwrap();
            let n = self.tris[t].nb[j];
            if n == NONE {
                return Err(Error::InvalidInput("constraint walk left the triangulation".into()));
            }
            let jn = self.edge_index(n, right, left).unwrap();
            let x = self.tris[n].v[jn];
            dead.push(n);
            if x == b {
                right_chain.push(b);
                left_chain.push(b);
                break;
            }
            let ox = orient2d(pa, pb, self.points[x]);
            if ox == 0.0 {
                // The segment runs through vertex x; restore what we walked
                // over and recurse on the halves. We have not mutated yet.
                self.insert_segment(a, x)?;
                self.insert_segment(x, b)?;
                return Ok(());
            }
            if ox < 0.0 {
                right_chain.push(x);
                right = x;
            } else {
                left_chain.push(x);
                left = x;
            }
        }

        // Outside neighbors of the corridor, keyed by sorted edge.
        let dead_set: HashSet<usize> = dead.iter().copied().collect();
        let mut outside: HashMap<(usize, usize), usize> = HashMap::new();
        for &t in &dead {
            for j in 0..3 {
                let n = self.tris[t].nb[j];
                if n == NONE || !dead_set.contains(&n) {
                    let (x, y) = self.tris[t].edge(j);
                    outside.insert(key(x, y), n);
                }
            }
        }
        for &t in &dead {
            self.tris[t].alive = false;
        }

        let mut created = Vec::new();
        self.fill_pseudo_polygon(&left_chain, &mut created);
        let right_rev: Vec<usize> = right_chain.into_iter().rev().collect();
        self.fill_pseudo_polygon(&right_rev, &mut created);

        // Stitch adjacency among created triangles and to the outside.
        let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
        for &t in &created {
            for j in 0..3 {
                let (x, y) = self.tris[t].edge(j);
                owner.insert((x, y), t);
            }
        }
        for &t in &created {
            for j in 0..3 {
                let (x, y) = self.tris[t].edge(j);
                if let Some(&tn) = owner.get(&(y, x)) {
                    self.tris[t].nb[j] = tn;
                } else if let Some(&n) = outside.get(&key(x, y)) {
                    self.tris[t].nb[j] = n;
                    if n != NONE {
                        let jj = self
                            .edge_index(n, x, y)
                            .expect("outside adjacency is consistent");
                        self.tris[n].nb[jj] = t;
                    }
                } else {
                    self.tris[t].nb[j] = NONE;
                }
            }
            for &v in &self.tris[t].v {
                self.vert_tri[v] = t;
            }
        }
        self.constrained.insert(key(a, b));
        Ok(())
    }

    /// Triangulates the open polyline chain (one side of a cut edge),
    /// Delaunay with respect to its own vertices.
    fn fill_pseudo_polygon(&mut self, chain: &[usize], created: &mut Vec<usize>) {
        let n = chain.len();
        if n < 3 {
            return;
        }
        let (a, b) = (chain[0], chain[n - 1]);
        let mut c_idx = 1;
        for i in 2..n - 1 {
            let c = chain[c_idx];
            if incircle(self.points[a], self.points[b], self.points[c], self.points[chain[i]])
                > 0.0
            {
                c_idx = i;
            }
        }
        let c = chain[c_idx];
        let (v0, v1, v2) = if orient2d(self.points[a], self.points[c], self.points[b]) > 0.0 {
            (a, c, b)
        } else {
            (b, c, a)
        };
        let ti = self.tris.len();
        self.tris.push(Tri { v: [v0, v1, v2], nb: [NONE, NONE, NONE], alive: true });
        created.push(ti);
        self.fill_pseudo_polygon(&chain[..=c_idx], created);
        self.fill_pseudo_polygon(&chain[c_idx..], created);
    }

    /// Removes the constraint mark from an edge (both directions).
    pub fn unconstrain(&mut self, a: usize, b: usize) {
        self.constrained.remove(&key(a, b));
    }

    /// Flood-fills from the super-triangle fans and kills every triangle
    /// reachable without crossing a constrained edge; the domain outline is
    /// a closed constraint loop, so its interior survives.
    pub fn carve_outline(&mut self) {
        let seeds: Vec<usize> = self
            .tris
            .iter()
            .enumerate()
            .filter(|(_, t)| t.alive && t.v.iter().any(|&v| v < 3))
            .map(|(i, _)| i)
            .collect();
        let mut outside: HashSet<usize> = HashSet::new();
        let mut stack = seeds;
        while let Some(t) = stack.pop() {
            if !outside.insert(t) {
                continue;
            }
            for j in 0..3 {
                let n = self.tris[t].nb[j];
                if n == NONE || outside.contains(&n) || !self.tris[n].alive {
                    continue;
                }
                let (a, b) = self.tris[t].edge(j);
                if self.constrained.contains(&key(a, b)) {
                    continue;
                }
                stack.push(n);
            }
        }
        for t in outside {
            self.tris[t].alive = false;
        }
        for t in 0..self.tris.len() {
            if !self.tris[t].alive {
                continue;
            }
            for j in 0..3 {
                let n = self.tris[t].nb[j];
                if n != NONE && !self.tris[n].alive {
                    self.tris[t].nb[j] = NONE;
                }
            }
        }
        // Refresh the vertex-to-triangle seeds killed by the carve.
        for (ti, tri) in self.tris.iter().enumerate() {
            if tri.alive {
                for &v in &tri.v {
                    self.vert_tri[v] = ti;
                }
            }
        }
    }

    /// Splits constrained edge (a, b) at point p (on the open segment):
    /// the mark is lifted, the point inserted, and both halves re-marked.
    pub fn split_constrained_edge(&mut self, a: usize, b: usize, p: Point) -> Result<usize> {
        self.unconstrain(a, b);
        let m = self.insert(p)?;
        self.constrained.insert(key(a, m));
        self.constrained.insert(key(m, b));
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::point;

    fn assert_valid(t: &Triangulation) {
        // Positive orientation and mutual adjacency.
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for (ti, tri) in t.tris.iter().enumerate() {
            if !tri.alive {
                continue;
            }
            assert!(
                orient2d(t.points[tri.v[0]], t.points[tri.v[1]], t.points[tri.v[2]]) > 0.0,
                "triangle {ti} is not ccw"
            );
            for j in 0..3 {
                let (a, b) = tri.edge(j);
                *edge_count.entry(key(a, b)).or_insert(0) += 1;
                let n = tri.nb[j];
                if n != NONE {
                    assert!(t.tris[n].alive, "dead neighbor");
                    let jj = t.edge_index(n, a, b).expect("neighbor shares edge");
                    assert_eq!(t.tris[n].nb[jj], ti, "adjacency is mutual");
                }
            }
        }
        for (_, c) in edge_count {
            assert!(c <= 2, "edge shared by more than two triangles");
        }
    }

    #[test]
    fn random_insertions_stay_delaunay_valid() {
        let mut t = Triangulation::new(2.0);
        let mut x = 0.5f64;
        let mut pts = Vec::new();
        for i in 0..200 {
            // Deterministic scrambled points in [-1, 1]^2.
            x = (x * 997.0 + i as f64 * 0.173).fract();
            let y = ((x * 761.0).fract() * 2.0) - 1.0;
            let p = point(x * 2.0 - 1.0, y);
            pts.push(p);
        }
        pts.sort_by(|p, q| (p.x, p.y).partial_cmp(&(q.x, q.y)).unwrap());
        pts.dedup();
        for &p in &pts {
            t.insert(p).unwrap();
        }
        assert_valid(&t);
        // Empty circumcircle property against all points (super verts excluded).
        for tri in t.tris.iter().filter(|t| t.alive) {
            if tri.v.iter().any(|&v| v < 3) {
                continue;
            }
            let (a, b, c) = (t.points[tri.v[0]], t.points[tri.v[1]], t.points[tri.v[2]]);
            for (i, &p) in t.points.iter().enumerate().skip(3) {
                if tri.v.contains(&i) {
                    continue;
                }
                assert!(
                    incircle(a, b, c, p) <= 0.0,
                    "point {i} violates the empty circle property"
                );
            }
        }
    }

    #[test]
    fn segment_recovery_produces_the_edge() {
        let mut t = Triangulation::new(2.0);
        let a = t.insert(point(-0.9, 0.0)).unwrap();
        let b = t.insert(point(0.9, 0.01)).unwrap();
        // Points scattered so that (a, b) is not a Delaunay edge.
        for k in 0..30 {
            let s = k as f64 / 29.0;
            t.insert(point(-0.8 + 1.6 * s, 0.4 * (s * 13.0).sin())).unwrap();
            t.insert(point(-0.8 + 1.6 * s, -0.35 + 0.2 * (s * 7.0).cos()))
                .unwrap();
        }
        t.insert_segment(a, b).unwrap();
        assert!(t.find_edge(a, b).is_some());
        assert!(t.constrained.contains(&key(a, b)));
        assert_valid(&t);
    }

    #[test]
    fn outline_carving_keeps_interior() {
        let mut t = Triangulation::new(2.0);
        let c = [
            point(-1.0, -1.0),
            point(1.0, -1.0),
            point(1.0, 1.0),
            point(-1.0, 1.0),
        ];
        let idx: Vec<usize> = c.iter().map(|&p| t.insert(p).unwrap()).collect();
        for i in 0..4 {
            t.insert_segment(idx[i], idx[(i + 1) % 4]).unwrap();
        }
        t.insert(point(0.3, 0.2)).unwrap();
        t.carve_outline();
        let area: f64 = t
            .tris
            .iter()
            .filter(|t| t.alive)
            .map(|tri| {
                0.5 * orient2d(t.points[tri.v[0]], t.points[tri.v[1]], t.points[tri.v[2]])
            })
            .sum();
        assert!((area - 4.0).abs() < 1e-12, "carved area {area}");
        assert_valid(&t);
    }
}
