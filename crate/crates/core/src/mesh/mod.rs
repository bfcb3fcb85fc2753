//! Conforming triangulations of the layered domain.
//!
//! The triangulation resolves the outer boundary, every interior interface
//! and the inclusion boundary as unions of mesh edges, with per-triangle
//! region tags. The outer boundary subdivision depends only on the domain
//! outline, the interface heights and the target size h, and refinement
//! never splits outer edges, so meshes built for different inclusions share
//! their boundary trace space.

pub(crate) mod delaunay;
mod refine;
pub mod trace;

pub use refine::RefineStats;
pub use trace::{boundary_trace_space, BoundaryTrace};

use crate::geom::{orient2d, point, LayeredBackground, Point, Polygon};
use crate::{Error, Result};
use delaunay::{key, Triangulation};
use std::collections::HashMap;

/// Domain outline: the square (-L, L)^2, optionally extended by the probe
/// chimney (-d0, d0) x [L, L + 2 d0] on top.
#[derive(Clone, Debug)]
pub struct Domain {
    pub bg: LayeredBackground,
    pub chimney: Option<f64>,
}

impl Domain {
    pub fn square(bg: LayeredBackground) -> Self {
        Self { bg, chimney: None }
    }

    /// Square domain extended by the chimney of half-width d0; the chimney
    /// keeps the top layer conductivity.
    pub fn with_chimney(bg: LayeredBackground, d0: f64) -> Self {
        Self { bg, chimney: Some(d0) }
    }

    /// Counterclockwise outline.
    pub fn outline(&self) -> Vec<Point> {
        let l = self.bg.l;
        match self.chimney {
            None => vec![
                point(-l, -l),
                point(l, -l),
                point(l, l),
                point(-l, l),
            ],
            Some(d0) => vec![
                point(-l, -l),
                point(l, -l),
                point(l, l),
                point(d0, l),
                point(d0, l + 2.0 * d0),
                point(-d0, l + 2.0 * d0),
                point(-d0, l),
                point(-l, l),
            ],
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        let l = self.bg.l;
        let in_square = p.x.abs() <= l && p.y.abs() <= l;
        match self.chimney {
            None => in_square,
            Some(d0) => {
                in_square || (p.x.abs() <= d0 && p.y >= l && p.y <= l + 2.0 * d0)
            }
        }
    }
}

/// Spatially varying target edge length.
#[derive(Clone)]
pub enum Sizing {
    Uniform(f64),
    /// h_near within `radius` of the segment [a, b], growing linearly with
    /// distance up to h_far.
    GradedNearSegment {
        h_far: f64,
        h_near: f64,
        a: Point,
        b: Point,
        radius: f64,
        growth: f64,
    },
}

impl Sizing {
    pub fn base(&self) -> f64 {
        match self {
            Sizing::Uniform(h) => *h,
            Sizing::GradedNearSegment { h_far, .. } => *h_far,
        }
    }

    pub fn at(&self, p: Point) -> f64 {
        match self {
            Sizing::Uniform(h) => *h,
            Sizing::GradedNearSegment { h_far, h_near, a, b, radius, growth } => {
                let d = crate::geom::dist_point_segment(p, *a, *b);
                if d <= *radius {
                    *h_near
                } else {
                    (h_near + growth * (d - radius)).min(*h_far)
                }
            }
        }
    }
}

#[derive(Clone)]
pub struct MeshOptions {
    pub sizing: Sizing,
    /// Quality target for non-corner triangles, degrees.
    pub min_angle_deg: f64,
    /// Extra interior constraint segments to resolve.
    pub extra_segments: Vec<(Point, Point)>,
    /// Insertion budget for refinement.
    pub max_insertions: usize,
}

impl MeshOptions {
    pub fn new(h: f64) -> Self {
        Self {
            sizing: Sizing::Uniform(h),
            min_angle_deg: 20.0,
            extra_segments: Vec::new(),
            max_insertions: 400_000,
        }
    }
}

/// Per-triangle region: layer index and inclusion membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegionTag {
    pub layer: usize,
    pub inside: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Outer,
    Interface,
    Inclusion,
    Extra,
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub nodes: Vec<Point>,
    /// Positively oriented triangles.
    pub triangles: Vec<[usize; 3]>,
    pub region: Vec<RegionTag>,
    /// Outer boundary node cycle, counterclockwise.
    pub boundary_nodes: Vec<usize>,
    pub constraint_edges: Vec<(usize, usize, EdgeKind)>,
    locator: Locator,
}

impl Mesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn tri_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn tri_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.tri_points(t);
        0.5 * orient2d(a, b, c)
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.tri_points(t);
        (a + b + c) / 3.0
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.tri_area(t)).sum()
    }

    /// Smallest interior angle over all triangles, degrees.
    pub fn min_angle_deg(&self) -> f64 {
        (0..self.n_triangles())
            .map(|t| tri_min_angle_deg(&self.tri_points(t)))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = point(f64::INFINITY, f64::INFINITY);
        let mut hi = point(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.nodes {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    pub fn max_edge_len(&self) -> f64 {
        let mut m = 0.0f64;
        for t in 0..self.n_triangles() {
            let [a, b, c] = self.tri_points(t);
            m = m.max(a.dist(b)).max(b.dist(c)).max(c.dist(a));
        }
        m
    }

    /// Triangle containing p, if any (boundary-inclusive).
    pub fn locate(&self, p: Point) -> Option<usize> {
        self.locator.locate(self, p)
    }

    /// All undirected edges with the triangles on each side.
    pub fn edge_map(&self) -> HashMap<(usize, usize), Vec<usize>> {
        let mut m: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for j in 0..3 {
                let e = key(tri[(j + 1) % 3], tri[(j + 2) % 3]);
                m.entry(e).or_default().push(t);
            }
        }
        m
    }

    /// Structural conformity: every edge shared by at most two triangles,
    /// every triangle positively oriented.
    pub fn validate(&self) -> Result<()> {
        for t in 0..self.n_triangles() {
            if self.tri_area(t) <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "triangle {t} has non-positive area"
                )));
            }
        }
        for (e, ts) in self.edge_map() {
            if ts.len() > 2 {
                return Err(Error::InvalidInput(format!(
                    "edge {e:?} is shared by {} triangles",
                    ts.len()
                )));
            }
        }
        Ok(())
    }

    /// Plain-text export: header, node coordinates, then triangles with
    /// layer and inclusion tags.
    pub fn export_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        writeln!(s, "nodes {} triangles {}", self.n_nodes(), self.n_triangles()).unwrap();
        for p in &self.nodes {
            writeln!(s, "{:.17e} {:.17e}", p.x, p.y).unwrap();
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            let tag = self.region[t];
            writeln!(
                s,
                "{} {} {} {} {}",
                tri[0],
                tri[1],
                tri[2],
                tag.layer,
                if tag.inside { 1 } else { 0 }
            )
            .unwrap();
        }
        s
    }
}

fn tri_min_angle_deg(p: &[Point; 3]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..3 {
        let a = p[i];
        let u = (p[(i + 1) % 3] - a).normalized();
        let w = (p[(i + 2) % 3] - a).normalized();
        best = best.min(u.dot(w).clamp(-1.0, 1.0).acos());
    }
    best.to_degrees()
}

/// Uniform bucket grid for point location.
#[derive(Clone, Debug)]
struct Locator {
    lo: Point,
    inv_cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
}

impl Locator {
    fn build(nodes: &[Point], triangles: &[[usize; 3]]) -> Self {
        let mut lo = point(f64::INFINITY, f64::INFINITY);
        let mut hi = point(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in nodes {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
        let target = (triangles.len() as f64).sqrt().ceil().max(8.0) as usize;
        let nx = target.min(512);
        let ny = nx;
        let cell = span / nx as f64;
        let mut cells = vec![Vec::new(); nx * ny];
        let clampi = |v: f64, n: usize| -> usize { (v.max(0.0) as usize).min(n - 1) };
        for (t, tri) in triangles.iter().enumerate() {
            let pts = [nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]];
            let (mut tlo, mut thi) = (pts[0], pts[0]);
            for p in &pts[1..] {
                tlo.x = tlo.x.min(p.x);
                tlo.y = tlo.y.min(p.y);
                thi.x = thi.x.max(p.x);
                thi.y = thi.y.max(p.y);
            }
            let i0 = clampi((tlo.x - lo.x) / cell, nx);
            let i1 = clampi((thi.x - lo.x) / cell, nx);
            let j0 = clampi((tlo.y - lo.y) / cell, ny);
            let j1 = clampi((thi.y - lo.y) / cell, ny);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    cells[j * nx + i].push(t as u32);
                }
            }
        }
        Self { lo, inv_cell: 1.0 / cell, nx, ny, cells }
    }

    fn locate(&self, mesh: &Mesh, p: Point) -> Option<usize> {
        let i = (((p.x - self.lo.x) * self.inv_cell).max(0.0) as usize).min(self.nx - 1);
        let j = (((p.y - self.lo.y) * self.inv_cell).max(0.0) as usize).min(self.ny - 1);
        let eps = -1e-12;
        for &t in &self.cells[j * self.nx + i] {
            let [a, b, c] = mesh.tri_points(t as usize);
            let area2 = orient2d(a, b, c);
            if orient2d(a, b, p) >= eps * area2
                && orient2d(b, c, p) >= eps * area2
                && orient2d(c, a, p) >= eps * area2
            {
                return Some(t as usize);
            }
        }
        None
    }
}

/// Pre-split planar straight-line graph handed to the generic builder.
pub(crate) struct PslgInput {
    /// Closed outer chain, already subdivided; frozen through refinement.
    pub outline_chain: Vec<Point>,
    /// Interior constraints, pre-split at mutual intersections.
    pub segments: Vec<(Point, Point, EdgeKind)>,
}

/// Builds a conforming triangulation of the domain resolving the inclusion
/// boundary, the interfaces and any extra segments.
pub fn triangulate(
    domain: &Domain,
    inclusion: Option<&Polygon>,
    opts: &MeshOptions,
) -> Result<Mesh> {
    let bg = &domain.bg;
    let outline = domain.outline();
    let h = opts.sizing.base();
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("mesh size must be positive, got {h}")));
    }
    if let Some(p) = inclusion {
        if let Some((i, j)) = p.self_intersection() {
            return Err(Error::NonSimplePolygon(i, j));
        }
    }

    // --- PSLG assembly -----------------------------------------------------
    // Outer boundary: split sides at interface endpoints, then uniformly at
    // spacing <= h. This subdivision is frozen through refinement.
    let mut outer_chain: Vec<Point> = Vec::new();
    let n_out = outline.len();
    for i in 0..n_out {
        let a = outline[i];
        let b = outline[(i + 1) % n_out];
        let mut forced: Vec<Point> = vec![a];
        // Interface endpoints on vertical sides of the square.
        if (a.x - b.x).abs() < 1e-15 && a.x.abs() == bg.l {
            let mut heights: Vec<f64> = bg
                .interior_interfaces()
                .iter()
                .copied()
                .filter(|&w| w > a.y.min(b.y) + 1e-15 && w < a.y.max(b.y) - 1e-15)
                .collect();
            if b.y < a.y {
                heights.sort_by(|x, y| y.total_cmp(x));
            } else {
                heights.sort_by(|x, y| x.total_cmp(y));
            }
            forced.extend(heights.into_iter().map(|w| point(a.x, w)));
        }
        forced.push(b);
        for w in forced.windows(2) {
            let (u, v) = (w[0], w[1]);
            let n = (u.dist(v) / h).ceil().max(1.0) as usize;
            for k in 0..n {
                outer_chain.push(u + (v - u) * (k as f64 / n as f64));
            }
        }
    }

    // Interfaces and inclusion sides, mutually split at crossings.
    let mut segments: Vec<(Point, Point, EdgeKind)> = Vec::new();
    let crossings = match inclusion {
        Some(p) => crate::geom::interface_crossings(p, bg)?,
        None => Vec::new(),
    };
    for (iw, &w) in bg.interior_interfaces().iter().enumerate() {
        let mut cuts: Vec<Point> = vec![point(-bg.l, w), point(bg.l, w)];
        cuts.extend(
            crossings
                .iter()
                .filter(|c| c.interface == iw)
                .map(|c| c.point),
        );
        cuts.sort_by(|p, q| p.x.total_cmp(&q.x));
        cuts.dedup_by(|p, q| p.dist(*q) < 1e-14);
        for w2 in cuts.windows(2) {
            segments.push((w2[0], w2[1], EdgeKind::Interface));
        }
    }
    if let Some(p) = inclusion {
        for (side, (u, v)) in p.sides().enumerate() {
            let mut cuts: Vec<Point> = vec![u, v];
            let mut on_side: Vec<_> = crossings.iter().filter(|c| c.side == side).collect();
            on_side.sort_by(|a, b| a.t.total_cmp(&b.t));
            for c in on_side {
                cuts.insert(cuts.len() - 1, c.point);
            }
            for w2 in cuts.windows(2) {
                segments.push((w2[0], w2[1], EdgeKind::Inclusion));
            }
        }
    }
    for &(u, v) in &opts.extra_segments {
        segments.push((u, v, EdgeKind::Extra));
    }

    // Subdivide segments to the local size field.
    let mut sub_segments: Vec<(Point, Point, EdgeKind)> = Vec::new();
    for (u, v, kind) in segments {
        let mut stack = vec![(u, v)];
        while let Some((a, b)) = stack.pop() {
            let mid = (a + b) / 2.0;
            if a.dist(b) > opts.sizing.at(mid).max(1e-9) {
                stack.push((a, mid));
                stack.push((mid, b));
            } else {
                sub_segments.push((a, b, kind));
            }
        }
    }

    let input = PslgInput { outline_chain: outer_chain, segments: sub_segments };
    let classify = |a: Point, b: Point| -> EdgeKind {
        let mid = (a + b) / 2.0;
        for &w in bg.interior_interfaces() {
            if (mid.y - w).abs() < 1e-10 && (a.y - w).abs() < 1e-10 {
                return EdgeKind::Interface;
            }
        }
        if let Some(p) = inclusion {
            if p.distance_to_boundary(mid) < 1e-10 {
                return EdgeKind::Inclusion;
            }
        }
        EdgeKind::Extra
    };
    let tag = |c: Point| RegionTag {
        layer: bg.layer_of(c.y),
        inside: inclusion.map(|p| p.contains(c)).unwrap_or(false),
    };
    build_mesh(&input, opts, classify, tag)
}

/// Generic builder: Delaunay, constraint recovery, carving, refinement and
/// compaction. `classify` labels interior constrained edges, `tag` assigns
/// per-triangle regions by centroid.
pub(crate) fn build_mesh(
    input: &PslgInput,
    opts: &MeshOptions,
    classify: impl Fn(Point, Point) -> EdgeKind,
    tag: impl Fn(Point) -> RegionTag,
) -> Result<Mesh> {
    let outer_chain = &input.outline_chain;
    let span = outer_chain
        .iter()
        .map(|p| p.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    let mut tr = Triangulation::new(2.0 * span);

    let mut all_points: Vec<Point> = Vec::new();
    all_points.extend(outer_chain.iter().copied());
    for &(a, b, _) in &input.segments {
        all_points.push(a);
        all_points.push(b);
    }
    let mut order: Vec<Point> = all_points.clone();
    order.sort_by(|p, q| (p.x, p.y).partial_cmp(&(q.x, q.y)).unwrap());
    order.dedup_by(|p, q| p == q);

    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    let pkey = |p: Point| (p.x.to_bits(), p.y.to_bits());
    for &p in &order {
        let idx = tr.insert(p)?;
        index.insert(pkey(p), idx);
    }

    // Outer boundary loop, then interior constraints.
    let outer_idx: Vec<usize> = outer_chain.iter().map(|p| index[&pkey(*p)]).collect();
    let n_outer = outer_idx.len();
    for i in 0..n_outer {
        tr.insert_segment(outer_idx[i], outer_idx[(i + 1) % n_outer])?;
    }
    for &(a, b, _) in &input.segments {
        let (ia, ib) = (index[&pkey(a)], index[&pkey(b)]);
        tr.insert_segment(ia, ib)?;
    }

    tr.carve_outline();

    let outer_edges: std::collections::HashSet<(usize, usize)> = (0..n_outer)
        .map(|i| key(outer_idx[i], outer_idx[(i + 1) % n_outer]))
        .collect();
    refine::refine(&mut tr, &outer_edges, opts)?;

    // Compaction with deterministic renumbering.
    let mut node_map: HashMap<usize, usize> = HashMap::new();
    let mut nodes: Vec<Point> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut tri_order: Vec<usize> = tr
        .tris
        .iter()
        .enumerate()
        .filter(|(_, t)| t.alive)
        .map(|(i, _)| i)
        .collect();
    tri_order.sort_unstable();
    for &t in &tri_order {
        let tv = tr.tris[t].v;
        let mut mapped = [0usize; 3];
        for (slot, &v) in mapped.iter_mut().zip(tv.iter()) {
            let next = node_map.len();
            let idx = *node_map.entry(v).or_insert_with(|| {
                nodes.push(tr.points[v]);
                next
            });
            *slot = idx;
        }
        triangles.push(mapped);
    }

    let mut region = Vec::with_capacity(triangles.len());
    for tri in &triangles {
        let c = (nodes[tri[0]] + nodes[tri[1]] + nodes[tri[2]]) / 3.0;
        region.push(tag(c));
    }

    // Boundary cycle in outline order (frozen subdivision).
    let boundary_nodes: Vec<usize> = outer_idx
        .iter()
        .map(|v| {
            *node_map
                .get(v)
                .expect("outer boundary nodes survive carving")
        })
        .collect();

    let mut constraint_edges: Vec<(usize, usize, EdgeKind)> = Vec::new();
    for i in 0..n_outer {
        constraint_edges.push((
            boundary_nodes[i],
            boundary_nodes[(i + 1) % n_outer],
            EdgeKind::Outer,
        ));
    }
    // Interior constraints may have been split during refinement: collect
    // every constrained edge of the final triangulation and classify it by
    // its endpoints.
    let mut sorted_constrained: Vec<(usize, usize)> = tr.constrained.iter().copied().collect();
    sorted_constrained.sort_unstable();
    for &(a, b) in &sorted_constrained {
        let (Some(&na), Some(&nb)) = (node_map.get(&a), node_map.get(&b)) else {
            continue;
        };
        if outer_edges.contains(&key(a, b)) {
            continue;
        }
        constraint_edges.push((na, nb, classify(tr.points[a], tr.points[b])));
    }

    let locator = Locator::build(&nodes, &triangles);
    let mesh = Mesh {
        nodes,
        triangles,
        region,
        boundary_nodes,
        constraint_edges,
        locator,
    };
    mesh.validate()?;
    Ok(mesh)
}
