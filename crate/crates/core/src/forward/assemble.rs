//! Stiffness assembly with per-triangle scalar or matrix coefficients.
//!
//! One centroid quadrature point per triangle is exact here: coefficients
//! are constant per triangle and P1 gradients are constant.

use super::ConductivityField;
use crate::exec;
use crate::geom::Point;
use crate::linalg::{CsrMatrix, Triplets};
use crate::mesh::Mesh;
use nalgebra::Matrix2;

/// Per-triangle diffusion coefficient.
#[derive(Clone, Copy, Debug)]
pub enum TriCoeff {
    Scalar(f64),
    Matrix(Matrix2<f64>),
}

impl TriCoeff {
    fn apply(&self, g: Point) -> Point {
        match self {
            TriCoeff::Scalar(s) => g * *s,
            TriCoeff::Matrix(m) => Point {
                x: m[(0, 0)] * g.x + m[(0, 1)] * g.y,
                y: m[(1, 0)] * g.x + m[(1, 1)] * g.y,
            },
        }
    }
}

/// P1 shape-function gradients of a triangle (constant), with its area.
pub fn element_gradients(p: &[Point; 3]) -> ([Point; 3], f64) {
    let area2 = (p[1] - p[0]).cross(p[2] - p[0]);
    let g = [
        (p[2] - p[1]).perp() / area2,
        (p[0] - p[2]).perp() / area2,
        (p[1] - p[0]).perp() / area2,
    ];
    (g, area2 * 0.5)
}

/// Stiffness matrix with boundary rows included. Element matrices are
/// computed in parallel; the scatter runs in a fixed order so assembly is
/// deterministic.
pub fn assemble_with(mesh: &Mesh, coeff: impl Fn(usize) -> TriCoeff + Sync + Send) -> CsrMatrix {
    let nt = mesh.n_triangles();
    let elems: Vec<[[f64; 3]; 3]> = exec::map_indexed(nt, |t| {
        let pts = mesh.tri_points(t);
        let (g, area) = element_gradients(&pts);
        let c = coeff(t);
        let cg = [c.apply(g[0]), c.apply(g[1]), c.apply(g[2])];
        let mut ke = [[0.0; 3]; 3];
        for (i, ke_row) in ke.iter_mut().enumerate() {
            for (j, e) in ke_row.iter_mut().enumerate() {
                *e = area * cg[i].dot(g[j]);
            }
        }
        ke
    });
    let mut trip = Triplets::new(mesh.n_nodes());
    for (t, ke) in elems.iter().enumerate() {
        let tri = mesh.triangles[t];
        for i in 0..3 {
            for j in 0..3 {
                trip.push(tri[i], tri[j], ke[i][j]);
            }
        }
    }
    trip.to_csr()
}

/// Scalar-conductivity assembly (region-tag lookup per triangle), optionally
/// composed with a per-triangle symmetric matrix field.
pub fn assemble_stiffness(
    mesh: &Mesh,
    gamma: &ConductivityField,
    matrix_field: Option<&(dyn Fn(usize) -> Matrix2<f64> + Sync)>,
) -> CsrMatrix {
    match matrix_field {
        None => assemble_with(mesh, |t| TriCoeff::Scalar(gamma.value(mesh.region[t]))),
        Some(field) => assemble_with(mesh, |t| {
            TriCoeff::Matrix(field(t) * gamma.value(mesh.region[t]))
        }),
    }
}

/// Splits the full stiffness into interior/boundary blocks for Dirichlet
/// elimination. Boundary positions follow the mesh boundary cycle.
pub struct StiffnessParts {
    pub full: CsrMatrix,
    /// Interior node index per mesh node (None on the boundary).
    pub interior_of: Vec<Option<usize>>,
    /// Boundary cycle position per mesh node.
    pub boundary_of: Vec<Option<usize>>,
    pub interior: Vec<usize>,
    pub kii: CsrMatrix,
    /// Interior rows by boundary-cycle columns.
    pub kib: CsrMatrix,
    pub kbb: CsrMatrix,
}

impl StiffnessParts {
    pub fn split(mesh: &Mesh, full: CsrMatrix) -> Self {
        let n = mesh.n_nodes();
        let mut boundary_of = vec![None; n];
        for (pos, &b) in mesh.boundary_nodes.iter().enumerate() {
            boundary_of[b] = Some(pos);
        }
        let mut interior_of = vec![None; n];
        let mut interior = Vec::new();
        for v in 0..n {
            if boundary_of[v].is_none() {
                interior_of[v] = Some(interior.len());
                interior.push(v);
            }
        }
        let ni = interior.len();
        let nb = mesh.boundary_nodes.len();
        let mut tii = Triplets::new(ni);
        let mut tib = Triplets::rect(ni, nb);
        let mut tbb = Triplets::new(nb);
        for v in 0..n {
            for (c, val) in full.row(v) {
                match (interior_of[v], interior_of[c]) {
                    (Some(i), Some(j)) => tii.push(i, j, val),
                    (Some(i), None) => tib.push(i, boundary_of[c].unwrap(), val),
                    (None, Some(_)) => {}
                    (None, None) => {
                        tbb.push(boundary_of[v].unwrap(), boundary_of[c].unwrap(), val)
                    }
                }
            }
        }
        Self {
            full,
            interior_of,
            boundary_of,
            interior,
            kii: tii.to_csr(),
            kib: tib.to_csr(),
            kbb: tbb.to_csr(),
        }
    }

    /// Energy bilinear form u^T K v over all nodes.
    pub fn energy(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = u.len();
        let mut kv = vec![0.0; n];
        self.full.mul_vec(v, &mut kv);
        u.iter().zip(&kv).map(|(a, b)| a * b).sum()
    }
}
