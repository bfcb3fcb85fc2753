//! P1 mass and stiffness matrices on the closed outer boundary curve
//! (arc-length Laplace-Beltrami), the discrete carrier of the fractional
//! trace norms.

use super::Mesh;
use nalgebra::DMatrix;

/// Boundary trace matrices on the mesh's boundary node cycle.
pub struct BoundaryTrace {
    /// Boundary node ordering (mesh node indices, ccw cycle).
    pub nodes: Vec<usize>,
    /// P1 mass matrix of the boundary curve.
    pub mass: DMatrix<f64>,
    /// Arc-length Laplace-Beltrami stiffness; kernel = constants.
    pub stiffness: DMatrix<f64>,
}

/// Assembles the cyclic P1 mass/stiffness pair on the boundary curve.
pub fn boundary_trace_space(mesh: &Mesh) -> BoundaryTrace {
    let cycle = &mesh.boundary_nodes;
    let n = cycle.len();
    let mut mass = DMatrix::zeros(n, n);
    let mut stiffness = DMatrix::zeros(n, n);
    for i in 0..n {
        let j = (i + 1) % n;
        let len = mesh.nodes[cycle[i]].dist(mesh.nodes[cycle[j]]);
        // Element mass [l/3, l/6; l/6, l/3], stiffness [1/l, -1/l; -1/l, 1/l].
        mass[(i, i)] += len / 3.0;
        mass[(j, j)] += len / 3.0;
        mass[(i, j)] += len / 6.0;
        mass[(j, i)] += len / 6.0;
        stiffness[(i, i)] += 1.0 / len;
        stiffness[(j, j)] += 1.0 / len;
        stiffness[(i, j)] -= 1.0 / len;
        stiffness[(j, i)] -= 1.0 / len;
    }
    BoundaryTrace { nodes: cycle.clone(), mass, stiffness }
}

impl BoundaryTrace {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    /// Total boundary length (sum of row sums of the mass matrix).
    pub fn perimeter(&self) -> f64 {
        self.mass.iter().sum()
    }
}
