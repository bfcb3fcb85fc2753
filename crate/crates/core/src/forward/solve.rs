//! Dirichlet solves on a shared factorization.

use super::assemble::{assemble_stiffness, assemble_with, StiffnessParts, TriCoeff};
use super::ConductivityField;
use crate::geom::Point;
use crate::linalg::SkylineCholesky;
use crate::mesh::Mesh;
use crate::perturb::FamilyMap;
use crate::{Error, Result};

/// A nodal P1 field interpolating given Dirichlet data.
#[derive(Clone, Debug)]
pub struct DiscreteSolution {
    /// Values on every mesh node.
    pub values: Vec<f64>,
    /// The boundary data it interpolates, on the boundary cycle.
    pub dirichlet: Vec<f64>,
    /// Relative algebraic residual of the interior Galerkin system.
    pub residual: f64,
}

impl DiscreteSolution {
    /// Constant gradient on triangle t.
    pub fn gradient(&self, mesh: &Mesh, t: usize) -> Point {
        let pts = mesh.tri_points(t);
        let (g, _) = super::assemble::element_gradients(&pts);
        let tri = mesh.triangles[t];
        g[0] * self.values[tri[0]] + g[1] * self.values[tri[1]] + g[2] * self.values[tri[2]]
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Worst violation of the discrete maximum principle against the
    /// Dirichlet data range.
    pub fn max_principle_violation(&self) -> f64 {
        let (dlo, dhi) = self
            .dirichlet
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let (lo, hi) = self.min_max();
        (dlo - lo).max(hi - dhi).max(0.0)
    }
}

/// Factored Dirichlet problem: assemble once, solve for many boundary data.
pub struct DirichletOperator<'m> {
    pub mesh: &'m Mesh,
    pub parts: StiffnessParts,
    factor: SkylineCholesky,
}

impl<'m> DirichletOperator<'m> {
    pub fn new(mesh: &'m Mesh, gamma: &ConductivityField) -> Result<Self> {
        Self::with_coeff(mesh, |t| TriCoeff::Scalar(gamma.value(mesh.region[t])))
    }

    /// Pullback variant: coefficient gamma * A(t) per triangle.
    pub fn pullback(
        mesh: &'m Mesh,
        gamma: &ConductivityField,
        family: &FamilyMap,
        t_param: f64,
    ) -> Result<Self> {
        Self::with_coeff(mesh, |t| {
            let a = family.pullback_a_at(t_param, mesh.centroid(t));
            match a {
                Ok(m) => TriCoeff::Matrix(m * gamma.value(mesh.region[t])),
                Err(_) => TriCoeff::Scalar(f64::NAN),
            }
        })
        .map_err(|e| match e {
            Error::SolverBreakdown(_) => {
                Error::SolverBreakdown("pullback coefficient is singular".into())
            }
            other => other,
        })
    }

    pub fn with_coeff(
        mesh: &'m Mesh,
        coeff: impl Fn(usize) -> TriCoeff + Sync + Send,
    ) -> Result<Self> {
        let full = assemble_with(mesh, coeff);
        if full.vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularJacobian(f64::NAN, f64::NAN));
        }
        let parts = StiffnessParts::split(mesh, full);
        let factor = SkylineCholesky::factor(&parts.kii)
            .map_err(|e| Error::SolverBreakdown(format!("interior block: {e}")))?;
        Ok(Self { mesh, parts, factor })
    }

    pub fn n_boundary(&self) -> usize {
        self.mesh.boundary_nodes.len()
    }

    /// Solves with the given boundary data (on the boundary cycle).
    pub fn solve(&self, f: &[f64]) -> Result<DiscreteSolution> {
        let nb = self.n_boundary();
        if f.len() != nb {
            return Err(Error::DimensionMismatch { expected: nb, got: f.len() });
        }
        let ni = self.parts.interior.len();
        let mut rhs = vec![0.0f64; ni];
        self.parts.kib.mul_vec(f, &mut rhs);
        for v in rhs.iter_mut() {
            *v = -*v;
        }
        let ui = self.factor.solve(&rhs)?;
        let residual = {
            let denom = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
            if denom == 0.0 {
                0.0
            } else {
                self.parts.kii.residual_norm(&ui, &rhs) / denom
            }
        };
        let mut values = vec![0.0f64; self.mesh.n_nodes()];
        for (pos, &b) in self.mesh.boundary_nodes.iter().enumerate() {
            values[b] = f[pos];
        }
        for (i, &v) in self.parts.interior.iter().enumerate() {
            values[v] = ui[i];
        }
        Ok(DiscreteSolution { values, dirichlet: f.to_vec(), residual })
    }

    /// Solves the zero-Dirichlet problem K_ii u = r for an interior load.
    pub fn solve_interior(&self, interior_load: &[f64]) -> Result<Vec<f64>> {
        let ui = self.factor.solve(interior_load)?;
        let mut values = vec![0.0f64; self.mesh.n_nodes()];
        for (i, &v) in self.parts.interior.iter().enumerate() {
            values[v] = ui[i];
        }
        Ok(values)
    }

    /// Energy inner product of two nodal fields.
    pub fn energy(&self, u: &DiscreteSolution, v: &DiscreteSolution) -> f64 {
        self.parts.energy(&u.values, &v.values)
    }
}

/// One-shot Dirichlet solve.
pub fn solve_dirichlet(
    mesh: &Mesh,
    gamma: &ConductivityField,
    f: &[f64],
) -> Result<DiscreteSolution> {
    DirichletOperator::new(mesh, gamma)?.solve(f)
}

/// One-shot pullback solve at family parameter t on the fixed mesh.
pub fn solve_pullback(
    mesh: &Mesh,
    gamma: &ConductivityField,
    family: &FamilyMap,
    t_param: f64,
    f: &[f64],
) -> Result<DiscreteSolution> {
    DirichletOperator::pullback(mesh, gamma, family, t_param)?.solve(f)
}

/// Stiffness with optional matrix field, kept as a free function to match
/// the assembly contract.
pub fn assemble(mesh: &Mesh, gamma: &ConductivityField) -> crate::linalg::CsrMatrix {
    assemble_stiffness(mesh, gamma, None)
}
