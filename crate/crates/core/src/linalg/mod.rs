//! Sparse symmetric linear algebra for the P1 systems.

mod cg;
mod skyline;
mod sparse;

pub use cg::{cg_solve, CgOptions};
pub use skyline::SkylineCholesky;
pub use sparse::{CsrMatrix, Triplets};

use crate::Result;

/// Direct or iterative SPD solver behind one interface.
pub enum SpdSolver {
    Direct(SkylineCholesky),
    Iterative { matrix: CsrMatrix, opts: CgOptions },
}

impl SpdSolver {
    /// Factors (or prepares) the given SPD matrix. The skyline direct path
    /// is used by default; callers pick CG for very large graded systems.
    pub fn direct(matrix: &CsrMatrix) -> Result<Self> {
        Ok(SpdSolver::Direct(SkylineCholesky::factor(matrix)?))
    }

    pub fn iterative(matrix: CsrMatrix, opts: CgOptions) -> Self {
        SpdSolver::Iterative { matrix, opts }
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        match self {
            SpdSolver::Direct(f) => f.solve(rhs),
            SpdSolver::Iterative { matrix, opts } => cg_solve(matrix, rhs, opts),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            SpdSolver::Direct(f) => f.n(),
            SpdSolver::Iterative { matrix, .. } => matrix.n(),
        }
    }
}
