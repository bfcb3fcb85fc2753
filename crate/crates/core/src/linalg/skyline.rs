//! Envelope (skyline) Cholesky with reverse Cuthill-McKee ordering.
//!
//! The P1 systems are banded after RCM, so an envelope factorization is the
//! simplest deterministic direct solver that meets the 1e-10 residual
//! target at the mesh sizes this crate works with.

use super::sparse::CsrMatrix;
use crate::{Error, Result};

pub struct SkylineCholesky {
    n: usize,
    /// perm[k] = original index of the k-th eliminated variable.
    perm: Vec<usize>,
    inv_perm: Vec<usize>,
    /// Row starts for the envelope storage.
    env_start: Vec<usize>,
    /// Column index where each permuted row begins.
    first_col: Vec<usize>,
    /// Packed lower factor rows [first_col[i] .. i], then the diagonal in
    /// `diag`.
    low: Vec<f64>,
    diag: Vec<f64>,
}

/// Reverse Cuthill-McKee ordering of the matrix graph.
fn rcm_order(m: &CsrMatrix) -> Vec<usize> {
    let n = m.n();
    let degree: Vec<usize> = (0..n).map(|i| m.row(i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    loop {
        // Lowest-degree unvisited seed, smallest index on ties.
        let mut seed = None;
        for i in 0..n {
            if !visited[i] && seed.is_none_or(|s: usize| degree[i] < degree[s]) {
                seed = Some(i);
            }
        }
        let Some(seed) = seed else { break };
        let mut queue = std::collections::VecDeque::from([seed]);
        visited[seed] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nbrs: Vec<usize> = m
                .row(u)
                .map(|(c, _)| c)
                .filter(|&c| c != u && !visited[c])
                .collect();
            nbrs.sort_by_key(|&c| (degree[c], c));
            for c in nbrs {
                visited[c] = true;
                queue.push_back(c);
            }
        }
    }
    order.reverse();
    order
}

impl SkylineCholesky {
    pub fn factor(m: &CsrMatrix) -> Result<Self> {
        let n = m.n();
        let perm = rcm_order(m);
        let mut inv_perm = vec![0usize; n];
        for (k, &orig) in perm.iter().enumerate() {
            inv_perm[orig] = k;
        }
        // Envelope extents in the permuted numbering.
        let mut first_col = vec![0usize; n];
        for k in 0..n {
            let mut fc = k;
            for (c, _) in m.row(perm[k]) {
                fc = fc.min(inv_perm[c]);
            }
            first_col[k] = fc;
        }
        let mut env_start = vec![0usize; n + 1];
        for k in 0..n {
            env_start[k + 1] = env_start[k] + (k - first_col[k]);
        }
        let mut low = vec![0.0f64; env_start[n]];
        let mut diag = vec![0.0f64; n];
        // Scatter the permuted matrix into the envelope.
        for k in 0..n {
            for (c, v) in m.row(perm[k]) {
                let j = inv_perm[c];
                if j == k {
                    diag[k] = v;
                } else if j < k {
                    low[env_start[k] + (j - first_col[k])] = v;
                }
            }
        }
        // Row-oriented envelope Cholesky: L[k][j] = (a_kj - sum) / d_j.
        for k in 0..n {
            let fk = first_col[k];
            for j in fk..k {
                let fj = first_col[j];
                let lo = fk.max(fj);
                let mut s = low[env_start[k] + (j - fk)];
                for t in lo..j {
                    s -= low[env_start[k] + (t - fk)] * low[env_start[j] + (t - fj)] * diag[t];
                }
                low[env_start[k] + (j - fk)] = s / diag[j];
            }
            let mut d = diag[k];
            for t in fk..k {
                let l = low[env_start[k] + (t - fk)];
                d -= l * l * diag[t];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::SolverBreakdown(format!(
                    "non-positive pivot {d:.3e} at permuted row {k}; system is not SPD"
                )));
            }
            diag[k] = d;
        }
        Ok(Self { n, perm, inv_perm, env_start, first_col, low, diag })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves A x = b via the LDL^T envelope factors.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: b.len() });
        }
        let n = self.n;
        let mut y = vec![0.0f64; n];
        for k in 0..n {
            let fk = self.first_col[k];
            let mut s = b[self.perm[k]];
            let base = self.env_start[k];
            for t in fk..k {
                s -= self.low[base + (t - fk)] * y[t];
            }
            y[k] = s;
        }
        for k in 0..n {
            y[k] /= self.diag[k];
        }
        for k in (0..n).rev() {
            let fk = self.first_col[k];
            let base = self.env_start[k];
            let yk = y[k];
            for t in fk..k {
                y[t] -= self.low[base + (t - fk)] * yk;
            }
        }
        let mut x = vec![0.0f64; n];
        for k in 0..n {
            x[self.perm[k]] = y[k];
        }
        Ok(x)
    }

    /// Envelope storage in doubles, for diagnostics.
    pub fn envelope_len(&self) -> usize {
        self.low.len()
    }

    pub fn inv_perm(&self) -> &[usize] {
        &self.inv_perm
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Triplets;

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let mut t = Triplets::new(n);
        for i in 0..n {
            t.push(i, i, 2.0);
            if i + 1 < n {
                t.push(i, i + 1, -1.0);
                t.push(i + 1, i, -1.0);
            }
        }
        t.to_csr()
    }

    #[test]
    fn solves_tridiagonal() {
        let m = laplacian_1d(50);
        let f = SkylineCholesky::factor(&m).unwrap();
        let b: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let x = f.solve(&b).unwrap();
        let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(m.residual_norm(&x, &b) / bn < 1e-13);
    }

    #[test]
    fn solves_scrambled_2d_grid() {
        // 2D 5-point grid with scrambled numbering exercises RCM.
        let nx = 12;
        let n = nx * nx;
        let scram = |i: usize| (i * 97 + 13) % n;
        let mut t = Triplets::new(n);
        for r in 0..nx {
            for c in 0..nx {
                let i = scram(r * nx + c);
                t.push(i, i, 4.0);
                if c + 1 < nx {
                    let j = scram(r * nx + c + 1);
                    t.push(i, j, -1.0);
                    t.push(j, i, -1.0);
                }
                if r + 1 < nx {
                    let j = scram((r + 1) * nx + c);
                    t.push(i, j, -1.0);
                    t.push(j, i, -1.0);
                }
            }
        }
        let m = t.to_csr();
        let f = SkylineCholesky::factor(&m).unwrap();
        let b: Vec<f64> = (0..n).map(|i| ((i * 7 % 23) as f64) - 11.0).collect();
        let x = f.solve(&b).unwrap();
        let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(m.residual_norm(&x, &b) / bn < 1e-12);
    }

    #[test]
    fn rejects_indefinite() {
        let mut t = Triplets::new(2);
        t.push(0, 0, 1.0);
        t.push(1, 1, -1.0);
        let m = t.to_csr();
        assert!(SkylineCholesky::factor(&m).is_err());
    }
}
