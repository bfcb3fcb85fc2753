//! Conjugate gradients with incomplete Cholesky IC(0), for the large graded
//! systems where the envelope factor would not fit comfortably in memory.

use super::sparse::CsrMatrix;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct CgOptions {
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_iter: 20_000 }
    }
}

/// IC(0) factor on the sparsity pattern of the lower triangle, with a
/// diagonal shift retried on breakdown.
struct Ic0 {
    // Lower triangle in CSR (including diagonal as the last entry per row).
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Ic0 {
    fn build(m: &CsrMatrix) -> Option<Self> {
        for shift_pow in 0..6 {
            let shift = if shift_pow == 0 {
                0.0
            } else {
                1e-3 * 4.0f64.powi(shift_pow - 1)
            };
            if let Some(f) = Self::try_build(m, shift) {
                return Some(f);
            }
        }
        None
    }

    fn try_build(m: &CsrMatrix, shift: f64) -> Option<Self> {
        let n = m.n();
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            let mut row: Vec<(usize, f64)> = m
                .row(i)
                .filter(|&(c, _)| c <= i)
                .map(|(c, v)| if c == i { (c, v * (1.0 + shift)) } else { (c, v) })
                .collect();
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr[i + 1] = cols.len();
        }
        // In-place IC(0) on the fixed pattern.
        for i in 0..n {
            let (s, e) = (row_ptr[i], row_ptr[i + 1]);
            debug_assert_eq!(cols[e - 1], i);
            for k in s..e - 1 {
                let j = cols[k];
                // vals[k] = (a_ij - sum_{t<j, t in both rows} l_it l_jt) / l_jj
                let (js, je) = (row_ptr[j], row_ptr[j + 1]);
                let mut sum = 0.0;
                let mut ti = s;
                let mut tj = js;
                while ti < k && tj < je - 1 {
                    match cols[ti].cmp(&cols[tj]) {
                        std::cmp::Ordering::Less => ti += 1,
                        std::cmp::Ordering::Greater => tj += 1,
                        std::cmp::Ordering::Equal => {
                            sum += vals[ti] * vals[tj];
                            ti += 1;
                            tj += 1;
                        }
                    }
                }
                vals[k] = (vals[k] - sum) / vals[je - 1];
            }
            let mut d = vals[e - 1];
            for k in s..e - 1 {
                d -= vals[k] * vals[k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            vals[e - 1] = d.sqrt();
        }
        Some(Self { row_ptr, cols, vals })
    }

    /// Applies (L L^T)^{-1}.
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let n = r.len();
        // Forward solve L y = r.
        for i in 0..n {
            let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut acc = r[i];
            for k in s..e - 1 {
                acc -= self.vals[k] * z[self.cols[k]];
            }
            z[i] = acc / self.vals[e - 1];
        }
        // Backward solve L^T x = y (in place).
        for i in (0..n).rev() {
            let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
            z[i] /= self.vals[e - 1];
            let zi = z[i];
            for k in s..e - 1 {
                z[self.cols[k]] -= self.vals[k] * zi;
            }
        }
    }
}

/// Preconditioned conjugate gradients to a relative residual.
pub fn cg_solve(m: &CsrMatrix, b: &[f64], opts: &CgOptions) -> Result<Vec<f64>> {
    let n = m.n();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let pre = Ic0::build(m);
    let mut x = vec![0.0f64; n];
    let mut r = b.to_vec();
    let mut z = vec![0.0f64; n];
    match &pre {
        Some(p) => p.apply(&r, &mut z),
        None => z.copy_from_slice(&r),
    }
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0f64; n];
    for _ in 0..opts.max_iter {
        m.mul_vec(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            return Err(Error::SolverBreakdown(format!(
                "CG curvature {pap:.3e} is not positive; system is not SPD"
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rnorm <= opts.rel_tol * bnorm {
            return Ok(x);
        }
        match &pre {
            Some(pc) => pc.apply(&r, &mut z),
            None => z.copy_from_slice(&r),
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::SolverBreakdown(format!(
        "CG did not reach relative residual {} in {} iterations",
        opts.rel_tol, opts.max_iter
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Triplets;

    #[test]
    fn cg_matches_direct_on_grid() {
        let nx = 20;
        let n = nx * nx;
        let mut t = Triplets::new(n);
        for r in 0..nx {
            for c in 0..nx {
                let i = r * nx + c;
                t.push(i, i, 4.0);
                if c + 1 < nx {
                    t.push(i, i + 1, -1.0);
                    t.push(i + 1, i, -1.0);
                }
                if r + 1 < nx {
                    t.push(i, i + nx, -1.0);
                    t.push(i + nx, i, -1.0);
                }
            }
        }
        let m = t.to_csr();
        let b: Vec<f64> = (0..n).map(|i| ((i % 17) as f64) - 8.0).collect();
        let x = cg_solve(&m, &b, &CgOptions::default()).unwrap();
        let y = crate::linalg::SkylineCholesky::factor(&m).unwrap().solve(&b).unwrap();
        let diff = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(diff < 1e-8, "direct vs cg diff {diff}");
    }
}
