//! Compressed sparse rows with triplet assembly.

#[derive(Clone, Debug, Default)]
pub struct Triplets {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(n: usize) -> Self {
        Self { nrows: n, ncols: n, entries: Vec::new() }
    }

    pub fn rect(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, entries: Vec::new() }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols);
        if v != 0.0 {
            self.entries.push((i, j, v));
        }
    }

    /// Builds CSR, summing duplicates. Column order within a row is sorted,
    /// so assembly is deterministic regardless of entry order magnitude-wise
    /// only when entry order is fixed; callers push in a fixed order.
    pub fn to_csr(&self) -> CsrMatrix {
        let n = self.nrows;
        let mut counts = vec![0usize; n + 1];
        for &(i, _, _) in &self.entries {
            counts[i + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut cols = vec![0usize; self.entries.len()];
        let mut vals = vec![0f64; self.entries.len()];
        let mut cursor = counts.clone();
        for &(i, j, v) in &self.entries {
            let k = cursor[i];
            cols[k] = j;
            vals[k] = v;
            cursor[i] += 1;
        }
        // Sort each row by column and combine duplicates in place.
        let mut row_ptr = vec![0usize; n + 1];
        let mut out_cols = Vec::with_capacity(self.entries.len());
        let mut out_vals = Vec::with_capacity(self.entries.len());
        for i in 0..n {
            let (s, e) = (counts[i], counts[i + 1]);
            let mut row: Vec<(usize, f64)> =
                cols[s..e].iter().copied().zip(vals[s..e].iter().copied()).collect();
            row.sort_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut v = 0.0;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                out_cols.push(c);
                out_vals.push(v);
            }
            row_ptr[i + 1] = out_cols.len();
        }
        CsrMatrix { nrows: n, ncols: self.ncols, row_ptr, cols: out_cols, vals: out_vals }
    }
}

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Row count; equals the column count for the square systems.
    pub fn n(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.cols[s..e].iter().copied().zip(self.vals[s..e].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map(|(_, v)| v).unwrap_or(0.0)
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        for i in 0..self.nrows {
            let mut s = 0.0;
            for (c, v) in self.row(i) {
                s += v * x[c];
            }
            y[i] = s;
        }
    }

    pub fn residual_norm(&self, x: &[f64], b: &[f64]) -> f64 {
        let mut r = vec![0.0; self.nrows];
        self.mul_vec(x, &mut r);
        r.iter()
            .zip(b)
            .map(|(ri, bi)| (ri - bi) * (ri - bi))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest relative row-asymmetry |a_ij - a_ji| / max|a|.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assembly_sums_duplicates() {
        let mut t = Triplets::new(3);
        t.push(0, 0, 1.0);
        t.push(0, 0, 2.0);
        t.push(0, 2, 0.5);
        t.push(2, 0, 0.5);
        t.push(1, 1, 4.0);
        t.push(2, 2, 1.0);
        let m = t.to_csr();
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.get(0, 2), 0.5);
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.asymmetry(), 0.0);
        let x = vec![1.0, 2.0, 3.0];
        let mut y = vec![0.0; 3];
        m.mul_vec(&x, &mut y);
        assert_eq!(y, vec![4.5, 8.0, 3.5]);
    }
}
