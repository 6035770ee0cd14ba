//! Compressed symmetric sparse matrices and a preconditioned conjugate
//! gradient solver.

use nalgebra::{DMatrix, DVector};
use std::io::{self, Write};

use crate::error::{Error, Result};

/// Symmetric matrix in CSR form with both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymSparse {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SymSparse {
    /// Assemble from upper-or-lower triplets; duplicates are summed and
    /// each off-diagonal triplet is mirrored.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, v) in triplets {
            rows[i].push((j, v));
            if i != j {
                rows[j].push((i, v));
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (j, v) in r {
                if last == Some(j) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(j);
                    vals.push(v);
                    last = Some(j);
                }
            }
            row_ptr.push(cols.len());
        }
        SymSparse { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.cols[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[i] = acc;
        }
    }

    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.n);
        self.matvec_into(x.as_slice(), y.as_mut_slice());
        y
    }

    pub fn diagonal(&self) -> DVector<f64> {
        DVector::from_iterator(self.n, (0..self.n).map(|i| self.row(i).find(|e| e.0 == i).map_or(0.0, |e| e.1)))
    }

    /// Add `d` to the diagonal.
    pub fn plus_diagonal(&self, d: &[f64]) -> Self {
        let mut t = self.triplets();
        for (i, &v) in d.iter().enumerate() {
            if v != 0.0 {
                t.push((i, i, v));
            }
        }
        SymSparse::from_triplets(self.n, &t)
    }

    /// Upper-triangular triplets including the diagonal.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut t = Vec::with_capacity(self.nnz() / 2 + self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if j >= i {
                    t.push((i, j, v));
                }
            }
        }
        t
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[(i, j)] = v;
            }
        }
        d
    }

    /// Principal submatrix on `idx`.
    pub fn submatrix(&self, idx: &[usize]) -> SymSparse {
        let mut pos = vec![usize::MAX; self.n];
        for (k, &i) in idx.iter().enumerate() {
            pos[i] = k;
        }
        let mut t = Vec::new();
        for (k, &i) in idx.iter().enumerate() {
            for (j, v) in self.row(i) {
                let pj = pos[j];
                if pj != usize::MAX && pj >= k {
                    t.push((k, pj, v));
                }
            }
        }
        SymSparse::from_triplets(idx.len(), &t)
    }

    /// Write `(row, col, value)` lines for every stored entry.
    pub fn write_coo<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "row,col,value")?;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                writeln!(w, "{i},{j},{}", crate::report::num(v))?;
            }
        }
        Ok(())
    }
}

/// Solve `K x = b` for symmetric positive definite `K` by Jacobi-
/// preconditioned conjugate gradients.
pub fn cg_solve(k: &SymSparse, b: &DVector<f64>, rel_tol: f64, max_iter: usize) -> Result<DVector<f64>> {
    let n = k.dim();
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return Ok(DVector::zeros(n));
    }
    let dinv = k.diagonal().map(|d| if d > 0.0 { 1.0 / d } else { 1.0 });
    let mut x = DVector::zeros(n);
    let mut r = b.clone();
    let mut z = r.component_mul(&dinv);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    let mut ap = DVector::zeros(n);
    for it in 0..max_iter {
        k.matvec_into(p.as_slice(), ap.as_mut_slice());
        let pap = p.dot(&ap);
        if !(pap > 0.0) {
            return Err(Error::SolverNotConverged { iterations: it, residual: r.norm() / bnorm });
        }
        let alpha = rz / pap;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        if r.norm() <= rel_tol * bnorm {
            return Ok(x);
        }
        z = r.component_mul(&dinv);
        let rz_new = r.dot(&z);
        let beta = rz_new / rz;
        rz = rz_new;
        p *= beta;
        p += &z;
    }
    Err(Error::SolverNotConverged { iterations: max_iter, residual: r.norm() / bnorm })
}
