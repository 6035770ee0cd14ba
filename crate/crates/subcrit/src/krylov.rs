//! Matrix-free Lanczos: extreme eigenvalues and Gauss-quadrature estimates
//! of quadratic forms `vᵀ f(B) v` for symmetric `B`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::lattice::{FormMatrix, SchrodingerOperator};
use crate::sparse::{cg_solve, SymSparse};

/// Below this size extreme eigenvalues come from a dense solver.
pub const DENSE_EXTREME_LIMIT: usize = 400;

/// A symmetric linear map.
pub trait SymOp: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>>;
}

/// `B = M^{-1/2} (M·A) M^{-1/2}`, similar to `A` and symmetric.
pub struct Normalized<'a> {
    pub op: &'a SchrodingerOperator,
    inv_sqrt_m: DVector<f64>,
}

impl<'a> Normalized<'a> {
    pub fn new(op: &'a SchrodingerOperator) -> Self {
        Normalized { op, inv_sqrt_m: op.measure.map(|m| 1.0 / m.sqrt()) }
    }

    /// Map a nodal vector `g` to `M^{1/2} g`.
    pub fn lift(&self, g: &DVector<f64>) -> DVector<f64> {
        g.component_div(&self.inv_sqrt_m)
    }
}

impl SymOp for Normalized<'_> {
    fn dim(&self) -> usize {
        self.op.dim()
    }
    fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let y = self.op.form.matvec(&x.component_mul(&self.inv_sqrt_m));
        Ok(y.component_mul(&self.inv_sqrt_m))
    }
}

/// Dense symmetric matrix as a [`SymOp`].
pub struct DenseOp<'a>(pub &'a DMatrix<f64>);

impl SymOp for DenseOp<'_> {
    fn dim(&self) -> usize {
        self.0.nrows()
    }
    fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.0 * x)
    }
}

/// `D^{1/2} [K⁻¹]_{ss} D^{1/2}` on the index set `s`, via CG solves with
/// the sparse positive definite `K`.
pub struct SchurInverse<'a> {
    pub k: &'a SymSparse,
    pub support: &'a [usize],
    pub sqrt_d: DVector<f64>,
    pub tol: f64,
}

impl SymOp for SchurInverse<'_> {
    fn dim(&self) -> usize {
        self.support.len()
    }
    fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let mut b = DVector::zeros(self.k.dim());
        for (i, &s) in self.support.iter().enumerate() {
            b[s] = self.sqrt_d[i] * x[i];
        }
        let v = cg_solve(self.k, &b, self.tol, 50 * self.k.dim() + 100)?;
        Ok(DVector::from_iterator(self.support.len(), self.support.iter().enumerate().map(|(i, &s)| self.sqrt_d[i] * v[s])))
    }
}

/// Lanczos recurrence with full reorthogonalisation.
pub struct Lanczos {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub basis: Vec<DVector<f64>>,
    pub start_norm: f64,
    pub exhausted: bool,
}

impl Lanczos {
    pub fn start(v: &DVector<f64>) -> Self {
        let nrm = v.norm();
        Lanczos { alphas: vec![], betas: vec![], basis: vec![v / nrm], start_norm: nrm, exhausted: false }
    }

    /// Advance one step. Returns false when the Krylov space is invariant.
    pub fn step(&mut self, op: &dyn SymOp) -> Result<bool> {
        if self.exhausted {
            return Ok(false);
        }
        let k = self.alphas.len();
        let q = &self.basis[k];
        let mut w = op.apply(q)?;
        let a = q.dot(&w);
        w.axpy(-a, q, 1.0);
        if k > 0 {
            w.axpy(-self.betas[k - 1], &self.basis[k - 1], 1.0);
        }
        // Two passes of classical Gram–Schmidt against the whole basis.
        for _ in 0..2 {
            for b in &self.basis {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
        }
        self.alphas.push(a);
        let nb = w.norm();
        let scale = a.abs().max(self.betas.last().copied().unwrap_or(0.0)).max(1e-300);
        if nb <= 1e-13 * scale || self.basis.len() >= op.dim() {
            self.exhausted = true;
            return Ok(false);
        }
        self.betas.push(nb);
        self.basis.push(w / nb);
        Ok(true)
    }

    pub fn steps(&self) -> usize {
        self.alphas.len()
    }

    fn tridiagonal(&self) -> DMatrix<f64> {
        let k = self.alphas.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = self.alphas[i];
            if i + 1 < k {
                t[(i, i + 1)] = self.betas[i];
                t[(i + 1, i)] = self.betas[i];
            }
        }
        t
    }

    /// Ritz values (ascending), first components of Ritz vectors, and the
    /// residual bound `β_k |e_kᵀ y|` for each.
    pub fn ritz(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>, DMatrix<f64>) {
        let t = self.tridiagonal();
        let k = t.nrows();
        let eig = SymmetricEigen::new(t);
        let mut idx: Vec<usize> = (0..k).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let beta = if self.exhausted { 0.0 } else { self.betas.get(k - 1).copied().unwrap_or(0.0) };
        let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
        let first = idx.iter().map(|&i| eig.eigenvectors[(0, i)]).collect();
        let res = idx.iter().map(|&i| (beta * eig.eigenvectors[(k - 1, i)]).abs()).collect();
        let mut vecs = DMatrix::zeros(k, k);
        for (c, &i) in idx.iter().enumerate() {
            vecs.set_column(c, &eig.eigenvectors.column(i));
        }
        (vals, first, res, vecs)
    }

    /// Ritz vector in the original space from tridiagonal coordinates.
    pub fn lift(&self, y: &[f64]) -> DVector<f64> {
        let mut v = DVector::zeros(self.basis[0].len());
        for (b, &c) in self.basis.iter().zip(y) {
            v.axpy(c, b, 1.0);
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Smallest,
    Largest,
}

/// An extreme eigenpair of a symmetric operator by restarted Lanczos.
pub fn extreme_eigenpair(op: &dyn SymOp, which: Extreme, tol: f64, start: Option<&DVector<f64>>) -> Result<(f64, DVector<f64>)> {
    let n = op.dim();
    let restart = 300.min(n);
    let mut v = match start {
        Some(s) => s.clone(),
        None => DVector::from_iterator(n, (0..n).map(|i| 1.0 + 0.1 * ((i as f64) * 0.754_877_666).sin())),
    };
    let mut last = f64::NAN;
    for _ in 0..200 {
        let mut lz = Lanczos::start(&v);
        loop {
            let more = lz.step(op)?;
            let k = lz.steps();
            if !more || k == restart || k % 10 == 0 {
                let (vals, _, res, vecs) = lz.ritz();
                let j = if which == Extreme::Smallest { 0 } else { vals.len() - 1 };
                let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
                let y: Vec<f64> = vecs.column(j).iter().copied().collect();
                if res[j] <= tol * scale || !more {
                    return Ok((vals[j], lz.lift(&y)));
                }
                if k == restart {
                    v = lz.lift(&y);
                    last = vals[j];
                    break;
                }
            }
        }
    }
    Err(Error::SolverNotConverged { iterations: 200 * restart, residual: last })
}

/// Smallest eigenvalue of the pencil `(M·A, M)`.
pub fn smallest_eigenvalue(op: &SchrodingerOperator) -> Result<f64> {
    let n = op.dim();
    if n <= DENSE_EXTREME_LIMIT {
        let s = op.measure.map(|m| 1.0 / m.sqrt());
        let mut b = op.form.to_dense();
        for i in 0..n {
            for j in 0..n {
                b[(i, j)] *= s[i] * s[j];
            }
        }
        let eig = SymmetricEigen::new(b);
        return Ok(eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min));
    }
    let b = Normalized::new(op);
    Ok(extreme_eigenpair(&b, Extreme::Smallest, 1e-11, None)?.0)
}

/// Gauss-quadrature estimate of `vᵀ f(B) v`, refined until successive
/// estimates agree to `rel_tol`. Returns `+∞` when `f` is infinite at a
/// Ritz value carrying weight.
pub fn quadratic_form(op: &dyn SymOp, v: &DVector<f64>, f: &dyn Fn(f64) -> f64, rel_tol: f64, max_steps: usize) -> Result<(f64, usize)> {
    let nrm2 = v.norm_squared();
    if nrm2 == 0.0 {
        return Ok((0.0, 0));
    }
    let mut lz = Lanczos::start(v);
    let mut prev = f64::NAN;
    let mut stable = 0;
    loop {
        let more = lz.step(op)?;
        let k = lz.steps();
        if !more || k % 5 == 0 || k >= max_steps {
            let (vals, first, _, _) = lz.ritz();
            let mut est = 0.0;
            for (t, c) in vals.iter().zip(&first) {
                let w = c * c;
                if w > 0.0 {
                    let fv = f(*t);
                    if fv.is_infinite() {
                        est = f64::INFINITY;
                        break;
                    }
                    est += w * fv;
                }
            }
            est *= nrm2;
            if !more || est.is_infinite() {
                return Ok((est, k));
            }
            if (est - prev).abs() <= rel_tol * est.abs() {
                stable += 1;
                if stable >= 2 {
                    return Ok((est, k));
                }
            } else {
                stable = 0;
            }
            if k >= max_steps {
                return Err(Error::SolverNotConverged { iterations: k, residual: (est - prev).abs() / est.abs() });
            }
            prev = est;
        }
    }
}

/// Sparse `K = M·A` of an operator, when stored sparsely.
pub fn sparse_form(op: &SchrodingerOperator) -> Option<&SymSparse> {
    match &op.form {
        FormMatrix::Sparse(s) => Some(s),
        FormMatrix::Dense(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_matrix(n: usize) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n {
            d[(i, i)] = 2.0;
            if i + 1 < n {
                d[(i, i + 1)] = -1.0;
                d[(i + 1, i)] = -1.0;
            }
        }
        d
    }

    #[test]
    fn extreme_eigenvalues_of_path() {
        let n = 600;
        let d = path_matrix(n);
        let op = DenseOp(&d);
        let exact_min = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let exact_max = 2.0 + 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let (lo, v) = extreme_eigenpair(&op, Extreme::Smallest, 1e-12, None).unwrap();
        assert!((lo - exact_min).abs() < 1e-10, "{lo} vs {exact_min}");
        let r = &d * &v - &v * lo;
        assert!(r.norm() < 1e-8);
        let (hi, _) = extreme_eigenpair(&op, Extreme::Largest, 1e-12, None).unwrap();
        assert!((hi - exact_max).abs() < 1e-10);
    }

    #[test]
    fn quadrature_matches_dense_inverse() {
        let d = path_matrix(80);
        let v = DVector::from_fn(80, |i, _| if i == 40 { 1.0 } else { 0.0 });
        let exact = d.clone().try_inverse().unwrap()[(40, 40)];
        let (est, _) = quadratic_form(&DenseOp(&d), &v, &|t| 1.0 / t, 1e-12, 200).unwrap();
        assert!((est - exact).abs() < 1e-10 * exact);
        let exact_sqrt = {
            let e = SymmetricEigen::new(d.clone());
            let mut s = 0.0;
            for k in 0..80 {
                s += e.eigenvectors[(40, k)].powi(2) / e.eigenvalues[k].sqrt();
            }
            s
        };
        let (est, _) = quadratic_form(&DenseOp(&d), &v, &|t| 1.0 / t.sqrt(), 1e-12, 200).unwrap();
        assert!((est - exact_sqrt).abs() < 1e-9 * exact_sqrt);
    }
}
