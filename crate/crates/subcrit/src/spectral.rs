//! Functional calculus on the pencil `(M·A, M)`: subordinated generators,
//! heat semigroups, Green quadratic forms and the integral identities
//! that tie them to the Lévy, potential and transition measures.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use std::io::{self, Write};

use crate::bernstein::{ln_one_minus_exp, BernsteinEntry};
use crate::error::{Error, Result};
use crate::krylov::{self, Normalized};
use crate::lattice::{FormMatrix, SchrodingerOperator, DENSE_BUDGET};
use crate::quadrature::{self, Tolerance};
use crate::report::num;

/// Relative threshold below which an eigenvalue is exact kernel.
pub const KERNEL_REL_TOL: f64 = 1e-12;
/// `⟨g,q⟩_m² < KERNEL_OVERLAP_TOL·‖g‖²_m` counts as orthogonal.
pub const KERNEL_OVERLAP_TOL: f64 = 1e-12;

/// Full m-orthonormal eigensystem of a Schrödinger operator.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is `q_k`.
    pub vectors: DMatrix<f64>,
    pub measure: DVector<f64>,
    /// `max_k |λ_k|`, raised to the operator's assembly scale when built
    /// from a [`SchrodingerOperator`].
    pub norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenMode {
    Spectral,
    TimeDomain,
}

/// Decompose within the default dense budget.
pub fn decompose(op: &SchrodingerOperator) -> Result<SpectralDecomposition> {
    decompose_with_budget(op, DENSE_BUDGET)
}

pub fn decompose_with_budget(op: &SchrodingerOperator, budget: usize) -> Result<SpectralDecomposition> {
    let n = op.dim();
    if n > budget {
        return Err(Error::BudgetExceeded { nodes: n, budget });
    }
    let mut dec = SpectralDecomposition::from_pencil(op.form.to_dense(), op.measure.clone())?;
    dec.norm = dec.norm.max(op.scale);
    Ok(dec)
}

impl SpectralDecomposition {
    /// Eigensystem of `(K, diag(m))` for symmetric `K`.
    pub fn from_pencil(k: DMatrix<f64>, measure: DVector<f64>) -> Result<Self> {
        let n = measure.len();
        if k.nrows() != n || k.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: k.nrows() });
        }
        let s = measure.map(|m| 1.0 / m.sqrt());
        let mut b = k;
        for j in 0..n {
            for i in 0..n {
                b[(i, j)] *= s[i] * s[j];
            }
        }
        let b = (&b + b.transpose()) * 0.5;
        let eig = SymmetricEigen::new(b);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &c| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[c]));
        let mut vectors = DMatrix::zeros(n, n);
        let mut eigenvalues = Vec::with_capacity(n);
        for (c, &i) in idx.iter().enumerate() {
            eigenvalues.push(eig.eigenvalues[i]);
            let mut col = eig.eigenvectors.column(i).component_mul(&s);
            // Fix the sign so that the largest-magnitude entry is positive.
            let imax = col.iamax();
            if col[imax] < 0.0 {
                col.neg_mut();
            }
            vectors.set_column(c, &col);
        }
        let norm = eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        Ok(SpectralDecomposition { eigenvalues, vectors, measure, norm })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn kernel_tol(&self) -> f64 {
        KERNEL_REL_TOL * self.norm
    }

    pub fn is_kernel(&self, k: usize) -> bool {
        self.eigenvalues[k].abs() <= self.kernel_tol()
    }

    pub fn kernel_dim(&self) -> usize {
        (0..self.dim()).filter(|&k| self.is_kernel(k)).count()
    }

    /// Eigenvalue with kernel members snapped to exactly 0.
    pub fn snapped(&self, k: usize) -> f64 {
        if self.is_kernel(k) {
            0.0
        } else {
            self.eigenvalues[k]
        }
    }

    /// Smallest eigenvalue outside the kernel, if any.
    pub fn smallest_positive(&self) -> Option<f64> {
        (0..self.dim()).filter(|&k| !self.is_kernel(k) && self.eigenvalues[k] > 0.0).map(|k| self.eigenvalues[k]).next()
    }

    pub fn inner(&self, f: &DVector<f64>, g: &DVector<f64>) -> f64 {
        f.component_mul(&self.measure).dot(g)
    }

    pub fn norm_m(&self, f: &DVector<f64>) -> f64 {
        self.inner(f, f).sqrt()
    }

    /// Coefficients `⟨g, q_k⟩_m`.
    pub fn coefficients(&self, g: &DVector<f64>) -> Result<DVector<f64>> {
        if g.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: g.len() });
        }
        Ok(self.vectors.tr_mul(&g.component_mul(&self.measure)))
    }

    /// `Σ_k c_k q_k`.
    pub fn synthesize(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.vectors * c
    }

    fn check_psd(&self) -> Result<()> {
        match self.eigenvalues.first() {
            Some(&l) if l < -self.kernel_tol() => Err(Error::Supercritical(l)),
            _ => Ok(()),
        }
    }

    /// `f(λ_k)` on snapped eigenvalues, erroring on a non-finite value.
    pub fn function_values(&self, f: &dyn Fn(f64) -> f64) -> Result<Vec<f64>> {
        (0..self.dim())
            .map(|k| {
                let l = self.snapped(k);
                let v = f(l);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite { what: "function of an eigenvalue".into(), at: l })
                }
            })
            .collect()
    }

    /// `Φ(λ_k)`, refusing operators with negative spectrum.
    pub fn phi_spectrum(&self, entry: &BernsteinEntry) -> Result<Vec<f64>> {
        self.check_psd()?;
        let vals = self.function_values(&|l| entry.phi(l))?;
        if let Some(&v) = vals.iter().find(|v| **v < 0.0) {
            return Err(Error::Invalid(format!("Φ returned a negative value {v}")));
        }
        Ok(vals)
    }

    /// `Σ_k f(λ_k) ⟨g,q_k⟩_m q_k`.
    pub fn apply_function(&self, f: &dyn Fn(f64) -> f64, g: &DVector<f64>) -> Result<DVector<f64>> {
        let vals = self.function_values(f)?;
        let c = self.coefficients(g)?;
        Ok(self.synthesize(&c.component_mul(&DVector::from_vec(vals))))
    }

    /// `Φ(A) g`.
    pub fn apply_phi(&self, entry: &BernsteinEntry, g: &DVector<f64>) -> Result<DVector<f64>> {
        let vals = self.phi_spectrum(entry)?;
        let c = self.coefficients(g)?;
        Ok(self.synthesize(&c.component_mul(&DVector::from_vec(vals))))
    }

    /// `e^{-tΦ(A)} g`.
    pub fn semigroup(&self, entry: &BernsteinEntry, t: f64, g: &DVector<f64>) -> Result<DVector<f64>> {
        let vals = self.phi_spectrum(entry)?;
        let c = self.coefficients(g)?;
        Ok(self.synthesize(&c.component_mul(&DVector::from_iterator(vals.len(), vals.iter().map(|p| (-t * p).exp())))))
    }

    /// The nodal matrix of `f(A)`: `Q diag(f) Qᵀ M`.
    pub fn operator_matrix(&self, vals: &[f64]) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (k, &v) in vals.iter().enumerate() {
            scaled.column_mut(k).scale_mut(v);
        }
        let mut f = scaled * self.vectors.transpose();
        for j in 0..self.dim() {
            f.column_mut(j).scale_mut(self.measure[j]);
        }
        f
    }

    /// Symmetric `M f(A)` = `M Q diag(f) Qᵀ M`.
    pub fn form_matrix(&self, vals: &[f64]) -> DMatrix<f64> {
        let mut f = self.operator_matrix(vals);
        for i in 0..self.dim() {
            f.row_mut(i).scale_mut(self.measure[i]);
        }
        (&f + f.transpose()) * 0.5
    }

    /// Nodal matrix of `Φ(A)`.
    pub fn phi_matrix(&self, entry: &BernsteinEntry) -> Result<DMatrix<f64>> {
        Ok(self.operator_matrix(&self.phi_spectrum(entry)?))
    }

    /// Nodal matrix of `e^{-tΦ(A)}`.
    pub fn semigroup_matrix(&self, entry: &BernsteinEntry, t: f64) -> Result<DMatrix<f64>> {
        let vals: Vec<f64> = self.phi_spectrum(entry)?.iter().map(|p| (-t * p).exp()).collect();
        Ok(self.operator_matrix(&vals))
    }

    /// `M·A^{α/2}` as a dense form, for fractional base operators.
    pub fn fractional_form(&self, alpha: f64) -> Result<FormMatrix> {
        self.check_psd()?;
        let vals = self.function_values(&|l| l.powf(alpha / 2.0))?;
        Ok(FormMatrix::Dense(self.form_matrix(&vals)))
    }

    /// Whether `g` has weight on a mode where `Φ` vanishes.
    pub fn kernel_overlap(&self, phi: &[f64], c: &DVector<f64>) -> f64 {
        (0..self.dim()).filter(|&k| phi[k] == 0.0).map(|k| c[k] * c[k]).sum()
    }

    /// `⟨g, Φ(A)⁻¹ g⟩_m`, `+∞` when `g` charges a zero of `Φ(A)`.
    pub fn green_form(&self, entry: &BernsteinEntry, g: &DVector<f64>, mode: GreenMode) -> Result<f64> {
        match mode {
            GreenMode::Spectral => self.green_spectral(entry, g),
            GreenMode::TimeDomain => self.green_time_domain(entry, g),
        }
    }

    fn green_spectral(&self, entry: &BernsteinEntry, g: &DVector<f64>) -> Result<f64> {
        let phi = self.phi_spectrum(entry)?;
        let c = self.coefficients(g)?;
        let g2 = self.inner(g, g);
        if self.kernel_overlap(&phi, &c) >= KERNEL_OVERLAP_TOL * g2 && g2 > 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok((0..self.dim()).filter(|&k| phi[k] > 0.0).map(|k| c[k] * c[k] / phi[k]).sum())
    }

    /// `∫₀^∞ ⟨g, e^{-sA} g⟩_m u(s) ds` decade by decade.
    fn green_time_domain(&self, entry: &BernsteinEntry, g: &DVector<f64>) -> Result<f64> {
        self.check_psd()?;
        entry.ln_potential_weight(0.0)?;
        let c = self.coefficients(g)?;
        let g2 = self.inner(g, g);
        if g2 == 0.0 {
            return Ok(0.0);
        }
        let modes: Vec<(f64, f64)> = (0..self.dim()).map(|k| (self.snapped(k), c[k] * c[k])).filter(|m| m.1 > 0.0).collect();
        let w = |x: f64| -> f64 {
            let s = x.exp();
            let lw = entry.ln_potential_weight(x).unwrap_or(f64::NAN);
            modes.iter().map(|&(l, c2)| c2 * (lw - s * l).exp()).sum()
        };
        let tol = Tolerance::new(1e-16 * g2, 1e-10);
        let x0 = (1e-6f64).ln();
        let mut total = quadrature::integrate_lower(w, x0, tol)?.value;
        let lmin = self.smallest_positive().unwrap_or(1.0);
        let step = 10f64.ln();
        let mut x = x0;
        let mut growing = 0;
        for _ in 0..400 {
            let inc = quadrature::integrate(w, x, x + step, tol)?.value;
            total += inc;
            x += step;
            let s_start = (x - step).exp();
            if inc > 0.01 * total && s_start > 50.0 / lmin {
                growing += 1;
                if growing >= 3 {
                    return Ok(f64::INFINITY);
                }
            } else {
                growing = 0;
            }
            if x.exp() > 10.0 / lmin && w(x) <= 1e-14 * total {
                total += quadrature::integrate_upper(w, x, tol)?.value;
                return Ok(total);
            }
        }
        Ok(f64::INFINITY)
    }

    /// `|⟨Φ(A)f,g⟩_m − (b⟨Af,g⟩_m + ∫⟨f − e^{-sA}f, g⟩_m ν(ds))|`.
    pub fn okura_residual(&self, entry: &BernsteinEntry, f: &DVector<f64>, g: &DVector<f64>) -> Result<f64> {
        if !entry.has_levy_density() {
            return Err(Error::Absent { entry: entry.name.clone(), what: "Lévy density" });
        }
        let phi = self.phi_spectrum(entry)?;
        let (a, b) = (self.coefficients(f)?, self.coefficients(g)?);
        let ab = a.component_mul(&b);
        let lhs: f64 = (0..self.dim()).map(|k| phi[k] * ab[k]).sum();
        let lams: Vec<f64> = (0..self.dim()).map(|k| self.snapped(k)).collect();
        let drift: f64 = entry.drift() * (0..self.dim()).map(|k| lams[k] * ab[k]).sum::<f64>();
        let jump = if entry.drift() > 0.0 && matches!(entry.family, crate::bernstein::Family::Linear { .. }) {
            0.0
        } else {
            // One integral per mode keeps every integrand nonnegative.
            let w = |x: f64| {
                let s = x.exp();
                let lw = entry.ln_levy_weight(x);
                DVector::from_iterator(lams.len(), lams.iter().map(|&l| if l == 0.0 { 0.0 } else { (ln_one_minus_exp(s * l) + lw).exp() }))
            };
            let per_mode = quadrature::integrate_line(w, 0.0, Tolerance::new(1e-13, 1e-10))?.value;
            per_mode.dot(&ab)
        };
        Ok((lhs - (drift + jump)).abs())
    }

    /// `‖e^{-tΦ(A)}g − ∫e^{-sA}g η_t(ds)‖_m`.
    pub fn subordination_residual(&self, entry: &BernsteinEntry, t: f64, g: &DVector<f64>) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::BadParameter { name: "t".into(), value: t, reason: "must be positive".into() });
        }
        entry.ln_transition_weight(t, 0.0)?;
        self.check_psd()?;
        let phi = self.phi_spectrum(entry)?;
        let c = self.coefficients(g)?;
        let lams: Vec<f64> = (0..self.dim()).map(|k| self.snapped(k)).collect();
        let w = |x: f64| {
            let s = x.exp();
            let lw = entry.ln_transition_weight(t, x).unwrap_or(f64::NAN);
            DVector::from_iterator(lams.len(), lams.iter().map(|&l| if l == 0.0 { lw.exp() } else { (lw - s * l).exp() }))
        };
        let lap = quadrature::integrate_line(w, t.ln(), Tolerance::new(1e-14, 1e-11))?.value;
        let r2: f64 = (0..self.dim()).map(|k| ((-t * phi[k]).exp() - lap[k]).powi(2) * c[k] * c[k]).sum();
        Ok(r2.sqrt())
    }

    /// Write `(k, λ_k, ⟨g,q_k⟩²)` rows.
    pub fn write_spectrum_csv<W: Write>(&self, g: &DVector<f64>, mut w: W) -> io::Result<()> {
        let c = self.coefficients(g).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))?;
        writeln!(w, "k,lambda,weight")?;
        for k in 0..self.dim() {
            writeln!(w, "{k},{},{}", num(self.eigenvalues[k]), num(c[k] * c[k]))?;
        }
        Ok(())
    }
}

/// `⟨g, Φ(A)⁻¹ g⟩_m` without a full decomposition: dense below `dense_limit`
/// nodes, otherwise Gauss quadrature on the Lanczos tridiagonal.
pub fn green_form_operator(op: &SchrodingerOperator, entry: &BernsteinEntry, g: &DVector<f64>, dense_limit: usize) -> Result<f64> {
    if op.dim() <= dense_limit {
        return decompose_with_budget(op, dense_limit)?.green_form(entry, g, GreenMode::Spectral);
    }
    let b = Normalized::new(op);
    let v = b.lift(g);
    let tol = KERNEL_REL_TOL * op.scale;
    if op.psd_certificate < -tol {
        return Err(Error::Supercritical(op.psd_certificate));
    }
    let f = |t: f64| {
        let p = entry.phi(t.max(0.0));
        if p > 0.0 {
            1.0 / p
        } else {
            f64::INFINITY
        }
    };
    let (est, _) = krylov::quadratic_form(&b, &v, &f, 1e-10, 2000)?;
    Ok(est)
}
