//! Subcritical / critical / supercritical classification of Schrödinger
//! forms and their subordinates, with Doob h-transforms as witnesses.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

use crate::bernstein::BernsteinEntry;
use crate::error::{Error, Result};
use crate::krylov::{extreme_eigenpair, Extreme, SchurInverse};
use crate::lattice::{schrodinger_matrix, DiscreteSpace, FormMatrix, SchrodingerOperator, SignedMeasure};
use crate::spectral::{decompose_with_budget, green_form_operator, SpectralDecomposition, KERNEL_OVERLAP_TOL};
use crate::stats::ls_slope;

/// Above this many nodes `λ(μ)` uses Lanczos with CG solves.
pub const DENSE_SCHUR_LIMIT: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Subcritical,
    Critical,
    Supercritical,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Subcritical => "Subcritical",
            Verdict::Critical => "Critical",
            Verdict::Supercritical => "Supercritical",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Evidence {
    Number(f64),
    Sequence(Vec<f64>),
    Text(String),
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evidence::Number(v) => f.write_str(&crate::report::num(*v)),
            Evidence::Sequence(v) => {
                let parts: Vec<String> = v.iter().map(|&x| crate::report::num(x)).collect();
                write!(f, "[{}]", parts.join(", "))
            }
            Evidence::Text(t) => f.write_str(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    /// `λ(μ)`; `+∞` when `μ⁻ = 0`.
    pub lambda_mu: Option<f64>,
    pub gamma_mu: Option<f64>,
    pub evidence: BTreeMap<String, Evidence>,
}

impl Classification {
    fn new(verdict: Verdict) -> Self {
        Classification { verdict, lambda_mu: None, gamma_mu: None, evidence: BTreeMap::new() }
    }

    fn note(&mut self, key: &str, v: Evidence) {
        self.evidence.insert(key.to_string(), v);
    }
}

/// `λ(μ)` alone.
pub fn lambda_mu(space: &DiscreteSpace, mu: &SignedMeasure) -> Result<f64> {
    if mu.len() != space.len() {
        return Err(Error::DimensionMismatch { expected: space.len(), got: mu.len() });
    }
    let c = mu.canonical();
    let killing: f64 = space.killing.iter().sum::<f64>() + c.plus.iter().sum::<f64>();
    if killing == 0.0 && !c.minus_support().is_empty() {
        // Constants have zero energy: the infimum is 0.
        return Ok(0.0);
    }
    lambda_mu_base(&FormMatrix::Sparse(space.form_matrix()), mu)
}

/// `λ(μ)` for an arbitrary base form `S` (stored as `M·A₀`):
/// `1/λ_max(D^{1/2} [(S + D⁺)⁻¹]_{ss} D^{1/2})` on `s = supp μ⁻`.
/// A singular dense base gives 0.
pub fn lambda_mu_base(base: &FormMatrix, mu: &SignedMeasure) -> Result<f64> {
    let c = mu.canonical();
    let support = c.minus_support();
    if support.is_empty() {
        return Ok(f64::INFINITY);
    }
    let d: Vec<f64> = support.iter().map(|&i| c.minus[i]).collect();
    let sqrt_d = DVector::from_iterator(d.len(), d.iter().map(|v| v.sqrt()));
    let lmax = match base {
        FormMatrix::Sparse(s) if s.dim() > DENSE_SCHUR_LIMIT => {
            let k = s.plus_diagonal(&c.plus);
            let op = SchurInverse { k: &k, support: &support, sqrt_d: sqrt_d.clone(), tol: 1e-13 };
            extreme_eigenpair(&op, Extreme::Largest, 1e-11, Some(&sqrt_d))?.0
        }
        _ => {
            let mut k = base.to_dense();
            for (i, p) in c.plus.iter().enumerate() {
                k[(i, i)] += p;
            }
            let Some(chol) = k.cholesky() else {
                return Ok(0.0);
            };
            let n = c.len();
            let mut e = DMatrix::zeros(n, support.len());
            for (j, &s) in support.iter().enumerate() {
                e[(s, j)] = 1.0;
            }
            let x = chol.solve(&e);
            let m = support.len();
            let t = DMatrix::from_fn(m, m, |i, j| sqrt_d[i] * x[(support[i], j)] * sqrt_d[j]);
            SymmetricEigen::new((&t + t.transpose()) * 0.5).eigenvalues.max()
        }
    };
    Ok(1.0 / lmax)
}

/// `(λ(μ), γ(μ))`.
pub fn bottom_of_spectrum(space: &DiscreteSpace, mu: &SignedMeasure) -> Result<(f64, f64)> {
    let op = schrodinger_matrix(space, mu)?;
    Ok((lambda_mu(space, mu)?, op.psd_certificate))
}

/// Trichotomy by `λ(μ)` against 1 with tolerance `tol`.
pub fn classify_schrodinger(space: &DiscreteSpace, mu: &SignedMeasure, tol: f64) -> Result<Classification> {
    let op = schrodinger_matrix(space, mu)?;
    let lam = lambda_mu(space, mu)?;
    let gamma = op.psd_certificate;
    let verdict = verdict_from_lambda(lam, tol);
    let mut c = Classification::new(verdict);
    c.lambda_mu = Some(lam);
    c.gamma_mu = Some(gamma);
    let scale = op.form.row_sum_norm();
    let consistent = (lam >= 1.0 - tol) == (gamma >= -tol * scale.max(1.0));
    c.note("gamma_sign_consistent", Evidence::Text(consistent.to_string()));
    if verdict == Verdict::Critical && op.dim() <= DENSE_SCHUR_LIMIT {
        let dec = decompose_with_budget(&op, DENSE_SCHUR_LIMIT)?;
        let thr = tol.max(1e-12) * dec.norm.max(1.0);
        let kdim = dec.eigenvalues.iter().filter(|l| l.abs() <= thr).count();
        c.note("kernel_dimension", Evidence::Number(kdim as f64));
    }
    Ok(c)
}

pub fn verdict_from_lambda(lam: f64, tol: f64) -> Verdict {
    if lam > 1.0 + tol {
        Verdict::Subcritical
    } else if lam < 1.0 - tol {
        Verdict::Supercritical
    } else {
        Verdict::Critical
    }
}

/// Sampled times for the superharmonicity check `e^{-tΦ(A)}h ≤ h`.
pub const SUPERHARMONIC_TIMES: [f64; 3] = [0.1, 1.0, 10.0];

/// Largest violation of `e^{-tΦ(A)}h ≤ h` over the sampled times,
/// relative to `max h`.
pub fn superharmonic_violation(dec: &SpectralDecomposition, entry: &BernsteinEntry, h: &DVector<f64>) -> Result<f64> {
    let hmax = h.amax().max(1e-300);
    let mut worst: f64 = 0.0;
    for t in SUPERHARMONIC_TIMES {
        let th = dec.semigroup(entry, t, h)?;
        worst = worst.max((th - h).max() / hmax);
    }
    Ok(worst)
}

/// How `superharmonic_h` builds its witness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HChoice {
    /// `(order + Φ(A))⁻¹ g`; order 0 is the Green function.
    Resolvent { order: f64 },
    /// The positive ground state when `Φ(A)` has a kernel, else the Green
    /// function `Φ(A)⁻¹g`.
    KernelIfCritical,
}

impl Default for HChoice {
    fn default() -> Self {
        HChoice::Resolvent { order: 1.0 }
    }
}

/// A strictly positive `h` with `e^{-tΦ(A)}h ≤ h`.
pub fn superharmonic_h(dec: &SpectralDecomposition, entry: &BernsteinEntry, g: &DVector<f64>, choice: HChoice) -> Result<DVector<f64>> {
    if g.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Invalid("g must be strictly positive".into()));
    }
    let phi = dec.phi_spectrum(entry)?;
    let h = match choice {
        HChoice::KernelIfCritical if phi.first() == Some(&0.0) => {
            let mut q = dec.vectors.column(0).into_owned();
            if q.sum() < 0.0 {
                q.neg_mut();
            }
            let m = q.max();
            q / m
        }
        HChoice::KernelIfCritical => resolvent(dec, &phi, 0.0, g)?,
        HChoice::Resolvent { order } => resolvent(dec, &phi, order, g)?,
    };
    if h.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::NotPositive(h.min()));
    }
    let viol = superharmonic_violation(dec, entry, &h)?;
    if viol > 1e-12 {
        return Err(Error::NotSuperharmonic(viol));
    }
    Ok(h)
}

fn resolvent(dec: &SpectralDecomposition, phi: &[f64], order: f64, g: &DVector<f64>) -> Result<DVector<f64>> {
    let c = dec.coefficients(g)?;
    let mut out = DVector::zeros(c.len());
    for k in 0..c.len() {
        let den = order + phi[k];
        if den == 0.0 {
            if c[k].powi(2) >= KERNEL_OVERLAP_TOL * dec.inner(g, g) {
                return Err(Error::Invalid("Green function of g is infinite".into()));
            }
            continue;
        }
        out[k] = c[k] / den;
    }
    Ok(dec.synthesize(&out))
}

/// The h-transformed generator `H⁻¹(−Φ(A))H` and its Markov diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HTransformReport {
    pub h: Vec<f64>,
    #[serde(skip)]
    pub generator: DMatrix<f64>,
    pub offdiag_min: f64,
    pub row_sum_max: f64,
    pub conservative: bool,
}

/// Absolute tolerance on row sums, scaled by `max(1, Φ(‖A‖))`.
pub const ROW_SUM_TOL: f64 = 1e-12;

pub fn h_transform(dec: &SpectralDecomposition, entry: &BernsteinEntry, h: &DVector<f64>) -> Result<HTransformReport> {
    if h.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::NotPositive(h.min()));
    }
    let viol = superharmonic_violation(dec, entry, h)?;
    if viol > 1e-12 {
        return Err(Error::NotSuperharmonic(viol));
    }
    let n = dec.dim();
    let phi_mat = dec.phi_matrix(entry)?;
    let generator = DMatrix::from_fn(n, n, |i, j| -phi_mat[(i, j)] * h[j] / h[i]);
    let mut offdiag_min = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                offdiag_min = offdiag_min.min(generator[(i, j)]);
            }
        }
    }
    if n == 1 {
        offdiag_min = 0.0;
    }
    // Row sums `−(Φ(A)h)_i / h_i`, evaluated spectrally.
    let ph = dec.apply_phi(entry, h)?;
    let rows: Vec<f64> = (0..n).map(|i| -ph[i] / h[i]).collect();
    let row_sum_max = rows.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = entry.phi(dec.norm).max(1.0);
    let conservative = rows.iter().all(|r| r.abs() <= ROW_SUM_TOL * scale);
    Ok(HTransformReport { h: h.iter().copied().collect(), generator, offdiag_min, row_sum_max, conservative })
}

/// One member of a growing family.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub size: usize,
    pub op: SchrodingerOperator,
    pub g: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyOptions {
    /// Relative-increment threshold for a Cauchy sequence.
    pub cauchy_tol: f64,
    /// Log-log slope threshold for a converged sequence.
    pub slope_tol: f64,
    /// Increment decay exponent at or above which the sequence is summable.
    pub decay_threshold: f64,
    /// Members above this size use Lanczos quadrature for the Green form.
    pub dense_limit: usize,
    pub psd_tol: f64,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions { cauchy_tol: 1e-3, slope_tol: 0.02, decay_threshold: 0.5, dense_limit: 1000, psd_tol: 1e-9 }
    }
}

/// Green-form sequence over a family and the fitted growth diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreenSequence {
    pub sizes: Vec<usize>,
    pub values: Vec<f64>,
    /// Least-squares slope of `log G` on `log n`.
    pub slope: f64,
    /// `|G_last − G_prev| / G_last`.
    pub last_increment: f64,
    /// Decay exponent `p` of `ΔG/Δlog n ≍ n^{-p}`; `+∞` when G stops
    /// increasing.
    pub increment_exponent: f64,
}

pub fn green_sequence(family: &[FamilyMember], entry: &BernsteinEntry, opts: &FamilyOptions) -> Result<GreenSequence> {
    let values: Vec<f64> = family
        .par_iter()
        .map(|m| green_form_operator(&m.op, entry, &m.g, opts.dense_limit))
        .collect::<Result<Vec<_>>>()?;
    let sizes: Vec<usize> = family.iter().map(|m| m.size).collect();
    Ok(sequence_diagnostics(sizes, values))
}

pub fn sequence_diagnostics(sizes: Vec<usize>, values: Vec<f64>) -> GreenSequence {
    let ns: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    let slope = crate::stats::log_log_slope(&ns, &values).unwrap_or(f64::INFINITY);
    let k = values.len();
    let last_increment = if k >= 2 { (values[k - 1] - values[k - 2]).abs() / values[k - 1].abs() } else { f64::NAN };
    let mut pts = Vec::new();
    let mut all_flat = true;
    for j in 0..k.saturating_sub(1) {
        let dg = values[j + 1] - values[j];
        let dl = ns[j + 1].ln() - ns[j].ln();
        if dg > 1e-14 * values[j + 1].abs() {
            all_flat = false;
            pts.push((0.5 * (ns[j].ln() + ns[j + 1].ln()), (dg / dl).ln()));
        }
    }
    let increment_exponent = if all_flat || values.iter().any(|v| !v.is_finite()) {
        if values.iter().any(|v| !v.is_finite()) {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    } else {
        ls_slope(&pts).map(|s| -s).unwrap_or(f64::NAN)
    };
    GreenSequence { sizes, values, slope, last_increment, increment_exponent }
}

/// Classify a subordinated form from the Green-form sequence of a family.
pub fn classify_subordinated(family: &[FamilyMember], entry: &BernsteinEntry, opts: &FamilyOptions) -> Result<Classification> {
    if family.len() < 3 {
        return Err(Error::TooShort { need: 3, got: family.len() });
    }
    let worst = family.iter().map(|m| m.op.psd_certificate).fold(f64::INFINITY, f64::min);
    if family.iter().any(|m| m.op.psd_certificate < -opts.psd_tol) {
        let mut c = Classification::new(Verdict::Supercritical);
        c.gamma_mu = Some(worst);
        c.note("min_eigenvalue", Evidence::Number(worst));
        return Ok(c);
    }
    let seq = green_sequence(family, entry, opts)?;
    let infinite = seq.values.iter().any(|v| v.is_infinite());
    let cauchy = seq.last_increment < opts.cauchy_tol && seq.slope < opts.slope_tol;
    let summable = seq.increment_exponent >= opts.decay_threshold;
    let verdict = if infinite {
        Verdict::Critical
    } else if cauchy || summable {
        Verdict::Subcritical
    } else {
        Verdict::Critical
    };
    let mut c = Classification::new(verdict);
    let phi_bottom: Vec<f64> = family.iter().map(|m| entry.phi(m.op.psd_certificate.max(0.0))).collect();
    c.gamma_mu = phi_bottom.iter().cloned().reduce(f64::min);
    c.note("sizes", Evidence::Sequence(seq.sizes.iter().map(|&n| n as f64).collect()));
    c.note("green", Evidence::Sequence(seq.values.clone()));
    c.note("slope", Evidence::Number(seq.slope));
    c.note("last_increment", Evidence::Number(seq.last_increment));
    c.note("increment_exponent", Evidence::Number(seq.increment_exponent));
    c.note("phi_bottom", Evidence::Sequence(phi_bottom));
    c.note("cauchy", Evidence::Text(cauchy.to_string()));
    Ok(c)
}

/// Verdict from the on-diagonal heat decay exponent θ of an h-transform
/// and the potential tail exponent ρ: Critical iff `∫^∞ t^{ρ-1-θ} dt = ∞`.
pub fn asymptotic_criticality(theta: f64, entry: &BernsteinEntry) -> Result<Classification> {
    if !(theta > 0.0) {
        return Err(Error::BadParameter { name: "theta".into(), value: theta, reason: "must be positive".into() });
    }
    let rho = entry
        .potential_tail_exponent()
        .ok_or_else(|| Error::Absent { entry: entry.name.clone(), what: "potential tail exponent" })?;
    let verdict = if rho >= theta { Verdict::Critical } else { Verdict::Subcritical };
    let mut c = Classification::new(verdict);
    c.note("theta", Evidence::Number(theta));
    c.note("rho", Evidence::Number(rho));
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeMembership {
    pub member: bool,
    pub green: f64,
    /// Minimal-norm `u` with `Φ(A)^{1/2} u = f`.
    pub witness: Option<DVector<f64>>,
}

pub fn range_membership(dec: &SpectralDecomposition, entry: &BernsteinEntry, f: &DVector<f64>) -> Result<RangeMembership> {
    let green = dec.green_form(entry, f, crate::spectral::GreenMode::Spectral)?;
    if !green.is_finite() {
        return Ok(RangeMembership { member: false, green, witness: None });
    }
    let phi = dec.phi_spectrum(entry)?;
    let c = dec.coefficients(f)?;
    let u = DVector::from_iterator(c.len(), (0..c.len()).map(|k| if phi[k] > 0.0 { c[k] / phi[k].sqrt() } else { 0.0 }));
    Ok(RangeMembership { member: true, green, witness: Some(dec.synthesize(&u)) })
}

/// Largest `δ` with `δ Σ_{x∈W} f(x)² m_x ≤ ⟨Φ(A)f, f⟩_m` for all `f`;
/// zero when `Φ(A)` has a kernel.
pub fn subcriticality_margin(dec: &SpectralDecomposition, entry: &BernsteinEntry, window: &[usize]) -> Result<f64> {
    let phi = dec.phi_spectrum(entry)?;
    if phi.iter().any(|&p| p == 0.0) {
        return Ok(0.0);
    }
    if window.is_empty() {
        return Ok(f64::INFINITY);
    }
    // (MΦ)⁻¹ = Q diag(1/Φ) Qᵀ restricted to W, weighted by √m on W.
    let w = window.len();
    let mut t = DMatrix::zeros(w, w);
    for (a, &x) in window.iter().enumerate() {
        for (b, &y) in window.iter().enumerate() {
            let v: f64 = (0..dec.dim()).map(|k| dec.vectors[(x, k)] * dec.vectors[(y, k)] / phi[k]).sum();
            t[(a, b)] = dec.measure[x].sqrt() * v * dec.measure[y].sqrt();
        }
    }
    let t = (&t + t.transpose()) * 0.5;
    Ok(1.0 / SymmetricEigen::new(t).eigenvalues.max())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_space, Boundary, GridSpec};
    use crate::spectral::decompose;

    fn one_node() -> DiscreteSpace {
        build_space(&GridSpec::dirichlet(1, 1, 1.0), None).unwrap()
    }

    #[test]
    fn single_node_trichotomy() {
        let s = one_node();
        for (w, lam, v) in [(1.0, 2.0, Verdict::Subcritical), (2.0, 1.0, Verdict::Critical), (3.0, 2.0 / 3.0, Verdict::Supercritical)] {
            let mu = SignedMeasure::negative(vec![w]);
            let (l, g) = bottom_of_spectrum(&s, &mu).unwrap();
            assert!((l - lam).abs() < 1e-12);
            assert!((g - (2.0 - w)).abs() < 1e-12);
            let c = classify_schrodinger(&s, &mu, 1e-9).unwrap();
            assert_eq!(c.verdict, v);
        }
        let c = classify_schrodinger(&s, &SignedMeasure::negative(vec![2.0]), 1e-9).unwrap();
        assert_eq!(c.evidence["kernel_dimension"], Evidence::Number(1.0));
    }

    #[test]
    fn lambda_conventions() {
        let s = one_node();
        assert_eq!(bottom_of_spectrum(&s, &SignedMeasure::zero(1)).unwrap().0, f64::INFINITY);
        let free = build_space(&GridSpec::new(2, 4, 1.0, Boundary::Free), None).unwrap();
        let mut w = vec![0.0; 16];
        w[5] = 0.3;
        assert_eq!(bottom_of_spectrum(&free, &SignedMeasure::negative(w)).unwrap().0, 0.0);
    }

    #[test]
    fn dense_and_krylov_lambda_agree() {
        let s = build_space(&GridSpec::dirichlet(3, 9, 0.25), None).unwrap();
        let mu = crate::lattice::attach_measure(&s, &crate::lattice::MeasureSpec::radial(1.0, 2.0), crate::lattice::Sign::Minus).unwrap();
        let krylov = lambda_mu(&s, &mu).unwrap();
        // Dense reference via the generalized eigenproblem (K, D).
        let k = s.form_matrix().to_dense();
        let d = DVector::from_vec(mu.minus.clone());
        let dec = SpectralDecomposition::from_pencil(k, d).unwrap();
        assert!((krylov - dec.eigenvalues[0]).abs() < 1e-9 * krylov, "{krylov} vs {}", dec.eigenvalues[0]);
    }

    #[test]
    fn superharmonic_examples() {
        let id = BernsteinEntry::identity();
        let z = decompose(&SchrodingerOperator::scalar(0.0)).unwrap();
        let h = superharmonic_h(&z, &id, &DVector::from_element(1, 1.0), HChoice::default()).unwrap();
        assert_eq!(h[0], 1.0);
        let two = decompose(&SchrodingerOperator::scalar(2.0)).unwrap();
        let h = superharmonic_h(&two, &id, &DVector::from_element(1, 3.0), HChoice::default()).unwrap();
        assert!((h[0] - 1.0).abs() < 1e-15);
        let r = h_transform(&two, &id, &h).unwrap();
        assert!((r.generator[(0, 0)] + 2.0).abs() < 1e-14);
        assert!(!r.conservative);
        let r = h_transform(&z, &id, &DVector::from_element(1, 1.0)).unwrap();
        assert_eq!(r.generator[(0, 0)], 0.0);
        assert!(r.conservative);
        let neg = decompose(&SchrodingerOperator::scalar(-1.0)).unwrap();
        assert!(superharmonic_h(&neg, &id, &DVector::from_element(1, 1.0), HChoice::default()).is_err());
    }

    #[test]
    fn path_superharmonic_under_half_power() {
        let s = build_space(&GridSpec::dirichlet(1, 3, 1.0), None).unwrap();
        let dec = decompose(&schrodinger_matrix(&s, &SignedMeasure::zero(3)).unwrap()).unwrap();
        let e = BernsteinEntry::stable(1.0).unwrap();
        let h = superharmonic_h(&dec, &e, &DVector::from_element(3, 1.0), HChoice::default()).unwrap();
        assert!(h.iter().all(|&v| v > 0.0));
        let r = h_transform(&dec, &e, &h).unwrap();
        assert!(r.offdiag_min >= -1e-12);
        assert!(r.row_sum_max <= 1e-12);
    }

    #[test]
    fn non_superharmonic_is_rejected() {
        let s = build_space(&GridSpec::dirichlet(1, 3, 1.0), None).unwrap();
        let dec = decompose(&schrodinger_matrix(&s, &SignedMeasure::zero(3)).unwrap()).unwrap();
        let h = DVector::from_vec(vec![1.0, 0.01, 1.0]);
        assert!(matches!(h_transform(&dec, &BernsteinEntry::identity(), &h), Err(Error::NotSuperharmonic(_))));
    }

    #[test]
    fn asymptotic_table() {
        use crate::bernstein::{catalog_lookup, Params};
        let p = |kv: &[(&str, f64)]| kv.iter().map(|(k, v)| (k.to_string(), *v)).collect::<Params>();
        let cases = [
            ("gamma", p(&[("a", 1.0), ("c", 1.0)]), Verdict::Critical),
            ("relativistic", p(&[("alpha", 1.0), ("m", 1.0)]), Verdict::Critical),
            ("bessel", Params::new(), Verdict::Critical),
            ("stable", p(&[("beta", 1.0)]), Verdict::Subcritical),
            ("log_power", p(&[("delta", 1.0), ("beta", 0.5), ("sign", 1.0)]), Verdict::Subcritical),
            ("log_power", p(&[("delta", 1.0), ("beta", 0.5), ("sign", -1.0)]), Verdict::Subcritical),
            ("bessel_squared", Params::new(), Verdict::Subcritical),
        ];
        for (name, params, v) in cases {
            let e = catalog_lookup(name, &params).unwrap();
            assert_eq!(asymptotic_criticality(1.0, &e).unwrap().verdict, v, "{name}");
        }
        let cp = catalog_lookup("compound_poisson", &p(&[("a", 1.0), ("c", 1.0)])).unwrap();
        assert!(asymptotic_criticality(1.0, &cp).is_err());
    }

    #[test]
    fn range_examples() {
        let id = BernsteinEntry::identity();
        let two = decompose(&SchrodingerOperator::scalar(2.0)).unwrap();
        let r = range_membership(&two, &id, &DVector::from_element(1, 1.0)).unwrap();
        assert!(r.member);
        assert!((r.witness.unwrap()[0] - 0.5f64.sqrt()).abs() < 1e-15);
        // Free path: kernel = constants.
        let s = build_space(&GridSpec::new(1, 4, 1.0, Boundary::Free), None).unwrap();
        let dec = decompose(&schrodinger_matrix(&s, &SignedMeasure::zero(4)).unwrap()).unwrap();
        assert!(!range_membership(&dec, &id, &DVector::from_element(4, 1.0)).unwrap().member);
        let f = DVector::from_vec(vec![1.0, -1.0, 1.0, -1.0]);
        let r = range_membership(&dec, &id, &f).unwrap();
        assert!(r.member);
        let u = r.witness.unwrap();
        let back = dec.apply_function(&|l| l.sqrt(), &u).unwrap();
        assert!((back - f).norm() < 1e-12);
    }

    #[test]
    fn short_family_is_rejected() {
        let op = SchrodingerOperator::scalar(1.0);
        let m = FamilyMember { size: 1, op, g: DVector::from_element(1, 1.0) };
        let r = classify_subordinated(&[m.clone(), m], &BernsteinEntry::identity(), &FamilyOptions::default());
        assert!(matches!(r, Err(Error::TooShort { .. })));
    }

    fn path_family(sizes: &[usize]) -> Vec<FamilyMember> {
        sizes
            .iter()
            .map(|&n| {
                let s = build_space(&GridSpec::dirichlet(1, n, 1.0), None).unwrap();
                let op = schrodinger_matrix(&s, &SignedMeasure::zero(n)).unwrap();
                let g = DVector::from_fn(n, |i, _| if i == n / 2 { 1.0 } else { 0.0 });
                FamilyMember { size: n, op, g }
            })
            .collect()
    }

    #[test]
    fn one_dimensional_paths_are_critical() {
        let fam = path_family(&[17, 33, 65]);
        let c = classify_subordinated(&fam, &BernsteinEntry::identity(), &FamilyOptions::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Critical);
        if let Evidence::Number(s) = c.evidence["slope"] {
            assert!((s - 1.0).abs() < 0.05, "{s}");
        }
    }

    #[test]
    fn margin_is_positive_and_valid() {
        let s = build_space(&GridSpec::dirichlet(1, 7, 1.0), None).unwrap();
        let dec = decompose(&schrodinger_matrix(&s, &SignedMeasure::zero(7)).unwrap()).unwrap();
        let e = BernsteinEntry::stable(1.0).unwrap();
        let window = [2, 3, 4];
        let delta = subcriticality_margin(&dec, &e, &window).unwrap();
        assert!(delta > 0.0);
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let f = DVector::from_fn(7, |_, _| rng.random_range(-0.5..0.5));
            let lhs: f64 = window.iter().map(|&x| f[x] * f[x] * dec.measure[x]).sum::<f64>() * delta;
            let rhs = dec.inner(&dec.apply_phi(&e, &f).unwrap(), &f);
            assert!(lhs <= rhs * (1.0 + 1e-10) + 1e-14);
        }
    }
}
