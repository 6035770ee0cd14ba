//! Hardy and trace-Hardy constants and the grid families built around
//! them.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::{gamma, ln_gamma};
use std::f64::consts::PI;

use crate::criticality::{lambda_mu_base, FamilyMember};
use crate::error::{Error, Result};
use crate::lattice::{attach_measure, build_space, DiscreteSpace, FormMatrix, GridSpec, MeasureSpec, SchrodingerOperator, Sign, SignedMeasure};
use crate::spectral::decompose;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HardyKind {
    Hardy,
    TraceHardy,
}

/// Scale of the Dirichlet form relative to `∫|∇f|²`; the constants below
/// are sharp for `½∫|∇f|²` and its fractional analogue.
pub const FORM_SCALE: f64 = 0.5;

/// Coefficient of the logarithmic remainder
/// `λ̂_n − λ* ≈ C/(log n + b)²` for the half-scaled form.
pub const LOG_REMAINDER: f64 = PI * PI / 2.0;

fn bad(name: &str, value: f64, reason: &str) -> Error {
    Error::BadParameter { name: name.into(), value, reason: reason.into() }
}

/// The sharp constant `λ*` for the requested inequality.
pub fn hardy_constant(kind: HardyKind, d: usize, alpha: f64) -> Result<f64> {
    let df = d as f64;
    match kind {
        HardyKind::Hardy => {
            if !(alpha > 0.0 && alpha <= 2.0) {
                return Err(bad("alpha", alpha, "must lie in (0, 2]"));
            }
            if !(alpha < df) {
                return Err(bad("alpha", alpha, "must be smaller than the dimension"));
            }
            let r = (ln_gamma((df + alpha) / 4.0) - ln_gamma((df - alpha) / 4.0)).exp();
            Ok(2f64.powf(alpha - 1.0) * r * r)
        }
        HardyKind::TraceHardy => {
            if alpha == 2.0 {
                if d < 3 {
                    return Err(bad("d", df, "trace Hardy with α = 2 needs d ≥ 3"));
                }
                let r = (ln_gamma(df / 4.0) - ln_gamma((df - 2.0) / 4.0)).exp();
                Ok(r * r)
            } else {
                if d < 2 || !(alpha > 1.0 && alpha < df.min(2.0)) {
                    return Err(bad("alpha", alpha, "fractional trace Hardy needs 1 < α < min(d, 2)"));
                }
                let num = 2f64.powf(alpha) * PI.sqrt() * gamma((df + alpha - 2.0) / 4.0).powi(2) * gamma(alpha / 2.0);
                let den = gamma((df - alpha) / 4.0).powi(2) * gamma((alpha - 1.0) / 2.0);
                Ok(num / den)
            }
        }
    }
}

/// A Hardy-type family: Dirichlet grids of growing size carrying
/// `−λ·|x|^{-p}` (or its trace on `x_d = 0`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyScenario {
    pub kind: HardyKind,
    pub dim: usize,
    pub alpha: f64,
    pub p: f64,
    pub lambda_star: f64,
    pub spacing: f64,
    pub sizes: Vec<usize>,
}

/// Validate parameters and fix the weight exponent. `p` may be omitted
/// only for `α = 2`, where it defaults to 2 (Hardy) or 1 (trace).
pub fn build_scenario(kind: HardyKind, d: usize, alpha: f64, p: Option<f64>, spacing: f64, sizes: &[usize]) -> Result<HardyScenario> {
    let lambda_star = hardy_constant(kind, d, alpha)?;
    let p = match (p, alpha == 2.0) {
        (Some(p), _) => p,
        (None, true) => match kind {
            HardyKind::Hardy => 2.0,
            HardyKind::TraceHardy => 1.0,
        },
        (None, false) => return Err(Error::MissingParameter("p (weight exponent is required for α < 2)".into())),
    };
    if !(p >= 0.0) {
        return Err(bad("p", p, "must be nonnegative"));
    }
    if sizes.len() < 4 {
        return Err(Error::TooShort { need: 4, got: sizes.len() });
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("sizes must be strictly ascending".into()));
    }
    if let Some(&n) = sizes.iter().find(|&&n| n % 2 == 0) {
        return Err(bad("n", n as f64, "sizes must be odd so a node sits at the origin"));
    }
    Ok(HardyScenario { kind, dim: d, alpha, p, lambda_star, spacing, sizes: sizes.to_vec() })
}

/// One size of a scenario at a given coupling.
#[derive(Debug, Clone)]
pub struct ScenarioInstance {
    pub space: DiscreteSpace,
    pub mu: SignedMeasure,
    /// `M·A₀` of the base operator, before `μ` is attached.
    pub base: FormMatrix,
    pub op: SchrodingerOperator,
}

impl HardyScenario {
    /// Grid with the half-scaled local form.
    pub fn space(&self, n: usize) -> Result<DiscreteSpace> {
        Ok(build_space(&GridSpec::dirichlet(self.dim, n, self.spacing), None)?.with_form_scale(FORM_SCALE))
    }

    pub fn measure(&self, space: &DiscreteSpace, lambda: f64) -> Result<SignedMeasure> {
        let spec = match self.kind {
            HardyKind::Hardy => MeasureSpec::radial(lambda, self.p),
            HardyKind::TraceHardy => MeasureSpec::hyperplane(lambda, self.p),
        };
        attach_measure(space, &spec, Sign::Minus)
    }

    /// Base form: the local half-Laplacian, or `½ A₀^{α/2}` computed
    /// spectrally from the unscaled local Laplacian when `α < 2`.
    fn base(&self, space: &DiscreteSpace) -> Result<FormMatrix> {
        if self.alpha == 2.0 {
            return Ok(FormMatrix::Sparse(space.form_matrix()));
        }
        let unscaled = space.clone().with_form_scale(1.0 / FORM_SCALE);
        let a0 = crate::lattice::schrodinger_matrix(&unscaled, &SignedMeasure::zero(space.len()))?;
        match decompose(&a0)?.fractional_form(self.alpha)? {
            FormMatrix::Dense(d) => Ok(FormMatrix::Dense(d * FORM_SCALE)),
            sparse => Ok(sparse),
        }
    }

    pub fn instance(&self, n: usize, lambda: f64) -> Result<ScenarioInstance> {
        let space = self.space(n)?;
        let mu = self.measure(&space, lambda)?;
        let base = self.base(&space)?;
        let signed = mu.canonical().signed();
        let form = match &base {
            FormMatrix::Sparse(s) => FormMatrix::Sparse(s.plus_diagonal(&signed)),
            FormMatrix::Dense(d) => {
                let mut k = d.clone();
                for (i, v) in signed.iter().enumerate() {
                    k[(i, i)] += v;
                }
                FormMatrix::Dense(k)
            }
        };
        let op = SchrodingerOperator::new(DVector::from_vec(space.measure.clone()), form)?.with_cancelled(&mu.canonical().minus);
        Ok(ScenarioInstance { space, mu, base, op })
    }

    /// Discrete critical coupling `λ̂_n`, the root of `λ(μ_λ) = 1`. Since
    /// `λ(μ_{cλ}) = λ(μ_λ)/c` the root is `λ(μ_1)` exactly.
    pub fn critical_coupling(&self, n: usize) -> Result<f64> {
        let space = self.space(n)?;
        let mu = self.measure(&space, 1.0)?;
        lambda_mu_base(&self.base(&space)?, &mu)
    }

    pub fn critical_couplings(&self) -> Result<Vec<f64>> {
        self.sizes.par_iter().map(|&n| self.critical_coupling(n)).collect()
    }

    /// Family at a fixed coupling, with `g` the indicator of the origin node.
    pub fn family(&self, lambda: f64) -> Result<Vec<FamilyMember>> {
        self.sizes
            .par_iter()
            .map(|&n| {
                let inst = self.instance(n, lambda)?;
                let g = origin_indicator(&inst.space)?;
                Ok(FamilyMember { size: n, op: inst.op, g })
            })
            .collect()
    }
}

/// Indicator of the node at the origin of the first grid.
pub fn origin_indicator(space: &DiscreteSpace) -> Result<DVector<f64>> {
    let h = space.grids[0].spacing;
    let idx = space
        .coords
        .iter()
        .zip(&space.component)
        .position(|(x, &c)| c == 0 && x.iter().all(|v| v.abs() <= 0.25 * h))
        .ok_or_else(|| Error::InvalidGrid("no node at the origin".into()))?;
    Ok(DVector::from_fn(space.len(), |i, _| if i == idx { 1.0 } else { 0.0 }))
}

/// Extrapolate `λ̂_∞` from the last two sizes under
/// `λ̂_n = λ∞ + C/(log n + b)²`, solving for `b` and `λ∞`.
pub fn extrapolate_critical_coupling(sizes: &[usize], values: &[f64]) -> Result<f64> {
    if sizes.len() < 2 || sizes.len() != values.len() {
        return Err(Error::TooShort { need: 2, got: sizes.len().min(values.len()) });
    }
    let k = sizes.len();
    let (li, lj) = ((sizes[k - 2] as f64).ln(), (sizes[k - 1] as f64).ln());
    let (vi, vj) = (values[k - 2], values[k - 1]);
    if !(vi > vj) {
        return Err(Error::Invalid(format!("critical couplings are not decreasing: {vi} then {vj}")));
    }
    let gap = |b: f64| LOG_REMAINDER * ((li + b).powi(-2) - (lj + b).powi(-2)) - (vi - vj);
    // gap decreases from +∞ at b → −log n_i to −(vi − vj) as b → ∞.
    let mut lo = -li + 1e-12;
    let mut hi = 1.0;
    while gap(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Invalid("no log-remainder fit for these couplings".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let b = 0.5 * (lo + hi);
    Ok(vj - LOG_REMAINDER / (lj + b).powi(2))
}
