//! Bernstein functions: closed forms, Lévy triples, potential and
//! transition densities.

use serde::Serialize;
use statrs::function::gamma::{gamma, ln_gamma};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

pub type Params = BTreeMap<String, f64>;

/// Catalog families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `Φ(λ) = λ^{β/2}`.
    Stable { beta: f64 },
    /// `Φ(λ) = aλ/(λ+c)`.
    CompoundPoisson { a: f64, c: f64 },
    /// `Φ(λ) = a log(1 + λ/c)`.
    Gamma { a: f64, c: f64 },
    /// `Φ(λ) = a(√(2λ+c²) − c)`.
    InverseGaussian { a: f64, c: f64 },
    /// `Φ(λ) = (λ + m^{2/α})^{α/2} − m`.
    Relativistic { alpha: f64, m: f64 },
    /// `Φ(λ) = λ^{δ/2} log(1+λ)^{±β/2}`.
    LogPower { delta: f64, beta: f64, sign: i8 },
    /// `Φ(λ) = arccosh(1+λ)`.
    Bessel,
    /// `Φ(λ) = arccosh(1+λ)²`.
    BesselSquared,
    /// `Φ(λ) = bλ`.
    Linear { b: f64 },
}

/// How `phi_eval` computes Φ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiMode {
    Closed,
    LevyQuadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BernsteinEntry {
    pub name: String,
    pub family: Family,
}

pub const CATALOG_NAMES: [&str; 9] = [
    "stable",
    "compound_poisson",
    "gamma",
    "inverse_gaussian",
    "relativistic",
    "log_power",
    "bessel",
    "bessel_squared",
    "linear",
];

fn param(params: &Params, key: &str) -> Result<f64> {
    params.get(key).copied().ok_or_else(|| Error::MissingParameter(key.to_string()))
}

fn bad(name: &str, value: f64, reason: &str) -> Error {
    Error::BadParameter { name: name.to_string(), value, reason: reason.to_string() }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(bad(name, v, "must be positive and finite"))
    }
}

/// Look up a catalog entry by name and parameter map.
pub fn catalog_lookup(name: &str, params: &Params) -> Result<BernsteinEntry> {
    let family = match name {
        "stable" => {
            let beta = param(params, "beta")?;
            if !(beta > 0.0 && beta < 2.0) {
                return Err(bad("beta", beta, "stable requires 0 < beta < 2"));
            }
            Family::Stable { beta }
        }
        "compound_poisson" => Family::CompoundPoisson {
            a: positive("a", param(params, "a")?)?,
            c: positive("c", param(params, "c")?)?,
        },
        "gamma" => Family::Gamma { a: positive("a", param(params, "a")?)?, c: positive("c", param(params, "c")?)? },
        "inverse_gaussian" => Family::InverseGaussian {
            a: positive("a", param(params, "a")?)?,
            c: positive("c", param(params, "c")?)?,
        },
        "relativistic" => {
            let alpha = param(params, "alpha")?;
            if !(alpha > 0.0 && alpha < 2.0) {
                return Err(bad("alpha", alpha, "relativistic requires 0 < alpha < 2"));
            }
            Family::Relativistic { alpha, m: positive("m", param(params, "m")?)? }
        }
        "log_power" => {
            let delta = param(params, "delta")?;
            let beta = param(params, "beta")?;
            let sign = param(params, "sign")?;
            if !(delta > 0.0 && delta < 2.0) {
                return Err(bad("delta", delta, "log_power requires 0 < delta < 2"));
            }
            let sign = if sign == 1.0 {
                if !(beta > 0.0 && beta < 2.0 - delta) {
                    return Err(bad("beta", beta, "log_power(+) requires 0 < beta < 2 - delta"));
                }
                1
            } else if sign == -1.0 {
                if !(beta > 0.0 && beta < delta) {
                    return Err(bad("beta", beta, "log_power(-) requires 0 < beta < delta"));
                }
                -1
            } else {
                return Err(bad("sign", sign, "sign must be +1 or -1"));
            };
            Family::LogPower { delta, beta, sign }
        }
        "bessel" => Family::Bessel,
        "bessel_squared" => Family::BesselSquared,
        "linear" => Family::Linear { b: positive("b", param(params, "b")?)? },
        other => return Err(Error::UnknownEntry(other.to_string())),
    };
    Ok(BernsteinEntry { name: name.to_string(), family })
}

/// `arccosh(1+λ)` without cancellation near 0.
fn acosh1p(l: f64) -> f64 {
    (l + (l * (l + 2.0)).sqrt()).ln_1p()
}

/// `log Σ exp(v)` over a stream of log-terms.
fn log_sum_exp(terms: &[f64]) -> f64 {
    let mx = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    mx + terms.iter().map(|t| (t - mx).exp()).sum::<f64>().ln()
}

impl BernsteinEntry {
    pub fn from_family(family: Family) -> Self {
        let name = match family {
            Family::Stable { .. } => "stable",
            Family::CompoundPoisson { .. } => "compound_poisson",
            Family::Gamma { .. } => "gamma",
            Family::InverseGaussian { .. } => "inverse_gaussian",
            Family::Relativistic { .. } => "relativistic",
            Family::LogPower { .. } => "log_power",
            Family::Bessel => "bessel",
            Family::BesselSquared => "bessel_squared",
            Family::Linear { .. } => "linear",
        };
        BernsteinEntry { name: name.to_string(), family }
    }

    pub fn stable(beta: f64) -> Result<Self> {
        catalog_lookup("stable", &Params::from([("beta".to_string(), beta)]))
    }

    pub fn linear(b: f64) -> Result<Self> {
        catalog_lookup("linear", &Params::from([("b".to_string(), b)]))
    }

    pub fn identity() -> Self {
        Self::from_family(Family::Linear { b: 1.0 })
    }

    pub fn gamma(a: f64, c: f64) -> Result<Self> {
        catalog_lookup("gamma", &Params::from([("a".to_string(), a), ("c".to_string(), c)]))
    }

    pub fn inverse_gaussian(a: f64, c: f64) -> Result<Self> {
        catalog_lookup("inverse_gaussian", &Params::from([("a".to_string(), a), ("c".to_string(), c)]))
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match self.family {
            Family::Stable { beta } => vec![("beta", beta)],
            Family::CompoundPoisson { a, c } | Family::Gamma { a, c } | Family::InverseGaussian { a, c } => {
                vec![("a", a), ("c", c)]
            }
            Family::Relativistic { alpha, m } => vec![("alpha", alpha), ("m", m)],
            Family::LogPower { delta, beta, sign } => vec![("delta", delta), ("beta", beta), ("sign", sign as f64)],
            Family::Bessel | Family::BesselSquared => vec![],
            Family::Linear { b } => vec![("b", b)],
        }
    }

    /// Drift coefficient `b`.
    pub fn drift(&self) -> f64 {
        match self.family {
            Family::Linear { b } => b,
            _ => 0.0,
        }
    }

    /// Closed-form Φ(λ), λ ≥ 0.
    pub fn phi(&self, l: f64) -> f64 {
        if l == 0.0 {
            return 0.0;
        }
        match self.family {
            Family::Stable { beta } => l.powf(0.5 * beta),
            Family::CompoundPoisson { a, c } => a * l / (l + c),
            Family::Gamma { a, c } => a * (l / c).ln_1p(),
            Family::InverseGaussian { a, c } => a * 2.0 * l / ((2.0 * l + c * c).sqrt() + c),
            Family::Relativistic { alpha, m } => {
                let kappa = m.powf(2.0 / alpha);
                m * (0.5 * alpha * (l / kappa).ln_1p()).exp_m1()
            }
            Family::LogPower { delta, beta, sign } => {
                l.powf(0.5 * delta) * l.ln_1p().powf(0.5 * beta * sign as f64)
            }
            Family::Bessel => acosh1p(l),
            Family::BesselSquared => acosh1p(l).powi(2),
            Family::Linear { b } => b * l,
        }
    }

    /// Φ(λ) by the requested route.
    pub fn phi_eval(&self, l: f64, mode: PhiMode) -> Result<f64> {
        if !(l >= 0.0) || !l.is_finite() {
            return Err(bad("lambda", l, "Φ is evaluated on [0, ∞)"));
        }
        match mode {
            PhiMode::Closed => Ok(self.phi(l)),
            PhiMode::LevyQuadrature => {
                if !self.has_levy_density() {
                    return Err(Error::Absent { entry: self.name.clone(), what: "Lévy density" });
                }
                if l == 0.0 {
                    return Ok(0.0);
                }
                let b = self.drift();
                if matches!(self.family, Family::Linear { .. }) {
                    return Ok(b * l);
                }
                let w = |x: f64| (ln_one_minus_exp(l * x.exp()) + self.ln_levy_weight(x)).exp();
                let r = quadrature::integrate_log(w, Tolerance::default())?;
                Ok(b * l + r.value)
            }
        }
    }

    pub fn has_levy_density(&self) -> bool {
        !matches!(self.family, Family::LogPower { .. } | Family::Bessel | Family::BesselSquared)
    }

    /// `log(s·ν(s))` at `s = e^x`.
    pub fn ln_levy_weight(&self, x: f64) -> f64 {
        let s = x.exp();
        match self.family {
            Family::Stable { beta } => {
                let h = 0.5 * beta;
                (h / gamma(1.0 - h)).ln() - h * x
            }
            Family::CompoundPoisson { a, c } => (a * c).ln() + x - c * s,
            Family::Gamma { a, c } => a.ln() - c * s,
            Family::InverseGaussian { a, c } => (a / (2.0 * PI).sqrt()).ln() - 0.5 * x - 0.5 * c * c * s,
            Family::Relativistic { alpha, m } => {
                let h = 0.5 * alpha;
                let kappa = m.powf(2.0 / alpha);
                (h / gamma(1.0 - h)).ln() - h * x - kappa * s
            }
            Family::Linear { .. } => f64::NEG_INFINITY,
            Family::LogPower { .. } | Family::Bessel | Family::BesselSquared => f64::NAN,
        }
    }

    /// `s·ν(s)` at `s = e^x`.
    pub fn levy_log_weight(&self, x: f64) -> f64 {
        self.ln_levy_weight(x).exp()
    }

    /// Lévy density ν(s).
    pub fn levy_density(&self, s: f64) -> Result<f64> {
        if !self.has_levy_density() {
            return Err(Error::Absent { entry: self.name.clone(), what: "Lévy density" });
        }
        if !(s > 0.0) {
            return Err(bad("s", s, "must be positive"));
        }
        Ok(self.levy_log_weight(s.ln()) / s)
    }

    /// Infimum of the support of ν (None when ν is not stored and Φ is
    /// bounded, which never happens in the catalog).
    pub fn levy_support_inf(&self) -> Option<f64> {
        match self.family {
            // ν ≡ 0: empty support.
            Family::Linear { .. } => None,
            // Stored densities are positive on (0, ∞); the remaining
            // families are driftless and unbounded, so ν has infinite mass
            // accumulating at 0.
            _ => Some(0.0),
        }
    }

    /// Condition (IB): `b > 0` or `inf supp ν = 0`.
    pub fn ib_flag(&self) -> bool {
        self.drift() > 0.0 || self.levy_support_inf() == Some(0.0)
    }

    /// `∫₀^∞ s ν(ds) < ∞`.
    pub fn first_moment_finite(&self) -> bool {
        match self.family {
            Family::Stable { .. } | Family::LogPower { .. } | Family::Bessel => false,
            Family::CompoundPoisson { .. }
            | Family::Gamma { .. }
            | Family::InverseGaussian { .. }
            | Family::Relativistic { .. }
            | Family::BesselSquared
            | Family::Linear { .. } => true,
        }
    }

    /// ρ with `u(s) ≍ s^{ρ-1}` as `s → ∞`.
    pub fn potential_tail_exponent(&self) -> Option<f64> {
        match self.family {
            Family::Stable { beta } => Some(0.5 * beta),
            Family::Gamma { .. } | Family::Relativistic { .. } | Family::Bessel => Some(1.0),
            Family::LogPower { delta, beta, sign } => Some(0.5 * (delta + sign as f64 * beta)),
            Family::BesselSquared => Some(0.5),
            Family::Linear { .. } => Some(1.0),
            Family::CompoundPoisson { .. } | Family::InverseGaussian { .. } => None,
        }
    }

    pub fn has_potential_density(&self) -> bool {
        matches!(self.family, Family::Stable { .. } | Family::Gamma { .. } | Family::Relativistic { .. })
    }

    /// `log(s·u(s))` at `s = e^x`.
    pub fn ln_potential_weight(&self, x: f64) -> Result<f64> {
        match self.family {
            Family::Stable { beta } => {
                let h = 0.5 * beta;
                Ok(h * x - ln_gamma(h))
            }
            Family::Gamma { a, c } => gamma_ln_potential_weight(a, c, x),
            Family::Relativistic { alpha, m } => Ok(relativistic_ln_potential_weight(alpha, m, x)),
            _ => Err(Error::AsymptoticsOnly { entry: self.name.clone(), tail_exponent: self.potential_tail_exponent() }),
        }
    }

    /// `s·u(s)` at `s = e^x`.
    pub fn potential_log_weight(&self, x: f64) -> Result<f64> {
        Ok(self.ln_potential_weight(x)?.exp())
    }

    /// Density u(s) of the 0-potential measure.
    pub fn potential_density(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(bad("s", s, "must be positive"));
        }
        Ok(self.potential_log_weight(s.ln())? / s)
    }

    pub fn has_transition_density(&self) -> bool {
        matches!(self.family, Family::Stable { beta } if beta == 1.0)
    }

    /// `log(s·η_t(s))` at `s = e^x`.
    pub fn ln_transition_weight(&self, t: f64, x: f64) -> Result<f64> {
        if !self.has_transition_density() {
            return Err(Error::Absent { entry: self.name.clone(), what: "transition density" });
        }
        if !(t > 0.0) {
            return Err(bad("t", t, "must be positive"));
        }
        Ok((t / (2.0 * PI.sqrt())).ln() - 0.5 * x - t * t / 4.0 * (-x).exp())
    }

    /// `s·η_t(s)` at `s = e^x`.
    pub fn transition_log_weight(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.ln_transition_weight(t, x)?.exp())
    }

    /// Transition density η_t(s).
    pub fn transition_density(&self, t: f64, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(bad("s", s, "must be positive"));
        }
        Ok(self.transition_log_weight(t, s.ln())? / s)
    }

    /// `∫₀^∞ e^{-λs} u(s) ds` by quadrature.
    pub fn potential_laplace(&self, l: f64) -> Result<f64> {
        self.ln_potential_weight(0.0)?;
        let w = |x: f64| (damp(l, x) + self.ln_potential_weight(x).unwrap_or(f64::NAN)).exp();
        Ok(quadrature::integrate_log(w, Tolerance::default())?.value)
    }

    /// `∫₀^∞ e^{-λs} η_t(s) ds` by quadrature.
    pub fn transition_laplace(&self, t: f64, l: f64) -> Result<f64> {
        self.ln_transition_weight(t, 0.0)?;
        let w = |x: f64| (damp(l, x) + self.ln_transition_weight(t, x).unwrap_or(f64::NAN)).exp();
        Ok(quadrature::integrate_log(w, Tolerance::default())?.value)
    }

    /// Truncated first moment `∫₀^T s ν(s) ds`.
    pub fn truncated_first_moment(&self, t_max: f64) -> Result<f64> {
        if !self.has_levy_density() {
            return Err(Error::Absent { entry: self.name.clone(), what: "Lévy density" });
        }
        if matches!(self.family, Family::Linear { .. }) {
            return Ok(0.0);
        }
        // ∫ s ν(s) ds = ∫ s · (s ν(s)) dx in x = log s.
        let w = |x: f64| (x + self.ln_levy_weight(x)).exp();
        Ok(quadrature::integrate_lower(w, t_max.ln(), Tolerance::default())?.value)
    }

    /// One-line structured description for reports.
    pub fn describe(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for BernsteinEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        let ps = self.params();
        for (i, (k, v)) in ps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        write!(
            f,
            ") b={} ib={} first_moment_finite={} rho={} levy={} potential={} transition={}",
            self.drift(),
            self.ib_flag(),
            self.first_moment_finite(),
            self.potential_tail_exponent().map_or("-".to_string(), |r| r.to_string()),
            self.has_levy_density(),
            self.has_potential_density(),
            self.has_transition_density()
        )
    }
}

/// One representative of every catalog family, with both log_power signs.
pub fn default_entries() -> Vec<BernsteinEntry> {
    let p = |kv: &[(&str, f64)]| kv.iter().map(|(k, v)| (k.to_string(), *v)).collect::<Params>();
    let specs: [(&str, Params); 10] = [
        ("stable", p(&[("beta", 1.0)])),
        ("compound_poisson", p(&[("a", 1.0), ("c", 1.0)])),
        ("gamma", p(&[("a", 1.0), ("c", 1.0)])),
        ("inverse_gaussian", p(&[("a", 1.0), ("c", 1.0)])),
        ("relativistic", p(&[("alpha", 1.0), ("m", 1.0)])),
        ("log_power", p(&[("delta", 1.0), ("beta", 0.5), ("sign", 1.0)])),
        ("log_power", p(&[("delta", 1.0), ("beta", 0.5), ("sign", -1.0)])),
        ("bessel", Params::new()),
        ("bessel_squared", Params::new()),
        ("linear", p(&[("b", 1.0)])),
    ];
    specs.iter().map(|(n, ps)| catalog_lookup(n, ps).expect("valid default parameters")).collect()
}

/// `-λe^x`, with `λ = 0` exact even when `e^x` overflows.
pub(crate) fn damp(l: f64, x: f64) -> f64 {
    if l == 0.0 {
        0.0
    } else {
        -l * x.exp()
    }
}

/// `log(1 - e^{-y})` for `y ≥ 0`.
pub(crate) fn ln_one_minus_exp(y: f64) -> f64 {
    if y > 0.693 {
        (-(-y).exp()).ln_1p()
    } else {
        (-(-y).exp_m1()).ln()
    }
}

/// Beyond this scaled time the potential densities equal their renewal
/// limit to within `e^{-60}` relative error.
const RENEWAL_SCALE: f64 = 60.0;

fn gamma_ln_potential_weight(a: f64, c: f64, x: f64) -> Result<f64> {
    if c * x.exp() > RENEWAL_SCALE {
        return Ok((c / a).ln() + x);
    }
    // s·u(s) = e^{-cs}/a · ∫₀^∞ e^{τy}/Γ(τ) dτ with y = log(cs).
    let y = c.ln() + x;
    let z = y.exp();
    let (centre, width) = if y > 0.0 {
        let tc = z.max(1.0);
        (tc, tc.sqrt())
    } else {
        let tc = 1.0 / (1.0 - y);
        (tc, tc)
    };
    // Integrand relative to its value at the centre, to stay in range.
    let shift = centre * y - ln_gamma(centre);
    let f = |tau: f64| {
        if tau <= 0.0 {
            return 0.0;
        }
        (tau * y - ln_gamma(tau) - shift).exp()
    };
    let mut pts = vec![0.0];
    for k in -8..=10 {
        let p = centre + k as f64 * width;
        if p > 0.0 {
            pts.push(p);
        }
    }
    let upper = *pts.last().unwrap();
    let tol = Tolerance::new(0.0, 1e-13);
    let body = quadrature::integrate_breaks(f, &pts, tol)?;
    let tail = quadrature::integrate_upper(f, upper, Tolerance::new(1e-300, 1e-13))?;
    Ok((body.value + tail.value).ln() + shift - z - a.ln())
}

fn relativistic_ln_potential_weight(alpha: f64, m: f64, x: f64) -> f64 {
    let h = 0.5 * alpha;
    let kappa = m.powf(2.0 / alpha);
    if kappa * x.exp() > RENEWAL_SCALE {
        // u(∞) = 1/Φ'(0) = κ^{1-α/2}/h.
        return (kappa.powf(1.0 - h) / h).ln() + x;
    }
    let s = x.exp();
    let lm = m.ln();
    let peak = (kappa * s / h).max(1.0);
    let mut terms = Vec::new();
    let mut best = f64::NEG_INFINITY;
    let mut n = 0usize;
    loop {
        let nf = n as f64;
        let t = nf * lm + h * (nf + 1.0) * x - ln_gamma(h * (nf + 1.0));
        best = best.max(t);
        terms.push(t);
        if nf > peak && t < best - 40.0 {
            break;
        }
        n += 1;
    }
    log_sum_exp(&terms) - kappa * s
}
