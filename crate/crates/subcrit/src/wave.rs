//! Spectral solution of `∂²w/∂t² = −Φ(A)w`, `w(0) = 0`, `∂_t w(0) = g`,
//! with energy bookkeeping, a boundedness test and the Hadamard
//! transmutation back to the heat semigroup.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;
use std::io::{self, Write};

use crate::bernstein::BernsteinEntry;
use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::report::num;
use crate::spectral::{SpectralDecomposition, KERNEL_OVERLAP_TOL};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveTrace {
    pub times: Vec<f64>,
    #[serde(skip)]
    pub states: Vec<DVector<f64>>,
    pub l2_norms: Vec<f64>,
    pub energy_residuals: Vec<f64>,
    /// `√(E₁(u,u))` for the minimal preimage `u`; `+∞` off the range.
    pub range_norm: f64,
    /// `‖u‖_m`; `+∞` off the range.
    pub range_seminorm: f64,
    /// `2π/√Φ(λ)` for the smallest positive `Φ(λ_k)`.
    pub fundamental_period: Option<f64>,
    pub g_norm_sq: f64,
}

fn sin_over(omega: f64, t: f64) -> (f64, f64) {
    if omega == 0.0 {
        (t, 1.0)
    } else {
        ((t * omega).sin() / omega, (t * omega).cos())
    }
}

/// `(‖g‖_{R}, ⟦g⟧)` from the spectral weights.
pub fn range_norms(phi: &[f64], c: &DVector<f64>) -> (f64, f64) {
    let g2: f64 = c.norm_squared();
    let overlap: f64 = (0..c.len()).filter(|&k| phi[k] == 0.0).map(|k| c[k] * c[k]).sum();
    if g2 > 0.0 && overlap >= KERNEL_OVERLAP_TOL * g2 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let mut semi = 0.0;
    let mut full = 0.0;
    for k in 0..c.len() {
        if phi[k] > 0.0 {
            let u2 = c[k] * c[k] / phi[k];
            semi += u2;
            full += u2 * (1.0 + phi[k]);
        }
    }
    (full.sqrt(), semi.sqrt())
}

/// Propagate exactly at each requested time.
pub fn solve_wave(dec: &SpectralDecomposition, entry: &BernsteinEntry, g: &DVector<f64>, times: &[f64]) -> Result<WaveTrace> {
    if times.iter().any(|t| !(*t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Invalid("times must be nonnegative and ascending".into()));
    }
    let phi = dec.phi_spectrum(entry)?;
    let c = dec.coefficients(g)?;
    let omega: Vec<f64> = phi.iter().map(|p| p.sqrt()).collect();
    let g2 = dec.inner(g, g);
    let rows: Vec<(DVector<f64>, f64, f64)> = times
        .par_iter()
        .map(|&t| {
            let n = c.len();
            let mut a = DVector::zeros(n);
            let mut b = DVector::zeros(n);
            for k in 0..n {
                let (s, co) = sin_over(omega[k], t);
                a[k] = s * c[k];
                b[k] = co * c[k];
            }
            let w = dec.synthesize(&a);
            let v = dec.synthesize(&b);
            // Energy from the nodal states, not from the coefficients.
            let kinetic = dec.inner(&v, &v);
            let wc = dec.coefficients(&w).expect("dimension checked");
            let potential: f64 = (0..n).map(|k| phi[k] * wc[k] * wc[k]).sum();
            let norm = dec.norm_m(&w);
            (w, norm, (kinetic + potential - g2).abs())
        })
        .collect();
    let (range_norm, range_seminorm) = range_norms(&phi, &c);
    let fundamental_period = phi.iter().copied().filter(|&p| p > 0.0).reduce(f64::min).map(|p| 2.0 * PI / p.sqrt());
    let mut states = Vec::with_capacity(rows.len());
    let mut l2_norms = Vec::with_capacity(rows.len());
    let mut energy_residuals = Vec::with_capacity(rows.len());
    for (w, n, e) in rows {
        states.push(w);
        l2_norms.push(n);
        energy_residuals.push(e);
    }
    Ok(WaveTrace { times: times.to_vec(), states, l2_norms, energy_residuals, range_norm, range_seminorm, fundamental_period, g_norm_sq: g2 })
}

/// Dense linear samples over the first two fundamental periods, then
/// log-spaced samples out to `10^decades` periods.
pub fn default_times(period: f64, count: usize, decades: f64) -> Vec<f64> {
    let lin = count / 2;
    let logn = count - lin;
    let mut t: Vec<f64> = (0..lin).map(|i| 2.0 * period * i as f64 / lin as f64).collect();
    let a = (2.0 * period).ln();
    let b = (period * 10f64.powf(decades)).ln();
    t.extend((0..logn).map(|i| (a + (b - a) * i as f64 / (logn - 1).max(1) as f64).exp()));
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Boundedness {
    Bounded { sup: f64 },
    Growing { rate: f64 },
}

/// Minimum span, in decades beyond the fundamental period, for a bounded
/// verdict to be meaningful.
pub const MIN_DECADES: f64 = 3.0;

/// Bounded when the running maximum of `‖w(t)‖` settles, growing with the
/// log-log rate of its upper envelope otherwise.
pub fn boundedness_verdict(trace: &WaveTrace) -> Result<Boundedness> {
    let pts: Vec<(f64, f64)> = trace.times.iter().copied().zip(trace.l2_norms.iter().copied()).filter(|p| p.0 > 0.0).collect();
    if pts.len() < 3 {
        return Err(Error::TraceTooShort(format!("{} positive times", pts.len())));
    }
    let t_end = pts.last().unwrap().0;
    if trace.range_seminorm.is_finite() {
        let period = trace.fundamental_period.unwrap_or(pts[0].0);
        let span = (t_end / period).log10();
        if span < MIN_DECADES {
            return Err(Error::TraceTooShort(format!("spans {span:.2} decades beyond the fundamental period")));
        }
    }
    // Running maximum (upper envelope).
    let mut env = Vec::with_capacity(pts.len());
    let mut m: f64 = 0.0;
    for &(t, v) in &pts {
        m = m.max(v);
        env.push((t, m));
    }
    let sup = m;
    let decade_ago = env.iter().rev().find(|p| p.0 <= t_end / 10.0).map(|p| p.1).unwrap_or(env[0].1);
    let increment = (sup - decade_ago) / sup.max(1e-300);
    let tail: Vec<(f64, f64)> = env.iter().filter(|p| p.0 >= t_end / 100.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    let rate = crate::stats::ls_slope(&tail).unwrap_or(0.0);
    if increment < 1e-6 || rate < 0.01 {
        Ok(Boundedness::Bounded { sup })
    } else {
        Ok(Boundedness::Growing { rate })
    }
}

/// Wave-time cutoff `x_max` in `σ = 2√t·x`.
pub const SIGMA_CUTOFF: f64 = 8.0;

/// `e^{-tA}g` reconstructed from the `Φ = id` wave solution:
/// `(2√π t^{3/2})⁻¹ ∫₀^∞ σ e^{-σ²/4t} w(σ) dσ`.
pub fn transmutation_heat(dec: &SpectralDecomposition, t: f64, g: &DVector<f64>, x_max: f64) -> Result<DVector<f64>> {
    if !(t > 0.0) {
        return Err(Error::BadParameter { name: "t".into(), value: t, reason: "must be positive".into() });
    }
    let id = BernsteinEntry::identity();
    let phi = dec.phi_spectrum(&id)?;
    let c = dec.coefficients(g)?;
    let omega: Vec<f64> = phi.iter().map(|p| p.sqrt()).collect();
    let gn = dec.norm_m(g);
    // |w(σ)| ≤ σ‖g‖ bounds the discarded tail.
    let tail = 4.0 / PI.sqrt() * gn * upper_gaussian_second_moment(x_max);
    if tail > 1e-12 * gn.max(1e-300) {
        return Err(Error::TailNotNegligible(tail));
    }
    let rt = t.sqrt();
    let f = |x: f64| {
        let sigma = 2.0 * rt * x;
        let weight = x * (-x * x).exp();
        DVector::from_iterator(c.len(), (0..c.len()).map(|k| weight * sin_over(omega[k], sigma).0 * c[k]))
    };
    // Split where the fastest mode completes a period to help the bisection.
    let mut breaks = vec![0.0];
    let wmax = omega.iter().cloned().fold(0.0, f64::max);
    let pieces = ((2.0 * rt * x_max * wmax) / (2.0 * PI)).ceil().clamp(1.0, 400.0) as usize;
    for i in 1..=pieces {
        breaks.push(x_max * i as f64 / pieces as f64);
    }
    let r = quadrature::integrate_breaks(f, &breaks, Tolerance::new(1e-13 * gn.max(1e-300), 1e-12))?;
    Ok(dec.synthesize(&(r.value * (2.0 / (PI.sqrt() * rt)))))
}

/// `∫_a^∞ x² e^{-x²} dx`.
fn upper_gaussian_second_moment(a: f64) -> f64 {
    0.5 * a * (-a * a).exp() + 0.25 * PI.sqrt() * statrs::function::erf::erfc(a)
}

/// `Γ(β)⁻¹ ∫₀^∞ ‖e^{-tA/2}g‖²_m t^{β-1} dt` with heat vectors from the
/// transmutation formula; `+∞` when the partial integrals keep growing.
pub fn wave_to_green(dec: &SpectralDecomposition, beta: f64, g: &DVector<f64>) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::BadParameter { name: "beta".into(), value: beta, reason: "must lie in (0, 1)".into() });
    }
    let g2 = dec.inner(g, g);
    if g2 == 0.0 {
        return Ok(0.0);
    }
    let w = |x: f64| -> f64 {
        let t = x.exp();
        if t < 1e-200 {
            // e^{-tA/2} g → g as t → 0.
            return g2 * t.powf(beta);
        }
        match transmutation_heat(dec, 0.5 * t, g, SIGMA_CUTOFF) {
            Ok(h) => dec.inner(&h, &h) * t.powf(beta),
            Err(_) => f64::NAN,
        }
    };
    let tol = Tolerance::new(1e-14 * g2, 1e-9);
    let lmin = dec.smallest_positive().unwrap_or(1.0);
    let x0 = (1e-4 / dec.norm.max(1e-300)).ln();
    let mut total = quadrature::integrate_lower(w, x0, tol)?.value;
    let step = 10f64.ln();
    let mut x = x0;
    let mut growing = 0;
    for _ in 0..60 {
        let inc = quadrature::integrate(w, x, x + step, tol)?.value;
        total += inc;
        let s_start = x.exp();
        x += step;
        if inc > 0.01 * total && s_start > 50.0 / lmin {
            growing += 1;
            if growing >= 3 {
                return Ok(f64::INFINITY);
            }
        } else {
            growing = 0;
        }
        if x.exp() > 50.0 / lmin && w(x) <= 1e-14 * total {
            total += quadrature::integrate(w, x, x + 2.0 * step, tol)?.value;
            return Ok(total / gamma(beta));
        }
    }
    Ok(f64::INFINITY)
}

pub fn write_trace_csv<W: Write>(trace: &WaveTrace, mut w: W) -> io::Result<()> {
    writeln!(w, "t,l2_norm,energy_residual")?;
    for i in 0..trace.times.len() {
        writeln!(w, "{},{},{}", num(trace.times[i]), num(trace.l2_norms[i]), num(trace.energy_residuals[i]))?;
    }
    Ok(())
}
