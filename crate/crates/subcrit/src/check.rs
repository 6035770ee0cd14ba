//! Randomized invariant battery. Every suite derives its generator from a
//! single 64-bit seed so reruns are reproducible.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bernstein::{default_entries, BernsteinEntry};
use crate::criticality::{classify_schrodinger, h_transform, superharmonic_h, HChoice, Verdict};
use crate::error::Result;
use crate::lattice::{build_space, kato_norm, schrodinger_matrix, stollmann_voigt_check, GridSpec, SignedMeasure};
use crate::random::{random_instance, random_one_signed, random_space, random_vector, InstanceKind};
use crate::spectral::{decompose, GreenMode, SpectralDecomposition};
use crate::wave::{boundedness_verdict, default_times, solve_wave, transmutation_heat, wave_to_green, Boundedness, SIGMA_CUTOFF};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub threshold: f64,
    pub cases: usize,
    pub detail: String,
}

impl CheckResult {
    /// `worst ≤ threshold` passes.
    fn at_most(name: &str, worst: f64, threshold: f64, cases: usize, detail: String) -> Self {
        CheckResult { name: name.into(), passed: worst <= threshold, worst, threshold, cases, detail }
    }

    /// `worst ≥ threshold` passes.
    fn at_least(name: &str, worst: f64, threshold: f64, cases: usize, detail: String) -> Self {
        CheckResult { name: name.into(), passed: worst >= threshold, worst, threshold, cases, detail }
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn kind_of(i: usize) -> InstanceKind {
    [InstanceKind::Transient, InstanceKind::Critical, InstanceKind::Free][i % 3]
}

fn random_dec(rng: &mut ChaCha8Rng, n: usize, kind: InstanceKind) -> Result<SpectralDecomposition> {
    let (s, mu) = random_instance(rng, n, kind);
    decompose(&schrodinger_matrix(&s, &mu)?)
}

/// Markov invariants of h-transforms over random PSD instances.
pub fn h_transform_battery(seed: u64, instances: usize, entries: &[BernsteinEntry]) -> Result<Vec<CheckResult>> {
    let mut rng = rng_for(seed, 10);
    let mut offdiag: f64 = f64::INFINITY;
    let mut rowmax: f64 = f64::NEG_INFINITY;
    let mut mismatches = 0;
    let mut cases = 0;
    for i in 0..instances {
        let n = rng.random_range(4..16);
        let dec = random_dec(&mut rng, n, kind_of(i))?;
        let has_kernel = dec.kernel_dim() > 0;
        let ones = DVector::from_element(n, 1.0);
        for e in entries {
            let h = superharmonic_h(&dec, e, &ones, HChoice::KernelIfCritical)?;
            let r = h_transform(&dec, e, &h)?;
            offdiag = offdiag.min(r.offdiag_min);
            rowmax = rowmax.max(r.row_sum_max);
            if r.conservative != has_kernel {
                mismatches += 1;
            }
            cases += 1;
        }
    }
    Ok(vec![
        CheckResult::at_least("h_transform_offdiag_min", offdiag, -1e-12, cases, String::new()),
        CheckResult::at_most("h_transform_row_sum_max", rowmax, 1e-12, cases, String::new()),
        CheckResult::at_most("h_transform_conservative_iff_kernel", mismatches as f64, 0.0, cases, format!("{mismatches} mismatches")),
    ])
}

/// Stollmann–Voigt slack and monotone Kato profiles on random graphs.
pub fn stollmann_voigt_battery(seed: u64, instances: usize) -> Result<Vec<CheckResult>> {
    let mut rng = rng_for(seed, 11);
    let mut slack: f64 = f64::INFINITY;
    let mut not_decreasing = 0;
    for i in 0..instances {
        let n = rng.random_range(3..20);
        let mut space = random_space(&mut rng, n);
        if i % 2 == 0 {
            space.killing[rng.random_range(0..n)] = rng.random_range(0.1..1.0);
        }
        let mu = SignedMeasure::positive(random_one_signed(&mut rng, n));
        let f = random_vector(&mut rng, n);
        let alpha = rng.random_range(0.1..10.0);
        let r = stollmann_voigt_check(&space, &mu, &f, alpha)?;
        slack = slack.min(r.slack);
        if !kato_norm(&space, &mu, alpha)?.strictly_decreasing {
            not_decreasing += 1;
        }
    }
    Ok(vec![
        CheckResult::at_least("stollmann_voigt_slack_min", slack, -1e-12, instances, String::new()),
        CheckResult::at_most("kato_not_strictly_decreasing", not_decreasing as f64, 0.0, instances, format!("{not_decreasing} failures")),
    ])
}

/// Decomposition accuracy and semigroup invariants.
pub fn spectral_battery(seed: u64, instances: usize) -> Result<Vec<CheckResult>> {
    let mut rng = rng_for(seed, 12);
    let entries = default_entries();
    let (mut recon, mut ortho, mut law, mut contraction, mut positivity, mut offdiag) = (0f64, 0f64, 0f64, 0f64, 0f64, 0f64);
    let mut monotone_fail = 0;
    let mut not_improving = 0;
    for i in 0..instances {
        let n = rng.random_range(3..14);
        let (s, mu) = random_instance(&mut rng, n, kind_of(i));
        let op = schrodinger_matrix(&s, &mu)?;
        let dec = decompose(&op)?;
        let a = op.to_dense_operator();
        for k in 0..n {
            let q = dec.vectors.column(k).into_owned();
            let r = &a * &q - &q * dec.eigenvalues[k];
            recon = recon.max(dec.norm_m(&r) / dec.eigenvalues[k].abs().max(1.0));
            for j in 0..n {
                let qj = dec.vectors.column(j).into_owned();
                let target = if j == k { 1.0 } else { 0.0 };
                ortho = ortho.max((dec.inner(&q, &qj) - target).abs());
            }
        }
        let g = DVector::from_vec(random_vector(&mut rng, n));
        let (t, u) = (rng.random_range(0.05..2.0), rng.random_range(0.05..2.0));
        for e in &entries {
            let lhs = dec.semigroup(e, t, &dec.semigroup(e, u, &g)?)?;
            let rhs = dec.semigroup(e, t + u, &g)?;
            law = law.max((lhs - rhs).norm() / g.norm().max(1e-300));
            contraction = contraction.max(dec.norm_m(&dec.semigroup(e, t, &g)?) - dec.norm_m(&g));
            let p = dec.semigroup_matrix(e, 1.0)?;
            positivity = positivity.max(-p.min());
            if p.iter().any(|&v| !(v > 0.0)) {
                not_improving += 1;
            }
            let phi = dec.phi_matrix(e)?;
            for r in 0..n {
                for c in 0..n {
                    if r != c {
                        offdiag = offdiag.max(phi[(r, c)]);
                    }
                }
            }
        }
        // Φ₁ ≤ Φ₂ pointwise gives G(Φ₁) ≥ G(Φ₂).
        if dec.kernel_dim() == 0 {
            let pairs = [
                (BernsteinEntry::linear(1.0)?, BernsteinEntry::linear(2.0)?),
                (BernsteinEntry::gamma(1.0, 1.0)?, BernsteinEntry::gamma(2.0, 1.0)?),
                (BernsteinEntry::inverse_gaussian(1.0, 1.0)?, BernsteinEntry::inverse_gaussian(3.0, 1.0)?),
            ];
            let gp = g.abs();
            for (lo, hi) in pairs {
                let g1 = dec.green_form(&lo, &gp, GreenMode::Spectral)?;
                let g2 = dec.green_form(&hi, &gp, GreenMode::Spectral)?;
                if g1 < g2 * (1.0 - 1e-12) {
                    monotone_fail += 1;
                }
            }
        }
    }
    Ok(vec![
        CheckResult::at_most("reconstruction_residual", recon, 1e-10, instances, String::new()),
        CheckResult::at_most("m_orthonormality", ortho, 1e-12, instances, String::new()),
        CheckResult::at_most("semigroup_law", law, 1e-10, instances * entries.len(), String::new()),
        CheckResult::at_most("contraction_excess", contraction, 1e-12, instances * entries.len(), String::new()),
        CheckResult::at_most("semigroup_negativity", positivity, 1e-12, instances * entries.len(), String::new()),
        CheckResult::at_most("semigroup_not_positivity_improving", not_improving as f64, 0.0, instances * entries.len(), String::new()),
        CheckResult::at_most("generator_offdiag_positive_part", offdiag, 1e-12, instances * entries.len(), String::new()),
        CheckResult::at_most("green_monotonicity_failures", monotone_fail as f64, 0.0, instances, String::new()),
    ])
}

/// Integral identities: Lévy–Khintchine, subordination and potential.
pub fn quadrature_battery(seed: u64, instances: usize) -> Result<Vec<CheckResult>> {
    let mut rng = rng_for(seed, 13);
    let gamma = BernsteinEntry::gamma(1.0, 1.0)?;
    let cauchy = BernsteinEntry::stable(1.0)?;
    let (mut okura, mut subord): (f64, f64) = (0.0, 0.0);
    for i in 0..instances {
        let dec = random_dec(&mut rng, 10, kind_of(i))?;
        let f = DVector::from_vec(random_vector(&mut rng, 10));
        let g = DVector::from_vec(random_vector(&mut rng, 10));
        for e in [&gamma, &cauchy] {
            let lhs = dec.inner(&dec.apply_phi(e, &f)?, &g);
            okura = okura.max(dec.okura_residual(e, &f, &g)? / (1.0 + lhs.abs()));
        }
        let dec = random_dec(&mut rng, 20, kind_of(i))?;
        let g = DVector::from_vec(random_vector(&mut rng, 20));
        subord = subord.max(dec.subordination_residual(&cauchy, 0.5, &g)? / dec.norm_m(&g));
    }
    let mut laplace: f64 = 0.0;
    let mut laplace_cases = 0;
    let with_density = [BernsteinEntry::stable(0.5)?, BernsteinEntry::stable(1.5)?, gamma.clone()];
    for e in with_density.iter().filter(|e| e.has_potential_density()) {
        for l in [0.1, 1.0, 10.0, 100.0] {
            laplace = laplace.max((e.potential_laplace(l)? - 1.0 / e.phi(l)).abs());
            laplace_cases += 1;
        }
    }
    Ok(vec![
        CheckResult::at_most("okura_residual", okura, 1e-6, 2 * instances, String::new()),
        CheckResult::at_most("subordination_residual", subord, 1e-6, instances, String::new()),
        CheckResult::at_most("potential_laplace_residual", laplace, 1e-6, laplace_cases, String::new()),
    ])
}

/// Energy law, wave bound, transmutation and the wave-to-Green chain.
pub fn wave_battery(seed: u64, instances: usize) -> Result<Vec<CheckResult>> {
    let mut rng = rng_for(seed, 14);
    let (mut energy, mut bound_excess, mut transm): (f64, f64, f64) = (0.0, f64::NEG_INFINITY, 0.0);
    let mut finiteness_mismatch = 0;
    for i in 0..instances {
        let n = rng.random_range(3..12);
        let dec = random_dec(&mut rng, n, kind_of(i))?;
        let g = DVector::from_vec(random_vector(&mut rng, n));
        let e = BernsteinEntry::stable(1.0)?;
        let period = dec
            .phi_spectrum(&e)?
            .into_iter()
            .filter(|&p| p > 0.0)
            .reduce(f64::min)
            .map_or(1.0, |p| 2.0 * std::f64::consts::PI / p.sqrt());
        let tr = solve_wave(&dec, &e, &g, &default_times(period, 400, 3.5))?;
        let g2 = tr.g_norm_sq;
        energy = energy.max(tr.energy_residuals.iter().cloned().fold(0.0, f64::max) / g2);
        if let Boundedness::Bounded { sup } = boundedness_verdict(&tr)? {
            if tr.range_seminorm.is_finite() {
                bound_excess = bound_excess.max(sup - tr.range_seminorm);
            }
        }
        let h = transmutation_heat(&dec, 0.5, &g, SIGMA_CUTOFF)?;
        let exact = dec.apply_function(&|l| (-0.5 * l).exp(), &g)?;
        transm = transm.max(dec.norm_m(&(h - exact)) / dec.norm_m(&g));
        if i < 6 {
            let wg = wave_to_green(&dec, 0.5, &g)?;
            let sg = dec.green_form(&BernsteinEntry::stable(1.0)?, &g, GreenMode::Spectral)?;
            if wg.is_finite() != sg.is_finite() {
                finiteness_mismatch += 1;
            }
        }
    }
    let path = build_space(&GridSpec::dirichlet(1, 30, 1.0), None)?;
    let dec = decompose(&schrodinger_matrix(&path, &SignedMeasure::zero(30))?)?;
    let g = DVector::from_vec(random_vector(&mut rng, 30));
    for t in [0.1, 1.0, 10.0] {
        let h = transmutation_heat(&dec, t, &g, SIGMA_CUTOFF)?;
        let exact = dec.apply_function(&|l| (-t * l).exp(), &g)?;
        transm = transm.max(dec.norm_m(&(h - exact)) / dec.norm_m(&g));
    }
    Ok(vec![
        CheckResult::at_most("energy_residual", energy, 1e-10, instances, "relative to ‖g‖²".into()),
        CheckResult::at_most("wave_sup_minus_seminorm", bound_excess.max(-1.0), 1e-10, instances, String::new()),
        CheckResult::at_most("transmutation_residual", transm, 1e-6, instances + 3, String::new()),
        CheckResult::at_most("wave_green_finiteness_mismatch", finiteness_mismatch as f64, 0.0, instances.min(6), String::new()),
    ])
}

/// `λ(cμ⁻) = λ(μ⁻)/c` trichotomy on critical random instances and the
/// single-node micro instance.
pub fn trichotomy_battery(seed: u64, instances: usize) -> Result<Vec<CheckResult>> {
    let mut rng = rng_for(seed, 15);
    let mut wrong = 0;
    let mut inconsistent = 0;
    let mut cases = 0;
    for _ in 0..instances {
        let n = rng.random_range(3..12);
        let (s, mu) = random_instance(&mut rng, n, InstanceKind::Critical);
        if mu.minus.iter().all(|&v| v == 0.0) {
            continue;
        }
        for (c, want) in [(0.5, Verdict::Subcritical), (1.0, Verdict::Critical), (2.0, Verdict::Supercritical)] {
            let scaled = SignedMeasure { plus: mu.plus.clone(), minus: mu.minus.iter().map(|v| v * c).collect() };
            let cl = classify_schrodinger(&s, &scaled, 1e-8)?;
            cases += 1;
            if cl.verdict != want {
                wrong += 1;
            }
            if cl.evidence.get("gamma_sign_consistent").map(|e| e.to_string()) != Some("true".into()) {
                inconsistent += 1;
            }
        }
    }
    let one = build_space(&GridSpec::dirichlet(1, 1, 1.0), None)?;
    for (w, want) in [(1.0, Verdict::Subcritical), (2.0, Verdict::Critical), (3.0, Verdict::Supercritical)] {
        cases += 1;
        if classify_schrodinger(&one, &SignedMeasure::negative(vec![w]), 1e-9)?.verdict != want {
            wrong += 1;
        }
    }
    Ok(vec![
        CheckResult::at_most("trichotomy_wrong_verdicts", wrong as f64, 0.0, cases, String::new()),
        CheckResult::at_most("gamma_sign_inconsistent", inconsistent as f64, 0.0, cases, String::new()),
    ])
}

/// The full battery. `scale` multiplies the instance counts.
pub fn run_battery(seed: u64, scale: f64) -> Result<Vec<CheckResult>> {
    let k = |n: usize| ((n as f64 * scale).ceil() as usize).max(1);
    let entries = default_entries();
    let mut out = Vec::new();
    out.extend(trichotomy_battery(seed, k(30))?);
    out.extend(spectral_battery(seed, k(30))?);
    out.extend(quadrature_battery(seed, k(5))?);
    out.extend(wave_battery(seed, k(20))?);
    out.extend(h_transform_battery(seed, k(100), &entries)?);
    out.extend(stollmann_voigt_battery(seed, k(200))?);
    Ok(out)
}
