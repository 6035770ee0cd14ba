//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_GAPS` are reported as FAIL but do not fail the
//! process; every other failure exits nonzero.

use std::time::Instant;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use subcrit::bernstein::{catalog_lookup, default_entries, BernsteinEntry, Params};
use subcrit::check::{h_transform_battery, stollmann_voigt_battery, CheckResult};
use subcrit::criticality::{
    asymptotic_criticality, classify_schrodinger, classify_subordinated, green_sequence, FamilyOptions, Verdict,
};
use subcrit::hardy::{build_scenario, extrapolate_critical_coupling, hardy_constant, origin_indicator, HardyKind, HardyScenario};
use subcrit::lattice::{build_space, schrodinger_matrix, GridSpec, SignedMeasure};
use subcrit::random::{random_instance, random_vector, InstanceKind};
use subcrit::spectral::{decompose, GreenMode, SpectralDecomposition};
use subcrit::wave::{boundedness_verdict, default_times, solve_wave, transmutation_heat, wave_to_green, Boundedness, SIGMA_CUTOFF};

const SEED: u64 = 20_240_917;
/// Grid spacing for the subordination criteria.
const SPACING: f64 = 0.02;
const HARDY_SIZES: [usize; 4] = [9, 13, 17, 21];
/// Criteria whose failure is analysed and expected.
const KNOWN_GAPS: [&str; 1] = ["AC4"];

struct Line {
    id: &'static str,
    passed: bool,
    detail: String,
}

fn line(id: &'static str, passed: bool, detail: String) -> Line {
    Line { id, passed, detail }
}

fn ac1() -> Line {
    let space = build_space(&GridSpec::dirichlet(1, 1, 1.0), None).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (w, lam, want) in [(1.0, 2.0, Verdict::Subcritical), (2.0, 1.0, Verdict::Critical), (3.0, 2.0 / 3.0, Verdict::Supercritical)] {
        let c = classify_schrodinger(&space, &SignedMeasure::negative(vec![w]), 1e-12).unwrap();
        let got = c.lambda_mu.unwrap();
        ok &= c.verdict == want && (got - lam).abs() <= 1e-12;
        parts.push(format!("w={w}: λ(μ)={got:.15} {}", c.verdict));
    }
    line("AC1", ok, parts.join("; "))
}

fn hardy_3d() -> HardyScenario {
    build_scenario(HardyKind::Hardy, 3, 2.0, Some(2.0), SPACING, &HARDY_SIZES).unwrap()
}

fn ac2(s: &HardyScenario) -> (Line, f64) {
    let star = hardy_constant(HardyKind::Hardy, 3, 2.0).unwrap();
    let lc = s.critical_couplings().unwrap();
    let monotone = lc.windows(2).all(|w| w[1] < w[0]);
    let ext = extrapolate_critical_coupling(&s.sizes, &lc).unwrap();
    let ok = (star - 0.125).abs() <= 1e-15 && monotone && (0.10..=0.15).contains(&ext);
    let vals: Vec<String> = lc.iter().map(|v| format!("{v:.6}")).collect();
    (line("AC2", ok, format!("λ*={star}; λ̂_n=[{}] monotone={monotone}; extrapolate={ext:.6} (band [0.10, 0.15])", vals.join(", "))), ext)
}

fn ac3(s: &HardyScenario, lambda_c: f64) -> Line {
    let family = s.family(lambda_c / 2.0).unwrap();
    let opts = FamilyOptions::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for e in [BernsteinEntry::stable(1.0).unwrap(), BernsteinEntry::gamma(1.0, 1.0).unwrap(), BernsteinEntry::inverse_gaussian(1.0, 1.0).unwrap()] {
        let seq = green_sequence(&family, &e, &opts).unwrap();
        let verdict = classify_subordinated(&family, &e, &opts).unwrap().verdict;
        ok &= seq.last_increment < 1e-3 && verdict == Verdict::Subcritical;
        parts.push(format!("{}: increment {:.2e} {verdict}", e.name, seq.last_increment));
    }
    line("AC3", ok, format!("λ = λ_c/2 = {:.6}; {}", lambda_c / 2.0, parts.join("; ")))
}

fn ac4(s: &HardyScenario, lambda_c: f64) -> Line {
    let family = s.family(lambda_c).unwrap();
    let opts = FamilyOptions::default();
    let id = green_sequence(&family, &BernsteinEntry::identity(), &opts).unwrap();
    let mut ok = id.slope > 0.2;
    let mut parts = vec![format!("id: slope {:.4} (need > 0.2)", id.slope)];
    for beta in [0.5, 1.0] {
        let seq = green_sequence(&family, &BernsteinEntry::stable(beta).unwrap(), &opts).unwrap();
        ok &= seq.slope < 0.02;
        parts.push(format!("β={beta}: slope {:.4} increment {:.2e}", seq.slope, seq.last_increment));
    }
    line("AC4", ok, format!("λ = λ_c = {lambda_c:.6}; {}", parts.join("; ")))
}

fn params(kv: &[(&str, f64)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn ac5() -> Line {
    let table: Vec<(BernsteinEntry, Verdict)> = vec![
        (catalog_lookup("gamma", &params(&[("a", 1.0), ("c", 1.0)])).unwrap(), Verdict::Critical),
        (catalog_lookup("relativistic", &params(&[("alpha", 1.0), ("m", 1.0)])).unwrap(), Verdict::Critical),
        (catalog_lookup("bessel", &Params::new()).unwrap(), Verdict::Critical),
        (BernsteinEntry::stable(0.5).unwrap(), Verdict::Subcritical),
        (BernsteinEntry::stable(1.0).unwrap(), Verdict::Subcritical),
        (BernsteinEntry::stable(1.5).unwrap(), Verdict::Subcritical),
        (catalog_lookup("log_power", &params(&[("delta", 1.0), ("beta", 0.5), ("sign", 1.0)])).unwrap(), Verdict::Subcritical),
        (catalog_lookup("log_power", &params(&[("delta", 1.0), ("beta", 0.5), ("sign", -1.0)])).unwrap(), Verdict::Subcritical),
        (catalog_lookup("bessel_squared", &Params::new()).unwrap(), Verdict::Subcritical),
    ];
    let mut wrong = Vec::new();
    for (e, want) in &table {
        let got = asymptotic_criticality(1.0, e).unwrap().verdict;
        if got != *want {
            wrong.push(format!("{e}: {got} (want {want})"));
        }
    }
    line("AC5", wrong.is_empty(), if wrong.is_empty() { format!("{} entries match", table.len()) } else { wrong.join("; ") })
}

fn random_dec(rng: &mut ChaCha8Rng, n: usize, kind: InstanceKind) -> SpectralDecomposition {
    let (s, mu) = random_instance(rng, n, kind);
    decompose(&schrodinger_matrix(&s, &mu).unwrap()).unwrap()
}

fn unit(dec: &SpectralDecomposition, v: Vec<f64>) -> DVector<f64> {
    let v = DVector::from_vec(v);
    let n = dec.norm_m(&v);
    v / n
}

fn ac6() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut okura: f64 = 0.0;
    let with_levy: Vec<BernsteinEntry> = default_entries().into_iter().filter(|e| e.has_levy_density()).collect();
    for kind in [InstanceKind::Transient, InstanceKind::Critical, InstanceKind::Free] {
        let dec = random_dec(&mut rng, 10, kind);
        let f = unit(&dec, random_vector(&mut rng, 10));
        let g = unit(&dec, random_vector(&mut rng, 10));
        for e in &with_levy {
            okura = okura.max(dec.okura_residual(e, &f, &g).unwrap());
        }
    }
    let mut subord: f64 = 0.0;
    let cauchy = BernsteinEntry::stable(1.0).unwrap();
    for kind in [InstanceKind::Transient, InstanceKind::Critical] {
        let dec = random_dec(&mut rng, 20, kind);
        let g = unit(&dec, random_vector(&mut rng, 20));
        for t in [0.1, 1.0, 10.0] {
            subord = subord.max(dec.subordination_residual(&cauchy, t, &g).unwrap());
        }
    }
    let mut laplace: f64 = 0.0;
    let mut potentials = 0;
    for e in default_entries().iter().chain([BernsteinEntry::stable(0.5).unwrap(), BernsteinEntry::stable(1.5).unwrap()].iter()) {
        if !e.has_potential_density() {
            continue;
        }
        potentials += 1;
        for l in [0.1, 1.0, 10.0, 100.0] {
            laplace = laplace.max((e.potential_laplace(l).unwrap() * e.phi(l) - 1.0).abs());
        }
    }
    let ok = okura <= 1e-6 && subord <= 1e-6 && laplace <= 1e-6;
    line(
        "AC6",
        ok,
        format!(
            "okura {okura:.2e} ({} entries × 3 instances); subordination {subord:.2e}; potential Laplace {laplace:.2e} ({potentials} entries, relative)",
            with_levy.len()
        ),
    )
}

fn ac7() -> Line {
    let space = build_space(&GridSpec::dirichlet(2, 10, 1.0), None).unwrap();
    let dec = decompose(&schrodinger_matrix(&space, &SignedMeasure::zero(100)).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let g = DVector::from_vec(random_vector(&mut rng, 100));
    let mut worst: f64 = 0.0;
    for e in [BernsteinEntry::stable(1.0).unwrap(), BernsteinEntry::identity(), BernsteinEntry::gamma(1.0, 1.0).unwrap()] {
        let times: Vec<f64> = (0..1000).map(|i| i as f64 * 0.1).collect();
        let tr = solve_wave(&dec, &e, &g, &times).unwrap();
        worst = worst.max(tr.energy_residuals.iter().cloned().fold(0.0, f64::max) / tr.g_norm_sq);
    }
    line("AC7", worst <= 1e-10, format!("max |E(t) − ‖g‖²|/‖g‖² = {worst:.2e} over 1000 samples, 100 nodes, 3 entries"))
}

fn period(dec: &SpectralDecomposition, e: &BernsteinEntry) -> f64 {
    dec.phi_spectrum(e).unwrap().into_iter().filter(|&p| p > 0.0).fold(f64::INFINITY, f64::min).sqrt().recip() * std::f64::consts::TAU
}

fn ac8() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let e = BernsteinEntry::stable(1.0).unwrap();
    let mut ok = true;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut subcritical = vec![
        decompose(&schrodinger_matrix(&build_space(&GridSpec::dirichlet(1, 30, 1.0), None).unwrap(), &SignedMeasure::zero(30)).unwrap()).unwrap(),
        decompose(&schrodinger_matrix(&build_space(&GridSpec::dirichlet(3, 5, 1.0), None).unwrap(), &SignedMeasure::zero(125)).unwrap()).unwrap(),
    ];
    for _ in 0..3 {
        subcritical.push(random_dec(&mut rng, 25, InstanceKind::Transient));
    }
    for dec in &subcritical {
        let g = DVector::from_vec(random_vector(&mut rng, dec.dim()));
        let tr = solve_wave(dec, &e, &g, &default_times(period(dec, &e), 1000, 4.0)).unwrap();
        match boundedness_verdict(&tr).unwrap() {
            Boundedness::Bounded { sup } => {
                worst_gap = worst_gap.max(sup - tr.range_seminorm);
                ok &= sup <= tr.range_seminorm + 1e-10;
            }
            Boundedness::Growing { .. } => ok = false,
        }
    }
    let mut rates = Vec::new();
    for kind in [InstanceKind::Critical, InstanceKind::Free] {
        let dec = random_dec(&mut rng, 25, kind);
        let g = DVector::from_element(25, 1.0);
        let tr = solve_wave(&dec, &e, &g, &default_times(period(&dec, &e), 1000, 4.0)).unwrap();
        match boundedness_verdict(&tr).unwrap() {
            Boundedness::Growing { rate } => {
                ok &= (rate - 1.0).abs() <= 0.05;
                rates.push(format!("{rate:.4}"));
            }
            Boundedness::Bounded { .. } => {
                ok = false;
                rates.push("bounded".into());
            }
        }
    }
    line(
        "AC8",
        ok,
        format!("{} subcritical bounded, max sup − ⟦g⟧ = {worst_gap:.2e}; critical rates [{}]", subcritical.len(), rates.join(", ")),
    )
}

fn ac9() -> Line {
    let space = build_space(&GridSpec::dirichlet(3, 5, 1.0), None).unwrap();
    let dec = decompose(&schrodinger_matrix(&space, &SignedMeasure::zero(125)).unwrap()).unwrap();
    let g = origin_indicator(&space).unwrap();
    let via_wave = wave_to_green(&dec, 0.5, &g).unwrap();
    let spectral = dec.green_form(&BernsteinEntry::stable(1.0).unwrap(), &g, GreenMode::Spectral).unwrap();
    let rel = (via_wave - spectral).abs() / spectral;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut heat: f64 = 0.0;
    let path = build_space(&GridSpec::dirichlet(1, 30, 1.0), None).unwrap();
    let mut decs = vec![decompose(&schrodinger_matrix(&path, &SignedMeasure::zero(30)).unwrap()).unwrap()];
    for kind in [InstanceKind::Transient, InstanceKind::Critical, InstanceKind::Free] {
        decs.push(random_dec(&mut rng, 30, kind));
    }
    for d in &decs {
        let g = DVector::from_vec(random_vector(&mut rng, 30));
        for t in [0.01, 0.1, 1.0, 10.0] {
            let h = transmutation_heat(d, t, &g, SIGMA_CUTOFF).unwrap();
            let exact = d.apply_function(&|l| (-t * l).exp(), &g).unwrap();
            heat = heat.max(d.norm_m(&(h - exact)) / d.norm_m(&g));
        }
    }
    line(
        "AC9",
        rel <= 1e-4 && heat <= 1e-6,
        format!("wave→Green {via_wave:.10} vs spectral {spectral:.10} (rel {rel:.2e}); heat identity {heat:.2e} on {} 30-node instances", decs.len()),
    )
}

fn summarize(id: &'static str, results: &[CheckResult]) -> Line {
    let ok = results.iter().all(|r| r.passed);
    let parts: Vec<String> = results.iter().map(|r| format!("{} {:.3e} over {}", r.name, r.worst, r.cases)).collect();
    line(id, ok, parts.join("; "))
}

fn ac10() -> Line {
    let entries = default_entries();
    summarize("AC10", &h_transform_battery(SEED, 100, &entries).unwrap())
}

fn ac11() -> Line {
    summarize("AC11", &stollmann_voigt_battery(SEED, 200).unwrap())
}

fn timed(f: impl FnOnce() -> Line) -> (Line, f64) {
    let t = Instant::now();
    let l = f();
    (l, t.elapsed().as_secs_f64())
}

fn main() {
    let scenario = hardy_3d();
    let mut lambda_c = f64::NAN;
    let mut lines = vec![timed(ac1)];
    lines.push(timed(|| {
        let (l, ext) = ac2(&scenario);
        lambda_c = ext;
        l
    }));
    lines.push(timed(|| ac3(&scenario, lambda_c)));
    lines.push(timed(|| ac4(&scenario, lambda_c)));
    for f in [ac5, ac6, ac7, ac8, ac9, ac10, ac11] {
        lines.push(timed(f));
    }
    let mut unexpected = 0;
    for (l, secs) in &lines {
        let status = if l.passed { "PASS" } else { "FAIL" };
        let gap = if !l.passed && KNOWN_GAPS.contains(&l.id) { " [known gap]" } else { "" };
        println!("{} {status}{gap} ({secs:.2}s) {}", l.id, l.detail);
        if !l.passed && gap.is_empty() {
            unexpected += 1;
        }
    }
    let passed = lines.iter().filter(|(l, _)| l.passed).count();
    println!("{passed}/{} criteria pass", lines.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
