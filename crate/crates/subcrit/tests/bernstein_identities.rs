use proptest::prelude::*;
use subcrit::bernstein::{catalog_lookup, default_entries, BernsteinEntry, Params, PhiMode};

const GRID: [f64; 4] = [0.1, 1.0, 10.0, 100.0];

fn params(kv: &[(&str, f64)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn entries_with_potential() -> Vec<BernsteinEntry> {
    vec![
        BernsteinEntry::stable(0.5).unwrap(),
        BernsteinEntry::stable(1.0).unwrap(),
        BernsteinEntry::stable(1.5).unwrap(),
        BernsteinEntry::gamma(1.0, 1.0).unwrap(),
        BernsteinEntry::gamma(2.0, 0.5).unwrap(),
        catalog_lookup("relativistic", &params(&[("alpha", 1.0), ("m", 1.0)])).unwrap(),
        catalog_lookup("relativistic", &params(&[("alpha", 0.5), ("m", 2.0)])).unwrap(),
        catalog_lookup("relativistic", &params(&[("alpha", 1.5), ("m", 0.3)])).unwrap(),
    ]
}

#[test]
fn levy_khintchine_matches_closed_form() {
    let mut entries = default_entries();
    entries.push(BernsteinEntry::stable(0.3).unwrap());
    entries.push(BernsteinEntry::stable(1.7).unwrap());
    entries.push(catalog_lookup("compound_poisson", &params(&[("a", 2.0), ("c", 0.5)])).unwrap());
    entries.push(catalog_lookup("inverse_gaussian", &params(&[("a", 0.5), ("c", 3.0)])).unwrap());
    entries.push(catalog_lookup("relativistic", &params(&[("alpha", 0.5), ("m", 2.0)])).unwrap());
    for e in entries.iter().filter(|e| e.has_levy_density()) {
        for &l in &GRID {
            let closed = e.phi_eval(l, PhiMode::Closed).unwrap();
            let quad = e.phi_eval(l, PhiMode::LevyQuadrature).unwrap();
            assert!((closed - quad).abs() <= 1e-6, "{e}: λ={l} closed {closed} quadrature {quad}");
        }
    }
}

#[test]
fn potential_laplace_identity() {
    for e in entries_with_potential() {
        for &l in &GRID {
            let lhs = e.potential_laplace(l).unwrap();
            let rhs = 1.0 / e.phi(l);
            assert!((lhs - rhs).abs() <= 1e-6, "{e}: λ={l} ∫e^(-λs)u = {lhs}, 1/Φ = {rhs}");
        }
    }
}

#[test]
fn gamma_potential_density_is_comparable_to_one() {
    let e = BernsteinEntry::gamma(1.0, 1.0).unwrap();
    for k in 0..=20 {
        let s = 10f64.powf(2.0 + 2.0 * k as f64 / 20.0);
        let u = e.potential_density(s).unwrap();
        assert!((0.5..=2.0).contains(&u), "u({s}) = {u}");
    }
    // Renewal limit c/a.
    let u = e.potential_density(1e4).unwrap();
    assert!((u - 1.0).abs() < 1e-3, "{u}");
}

#[test]
fn relativistic_potential_density_is_comparable_to_one() {
    let e = catalog_lookup("relativistic", &params(&[("alpha", 1.0), ("m", 1.0)])).unwrap();
    let limit = 2.0;
    for s in [1e2, 1e3, 1e4] {
        let u = e.potential_density(s).unwrap();
        assert!((u / limit - 1.0).abs() < 0.2, "u({s}) = {u}");
    }
}

#[test]
fn stable_potential_tail_exponent_matches_density() {
    for beta in [0.5, 1.0, 1.5] {
        let e = BernsteinEntry::stable(beta).unwrap();
        let u1 = e.potential_density(1e2).unwrap();
        let u2 = e.potential_density(1e4).unwrap();
        let slope = (u2 / u1).ln() / 100f64.ln();
        let rho = e.potential_tail_exponent().unwrap();
        assert!((slope - (rho - 1.0)).abs() < 1e-12);
    }
}

#[test]
fn first_moment_flag_matches_truncated_integrals() {
    for e in default_entries().iter().filter(|e| e.has_levy_density()) {
        let m: Vec<f64> = [10.0, 1e2, 1e3].iter().map(|&t| e.truncated_first_moment(t).unwrap()).collect();
        let growth = (m[2] - m[1]) / (m[1] - m[0]).max(1e-300);
        let converging = m[2] - m[1] <= 1e-6 * m[2].max(1e-300) || growth < 0.5;
        assert_eq!(converging, e.first_moment_finite(), "{e}: {m:?}");
    }
}

#[test]
fn stable_transition_identities() {
    let e = BernsteinEntry::stable(1.0).unwrap();
    for t in [0.1, 0.5, 1.0, 3.0] {
        for &l in &GRID {
            let v = e.transition_laplace(t, l).unwrap();
            assert!((v - (-t * e.phi(l)).exp()).abs() <= 1e-6, "t={t} λ={l}");
        }
        assert!((e.transition_laplace(t, 0.0).unwrap() - 1.0).abs() <= 1e-6);
    }
}

#[test]
fn ib_flag_holds_for_catalog() {
    for e in default_entries() {
        assert!(e.ib_flag(), "{e}");
    }
}

fn any_entry() -> impl Strategy<Value = BernsteinEntry> {
    prop_oneof![
        (0.01f64..1.99).prop_map(|b| BernsteinEntry::stable(b).unwrap()),
        (0.1f64..5.0, 0.1f64..5.0).prop_map(|(a, c)| BernsteinEntry::gamma(a, c).unwrap()),
        (0.1f64..5.0, 0.1f64..5.0).prop_map(|(a, c)| BernsteinEntry::inverse_gaussian(a, c).unwrap()),
        (0.1f64..5.0, 0.1f64..5.0)
            .prop_map(|(a, c)| catalog_lookup("compound_poisson", &params(&[("a", a), ("c", c)])).unwrap()),
        (0.05f64..1.95, 0.1f64..3.0)
            .prop_map(|(al, m)| catalog_lookup("relativistic", &params(&[("alpha", al), ("m", m)])).unwrap()),
        (0.05f64..1.9, 0.0f64..1.0).prop_map(|(d, f)| {
            let b = (2.0 - d) * (0.05 + 0.9 * f);
            catalog_lookup("log_power", &params(&[("delta", d), ("beta", b), ("sign", 1.0)])).unwrap()
        }),
        (0.05f64..1.95, 0.0f64..1.0).prop_map(|(d, f)| {
            let b = d * (0.05 + 0.9 * f);
            catalog_lookup("log_power", &params(&[("delta", d), ("beta", b), ("sign", -1.0)])).unwrap()
        }),
        Just(catalog_lookup("bessel", &Params::new()).unwrap()),
        Just(catalog_lookup("bessel_squared", &Params::new()).unwrap()),
        (0.1f64..5.0).prop_map(|b| BernsteinEntry::linear(b).unwrap()),
    ]
}

proptest! {
    #[test]
    fn phi_is_monotone_and_concave(e in any_entry(), l1 in 0.0f64..50.0, d1 in 0.01f64..50.0, d2 in 0.01f64..50.0) {
        let l2 = l1 + d1;
        let l3 = l2 + d2;
        let (p1, p2, p3) = (e.phi(l1), e.phi(l2), e.phi(l3));
        prop_assert!(p1 >= 0.0);
        prop_assert!(p2 >= p1 - 1e-14 * p2.abs());
        prop_assert!(p3 >= p2 - 1e-14 * p3.abs());
        let chord = p1 + (p3 - p1) * (l2 - l1) / (l3 - l1);
        prop_assert!(p2 >= chord - 1e-12 * (1.0 + p3.abs()), "{} {} {}", p1, p2, p3);
    }
}
