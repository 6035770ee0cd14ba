//! Random weighted graphs and Schrödinger instances for property suites.

use rand::Rng;

use crate::lattice::{Boundary, DiscreteSpace, GridSpec, SignedMeasure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    /// Killing at a few nodes plus a small nonnegative potential.
    Transient,
    /// Zero-energy positive ground state built into the potential.
    Critical,
    /// No killing and no potential: constants span the kernel.
    Free,
}

/// Connected graph on `n` nodes: a random-weight path plus extra chords.
pub fn random_space<R: Rng>(rng: &mut R, n: usize) -> DiscreteSpace {
    let mut edges = Vec::new();
    for i in 0..n.saturating_sub(1) {
        edges.push((i, i + 1, rng.random_range(0.5..2.0)));
    }
    let extra = n / 2;
    for _ in 0..extra {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a.abs_diff(b) > 1 {
            edges.push((a.min(b), a.max(b), rng.random_range(0.1..1.0)));
        }
    }
    DiscreteSpace {
        coords: (0..n).map(|i| vec![i as f64]).collect(),
        component: vec![0; n],
        edges,
        killing: vec![0.0; n],
        measure: (0..n).map(|_| rng.random_range(0.5..2.0)).collect(),
        grids: vec![GridSpec::new(1, n, 1.0, Boundary::Free)],
        junction: None,
    }
}

/// A space and a signed measure of the requested kind.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, kind: InstanceKind) -> (DiscreteSpace, SignedMeasure) {
    let mut space = random_space(rng, n);
    match kind {
        InstanceKind::Free => (space, SignedMeasure::zero(n)),
        InstanceKind::Transient => {
            for k in space.killing.iter_mut() {
                if rng.random_bool(0.3) {
                    *k = rng.random_range(0.1..1.0);
                }
            }
            space.killing[0] += 0.2;
            let plus: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.3) { rng.random_range(0.0..0.5) } else { 0.0 }).collect();
            (space, SignedMeasure::positive(plus))
        }
        InstanceKind::Critical => {
            for k in space.killing.iter_mut() {
                if rng.random_bool(0.3) {
                    *k = rng.random_range(0.1..1.0);
                }
            }
            // Choose φ > 0 and the potential v with (S + K + diag v) φ = 0.
            let phi: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
            let k = space.form_matrix();
            let mut sphi = vec![0.0; n];
            k.matvec_into(&phi, &mut sphi);
            let mut mu = SignedMeasure::zero(n);
            for i in 0..n {
                let v = -sphi[i] / phi[i];
                if v >= 0.0 {
                    mu.plus[i] = v;
                } else {
                    mu.minus[i] = -v;
                }
            }
            (space, mu)
        }
    }
}

/// Nonnegative weights with about half the nodes charged.
pub fn random_one_signed<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.5) { rng.random_range(0.01..2.0) } else { 0.0 }).collect();
    let i = rng.random_range(0..n);
    w[i] += 0.5;
    w
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}
