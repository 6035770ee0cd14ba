//! Adaptive Gauss–Kronrod quadrature (7/15 point pair) for scalar and
//! vector-valued integrands, with maps for half-infinite ranges.

use nalgebra::DVector;
use std::collections::BinaryHeap;
use std::cmp::Ordering;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Absolute and relative error targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-10, rel: 1e-8, max_intervals: 4000 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel, ..Default::default() }
    }

    pub fn tight() -> Self {
        Tolerance { abs: 1e-14, rel: 1e-12, max_intervals: 6000 }
    }
}

/// Values that can be accumulated by the integrator.
pub trait QuadValue: Clone + Send {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, other: &Self, w: f64);
    fn norm(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += w * other;
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for DVector<f64> {
    fn zero_like(&self) -> Self {
        DVector::zeros(self.len())
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        self.axpy(w, other, 1.0);
    }
    fn norm(&self) -> f64 {
        DVector::norm(self)
    }
    fn is_finite_value(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone)]
pub struct QuadResult<V> {
    pub value: V,
    pub error: f64,
    pub intervals: usize,
}

struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Segment<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V> Eq for Segment<V> {}
impl<V> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<V: QuadValue, F: Fn(f64) -> V>(f: &F, a: f64, b: f64) -> Result<(V, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut xs = [c; 15];
    let mut ws = [WGK[7]; 15];
    for j in 0..7 {
        xs[2 * j] = c - h * XGK[j];
        xs[2 * j + 1] = c + h * XGK[j];
        ws[2 * j] = WGK[j];
        ws[2 * j + 1] = WGK[j];
    }
    let mut vals = Vec::with_capacity(15);
    for &x in &xs {
        let v = f(x);
        if !v.is_finite_value() {
            return Err(Error::NonFinite { what: "integrand", at: x });
        }
        vals.push(v);
    }
    let mut k = vals[14].zero_like();
    let mut g = vals[14].zero_like();
    for i in 0..15 {
        k.add_scaled(&vals[i], ws[i]);
    }
    g.add_scaled(&vals[14], WG[3]);
    for j in [1usize, 3, 5] {
        g.add_scaled(&vals[2 * j], WG[j / 2]);
        g.add_scaled(&vals[2 * j + 1], WG[j / 2]);
    }
    // Mean absolute deviation from the mean value, as in QUADPACK.
    let mut mean = k.zero_like();
    mean.add_scaled(&k, 0.5);
    let mut resasc = 0.0;
    for i in 0..15 {
        let mut d = vals[i].clone();
        d.add_scaled(&mean, -1.0);
        resasc += ws[i] * d.norm();
    }
    resasc *= h.abs();
    let mut diff = k.clone();
    diff.add_scaled(&g, -1.0);
    let mut value = k.zero_like();
    value.add_scaled(&k, h);
    let mut err = diff.norm() * h.abs();
    if resasc > 0.0 && err > 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * value.norm();
    Ok((value, err.max(floor)))
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<V: QuadValue, F: Fn(f64) -> V>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult<V>> {
    integrate_breaks(f, &[a, b], tol)
}

/// Integrate over `[p_0, p_last]` with the given interior break points.
pub fn integrate_breaks<V: QuadValue, F: Fn(f64) -> V>(f: F, points: &[f64], tol: Tolerance) -> Result<QuadResult<V>> {
    assert!(points.len() >= 2, "need at least one interval");
    let mut heap = BinaryHeap::new();
    let mut total: Option<V> = None;
    let mut err_total = 0.0;
    for w in points.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (v, e) = kronrod(&f, w[0], w[1])?;
        match total.as_mut() {
            Some(t) => t.add_scaled(&v, 1.0),
            None => total = Some(v.clone()),
        }
        err_total += e;
        heap.push(Segment { a: w[0], b: w[1], value: v, error: e });
    }
    let mut total = match total {
        Some(t) => t,
        None => {
            let v = f(points[0]);
            return Ok(QuadResult { value: v.zero_like(), error: 0.0, intervals: 0 });
        }
    };
    loop {
        let target = tol.abs.max(tol.rel * total.norm());
        if err_total <= target {
            break;
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::QuadratureNotConverged { value: total.norm(), error: err_total });
        }
        let seg = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Interval cannot be split further in floating point; accept it.
            err_total -= seg.error;
            heap.push(Segment { error: 0.0, ..seg });
            continue;
        }
        let (v1, e1) = kronrod(&f, seg.a, mid)?;
        let (v2, e2) = kronrod(&f, mid, seg.b)?;
        total.add_scaled(&seg.value, -1.0);
        total.add_scaled(&v1, 1.0);
        total.add_scaled(&v2, 1.0);
        err_total += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
    }
    // Re-sum to shed accumulated cancellation in the running total.
    let mut value = total.zero_like();
    let mut err = 0.0;
    let n = heap.len();
    for s in heap.into_iter() {
        value.add_scaled(&s.value, 1.0);
        err += s.error;
    }
    Ok(QuadResult { value, error: err, intervals: n })
}

/// Integrate `f` over `[a, ∞)` through `x = a + (1 - t)/t`.
pub fn integrate_upper<V: QuadValue, F: Fn(f64) -> V>(f: F, a: f64, tol: Tolerance) -> Result<QuadResult<V>> {
    let g = |t: f64| {
        let v = f(a + (1.0 - t) / t);
        let mut out = v.zero_like();
        out.add_scaled(&v, 1.0 / (t * t));
        out
    };
    integrate(g, 0.0, 1.0, tol)
}

/// Integrate `f` over `(-∞, b]` through `x = b - (1 - t)/t`.
pub fn integrate_lower<V: QuadValue, F: Fn(f64) -> V>(f: F, b: f64, tol: Tolerance) -> Result<QuadResult<V>> {
    integrate_upper(|y| f(2.0 * b - y), b, tol)
}

/// Integrate over the whole real line, split at `split`.
pub fn integrate_line<V: QuadValue, F: Fn(f64) -> V + Sync>(f: F, split: f64, tol: Tolerance) -> Result<QuadResult<V>> {
    let left = integrate_lower(&f, split, tol)?;
    let right = integrate_upper(&f, split, tol)?;
    let mut value = left.value;
    value.add_scaled(&right.value, 1.0);
    Ok(QuadResult { value, error: left.error + right.error, intervals: left.intervals + right.intervals })
}

/// Integrate `∫₀^∞ F(s) ds` given `w(x) = s·F(s)` at `s = e^x`,
/// split at `s = 1`.
pub fn integrate_log<F: Fn(f64) -> f64 + Sync>(w: F, tol: Tolerance) -> Result<QuadResult<f64>> {
    integrate_line(w, 0.0, tol)
}
