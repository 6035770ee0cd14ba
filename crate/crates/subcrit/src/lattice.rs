//! Grids, Dirichlet forms, signed measures and Schrödinger matrices.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sparse::{cg_solve, SymSparse};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Dirichlet,
    Free,
}

/// A cubic grid `{0..n}^dim` with spacing `h`, centred on the origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    pub spacing: f64,
    pub boundary: Boundary,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, spacing: f64, boundary: Boundary) -> Self {
        GridSpec { dim, n, spacing, boundary }
    }

    pub fn dirichlet(dim: usize, n: usize, spacing: f64) -> Self {
        Self::new(dim, n, spacing, Boundary::Dirichlet)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidGrid("n must be at least 1".into()));
        }
        if !(self.spacing > 0.0) || !self.spacing.is_finite() {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {}", self.spacing)));
        }
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidGrid(format!("dim must be 1, 2 or 3, got {}", self.dim)));
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.n.pow(self.dim as u32)
    }
}

/// Second grid glued to the first at one identified node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Glue {
    pub grid: GridSpec,
    /// Junction point in the coordinates of the first grid.
    pub at_first: Vec<f64>,
    /// Junction point in the coordinates of the second grid.
    pub at_second: Vec<f64>,
}

impl Glue {
    /// Glue at the origin of both grids.
    pub fn at_origins(first_dim: usize, grid: GridSpec) -> Self {
        let d2 = grid.dim;
        Glue { grid, at_first: vec![0.0; first_dim], at_second: vec![0.0; d2] }
    }
}

/// Finite weighted graph carrying a Dirichlet form and reference measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteSpace {
    /// Node coordinates in their component's own ambient space.
    pub coords: Vec<Vec<f64>>,
    /// Component each node belongs to (0 or 1); the junction is in 0.
    pub component: Vec<u8>,
    /// Edges `(x, y, c_xy)` with `x < y`.
    pub edges: Vec<(usize, usize, f64)>,
    pub killing: Vec<f64>,
    pub measure: Vec<f64>,
    pub grids: Vec<GridSpec>,
    /// Junction node index and the junction point in each component.
    pub junction: Option<(usize, Vec<f64>, Vec<f64>)>,
}

fn grid_nodes(spec: &GridSpec) -> (Vec<Vec<f64>>, Vec<(usize, usize, f64)>, Vec<f64>, Vec<f64>) {
    let (d, n, h) = (spec.dim, spec.n, spec.spacing);
    let total = spec.node_count();
    let c = h.powi(d as i32 - 2);
    let mut coords = Vec::with_capacity(total);
    let mut edges = Vec::new();
    let mut killing = vec![0.0; total];
    let measure = vec![h.powi(d as i32); total];
    let half = (n as f64 - 1.0) / 2.0;
    for idx in 0..total {
        let mut rem = idx;
        let mut x = Vec::with_capacity(d);
        let mut stride = 1;
        for _ in 0..d {
            let i = rem % n;
            rem /= n;
            x.push((i as f64 - half) * h);
            if i + 1 < n {
                edges.push((idx, idx + stride, c));
            } else if spec.boundary == Boundary::Dirichlet {
                killing[idx] += c;
            }
            if i == 0 && spec.boundary == Boundary::Dirichlet {
                killing[idx] += c;
            }
            stride *= n;
        }
        coords.push(x);
    }
    (coords, edges, killing, measure)
}

fn find_node(coords: &[Vec<f64>], p: &[f64], h: f64) -> Option<usize> {
    coords.iter().position(|x| x.len() == p.len() && x.iter().zip(p).all(|(a, b)| (a - b).abs() <= 0.25 * h))
}

/// Build a grid space, optionally glued to a second grid at one node.
pub fn build_space(spec: &GridSpec, glue: Option<&Glue>) -> Result<DiscreteSpace> {
    spec.validate()?;
    let (coords, edges, killing, measure) = grid_nodes(spec);
    let mut space = DiscreteSpace {
        component: vec![0; coords.len()],
        coords,
        edges,
        killing,
        measure,
        grids: vec![spec.clone()],
        junction: None,
    };
    if let Some(g) = glue {
        g.grid.validate()?;
        let j1 = find_node(&space.coords, &g.at_first, spec.spacing)
            .ok_or_else(|| Error::InvalidGrid("junction point is not a node of the first grid".into()))?;
        let (c2, e2, k2, m2) = grid_nodes(&g.grid);
        let j2 = find_node(&c2, &g.at_second, g.grid.spacing)
            .ok_or_else(|| Error::InvalidGrid("junction point is not a node of the second grid".into()))?;
        let base = space.coords.len();
        let map = |i: usize| -> usize {
            if i == j2 {
                j1
            } else if i < j2 {
                base + i
            } else {
                base + i - 1
            }
        };
        for (i, x) in c2.into_iter().enumerate() {
            if i != j2 {
                space.coords.push(x);
                space.component.push(1);
                space.killing.push(k2[i]);
                space.measure.push(m2[i]);
            }
        }
        space.killing[j1] += k2[j2];
        space.measure[j1] += m2[j2];
        for (a, b, c) in e2 {
            let (x, y) = (map(a), map(b));
            space.edges.push((x.min(y), x.max(y), c));
        }
        space.grids.push(g.grid.clone());
        space.junction = Some((j1, g.at_first.clone(), g.at_second.clone()));
    }
    Ok(space)
}

impl DiscreteSpace {
    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }

    /// Spacing of the component holding node `x`.
    pub fn spacing_of(&self, x: usize) -> f64 {
        self.grids[self.component[x] as usize].spacing
    }

    pub fn dim_of(&self, x: usize) -> usize {
        self.coords[x].len()
    }

    /// Multiply conductances and killing by `factor`.
    pub fn with_form_scale(mut self, factor: f64) -> Self {
        for e in &mut self.edges {
            e.2 *= factor;
        }
        for k in &mut self.killing {
            *k *= factor;
        }
        self
    }

    pub fn is_connected(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); n];
        for &(x, y, c) in &self.edges {
            if c > 0.0 {
                adj[x].push(y);
                adj[y].push(x);
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == n
    }

    /// The form matrix S with `fᵀSf = E(f,f)`.
    pub fn form_matrix(&self) -> SymSparse {
        let mut t = Vec::with_capacity(self.edges.len() + self.len());
        let mut diag = self.killing.clone();
        for &(x, y, c) in &self.edges {
            t.push((x, y, -c));
            diag[x] += c;
            diag[y] += c;
        }
        for (i, d) in diag.into_iter().enumerate() {
            t.push((i, i, d));
        }
        SymSparse::from_triplets(self.len(), &t)
    }

    /// `E(f,f)` evaluated edge by edge.
    pub fn form_value(&self, f: &[f64]) -> f64 {
        let mut e = 0.0;
        for &(x, y, c) in &self.edges {
            let d = f[x] - f[y];
            e += c * d * d;
        }
        for (k, v) in self.killing.iter().zip(f) {
            e += k * v * v;
        }
        e
    }

    /// Form restricted to the edges of one component. The junction's
    /// killing is attributed to component 0.
    pub fn component_form_value(&self, f: &[f64], comp: u8) -> f64 {
        let j = self.junction.as_ref().map(|j| j.0);
        let mut e = 0.0;
        for &(x, y, c) in &self.edges {
            let owner = if Some(x) == j { self.component[y] } else { self.component[x] };
            if owner == comp {
                let d = f[x] - f[y];
                e += c * d * d;
            }
        }
        for (x, (k, v)) in self.killing.iter().zip(f).enumerate() {
            if self.component[x] == comp {
                e += k * v * v;
            }
        }
        e
    }

    /// Euclidean distance from node `x` to `center`, measured through the
    /// junction for nodes of the glued component.
    fn distance(&self, x: usize, center: &[f64]) -> f64 {
        let norm = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
        if self.component[x] == 0 {
            norm(&self.coords[x], center)
        } else {
            let (_, j1, j2) = self.junction.as_ref().expect("glued component has a junction");
            norm(&self.coords[x], j2) + norm(j1, center)
        }
    }
}

/// Nonnegative per-node weights `μ⁺`, `μ⁻`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignedMeasure {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

impl SignedMeasure {
    pub fn zero(n: usize) -> Self {
        SignedMeasure { plus: vec![0.0; n], minus: vec![0.0; n] }
    }

    pub fn negative(weights: Vec<f64>) -> Self {
        let n = weights.len();
        SignedMeasure { plus: vec![0.0; n], minus: weights }
    }

    pub fn positive(weights: Vec<f64>) -> Self {
        let n = weights.len();
        SignedMeasure { plus: weights, minus: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty()
    }

    /// Subtract the overlap so that `min(μ⁺, μ⁻) = 0` nodewise.
    pub fn canonical(&self) -> Self {
        let mut out = self.clone();
        for (p, m) in out.plus.iter_mut().zip(out.minus.iter_mut()) {
            let o = p.min(*m);
            *p -= o;
            *m -= o;
        }
        out
    }

    pub fn add(&self, other: &SignedMeasure) -> Result<Self> {
        if other.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: other.len() });
        }
        Ok(SignedMeasure {
            plus: self.plus.iter().zip(&other.plus).map(|(a, b)| a + b).collect(),
            minus: self.minus.iter().zip(&other.minus).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        SignedMeasure {
            plus: self.plus.iter().map(|v| v * c).collect(),
            minus: self.minus.iter().map(|v| v * c).collect(),
        }
    }

    /// Signed nodal values `μ⁺ − μ⁻`.
    pub fn signed(&self) -> Vec<f64> {
        self.plus.iter().zip(&self.minus).map(|(p, m)| p - m).collect()
    }

    /// Weights of a one-signed measure.
    pub fn one_signed_weights(&self) -> Result<Vec<f64>> {
        let c = self.canonical();
        let has_plus = c.plus.iter().any(|&v| v > 0.0);
        let has_minus = c.minus.iter().any(|&v| v > 0.0);
        match (has_plus, has_minus) {
            (true, true) => Err(Error::InvalidMeasure("measure is not one-signed".into())),
            (false, true) => Ok(c.minus),
            _ => Ok(c.plus),
        }
    }

    pub fn minus_support(&self) -> Vec<usize> {
        self.canonical().minus.iter().enumerate().filter(|(_, &v)| v > 0.0).map(|(i, _)| i).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureSpec {
    /// `λ·max(|x−c|, εh)^{-p}·m_x`.
    RadialPower { lambda: f64, p: f64, center: Option<Vec<f64>>, cutoff: f64 },
    /// `λ·max(|x'|, εh)^{-p}·h^{d-1}` on the slice `x_axis = 0`.
    Hyperplane { lambda: f64, p: f64, axis: Option<usize>, cutoff: f64 },
    /// `λ·m_x`.
    Uniform { lambda: f64 },
    Custom(Vec<f64>),
}

pub const DEFAULT_CUTOFF: f64 = 0.5;

impl MeasureSpec {
    pub fn radial(lambda: f64, p: f64) -> Self {
        MeasureSpec::RadialPower { lambda, p, center: None, cutoff: DEFAULT_CUTOFF }
    }

    pub fn hyperplane(lambda: f64, p: f64) -> Self {
        MeasureSpec::Hyperplane { lambda, p, axis: None, cutoff: DEFAULT_CUTOFF }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidMeasure(format!("coupling must be nonnegative, got {lambda}")));
    }
    Ok(())
}

/// Node weights of a measure spec, added to `μ⁺` or `μ⁻`.
pub fn attach_measure(space: &DiscreteSpace, spec: &MeasureSpec, sign: Sign) -> Result<SignedMeasure> {
    let n = space.len();
    let weights: Vec<f64> = match spec {
        MeasureSpec::RadialPower { lambda, p, center, cutoff } => {
            check_lambda(*lambda)?;
            if !(*p >= 0.0) {
                return Err(Error::InvalidMeasure(format!("exponent p must be nonnegative, got {p}")));
            }
            let d0 = space.grids[0].dim;
            let c = center.clone().unwrap_or_else(|| vec![0.0; d0]);
            if c.len() != d0 {
                return Err(Error::DimensionMismatch { expected: d0, got: c.len() });
            }
            for k in 0..d0 {
                let (lo, hi) = space
                    .coords
                    .iter()
                    .zip(&space.component)
                    .filter(|(_, &comp)| comp == 0)
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (x, _)| (lo.min(x[k]), hi.max(x[k])));
                if c[k] < lo - 1e-12 || c[k] > hi + 1e-12 {
                    return Err(Error::InvalidMeasure(format!("center {:?} lies outside the grid hull", c)));
                }
            }
            (0..n)
                .map(|x| {
                    let r = space.distance(x, &c).max(cutoff * space.spacing_of(x));
                    lambda * r.powf(-p) * space.measure[x]
                })
                .collect()
        }
        MeasureSpec::Hyperplane { lambda, p, axis, cutoff } => {
            check_lambda(*lambda)?;
            if !(*p >= 0.0) {
                return Err(Error::InvalidMeasure(format!("exponent p must be nonnegative, got {p}")));
            }
            (0..n)
                .map(|x| {
                    if space.component[x] != 0 {
                        return 0.0;
                    }
                    let d = space.dim_of(x);
                    let ax = axis.unwrap_or(d - 1);
                    let h = space.spacing_of(x);
                    let xs = &space.coords[x];
                    if ax >= d || xs[ax].abs() > 0.25 * h {
                        return 0.0;
                    }
                    let r = xs
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != ax)
                        .map(|(_, v)| v * v)
                        .sum::<f64>()
                        .sqrt()
                        .max(cutoff * h);
                    lambda * r.powf(-p) * h.powi(d as i32 - 1)
                })
                .collect()
        }
        MeasureSpec::Uniform { lambda } => {
            check_lambda(*lambda)?;
            space.measure.iter().map(|m| lambda * m).collect()
        }
        MeasureSpec::Custom(w) => {
            if w.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: w.len() });
            }
            if w.iter().any(|v| !(*v >= 0.0)) {
                return Err(Error::InvalidMeasure("custom weights must be nonnegative".into()));
            }
            w.clone()
        }
    };
    Ok(match sign {
        Sign::Plus => SignedMeasure::positive(weights),
        Sign::Minus => SignedMeasure::negative(weights),
    })
}

/// Storage of the symmetric matrix `M·A`.
#[derive(Debug, Clone, PartialEq)]
pub enum FormMatrix {
    Sparse(SymSparse),
    Dense(DMatrix<f64>),
}

impl FormMatrix {
    pub fn dim(&self) -> usize {
        match self {
            FormMatrix::Sparse(s) => s.dim(),
            FormMatrix::Dense(d) => d.nrows(),
        }
    }

    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            FormMatrix::Sparse(s) => s.matvec(x),
            FormMatrix::Dense(d) => d * x,
        }
    }

    /// Absolute row sums `Σ_j |K_ij|`.
    pub fn abs_row_sums(&self) -> Vec<f64> {
        match self {
            FormMatrix::Sparse(s) => (0..s.dim()).map(|i| s.row(i).map(|e| e.1.abs()).sum()).collect(),
            FormMatrix::Dense(d) => d.row_iter().map(|r| r.iter().map(|v| v.abs()).sum()).collect(),
        }
    }

    /// Largest absolute row sum, an upper bound on the spectral norm.
    pub fn row_sum_norm(&self) -> f64 {
        self.abs_row_sums().into_iter().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            FormMatrix::Sparse(s) => s.to_dense(),
            FormMatrix::Dense(d) => d.clone(),
        }
    }
}

/// The m-symmetric operator `A` of `E^μ`, stored as `M·A`.
#[derive(Debug, Clone)]
pub struct SchrodingerOperator {
    pub measure: DVector<f64>,
    pub form: FormMatrix,
    /// Smallest eigenvalue of the pencil `(M·A, M)`.
    pub psd_certificate: f64,
    /// Size of the parts summed into `A`, `max_i Σ_j (|S_ij| + D⁺_i + D⁻_i)/m_i`.
    /// Rounding in `A` is relative to this, not to `‖A‖`, which can be tiny
    /// after cancellation.
    pub scale: f64,
}

/// Default node budget for dense eigensolvers.
pub const DENSE_BUDGET: usize = 4000;

impl SchrodingerOperator {
    /// Operator from a symmetric `M·A` and the reference measure.
    pub fn new(measure: DVector<f64>, form: FormMatrix) -> Result<Self> {
        if form.dim() != measure.len() {
            return Err(Error::DimensionMismatch { expected: measure.len(), got: form.dim() });
        }
        if measure.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::Invalid("reference measure must be positive".into()));
        }
        let scale = form.abs_row_sums().iter().zip(measure.iter()).map(|(r, m)| r / m).fold(0.0, f64::max);
        let mut op = SchrodingerOperator { measure, form, psd_certificate: f64::NAN, scale };
        op.psd_certificate = crate::krylov::smallest_eigenvalue(&op)?;
        Ok(op)
    }

    /// Account for a negative part `D⁻` already subtracted from the form.
    pub fn with_cancelled(mut self, minus: &[f64]) -> Self {
        let rows = self.form.abs_row_sums();
        self.scale = (0..self.dim()).map(|i| (rows[i] + 2.0 * minus[i]) / self.measure[i]).fold(self.scale, f64::max);
        self
    }

    pub fn dim(&self) -> usize {
        self.measure.len()
    }

    /// Operator whose `M·A` is the diagonal `d` on a single-node space,
    /// handy for analytic checks.
    pub fn scalar(a: f64) -> Self {
        SchrodingerOperator {
            measure: DVector::from_element(1, 1.0),
            form: FormMatrix::Dense(DMatrix::from_element(1, 1, a)),
            psd_certificate: a,
            scale: a.abs(),
        }
    }

    /// `A f`.
    pub fn apply(&self, f: &DVector<f64>) -> DVector<f64> {
        self.form.matvec(f).component_div(&self.measure)
    }

    /// `⟨Af, f⟩_m = fᵀ(MA)f`.
    pub fn quadratic_form(&self, f: &DVector<f64>) -> f64 {
        f.dot(&self.form.matvec(f))
    }

    /// `A` as a dense (non-symmetric in general) matrix.
    pub fn to_dense_operator(&self) -> DMatrix<f64> {
        let mut a = self.form.to_dense();
        for i in 0..a.nrows() {
            let mi = self.measure[i];
            a.row_mut(i).scale_mut(1.0 / mi);
        }
        a
    }

    pub fn is_negative(&self, tol: f64) -> bool {
        self.psd_certificate < -tol
    }
}

/// Assemble `M·A = S + D⁺ − D⁻`.
pub fn schrodinger_matrix(space: &DiscreteSpace, mu: &SignedMeasure) -> Result<SchrodingerOperator> {
    if mu.len() != space.len() {
        return Err(Error::DimensionMismatch { expected: space.len(), got: mu.len() });
    }
    if !space.is_connected() {
        return Err(Error::InvalidGrid("space is not connected".into()));
    }
    let c = mu.canonical();
    let s = space.form_matrix().plus_diagonal(&c.signed());
    Ok(SchrodingerOperator::new(DVector::from_vec(space.measure.clone()), FormMatrix::Sparse(s))?.with_cancelled(&c.minus))
}

/// Kato norm `‖R_α μ‖_∞` with its decay profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KatoReport {
    pub alpha: f64,
    pub norm: f64,
    /// `(α, ‖R_α μ‖_∞)` for α ∈ {1, 10, 100, 1000}.
    pub profile: Vec<(f64, f64)>,
    pub strictly_decreasing: bool,
    /// Least-squares slope of log-norm against log α over the profile.
    pub decay_exponent: f64,
}

fn resolvent_of_measure(space: &DiscreteSpace, w: &[f64], alpha: f64) -> Result<DVector<f64>> {
    let s = space.form_matrix();
    let shift: Vec<f64> = space.measure.iter().map(|m| alpha * m).collect();
    let k = s.plus_diagonal(&shift);
    let b = DVector::from_column_slice(w);
    if space.len() <= 1500 {
        let chol = k
            .to_dense()
            .cholesky()
            .ok_or_else(|| Error::Invalid("αM + S is not positive definite".into()))?;
        Ok(chol.solve(&b))
    } else {
        cg_solve(&k, &b, 1e-14, 20 * space.len())
    }
}

fn kato_value(space: &DiscreteSpace, w: &[f64], alpha: f64) -> Result<f64> {
    Ok(resolvent_of_measure(space, w, alpha)?.iter().cloned().fold(0.0, f64::max))
}

/// `max_x (R_α μ)(x)` where `(αM + S)v = μ`.
pub fn kato_norm(space: &DiscreteSpace, mu: &SignedMeasure, alpha: f64) -> Result<KatoReport> {
    if !(alpha > 0.0) {
        return Err(Error::Invalid(format!("α must be positive, got {alpha}")));
    }
    let w = mu.one_signed_weights()?;
    if w.len() != space.len() {
        return Err(Error::DimensionMismatch { expected: space.len(), got: w.len() });
    }
    let norm = kato_value(space, &w, alpha)?;
    let mut profile = Vec::new();
    for a in [1.0, 10.0, 100.0, 1000.0] {
        profile.push((a, kato_value(space, &w, a)?));
    }
    let strictly_decreasing = profile.windows(2).all(|p| p[1].1 < p[0].1);
    let pts: Vec<(f64, f64)> =
        profile.iter().filter(|p| p.1 > 0.0).map(|&(a, v)| (a.ln(), v.ln())).collect();
    let decay_exponent = crate::stats::ls_slope(&pts).unwrap_or(f64::NAN);
    Ok(KatoReport { alpha, norm, profile, strictly_decreasing, decay_exponent })
}

/// Both sides of `∫|f|²dμ ≤ ‖R_αμ‖_∞ E_α(f,f)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SvReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub kato: f64,
}

pub fn stollmann_voigt_check(space: &DiscreteSpace, mu: &SignedMeasure, f: &[f64], alpha: f64) -> Result<SvReport> {
    let w = mu.one_signed_weights()?;
    if f.len() != space.len() {
        return Err(Error::DimensionMismatch { expected: space.len(), got: f.len() });
    }
    let kato = kato_value(space, &w, alpha)?;
    let lhs: f64 = w.iter().zip(f).map(|(m, v)| m * v * v).sum();
    let mass: f64 = space.measure.iter().zip(f).map(|(m, v)| m * v * v).sum();
    let rhs = kato * (space.form_value(f) + alpha * mass);
    Ok(SvReport { lhs, rhs, slack: rhs - lhs, kato })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_node() -> DiscreteSpace {
        build_space(&GridSpec::dirichlet(1, 1, 1.0), None).unwrap()
    }

    #[test]
    fn single_node_space() {
        let s = one_node();
        assert_eq!(s.len(), 1);
        assert_eq!(s.killing, vec![2.0]);
        assert_eq!(s.measure, vec![1.0]);
        assert_eq!(s.form_value(&[3.0]), 18.0);
    }

    #[test]
    fn path_stencil() {
        let s = build_space(&GridSpec::dirichlet(1, 3, 1.0), None).unwrap();
        let d = s.form_matrix().to_dense();
        let expect = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        assert_eq!(d, expect);
    }

    #[test]
    fn glued_grids_share_junction() {
        let g = Glue::at_origins(3, GridSpec::dirichlet(2, 5, 1.0));
        let s = build_space(&GridSpec::dirichlet(3, 5, 1.0), Some(&g)).unwrap();
        assert_eq!(s.len(), 125 + 25 - 1);
        assert!(s.is_connected());
        let g = Glue::at_origins(3, GridSpec::dirichlet(3, 5, 1.0));
        let s = build_space(&GridSpec::dirichlet(3, 5, 1.0), Some(&g)).unwrap();
        assert_eq!(s.len(), 249);
        assert!(s.is_connected());
    }

    #[test]
    fn invalid_grids() {
        assert!(build_space(&GridSpec::dirichlet(1, 0, 1.0), None).is_err());
        assert!(build_space(&GridSpec::dirichlet(1, 3, 0.0), None).is_err());
        assert!(build_space(&GridSpec::dirichlet(1, 3, -1.0), None).is_err());
    }

    #[test]
    fn measure_examples() {
        let s = one_node();
        let m = attach_measure(&s, &MeasureSpec::Uniform { lambda: 1.0 }, Sign::Minus).unwrap();
        assert_eq!(m.minus, vec![1.0]);
        assert_eq!(m.plus, vec![0.0]);

        let g = build_space(&GridSpec::dirichlet(3, 3, 1.0), None).unwrap();
        let m = attach_measure(&g, &MeasureSpec::radial(1.0, 2.0), Sign::Minus).unwrap();
        let x = g.coords.iter().position(|c| c == &vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.minus[x], 1.0);
        let o = g.coords.iter().position(|c| c == &vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.minus[o], 4.0);

        let p = build_space(&GridSpec::dirichlet(2, 5, 1.0), None).unwrap();
        let m = attach_measure(&p, &MeasureSpec::hyperplane(1.0, 1.0), Sign::Minus).unwrap();
        let x = p.coords.iter().position(|c| c == &vec![2.0, 0.0]).unwrap();
        assert_eq!(m.minus[x], 0.5);
        let off = p.coords.iter().position(|c| c == &vec![2.0, 1.0]).unwrap();
        assert_eq!(m.minus[off], 0.0);
    }

    #[test]
    fn measure_errors() {
        let g = build_space(&GridSpec::dirichlet(2, 3, 1.0), None).unwrap();
        let far = MeasureSpec::RadialPower { lambda: 1.0, p: 2.0, center: Some(vec![5.0, 0.0]), cutoff: 0.5 };
        assert!(attach_measure(&g, &far, Sign::Minus).is_err());
        assert!(attach_measure(&g, &MeasureSpec::radial(1.0, -1.0), Sign::Minus).is_err());
        assert!(attach_measure(&g, &MeasureSpec::radial(-1.0, 2.0), Sign::Minus).is_err());
    }

    #[test]
    fn one_node_operator() {
        let s = one_node();
        for w in [0.5, 2.0, 3.0] {
            let op = schrodinger_matrix(&s, &SignedMeasure::negative(vec![w])).unwrap();
            assert_eq!(op.form.to_dense()[(0, 0)], 2.0 - w);
            assert!((op.psd_certificate - (2.0 - w)).abs() < 1e-14);
        }
    }

    #[test]
    fn path_certificate() {
        let s = build_space(&GridSpec::dirichlet(1, 3, 1.0), None).unwrap();
        let op = schrodinger_matrix(&s, &SignedMeasure::zero(3)).unwrap();
        assert!((op.psd_certificate - (2.0 - 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn cancelling_measure_is_inert() {
        let s = build_space(&GridSpec::dirichlet(1, 3, 1.0), None).unwrap();
        let mu = SignedMeasure { plus: vec![1.0, 2.0, 0.5], minus: vec![1.0, 2.0, 0.5] };
        let a = schrodinger_matrix(&s, &mu).unwrap();
        let b = schrodinger_matrix(&s, &SignedMeasure::zero(3)).unwrap();
        assert_eq!(a.form, b.form);
    }

    #[test]
    fn kato_examples() {
        let s = one_node();
        let r = kato_norm(&s, &SignedMeasure::positive(vec![1.0]), 2.0).unwrap();
        assert!((r.norm - 0.25).abs() < 1e-15);
        assert!(r.strictly_decreasing);

        let p = build_space(&GridSpec::new(2, 4, 0.5, Boundary::Free), None).unwrap();
        let mu = attach_measure(&p, &MeasureSpec::Uniform { lambda: 1.0 }, Sign::Plus).unwrap();
        for a in [0.5, 3.0] {
            let r = kato_norm(&p, &mu, a).unwrap();
            assert!((r.norm - 1.0 / a).abs() < 1e-12, "free boundary attains 1/α");
        }
    }

    #[test]
    fn stollmann_voigt_equality_on_one_node() {
        let s = one_node();
        let mu = SignedMeasure::positive(vec![1.0]);
        let r = stollmann_voigt_check(&s, &mu, &[1.0], 2.0).unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (1.0, 1.0, 0.0));
        let z = stollmann_voigt_check(&s, &mu, &[0.0], 2.0).unwrap();
        assert_eq!(z.slack, 0.0);
    }

    #[test]
    fn energy_of_constants() {
        let free = build_space(&GridSpec::new(2, 4, 1.0, Boundary::Free), None).unwrap();
        assert_eq!(free.form_value(&vec![1.0; free.len()]), 0.0);
        let dir = build_space(&GridSpec::dirichlet(2, 4, 1.0), None).unwrap();
        let total: f64 = dir.killing.iter().sum();
        assert_eq!(dir.form_value(&vec![1.0; dir.len()]), total);
        assert!(total > 0.0);
    }
}
