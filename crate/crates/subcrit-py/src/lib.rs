//! Python bindings: Bernstein functions, grid Schrödinger operators and
//! Hardy families.

use std::collections::BTreeMap;

use nalgebra::DVector;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use subcrit::bernstein::{catalog_lookup, default_entries, BernsteinEntry};
use subcrit::criticality::{classify_schrodinger, classify_subordinated, green_sequence, Classification, FamilyOptions};
use subcrit::hardy::{build_scenario, extrapolate_critical_coupling, hardy_constant as sharp_constant, HardyKind, HardyScenario};
use subcrit::lattice::{build_space, schrodinger_matrix, Boundary, DiscreteSpace, GridSpec, SignedMeasure};
use subcrit::spectral::{decompose, GreenMode, SpectralDecomposition};
use subcrit::wave::{boundedness_verdict, solve_wave, Boundedness};

fn err(e: subcrit::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn kind_of(name: &str) -> PyResult<HardyKind> {
    match name {
        "hardy" => Ok(HardyKind::Hardy),
        "trace_hardy" => Ok(HardyKind::TraceHardy),
        other => Err(PyValueError::new_err(format!("unknown inequality {other:?}"))),
    }
}

fn classification<'py>(py: Python<'py>, c: &Classification) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("verdict", c.verdict.to_string())?;
    d.set_item("lambda_mu", c.lambda_mu)?;
    d.set_item("gamma_mu", c.gamma_mu)?;
    Ok(d)
}

/// A Bernstein function from the catalog.
#[pyclass(name = "Bernstein", frozen)]
struct PyBernstein {
    inner: BernsteinEntry,
}

#[pymethods]
impl PyBernstein {
    /// Look up `name` with a parameter mapping, e.g. `Bernstein("gamma", {"a": 1, "c": 1})`.
    #[new]
    #[pyo3(signature = (name, params = None))]
    fn new(name: &str, params: Option<BTreeMap<String, f64>>) -> PyResult<Self> {
        catalog_lookup(name, &params.unwrap_or_default()).map(|inner| PyBernstein { inner }).map_err(err)
    }

    #[staticmethod]
    fn identity() -> Self {
        PyBernstein { inner: BernsteinEntry::identity() }
    }

    #[staticmethod]
    fn stable(beta: f64) -> PyResult<Self> {
        BernsteinEntry::stable(beta).map(|inner| PyBernstein { inner }).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.to_string()
    }

    fn phi(&self, lam: f64) -> f64 {
        self.inner.phi(lam)
    }

    fn __repr__(&self) -> String {
        self.inner.describe()
    }
}

/// A Schrödinger operator on a cubic grid with a signed potential.
#[pyclass(name = "GridOperator", frozen)]
struct PyGridOperator {
    space: DiscreteSpace,
    mu: SignedMeasure,
    dec: SpectralDecomposition,
}

#[pymethods]
impl PyGridOperator {
    /// `minus` and `plus` are node weights of the attractive and repulsive
    /// parts; both default to zero.
    #[new]
    #[pyo3(signature = (dim, n, spacing = 1.0, dirichlet = true, minus = None, plus = None))]
    fn new(dim: usize, n: usize, spacing: f64, dirichlet: bool, minus: Option<Vec<f64>>, plus: Option<Vec<f64>>) -> PyResult<Self> {
        let boundary = if dirichlet { Boundary::Dirichlet } else { Boundary::Free };
        let space = build_space(&GridSpec::new(dim, n, spacing, boundary), None).map_err(err)?;
        let len = space.len();
        let mut mu = SignedMeasure::zero(len);
        for (name, src, dst) in [("minus", minus, &mut mu.minus), ("plus", plus, &mut mu.plus)] {
            if let Some(w) = src {
                if w.len() != len {
                    return Err(PyValueError::new_err(format!("{name} has {} weights for {len} nodes", w.len())));
                }
                *dst = w;
            }
        }
        let dec = decompose(&schrodinger_matrix(&space, &mu).map_err(err)?).map_err(err)?;
        Ok(PyGridOperator { space, mu, dec })
    }

    fn __len__(&self) -> usize {
        self.space.len()
    }

    /// Node coordinates.
    fn coords(&self) -> Vec<Vec<f64>> {
        self.space.coords.clone()
    }

    /// Eigenvalues of the operator, ascending.
    fn eigenvalues(&self) -> Vec<f64> {
        self.dec.eigenvalues.clone()
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn classify<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
        classification(py, &classify_schrodinger(&self.space, &self.mu, tol).map_err(err)?)
    }

    /// `⟨g, Φ(A)⁻¹g⟩`; infinite when `g` meets the kernel of `Φ(A)`.
    fn green_form(&self, entry: &PyBernstein, g: Vec<f64>) -> PyResult<f64> {
        let g = self.vector(g)?;
        self.dec.green_form(&entry.inner, &g, GreenMode::Spectral).map_err(err)
    }

    /// Solve `w'' + Φ(A)w = 0`, `w(0) = 0`, `w'(0) = g` at `times`.
    fn wave<'py>(&self, py: Python<'py>, entry: &PyBernstein, g: Vec<f64>, times: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
        let g = self.vector(g)?;
        let tr = solve_wave(&self.dec, &entry.inner, &g, &times).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("times", &tr.times)?;
        d.set_item("norms", &tr.l2_norms)?;
        d.set_item("energy_residuals", &tr.energy_residuals)?;
        d.set_item("range_seminorm", tr.range_seminorm)?;
        match boundedness_verdict(&tr).map_err(err)? {
            Boundedness::Bounded { sup } => {
                d.set_item("bounded", true)?;
                d.set_item("sup", sup)?;
            }
            Boundedness::Growing { rate } => {
                d.set_item("bounded", false)?;
                d.set_item("rate", rate)?;
            }
        }
        Ok(d)
    }
}

impl PyGridOperator {
    fn vector(&self, g: Vec<f64>) -> PyResult<DVector<f64>> {
        if g.len() != self.space.len() {
            return Err(PyValueError::new_err(format!("vector has {} entries for {} nodes", g.len(), self.space.len())));
        }
        Ok(DVector::from_vec(g))
    }
}

/// Growing Dirichlet grids with a Hardy weight at the origin.
#[pyclass(name = "HardyFamily", frozen)]
struct PyHardyFamily {
    inner: HardyScenario,
}

#[pymethods]
impl PyHardyFamily {
    #[new]
    #[pyo3(signature = (dim, sizes, spacing = 1.0, kind = "hardy", alpha = 2.0, p = None))]
    fn new(dim: usize, sizes: Vec<usize>, spacing: f64, kind: &str, alpha: f64, p: Option<f64>) -> PyResult<Self> {
        let inner = build_scenario(kind_of(kind)?, dim, alpha, p, spacing, &sizes).map_err(err)?;
        Ok(PyHardyFamily { inner })
    }

    /// Critical coupling of each grid size.
    fn critical_couplings(&self) -> PyResult<Vec<f64>> {
        self.inner.critical_couplings().map_err(err)
    }

    /// Large-size limit of the critical couplings.
    fn extrapolate(&self) -> PyResult<f64> {
        let values = self.inner.critical_couplings().map_err(err)?;
        extrapolate_critical_coupling(&self.inner.sizes, &values).map_err(err)
    }

    /// Green forms of the subordinated family at a fixed coupling.
    fn green_sequence<'py>(&self, py: Python<'py>, entry: &PyBernstein, coupling: f64) -> PyResult<Bound<'py, PyDict>> {
        let family = self.inner.family(coupling).map_err(err)?;
        let seq = green_sequence(&family, &entry.inner, &FamilyOptions::default()).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("sizes", &seq.sizes)?;
        d.set_item("values", &seq.values)?;
        d.set_item("slope", seq.slope)?;
        d.set_item("last_increment", seq.last_increment)?;
        Ok(d)
    }

    fn classify<'py>(&self, py: Python<'py>, entry: &PyBernstein, coupling: f64) -> PyResult<Bound<'py, PyDict>> {
        let family = self.inner.family(coupling).map_err(err)?;
        classification(py, &classify_subordinated(&family, &entry.inner, &FamilyOptions::default()).map_err(err)?)
    }
}

/// Sharp constant of the Hardy (`"hardy"`) or trace Hardy (`"trace_hardy"`) inequality.
#[pyfunction]
#[pyo3(signature = (dim, kind = "hardy", alpha = 2.0))]
fn hardy_constant(dim: usize, kind: &str, alpha: f64) -> PyResult<f64> {
    sharp_constant(kind_of(kind)?, dim, alpha).map_err(err)
}

/// Descriptions of the default catalog entries.
#[pyfunction]
fn catalog() -> Vec<String> {
    default_entries().iter().map(|e| e.describe()).collect()
}

#[pymodule]
fn subcrit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBernstein>()?;
    m.add_class::<PyGridOperator>()?;
    m.add_class::<PyHardyFamily>()?;
    m.add_function(wrap_pyfunction!(hardy_constant, m)?)?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    Ok(())
}
