//! Python bindings for `normsol`.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use normsol::curve::{self, ScanOptions};
use normsol::io::SolutionRecord;
use normsol::roots::geomspace;
use normsol::{Error, NonlinearitySpec};

create_exception!(normsol, SolverError, PyRuntimeError);

fn to_py_err(err: Error) -> PyErr {
    match err {
        Error::InvalidSpec(_)
        | Error::InvalidProfile(_)
        | Error::InvalidArgument(_)
        | Error::Parse(_)
        | Error::WrongFamily => PyValueError::new_err(err.to_string()),
        other => SolverError::new_err(other.to_string()),
    }
}

fn scan_options(n_starts: usize, threads: Option<usize>) -> ScanOptions {
    ScanOptions {
        n_starts,
        threads,
        ..ScanOptions::default()
    }
}

/// Nonlinearity `g(s)`, built from the CLI grammar or a constructor.
#[pyclass(name = "Nonlinearity", module = "normsol", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyNonlinearity {
    inner: NonlinearitySpec,
}

#[pymethods]
impl PyNonlinearity {
    /// Parses e.g. `"power:p=3"`, `"cubic-quintic:a=1,b=1"` or
    /// `"combined:+1*s^3,-1*s^5"`.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        let inner: NonlinearitySpec = spec.parse().map_err(to_py_err)?;
        inner.validate().map_err(to_py_err)?;
        Ok(PyNonlinearity { inner })
    }

    #[staticmethod]
    fn pure_power(p: f64) -> PyResult<Self> {
        Self::checked(NonlinearitySpec::pure_power(p))
    }

    #[staticmethod]
    #[pyo3(signature = (a = 1.0, b = 1.0))]
    fn cubic_quintic(a: f64, b: f64) -> PyResult<Self> {
        Self::checked(NonlinearitySpec::cubic_quintic(a, b))
    }

    /// Signed sum of monomials from `[(coefficient, exponent), ...]`.
    #[staticmethod]
    fn combined(terms: Vec<(f64, f64)>) -> PyResult<Self> {
        Self::checked(NonlinearitySpec::combined(&terms))
    }

    fn g(&self, s: f64) -> f64 {
        self.inner.g(s)
    }

    /// Antiderivative `G(s)`.
    fn antiderivative(&self, s: f64) -> f64 {
        self.inner.antiderivative(s)
    }

    fn mu_star(&self) -> PyResult<f64> {
        self.inner.mu_star().map_err(to_py_err)
    }

    fn truncate(&self) -> PyResult<Self> {
        Ok(PyNonlinearity {
            inner: self.inner.truncate().map_err(to_py_err)?,
        })
    }

    fn classify<'py>(&self, py: Python<'py>, dim: usize) -> PyResult<Bound<'py, PyDict>> {
        let r = self.inner.classify(dim).map_err(to_py_err)?;
        let d = PyDict::new(py);
        d.set_item("dim", r.dim)?;
        d.set_item("p0", r.p0)?;
        d.set_item("mass_critical", r.mass_critical)?;
        d.set_item("sobolev_critical", r.sobolev_critical)?;
        d.set_item("p0_supercritical", r.p0_supercritical)?;
        d.set_item("mu_star", r.mu_star)?;
        d.set_item("regime", format!("{:?}", r.regime))?;
        Ok(d)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Nonlinearity('{}')", self.inner)
    }
}

impl PyNonlinearity {
    fn checked(inner: NonlinearitySpec) -> PyResult<Self> {
        inner.validate().map_err(to_py_err)?;
        Ok(PyNonlinearity { inner })
    }
}

#[pyclass(name = "GroundState", module = "normsol", frozen)]
pub struct PyGroundState {
    inner: normsol::GroundState,
}

#[pymethods]
impl PyGroundState {
    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// `½ |u|₂²`.
    #[getter]
    fn mass(&self) -> f64 {
        self.inner.mass()
    }

    #[getter]
    fn action(&self) -> f64 {
        self.inner.action()
    }

    /// `(1/N) |∇u|₂²`.
    #[getter]
    fn level(&self) -> f64 {
        self.inner.level()
    }

    #[getter]
    fn grad_sq(&self) -> f64 {
        self.inner.report.grad_sq
    }

    #[getter]
    fn pohozaev_rel(&self) -> f64 {
        self.inner.residuals.pohozaev_rel
    }

    #[getter]
    fn shoot_height(&self) -> f64 {
        self.inner.shoot_height
    }

    /// `J_m(μ, u) = I(μ, u) - mμ`.
    fn j_m(&self, mass: f64) -> f64 {
        self.inner.action() - mass * self.inner.mu
    }

    /// `(r, u, u')` as three lists.
    fn profile(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let p = &self.inner.profile;
        (p.grid().to_vec(), p.values().to_vec(), p.derivs().to_vec())
    }

    fn value_at(&self, r: f64) -> f64 {
        self.inner.profile.value_at(r)
    }

    fn to_csv(&self) -> String {
        self.inner.profile.to_csv()
    }

    fn __repr__(&self) -> String {
        format!(
            "GroundState(mu={}, mass={}, action={}, u0={})",
            self.inner.mu,
            self.inner.mass(),
            self.inner.action(),
            self.inner.shoot_height
        )
    }
}

#[pyclass(name = "FrequencyCurve", module = "normsol", frozen)]
pub struct PyFrequencyCurve {
    inner: curve::FrequencyCurve,
    n_starts: usize,
    threads: Option<usize>,
}

#[pymethods]
impl PyFrequencyCurve {
    #[getter]
    fn mu(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.mu).collect()
    }

    /// Least-energy levels `a(μ)`.
    #[getter]
    fn a(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.a).collect()
    }

    #[getter]
    fn c_minus(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.c_minus).collect()
    }

    #[getter]
    fn c_plus(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.c_plus).collect()
    }

    /// Frequencies whose solve failed, with the reason.
    #[getter]
    fn gaps(&self) -> Vec<(f64, String)> {
        self.inner
            .gaps
            .iter()
            .map(|g| (g.mu, g.reason.clone()))
            .collect()
    }

    fn b_m(&self, mass: f64) -> Vec<f64> {
        self.inner.b_m(mass).into_iter().map(|(_, b)| b).collect()
    }

    /// `(c*, μ at c*, boundary)`.
    fn c_star(&self, py: Python<'_>) -> PyResult<(f64, f64, bool)> {
        let opts = scan_options(self.n_starts, self.threads);
        let cs = py
            .detach(|| curve::c_star(&self.inner, &opts))
            .map_err(to_py_err)?;
        Ok((cs.c_star, cs.mu, cs.boundary))
    }

    #[pyo3(signature = (mass = None))]
    fn to_csv(&self, mass: Option<f64>) -> String {
        self.inner.to_csv(mass)
    }

    #[pyo3(signature = (mass = None))]
    fn to_svg(&self, mass: Option<f64>) -> String {
        normsol::io::curve_svg(&self.inner, mass)
    }

    fn __len__(&self) -> usize {
        self.inner.samples.len()
    }
}

/// Radial ground state of `-Δu + μu = g(u)` in `R^dim`.
#[pyfunction]
fn ground_state(
    py: Python<'_>,
    g: &PyNonlinearity,
    dim: usize,
    mu: f64,
) -> PyResult<PyGroundState> {
    let spec = g.inner.clone();
    let inner = py
        .detach(|| normsol::ground_state(&spec, dim, mu, &Default::default()))
        .map_err(to_py_err)?;
    Ok(PyGroundState { inner })
}

/// Samples `a`, `c₋`, `c₊` at `steps` log-spaced frequencies.
#[allow(clippy::too_many_arguments)]
#[pyfunction]
#[pyo3(signature = (g, dim, mu_min, mu_max, steps = 32, n_starts = 8, threads = None))]
fn scan(
    py: Python<'_>,
    g: &PyNonlinearity,
    dim: usize,
    mu_min: f64,
    mu_max: f64,
    steps: usize,
    n_starts: usize,
    threads: Option<usize>,
) -> PyResult<PyFrequencyCurve> {
    if !(mu_min > 0.0 && mu_max > mu_min) || steps < 2 {
        return Err(PyValueError::new_err(
            "need 0 < mu_min < mu_max and steps >= 2",
        ));
    }
    let spec = g.inner.clone();
    let opts = scan_options(n_starts, threads);
    let inner = py
        .detach(|| curve::scan(&spec, dim, &geomspace(mu_min, mu_max, steps), &opts))
        .map_err(to_py_err)?;
    Ok(PyFrequencyCurve {
        inner,
        n_starts,
        threads,
    })
}

/// Normalized solutions with `½ |u|₂² = mass` along a scanned curve, as
/// a list of dicts sorted by `mu`. Raises `SolverError` if none exist.
#[pyfunction]
#[pyo3(signature = (curve, mass, tol = 1e-3))]
fn find_normalized<'py>(
    py: Python<'py>,
    curve: &PyFrequencyCurve,
    mass: f64,
    tol: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let opts = scan_options(curve.n_starts, curve.threads);
    let found = py
        .detach(|| curve::find_normalized(&curve.inner, mass, tol, &opts))
        .map_err(to_py_err)?;
    found
        .solutions
        .iter()
        .map(|sol| {
            let r = SolutionRecord::from_normalized(sol);
            let d = PyDict::new(py);
            d.set_item("mu", r.mu)?;
            d.set_item("mass", r.mass)?;
            d.set_item("mass_target", r.mass_target)?;
            d.set_item("mass_error", r.mass_error)?;
            d.set_item("action", r.action)?;
            d.set_item("j_m", r.j_m)?;
            d.set_item("grad_sq", r.grad_sq)?;
            d.set_item("pohozaev_rel", r.pohozaev_rel)?;
            d.set_item(
                "classification",
                match sol.classification {
                    curve::Classification::BmLocalMin => "bm-local-min",
                    curve::Classification::BmLocalMax => "bm-local-max",
                    curve::Classification::Unclassified => "unclassified",
                },
            )?;
            d.set_item("shoot_height", r.shoot_height)?;
            Ok(d)
        })
        .collect()
}

/// `μ* = sup 2G(s)/s²` for a grammar string or `Nonlinearity`.
#[pyfunction]
fn mu_star(g: &Bound<'_, PyAny>) -> PyResult<f64> {
    let spec = match g.extract::<PyRef<'_, PyNonlinearity>>() {
        Ok(n) => n.inner.clone(),
        Err(_) => g
            .extract::<String>()?
            .parse::<NonlinearitySpec>()
            .map_err(to_py_err)?,
    };
    spec.mu_star().map_err(to_py_err)
}

#[pymodule]
#[pyo3(name = "normsol")]
fn normsol_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNonlinearity>()?;
    m.add_class::<PyGroundState>()?;
    m.add_class::<PyFrequencyCurve>()?;
    m.add_function(wrap_pyfunction!(ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(find_normalized, m)?)?;
    m.add_function(wrap_pyfunction!(mu_star, m)?)?;
    m.add("SolverError", m.py().get_type::<SolverError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
