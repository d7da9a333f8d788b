//! Python bindings. Rationals cross the boundary as `"p/q"` strings and
//! expressions as the JSON exchange document.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use facetlift::document::{format_rational, parse_expression, parse_rational, serialize_expression};
use facetlift::lifting::{self, LiftDiagnostics};
use facetlift::polytope;
use facetlift::quantum::{self, MeasurementSettings, NamedState, SeesawConfig, Vec3};
use facetlift::reproduce;
use facetlift::{DeterministicStrategy, Scenario};
use num_complex::Complex64;

create_exception!(facetlift_py, FacetliftError, PyException);
create_exception!(facetlift_py, CapExceededError, FacetliftError);

fn to_py(err: facetlift::Error) -> PyErr {
    match err {
        facetlift::Error::CapExceeded { .. } => CapExceededError::new_err(err.to_string()),
        other => FacetliftError::new_err(other.to_string()),
    }
}

trait IntoPyResult<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPyResult<T> for facetlift::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// Exact correlation Bell expression.
#[pyclass(name = "BellExpression", module = "facetlift_py", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyBellExpression {
    inner: facetlift::BellExpression,
}

impl From<facetlift::BellExpression> for PyBellExpression {
    fn from(inner: facetlift::BellExpression) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PyBellExpression {
    /// Builds an expression from `(setting tuple, "p/q")` pairs.
    #[new]
    fn new(settings: Vec<usize>, terms: Vec<(Vec<usize>, String)>) -> PyResult<Self> {
        let scenario = Scenario::new(settings).py()?;
        let parsed = terms
            .into_iter()
            .map(|(s, c)| {
                parse_rational(&c)
                    .map(|r| (s, r))
                    .ok_or_else(|| FacetliftError::new_err(format!("malformed rational {c:?}")))
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(facetlift::BellExpression::from_terms(scenario, parsed).py()?.into())
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(parse_expression(text).py()?.into())
    }

    fn to_json(&self) -> String {
        serialize_expression(&self.inner).to_json()
    }

    #[getter]
    fn settings(&self) -> Vec<usize> {
        self.inner.scenario().settings().to_vec()
    }

    /// Nonzero coefficients as `(setting tuple, "p/q")`.
    fn terms(&self) -> Vec<(Vec<usize>, String)> {
        self.inner.terms().map(|(t, c)| (t, format_rational(c))).collect()
    }

    /// Value on deterministic outcomes (one list of ±1 per party).
    fn evaluate(&self, outcomes: Vec<Vec<i8>>) -> PyResult<String> {
        let s = DeterministicStrategy::new(outcomes).py()?;
        Ok(format_rational(&self.inner.evaluate(&s).py()?))
    }

    fn lr_max(&self, py: Python<'_>) -> PyResult<String> {
        let v = py.detach(|| polytope::lr_max(&self.inner)).py()?;
        Ok(format_rational(&v))
    }

    fn tightness<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = py.detach(|| polytope::tightness(&self.inner)).py()?;
        let d = PyDict::new(py);
        d.set_item("lr_max", format_rational(&r.lr_max))?;
        d.set_item("saturating_count", r.saturating_count)?;
        d.set_item("rank", r.rank)?;
        d.set_item("dimension", r.dimension)?;
        d.set_item("is_valid", r.is_valid)?;
        d.set_item("is_tight", r.is_tight)?;
        Ok(d)
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        Ok(self.inner.try_add(&other.inner).py()?.into())
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        Ok(self.inner.try_sub(&other.inner).py()?.into())
    }

    fn __neg__(&self) -> Self {
        (-&self.inner).into()
    }

    fn __repr__(&self) -> String {
        format!("BellExpression(settings={:?}, terms={})", self.settings(), self.inner.terms().count())
    }
}

/// Qubit density matrix.
#[pyclass(name = "QuantumState", module = "facetlift_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyQuantumState {
    inner: quantum::QuantumState,
}

#[pymethods]
impl PyQuantumState {
    /// Named library state, e.g. `QuantumState.named("generalized-ghz", [0.3])`.
    #[staticmethod]
    #[pyo3(signature = (name, params = Vec::new()))]
    fn named(name: &str, params: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: quantum::make_state(name, &params).py()?,
        })
    }

    /// Pure state from complex amplitudes (normalized on input).
    #[staticmethod]
    fn from_amplitudes(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self {
            inner: NamedState::Custom(amplitudes).build().py()?,
        })
    }

    #[getter]
    fn qubits(&self) -> usize {
        self.inner.qubits()
    }

    /// Rows of the density matrix.
    fn density(&self) -> Vec<Vec<Complex64>> {
        let rho = self.inner.density();
        (0..rho.dim()).map(|i| (0..rho.dim()).map(|j| rho[(i, j)]).collect()).collect()
    }

    /// `p * rho + (1 - p) * I / 2^n`.
    fn depolarized(&self, p: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.depolarized(p).py()?,
        })
    }

    fn sum_squared_correlations(&self) -> f64 {
        quantum::sum_squared_correlations(&self.inner)
    }

    /// Flat row-major `3^n` Pauli-product expectation values.
    fn correlation_tensor(&self) -> PyResult<Vec<f64>> {
        Ok(quantum::correlation_tensor(&self.inner, None).py()?.tensor().data().to_vec())
    }

    fn __repr__(&self) -> String {
        format!("QuantumState(qubits={})", self.inner.qubits())
    }
}

fn diagnostics<'py>(py: Python<'py>, d: &LiftDiagnostics) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("inputs_tight", d.inputs_tight.clone())?;
    out.set_item("compatibility_valid", d.compatibility_valid)?;
    out.set_item("output_tight", d.output_tight)?;
    out.set_item(
        "compatibility_witness",
        d.compatibility_witness.as_ref().map(|w| w.outcomes().to_vec()),
    )?;
    Ok(out)
}

#[pyfunction]
fn mabk(n: usize) -> PyResult<PyBellExpression> {
    Ok(lifting::mabk(n).py()?.into())
}

#[pyfunction]
fn wbz333() -> PyBellExpression {
    lifting::wbz333().into()
}

#[pyfunction]
fn four_party_19() -> PyBellExpression {
    lifting::four_party_19().into()
}

#[pyfunction]
fn symmetry_images() -> (PyBellExpression, PyBellExpression, PyBellExpression) {
    let (a, b, c) = lifting::symmetry_images();
    (a.into(), b.into(), c.into())
}

#[pyfunction]
fn lift2<'py>(
    py: Python<'py>,
    i_plus: &PyBellExpression,
    i_minus: &PyBellExpression,
) -> PyResult<(PyBellExpression, Bound<'py, PyDict>)> {
    let (e, d) = py.detach(|| lifting::lift2(&i_plus.inner, &i_minus.inner)).py()?;
    Ok((e.into(), diagnostics(py, &d)?))
}

#[pyfunction]
fn lift3<'py>(
    py: Python<'py>,
    i0: &PyBellExpression,
    i2: &PyBellExpression,
    i3: &PyBellExpression,
) -> PyResult<(PyBellExpression, Bound<'py, PyDict>)> {
    let (e, d) = py.detach(|| lifting::lift3(&i0.inner, &i2.inner, &i3.inner)).py()?;
    Ok((e.into(), diagnostics(py, &d)?))
}

/// `(holds, witness outcomes or None)`.
#[pyfunction]
fn compatibility_holds(
    py: Python<'_>,
    i0: &PyBellExpression,
    i2: &PyBellExpression,
    i3: &PyBellExpression,
) -> PyResult<(bool, Option<Vec<Vec<i8>>>)> {
    let (ok, w) = py.detach(|| lifting::compatibility_holds(&i0.inner, &i2.inner, &i3.inner)).py()?;
    Ok((ok, w.map(|s| s.outcomes().to_vec())))
}

#[pyfunction]
fn facets(py: Python<'_>, settings: Vec<usize>) -> PyResult<Vec<PyBellExpression>> {
    let sc = Scenario::new(settings).py()?;
    let fs = py.detach(|| polytope::enumerate_facets_brute(&sc)).py()?;
    Ok(fs.into_iter().map(Into::into).collect())
}

/// See-saw maximum; returns `{"value", "directions", "converged", ...}`.
#[pyfunction]
#[pyo3(signature = (expr, state, restarts = 50, seed = 0, tol = 1e-10, max_sweeps = 500))]
fn seesaw<'py>(
    py: Python<'py>,
    expr: &PyBellExpression,
    state: &PyQuantumState,
    restarts: usize,
    seed: u64,
    tol: f64,
    max_sweeps: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let config = SeesawConfig {
        restarts,
        max_sweeps,
        tol,
        seed,
    };
    let r = py
        .detach(|| quantum::violation_factor(&expr.inner, &state.inner, &config))
        .py()?;
    let d = PyDict::new(py);
    d.set_item("value", r.value)?;
    d.set_item("directions", r.settings.directions().to_vec())?;
    d.set_item("converged", r.converged)?;
    d.set_item("best_restart", r.best_restart)?;
    d.set_item("sweeps", r.sweeps)?;
    Ok(d)
}

/// Descending eigenvalues of the Bell operator at the given directions.
#[pyfunction]
fn spectrum(expr: &PyBellExpression, directions: Vec<Vec<Vec3>>) -> PyResult<Vec<f64>> {
    let s = MeasurementSettings::new(directions).py()?;
    let op = quantum::bell_operator(&expr.inner, &s).py()?;
    Ok(quantum::spectrum(&op).py()?.eigenvalues)
}

/// `Tr(rho B)` at the given directions.
#[pyfunction]
fn expectation(
    expr: &PyBellExpression,
    state: &PyQuantumState,
    directions: Vec<Vec<Vec3>>,
) -> PyResult<f64> {
    let s = MeasurementSettings::new(directions).py()?;
    let op = quantum::bell_operator(&expr.inner, &s).py()?;
    state.inner.expectation(&op).py()
}

/// Report rows as dicts; all criteria when `criteria` is None.
#[pyfunction]
#[pyo3(signature = (criteria = None, restarts = 50, seed = 0))]
fn reproduce_report<'py>(
    py: Python<'py>,
    criteria: Option<Vec<u8>>,
    restarts: usize,
    seed: u64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let config = SeesawConfig {
        restarts,
        seed,
        ..SeesawConfig::default()
    };
    let rows = py.detach(|| match criteria {
        None => reproduce::reproduce_report(&config).rows,
        Some(list) => list.iter().flat_map(|&c| reproduce::run_criterion(c, &config)).collect(),
    });
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("criterion", r.criterion)?;
            d.set_item("quantity", &r.quantity)?;
            d.set_item("reference", &r.reference)?;
            d.set_item("computed", &r.computed)?;
            d.set_item("tolerance", &r.tolerance)?;
            d.set_item("pass", r.pass)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn facetlift_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FacetliftError", m.py().get_type::<FacetliftError>())?;
    m.add("CapExceededError", m.py().get_type::<CapExceededError>())?;
    m.add_class::<PyBellExpression>()?;
    m.add_class::<PyQuantumState>()?;
    m.add_function(wrap_pyfunction!(mabk, m)?)?;
    m.add_function(wrap_pyfunction!(wbz333, m)?)?;
    m.add_function(wrap_pyfunction!(four_party_19, m)?)?;
    m.add_function(wrap_pyfunction!(symmetry_images, m)?)?;
    m.add_function(wrap_pyfunction!(lift2, m)?)?;
    m.add_function(wrap_pyfunction!(lift3, m)?)?;
    m.add_function(wrap_pyfunction!(compatibility_holds, m)?)?;
    m.add_function(wrap_pyfunction!(facets, m)?)?;
    m.add_function(wrap_pyfunction!(seesaw, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(expectation, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce_report, m)?)?;
    Ok(())
}
