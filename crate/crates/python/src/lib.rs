//! Python bindings. Structured results come back as plain dicts and lists.

use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;
use qgap_core::amp::{
    c_of_lambda as core_c_of_lambda, verify_classical_amp, verify_quantum_amp, QuantumWalkSystem,
};
use qgap_core::corpus;
use qgap_core::detect::{self, BoundParams, SystemBounds};
use qgap_core::qsat::{self, GroundOptions};
use qgap_core::sweep::{self, SweepOptions};
use qgap_core::walks;
use qgap_core::xy::{seeded_state, ThetaOptions};
use serde::Serialize;

fn err(e: qgap_core::Error) -> PyErr {
    match e {
        qgap_core::Error::DimensionTooLarge { .. } | qgap_core::Error::EnumerationTooLarge { .. } => {
            PyOverflowError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Serializable value to Python through the `json` module.
fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Undirected simple graph on vertices `0..n`.
#[pyclass(name = "Graph", module = "qgap", frozen)]
struct PyGraph(walks::Graph);

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        walks::Graph::new(n, edges).map(Self).map_err(err)
    }

    #[staticmethod]
    fn complete(n: usize) -> Self {
        Self(walks::Graph::complete(n))
    }

    #[staticmethod]
    fn cycle(n: usize) -> Self {
        Self(walks::Graph::cycle(n))
    }

    #[staticmethod]
    fn path(n: usize) -> Self {
        Self(walks::Graph::path(n))
    }

    #[staticmethod]
    fn prism() -> Self {
        Self(walks::Graph::prism())
    }

    #[staticmethod]
    #[pyo3(signature = (n, d, seed = 0))]
    fn random_regular(n: usize, d: usize, seed: u64) -> PyResult<Self> {
        walks::random_regular(n, d, seed).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().to_vec()
    }

    /// Normalized adjacency spectrum and the expansion `lambda`.
    fn spectral<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &walks::spectral(&self.0).map_err(err)?)
    }

    /// Exact moments of the bad-step count of a uniform `t`-step walk.
    fn walk_moments<'py>(&self, py: Python<'py>, bad: Vec<usize>, t: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &walks::walk_moments(&self.0, &bad, t))
    }

    fn walk_count(&self, t: usize) -> u128 {
        walks::walk_count(&self.0, t)
    }

    fn to_json(&self) -> PyResult<String> {
        let bytes = self.0.to_json().map_err(err)?;
        Ok(String::from_utf8_lossy(&bytes).into_owned())
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        walks::Graph::from_json(text.as_bytes()).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.0.n(), self.0.m())
    }
}

/// A layered system of projector constraints on qudits.
#[pyclass(name = "QSatSystem", module = "qgap", frozen)]
struct PySystem(qsat::QSatSystem);

#[pymethods]
impl PySystem {
    /// Parses the `.qsat.json` format and fills in layers when absent.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let sys = qsat::load_instance(text.as_bytes()).map_err(err)?;
        let report = sys.validate();
        if !report.is_valid() {
            let issues = serde_json::to_string(&report.issues).unwrap_or_default();
            return Err(PyValueError::new_err(format!("invalid instance: {issues}")));
        }
        Ok(Self(sys.layered()))
    }

    fn to_json(&self) -> PyResult<String> {
        let bytes = self.0.to_json().map_err(err)?;
        Ok(String::from_utf8_lossy(&bytes).into_owned())
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn g(&self) -> usize {
        self.0.g()
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.0.dims().to_vec()
    }

    #[getter]
    fn layers(&self) -> Option<Vec<Vec<usize>>> {
        self.0.layers().cloned()
    }

    /// Structural issues; empty for a valid instance.
    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.validate().issues)
    }

    #[pyo3(signature = (dense_cap = None))]
    fn ground_energy(&self, py: Python<'_>, dense_cap: Option<usize>) -> PyResult<f64> {
        let mut opts = GroundOptions::default();
        if let Some(c) = dense_cap {
            opts.dense_cap = c;
        }
        py.detach(|| self.0.ground_state(&opts).map(|(e, _)| e))
            .map_err(err)
    }

    /// `epsilon0`, θ, `f1`, `f`, `r`, `g`, `k` and `delta_sq` for one `ell`.
    #[pyo3(signature = (ell = 0, cap = None))]
    fn bounds<'py>(&self, py: Python<'py>, ell: usize, cap: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        let b = py.detach(|| system_bounds(&self.0, cap)).map_err(err)?;
        to_py(py, &bounds_dict(&b, ell))
    }

    /// Aux and detectability checks on `trials` random states.
    #[pyo3(signature = (ell = 0, trials = 20, seed = 0))]
    fn detect<'py>(
        &self,
        py: Python<'py>,
        ell: usize,
        trials: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let sys = &self.0;
        let reps = py
            .detach(|| {
                let b = system_bounds(sys, None)?;
                let psis: Vec<_> = (0..trials)
                    .map(|i| seeded_state(sys.total_dim(), seed, i as u64))
                    .collect();
                Ok::<_, qgap_core::Error>(vec![
                    detect::verify_aux(sys, &b, ell, &psis)?,
                    detect::verify_detectability(sys, &b, ell, &psis)?,
                ])
            })
            .map_err(err)?;
        to_py(py, &reps)
    }

    /// The principal-angle chain for a two-layer system.
    fn kitaev<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let k = py
            .detach(|| detect::kitaev_check(&self.0, &system_bounds(&self.0, None)?))
            .map_err(err)?;
        to_py(py, &k)
    }

    fn __repr__(&self) -> String {
        format!("QSatSystem(n={}, m={}, g={})", self.0.n(), self.0.m(), self.0.g())
    }
}

fn system_bounds(sys: &qsat::QSatSystem, cap: Option<u64>) -> qgap_core::Result<SystemBounds> {
    let mut opts = ThetaOptions::default();
    if let Some(c) = cap {
        opts.cap = c;
    }
    SystemBounds::compute(sys, &opts)
}

fn bounds_dict(b: &SystemBounds, ell: usize) -> serde_json::Value {
    let p = b.params(ell);
    serde_json::json!({
        "epsilon0": b.epsilon0, "theta": b.theta, "theta_exact": b.theta_exact,
        "k": b.k, "g": b.g, "f1": b.f1, "f": b.f,
        "r": (b.r != usize::MAX).then_some(b.r), "ell": ell,
        "regime_valid": p.regime_valid(),
        "delta_sq": if p.theta_exact { detect::delta_sq(&p).ok() } else { None },
    })
}

/// Anti-agreement constraints `sum_x |xx><xx|` on every edge.
#[pyfunction]
#[pyo3(signature = (graph, q = 2))]
fn diagonal_neq(graph: &PyGraph, q: usize) -> PyResult<PySystem> {
    corpus::diagonal_neq(&graph.0, q).map(PySystem).map_err(err)
}

/// Projector onto `cos a |00> + sin a |11>` on every edge.
#[pyfunction]
fn rank1_entangled(graph: &PyGraph, angle: f64) -> PyResult<PySystem> {
    corpus::rank1_entangled(&graph.0, angle)
        .map(PySystem)
        .map_err(err)
}

/// Haar-random rank-`rank` qubit-pair projectors.
#[pyfunction]
#[pyo3(signature = (graph, rank = 1, seed = 0))]
fn random_edge_system(graph: &PyGraph, rank: usize, seed: u64) -> PyResult<PySystem> {
    corpus::random_edge_system(&graph.0, rank, seed)
        .map(PySystem)
        .map_err(err)
}

/// Smallest `r` meeting the pyramid-size condition for `(theta, k, g)`.
#[pyfunction]
fn find_r(theta: f64, k: usize, g: usize) -> PyResult<usize> {
    detect::find_r(theta, k, g).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (theta, epsilon0, k, g, f, r, ell = 0))]
fn delta_sq(theta: f64, epsilon0: f64, k: usize, g: usize, f: usize, r: usize, ell: usize) -> PyResult<f64> {
    let p = BoundParams {
        epsilon0,
        theta,
        theta_exact: true,
        k,
        g,
        f,
        r,
        ell,
    };
    detect::delta_sq(&p).map_err(err)
}

/// The amplification constant `c(lambda)` of a graph with expansion `lambda`.
#[pyfunction]
fn c_of_lambda(lam: f64) -> PyResult<f64> {
    core_c_of_lambda(lam).map_err(err)
}

/// Classical amplification rows for a planted CSP on `graph`.
#[pyfunction]
#[pyo3(signature = (graph, t = 4, trials = 20, seed = 0, q = 3, density = 0.3))]
fn classical_amp<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    t: usize,
    trials: usize,
    seed: u64,
    q: usize,
    density: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let (csp, planted) = corpus::planted_csp(&graph.0, q, density, seed);
    let sigmas = corpus::mixed_assignments(&planted, q, trials, seed.wrapping_add(1));
    let reps = py
        .detach(|| {
            let mut out = Vec::new();
            for (i, sigma) in sigmas.iter().enumerate() {
                for tt in 1..=t {
                    out.push(verify_classical_amp(&csp, sigma, tt, i)?);
                }
            }
            Ok::<_, qgap_core::Error>(out)
        })
        .map_err(err)?;
    to_py(py, &reps)
}

/// Quantum amplification report for an edge system on a regular graph.
#[pyfunction]
#[pyo3(signature = (graph, system, t_max = 3))]
fn quantum_amp<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    system: &PySystem,
    t_max: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let rep = py
        .detach(|| {
            let qws = QuantumWalkSystem::new(graph.0.clone(), system.0.clone())?;
            let b = system_bounds(qws.base(), None)?;
            verify_quantum_amp(&qws, t_max, &b)
        })
        .map_err(err)?;
    let passed = rep.passed();
    let out = to_py(py, &rep)?;
    out.set_item("passed", passed)?;
    Ok(out)
}

/// Every harness over the pinned corpus; a list of `{instance, report}`.
#[pyfunction]
#[pyo3(signature = (trials = 20, seed = 0))]
fn verify_all<'py>(py: Python<'py>, trials: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let opts = SweepOptions {
        trials,
        seed,
        ..SweepOptions::default()
    };
    let entries = py.detach(|| sweep::verify_all(&opts)).map_err(err)?;
    to_py(py, &entries)
}

#[pymodule]
fn qgap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PySystem>()?;
    m.add_function(wrap_pyfunction!(diagonal_neq, m)?)?;
    m.add_function(wrap_pyfunction!(rank1_entangled, m)?)?;
    m.add_function(wrap_pyfunction!(random_edge_system, m)?)?;
    m.add_function(wrap_pyfunction!(find_r, m)?)?;
    m.add_function(wrap_pyfunction!(delta_sq, m)?)?;
    m.add_function(wrap_pyfunction!(c_of_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(classical_amp, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_amp, m)?)?;
    m.add_function(wrap_pyfunction!(verify_all, m)?)?;
    Ok(())
}
