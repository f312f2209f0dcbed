//! Python bindings. Structured results come back as plain dicts and lists
//! with the same keys as the CLI's JSON reports.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use so4_core::dynamics::{integrate_sampled, probe_stability, ProbeConfig};
use so4_core::equilibria::cartan_point;
use so4_core::lyapunov::{self, BifurcationOptions};
use so4_core::spectral::{self, f_tilde};
use so4_core::verify::{self, VerifyOptions};
use so4_core::{IntegralId, So4State};

create_exception!(so4, InputError, PyValueError, "Invalid spectrum, orbit or argument.");
create_exception!(so4, NumericalError, PyRuntimeError, "A numerical procedure failed.");

fn err(e: so4_core::Error) -> PyErr {
    if e.is_numerical() {
        NumericalError::new_err(e.to_string())
    } else {
        InputError::new_err(e.to_string())
    }
}

/// Serializes through JSON so that Python sees dicts, lists and floats.
fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Inertia spectrum `λ1 > λ2 > λ3 > λ4` with `λ3 + λ4 > 0`.
#[pyclass(module = "so4", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct Spectrum(so4_core::InertiaSpectrum);

#[pymethods]
impl Spectrum {
    #[new]
    fn new(l1: f64, l2: f64, l3: f64, l4: f64) -> PyResult<Self> {
        so4_core::InertiaSpectrum::new(l1, l2, l3, l4).map(Spectrum).map_err(err)
    }

    /// `(4, 3, 2, 1)`.
    #[staticmethod]
    fn reference() -> Self {
        Spectrum(so4_core::InertiaSpectrum::reference())
    }

    #[getter]
    fn lam(&self) -> [f64; 4] {
        self.0.as_array()
    }

    /// The thresholds `(α1, α2)` in `r = b²/a²`.
    fn alphas(&self) -> (f64, f64) {
        let ft = f_tilde(&self.0);
        (ft.alpha1, ft.alpha2)
    }

    fn __repr__(&self) -> String {
        let [a, b, c, d] = self.0.as_array();
        format!("Spectrum({a}, {b}, {c}, {d})")
    }
}

/// Regular adjoint orbit `C1 = c1`, `C2 = c2` with `c1 > |c2|`.
#[pyclass(module = "so4", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct Orbit(so4_core::OrbitParams);

#[pymethods]
impl Orbit {
    #[new]
    fn new(c1: f64, c2: f64) -> PyResult<Self> {
        so4_core::OrbitParams::new(c1, c2).map(Orbit).map_err(err)
    }

    /// The orbit through the Cartan point with parameters `(a, b)`.
    #[staticmethod]
    fn from_ab(a: f64, b: f64) -> PyResult<Self> {
        so4_core::OrbitParams::from_ab(a, b).map(Orbit).map_err(err)
    }

    /// The orbit with `b²/a² = r` and `C1 = c1`.
    #[staticmethod]
    #[pyo3(signature = (r, c1 = 1.0))]
    fn from_ratio(r: f64, c1: f64) -> PyResult<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(err(so4_core::Error::RatioOutOfRange(r)));
        }
        let a = (2.0 * c1 / (1.0 + r)).sqrt();
        Self::from_ab(a, a * r.sqrt())
    }

    #[getter]
    fn c1(&self) -> f64 {
        self.0.c1()
    }

    #[getter]
    fn c2(&self) -> f64 {
        self.0.c2()
    }

    /// `(a, b)` with `a > |b|`.
    #[getter]
    fn ab(&self) -> (f64, f64) {
        so4_core::ab_from_orbit(&self.0)
    }

    /// The twelve Cartan equilibria, `t1`, `t2`, `t3` in turn.
    fn equilibria(&self) -> Vec<Equilibrium> {
        so4_core::cartan_equilibria(&self.0).into_iter().map(Equilibrium).collect()
    }

    /// One Cartan point by label, e.g. `"M1(b,a)"`.
    fn point(&self, label: &str) -> PyResult<Equilibrium> {
        self.equilibria()
            .into_iter()
            .find(|e| e.0.label() == label)
            .ok_or_else(|| InputError::new_err(format!("no Cartan point labelled {label:?}")))
    }

    fn __repr__(&self) -> String {
        format!("Orbit({}, {})", self.0.c1(), self.0.c2())
    }
}

#[pyclass(module = "so4", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct Equilibrium(so4_core::Equilibrium);

#[pymethods]
impl Equilibrium {
    #[getter]
    fn label(&self) -> String {
        self.0.label()
    }

    /// `"T1"`, `"T2"` or `"T3"`.
    #[getter]
    fn family(&self) -> String {
        format!("{:?}", self.0.family)
    }

    #[getter]
    fn state(&self) -> [f64; 6] {
        self.0.state.0
    }

    fn __repr__(&self) -> String {
        format!("Equilibrium({}, state={:?})", self.0.label(), self.0.state.0)
    }
}

fn integral_id(name: &str) -> PyResult<IntegralId> {
    IntegralId::ALL
        .iter()
        .copied()
        .find(|id| id.name() == name)
        .ok_or_else(|| InputError::new_err(format!("unknown integral {name:?}")))
}

/// Right-hand side of `Ṁ = [M, Ω]`.
#[pyfunction]
fn vector_field(lam: &Spectrum, state: [f64; 6]) -> [f64; 6] {
    so4_core::vector_field(&So4State(state), &lam.0).0
}

/// Value of `H`, `C1`, `C2`, `I` or `G1`..`G4` at `state`.
#[pyfunction]
fn integral(name: &str, lam: &Spectrum, state: [f64; 6]) -> PyResult<f64> {
    Ok(so4_core::integral_value(integral_id(name)?, &So4State(state), &lam.0))
}

/// Lie–Poisson bracket of two named integrals at `state`.
#[pyfunction]
fn poisson_bracket(f: &str, g: &str, lam: &Spectrum, state: [f64; 6]) -> PyResult<f64> {
    Ok(so4_core::poisson_bracket(integral_id(f)?, integral_id(g)?, &So4State(state), &lam.0))
}

/// Spectral verdict, eigenstructure and eigenvalues of a Cartan point.
#[pyfunction]
fn classify(py: Python<'_>, lam: &Spectrum, eq: &Equilibrium) -> PyResult<Py<PyAny>> {
    to_py(py, &spectral::classify_equilibrium(&eq.0, &lam.0).map_err(err)?)
}

/// Closed-form analysis of `M1(b,a)` on the orbit of `(a, b)`.
#[pyfunction]
fn classify_bifurcating(py: Python<'_>, lam: &Spectrum, a: f64, b: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &spectral::classify_spectral(&lam.0, a, b).map_err(err)?)
}

/// Lyapunov certificate, or the reason there is none.
#[pyfunction]
#[pyo3(signature = (lam, eq, p = None))]
fn certify(py: Python<'_>, lam: &Spectrum, eq: &Equilibrium, p: Option<f64>) -> PyResult<Py<PyAny>> {
    let opts = BifurcationOptions { p_override: p, boundary: None };
    to_py(py, &lyapunov::certify_equilibrium(&eq.0, &lam.0, &opts).map_err(err)?)
}

/// Feasible `p` interval for the `H + κ p I` family at `M1(b,a)`.
#[pyfunction]
fn p_interval(py: Python<'_>, lam: &Spectrum, a: f64, b: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &lyapunov::p_interval(&lam.0, a, b).map_err(err)?)
}

#[derive(Serialize)]
struct Trajectory {
    times: Vec<f64>,
    trajectory: Vec<So4State>,
    drift: so4_core::dynamics::Drift,
    steps: usize,
}

/// Fixed-step RK4 run. Returns `times`, `trajectory`, `drift` and `steps`.
#[pyfunction]
#[pyo3(signature = (lam, state, step, horizon, sample_every = 1))]
fn integrate(
    py: Python<'_>,
    lam: &Spectrum,
    state: [f64; 6],
    step: f64,
    horizon: f64,
    sample_every: usize,
) -> PyResult<Py<PyAny>> {
    let (lam, m0) = (lam.0, So4State(state));
    let rep = py.detach(|| integrate_sampled(&m0, &lam, step, horizon, sample_every.max(1))).map_err(err)?;
    to_py(py, &Trajectory { times: rep.times, trajectory: rep.trajectory, drift: rep.drift, steps: rep.steps })
}

/// Perturbation probe around `eq`; defaults match the CLI.
#[pyfunction]
#[pyo3(signature = (lam, eq, seed = 0, samples = 64, horizon = 200.0, escape_factor = 10.0))]
fn probe(
    py: Python<'_>,
    lam: &Spectrum,
    eq: &Equilibrium,
    seed: u64,
    samples: usize,
    horizon: f64,
    escape_factor: f64,
) -> PyResult<Py<PyAny>> {
    let cfg = ProbeConfig { samples, horizon, escape_factor, ..ProbeConfig::for_equilibrium(&eq.0, seed) };
    let (lam, eq) = (lam.0, eq.0);
    to_py(py, &py.detach(|| probe_stability(&eq, &lam, &cfg)).map_err(err)?)
}

/// Self-check suites; the result has `suites` and a `passed` flag per suite.
#[pyfunction]
#[pyo3(signature = (lam, samples = 200, seed = 2024))]
fn verify_suites(py: Python<'_>, lam: &Spectrum, samples: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let opts = VerifyOptions { samples, seed, fault: None };
    let lam = lam.0;
    let report = py.detach(|| verify::run_all(&lam, &opts)).map_err(err)?;
    let passed = report.passed();
    let out = to_py(py, &report)?;
    out.bind(py).set_item("passed", passed)?;
    Ok(out)
}

/// Cartan point of `family` (1, 2 or 3) at Weyl image `weyl`, e.g. `"b,a"`.
#[pyfunction]
fn cartan(orbit: &Orbit, family: u8, weyl: &str) -> PyResult<Equilibrium> {
    use so4_core::{EquilibriumFamily, WeylImage};
    let family = match family {
        1 => EquilibriumFamily::T1,
        2 => EquilibriumFamily::T2,
        3 => EquilibriumFamily::T3,
        _ => return Err(InputError::new_err(format!("family must be 1, 2 or 3, got {family}"))),
    };
    let weyl = match weyl {
        "a,b" => WeylImage::Identity,
        "-a,-b" => WeylImage::Negated,
        "b,a" => WeylImage::Swapped,
        "-b,-a" => WeylImage::SwappedNegated,
        _ => return Err(InputError::new_err(format!("weyl must be one of a,b  -a,-b  b,a  -b,-a; got {weyl:?}"))),
    };
    cartan_point(&orbit.0, family, weyl).map(Equilibrium).map_err(err)
}

#[pymodule]
fn so4(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("InputError", m.py().get_type::<InputError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<Spectrum>()?;
    m.add_class::<Orbit>()?;
    m.add_class::<Equilibrium>()?;
    m.add_function(wrap_pyfunction!(vector_field, m)?)?;
    m.add_function(wrap_pyfunction!(integral, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(classify_bifurcating, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(p_interval, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(probe, m)?)?;
    m.add_function(wrap_pyfunction!(verify_suites, m)?)?;
    m.add_function(wrap_pyfunction!(cartan, m)?)?;
    Ok(())
}
