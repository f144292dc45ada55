//! Python bindings. Permutations are one-based on this side, matching the
//! JSON documents; vertex indices are zero-based like Python sequences.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use simplex_reach::generators::{self, EnergySpec};
use simplex_reach::propagate::{self, Segment};
use simplex_reach::{simplex, steering, verify};
use simplex_reach::{ControlSchedule, Temperature};

fn err(e: simplex_reach::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serializes through JSON into plain Python objects.
fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(json_err)?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

fn temperature(t: f64) -> PyResult<Temperature> {
    if t == f64::INFINITY {
        Ok(Temperature::InfiniteLimit)
    } else if t == 0.0 {
        Ok(Temperature::ZeroLimit)
    } else if t > 0.0 && t.is_finite() {
        Ok(Temperature::Finite(t))
    } else {
        Err(PyValueError::new_err(format!("temperature must be positive, 0 or inf, got {t}")))
    }
}

/// Probability vector: nonnegative entries summing to one.
#[pyclass(name = "SimplexVector", module = "simplex_reach", frozen, eq)]
#[derive(Clone, PartialEq)]
struct PySimplexVector(simplex::SimplexVector);

#[pymethods]
impl PySimplexVector {
    #[new]
    fn new(entries: Vec<f64>) -> PyResult<Self> {
        simplex::SimplexVector::new(entries).map(Self).map_err(err)
    }

    #[staticmethod]
    fn uniform(n: usize) -> PyResult<Self> {
        simplex::SimplexVector::uniform(n).map(Self).map_err(err)
    }

    #[staticmethod]
    fn vertex(n: usize, index: usize) -> PyResult<Self> {
        simplex::SimplexVector::vertex(n, index).map(Self).map_err(err)
    }

    #[getter]
    fn entries(&self) -> Vec<f64> {
        self.0.as_slice().to_vec()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.dim()
    }

    fn __len__(&self) -> usize {
        self.0.dim()
    }

    fn __repr__(&self) -> String {
        format!("SimplexVector({:?})", self.0.as_slice())
    }

    /// True if this vector majorizes `d`.
    fn majorizes(&self, d: &PySimplexVector) -> PyResult<bool> {
        simplex::majorizes(&self.0, &d.0).map_err(err)
    }

    fn l1_distance(&self, other: &PySimplexVector) -> PyResult<f64> {
        simplex::l1_distance(&self.0, &other.0).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(json_err)
    }
}

/// Permutation of levels, given by its one-based image list.
#[pyclass(name = "Permutation", module = "simplex_reach", frozen, eq)]
#[derive(Clone, PartialEq)]
struct PyPermutation(simplex::Permutation);

#[pymethods]
impl PyPermutation {
    #[new]
    fn new(image: Vec<usize>) -> PyResult<Self> {
        simplex::Permutation::from_one_based(&image).map(Self).map_err(err)
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        Self(simplex::Permutation::identity(n))
    }

    #[getter]
    fn image(&self) -> Vec<usize> {
        self.0.to_one_based()
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    /// `self` followed by `next`.
    fn then(&self, next: &PyPermutation) -> PyResult<Self> {
        self.0.then(&next.0).map(Self).map_err(err)
    }

    fn apply(&self, x: &PySimplexVector) -> PyResult<PySimplexVector> {
        simplex::apply_permutation(&self.0, &x.0).map(PySimplexVector).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Permutation({:?})", self.0.to_one_based())
    }
}

/// Generator B of the flow exp(-tB): zero column sums, nonpositive
/// off-diagonal entries.
#[pyclass(name = "Generator", module = "simplex_reach", frozen)]
#[derive(Clone)]
struct PyGenerator(generators::GeneratorMatrix);

#[pymethods]
impl PyGenerator {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("generator must be square"));
        }
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        generators::GeneratorMatrix::new(m).map(Self).map_err(err)
    }

    /// Zero-temperature chain on n levels.
    #[staticmethod]
    fn zero_temperature(n: usize) -> PyResult<Self> {
        generators::b0_zero_temperature(n).map(Self).map_err(err)
    }

    /// Thermal chain whose fixed point is `d`.
    #[staticmethod]
    fn thermal(d: &PySimplexVector) -> PyResult<Self> {
        let model = generators::thermal_model(&d.0).map_err(err)?;
        generators::b0_thermal(&model).map(Self).map_err(err)
    }

    /// Zero-temperature chain of `core_n` levels acting on each of `copies` sites.
    #[staticmethod]
    fn lifted(core_n: usize, copies: usize) -> PyResult<Self> {
        steering::theorem2_generator(core_n, copies).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<f64>> {
        let m = self.0.matrix();
        (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
    }

    fn norm1(&self) -> f64 {
        self.0.norm1()
    }

    fn fixed_point(&self) -> PyResult<PySimplexVector> {
        generators::fixed_point(&self.0).map(PySimplexVector).map_err(err)
    }

    /// State after dwelling for time t.
    fn evolve(&self, x: &PySimplexVector, t: f64) -> PyResult<PySimplexVector> {
        propagate::evolve(&self.0, &x.0, t).map(PySimplexVector).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Generator(n={})", self.0.dim())
    }
}

/// Sequence of (duration, permutation) segments: dwell, then permute.
#[pyclass(name = "Schedule", module = "simplex_reach", frozen)]
#[derive(Clone)]
struct PySchedule(ControlSchedule);

#[pymethods]
impl PySchedule {
    #[new]
    fn new(segments: Vec<(f64, PyPermutation)>) -> PyResult<Self> {
        let segs = segments
            .into_iter()
            .map(|(duration, p)| Segment {
                duration,
                permutation: p.0,
            })
            .collect();
        ControlSchedule::new(segs).map(Self).map_err(err)
    }

    #[getter]
    fn segments(&self) -> Vec<(f64, PyPermutation)> {
        self.0
            .segments
            .iter()
            .map(|s| (s.duration, PyPermutation(s.permutation.clone())))
            .collect()
    }

    fn total_duration(&self) -> f64 {
        self.0.total_duration()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(json_err)
    }
}

/// Synthesized control plan with its error bound and timing diagnostics.
#[pyclass(name = "SteeringPlan", module = "simplex_reach", frozen)]
#[derive(Clone)]
struct PySteeringPlan(steering::SteeringPlan);

#[pymethods]
impl PySteeringPlan {
    #[getter]
    fn schedule(&self) -> PySchedule {
        PySchedule(self.0.schedule.clone())
    }

    #[getter]
    fn predicted_error(&self) -> f64 {
        self.0.predicted_error
    }

    fn total_duration(&self) -> f64 {
        self.0.total_duration()
    }

    fn dwell_count(&self) -> usize {
        self.0.dwell_count()
    }

    fn impulse_count(&self) -> usize {
        self.0.impulse_count()
    }

    /// Full plan as plain Python objects.
    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(json_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "SteeringPlan(segments={}, duration={}, predicted_error={:e})",
            self.0.schedule.len(),
            self.0.total_duration(),
            self.0.predicted_error
        )
    }
}

/// Gibbs populations for nondecreasing energies; temperature may be 0 or inf.
#[pyfunction]
fn gibbs(energies: Vec<f64>, temperature: f64) -> PyResult<PySimplexVector> {
    let spec = EnergySpec::new(energies, self::temperature(temperature)?).map_err(err)?;
    generators::gibbs_vector(&spec).map(PySimplexVector).map_err(err)
}

/// Vector with constant neighbour ratio alpha.
#[pyfunction]
fn equidistant_gibbs(alpha: f64, n: usize) -> PyResult<PySimplexVector> {
    generators::equidistant_gibbs(alpha, n).map(PySimplexVector).map_err(err)
}

/// Exact plan from the ground state of a zero-temperature chain.
#[pyfunction]
fn steer_from_ground(b: &PyGenerator, target: &PySimplexVector) -> PyResult<PySteeringPlan> {
    steering::steer_from_ground(&b.0, &target.0).map(PySteeringPlan).map_err(err)
}

/// Relax towards the ground state, then steer; arbitrary start.
#[pyfunction]
fn plan_relax_and_steer(
    b: &PyGenerator,
    x0: &PySimplexVector,
    target: &PySimplexVector,
    eps: f64,
) -> PyResult<PySteeringPlan> {
    steering::plan_theorem1(&b.0, &x0.0, &target.0, eps).map(PySteeringPlan).map_err(err)
}

/// Plan for the lifted chain of `copies` sites with `core_n` levels each.
#[pyfunction]
fn plan_lifted(
    core_n: usize,
    copies: usize,
    x0: &PySimplexVector,
    target: &PySimplexVector,
    eps: f64,
) -> PyResult<PySteeringPlan> {
    steering::plan_theorem2(core_n, copies, &x0.0, &target.0, eps)
        .map(PySteeringPlan)
        .map_err(err)
}

/// Simulated l1 distance between the plan's end state and the target.
#[pyfunction]
fn verify_plan(
    b: &PyGenerator,
    x0: &PySimplexVector,
    plan: &PySteeringPlan,
    target: &PySimplexVector,
) -> PyResult<f64> {
    steering::verify_plan(&b.0, &x0.0, &plan.0, &target.0).map_err(err)
}

/// Sampled trajectory as a dict with `samples`, `events` and `final_state`.
#[pyfunction]
#[pyo3(signature = (b, x0, schedule, sample_step=None))]
fn run_schedule<'py>(
    py: Python<'py>,
    b: &PyGenerator,
    x0: &PySimplexVector,
    schedule: &PySchedule,
    sample_step: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let step = sample_step.unwrap_or_else(|| propagate::default_sample_step(&schedule.0));
    let t = propagate::run_schedule(&b.0, &x0.0, &schedule.0, step).map_err(err)?;
    to_py(py, &t)
}

/// Randomized check of the majorization bound along controlled trajectories.
#[pyfunction]
#[pyo3(signature = (d, trials=1000, seed=0, mu=None, x0=None))]
fn bound_sweep<'py>(
    py: Python<'py>,
    d: &PySimplexVector,
    trials: usize,
    seed: u64,
    mu: Option<f64>,
    x0: Option<PySimplexVector>,
) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = verify::SweepConfig::new(d.0.clone(), trials, seed);
    cfg.mu = mu;
    cfg.x0 = x0.map(|x| x.0);
    let report = py.allow_threads(|| verify::thm3_bound_sweep(&cfg)).map_err(err)?;
    to_py(py, &report)
}

/// Reproductions of the worked examples, keyed by name.
#[pyfunction]
fn reproduce_examples<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    let e1 = verify::repro_example1().map_err(err)?;
    let e3 = verify::repro_example3().map_err(err)?;
    to_py(py, &[(&e1.name.clone(), e1), (&e3.name.clone(), e3)].into_iter().collect::<std::collections::BTreeMap<_, _>>())
}

/// Whether x lies in the reachable set of a two-level system.
#[pyfunction]
fn qubit_reachable(x0: &PySimplexVector, d: &PySimplexVector, x: &PySimplexVector) -> PyResult<bool> {
    verify::qubit_reachable_bound(&x0.0, &d.0, &x.0).map_err(err)
}

#[pymodule]
#[pyo3(name = "simplex_reach")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", simplex_reach::VERSION)?;
    m.add_class::<PySimplexVector>()?;
    m.add_class::<PyPermutation>()?;
    m.add_class::<PyGenerator>()?;
    m.add_class::<PySchedule>()?;
    m.add_class::<PySteeringPlan>()?;
    m.add_function(wrap_pyfunction!(gibbs, m)?)?;
    m.add_function(wrap_pyfunction!(equidistant_gibbs, m)?)?;
    m.add_function(wrap_pyfunction!(steer_from_ground, m)?)?;
    m.add_function(wrap_pyfunction!(plan_relax_and_steer, m)?)?;
    m.add_function(wrap_pyfunction!(plan_lifted, m)?)?;
    m.add_function(wrap_pyfunction!(verify_plan, m)?)?;
    m.add_function(wrap_pyfunction!(run_schedule, m)?)?;
    m.add_function(wrap_pyfunction!(bound_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce_examples, m)?)?;
    m.add_function(wrap_pyfunction!(qubit_reachable, m)?)?;
    Ok(())
}
