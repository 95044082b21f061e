//! Python bindings for `gridrule`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use gridrule::env::{compute_reward as reward, EnvConfig, EnvService as Service, RewardMode};
use gridrule::generators::{check_unambiguous, confusion_family, sample_dataset as sample, DatasetConfig, GeneratorConfig};
use gridrule::grid::Grid as CoreGrid;
use gridrule::prompt;
use gridrule::render::{render_task as render, RenderStyle};
use gridrule::task::{self as core_task, Category, Difficulty, Split, Task as CoreTask};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A rectangular grid of color indices 0-9.
#[pyclass(frozen, eq, from_py_object, module = "gridrule")]
#[derive(Clone, PartialEq)]
struct Grid {
    inner: CoreGrid,
}

#[pymethods]
impl Grid {
    #[new]
    fn new(rows: Vec<Vec<u8>>) -> PyResult<Grid> {
        CoreGrid::from_index_rows(&rows).map(|inner| Grid { inner }).map_err(value_error)
    }

    /// Parses space- or comma-separated color names, one row per line.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Grid> {
        CoreGrid::from_text(text).map(|inner| Grid { inner }).map_err(value_error)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn to_lists(&self) -> Vec<Vec<u8>> {
        self.inner.to_index_rows()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    fn __repr__(&self) -> String {
        let (r, c) = self.inner.shape();
        format!("Grid({r}x{c})")
    }
}

/// Demonstration pairs, a test pair and the rule that produced them.
#[pyclass(frozen, module = "gridrule")]
struct Task {
    inner: CoreTask,
}

fn wrap(g: &CoreGrid) -> Grid {
    Grid { inner: g.clone() }
}

#[pymethods]
impl Task {
    #[getter]
    fn id(&self) -> String {
        self.inner.id.clone()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn category(&self) -> &'static str {
        self.inner.category().name()
    }

    #[getter]
    fn difficulty(&self) -> &'static str {
        self.inner.difficulty().name()
    }

    /// The stored rule as a JSON string.
    #[getter]
    fn rule_json(&self) -> String {
        serde_json::to_string(&self.inner.rule).expect("rules serialize")
    }

    #[getter]
    fn train_pairs(&self) -> Vec<(Grid, Grid)> {
        self.inner
            .train_pairs
            .iter()
            .map(|p| (wrap(&p.input), wrap(&p.output)))
            .collect()
    }

    #[getter]
    fn test_input(&self) -> Grid {
        wrap(&self.inner.test_input)
    }

    #[getter]
    fn test_output(&self) -> Grid {
        wrap(&self.inner.test_output)
    }

    /// Re-applies the rule to every input; raises `ValueError` on a mismatch.
    fn check_consistency(&self) -> PyResult<()> {
        self.inner.check_consistency().map_err(value_error)
    }

    fn is_unambiguous(&self) -> bool {
        check_unambiguous(&self.inner, &confusion_family(&self.inner)).unique
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("tasks serialize")
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Task> {
        serde_json::from_str(text).map(|inner| Task { inner }).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!("Task({}, {} {})", self.inner.id, self.category(), self.difficulty())
    }
}

#[pyfunction]
#[pyo3(signature = (category, difficulty, seed))]
fn generate_task(py: Python<'_>, category: &str, difficulty: &str, seed: u64) -> PyResult<Task> {
    let category: Category = category.parse().map_err(value_error)?;
    let difficulty: Difficulty = difficulty.parse().map_err(value_error)?;
    let task = py
        .detach(|| gridrule::generators::generate_task(category, difficulty, seed, &GeneratorConfig::default()))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(Task { inner: task })
}

/// Returns `(train, test)` task lists.
#[pyfunction]
#[pyo3(signature = (seed=0, train_per_category=1000, test_per_category=100))]
fn sample_dataset(
    py: Python<'_>,
    seed: u64,
    train_per_category: usize,
    test_per_category: usize,
) -> PyResult<(Vec<Task>, Vec<Task>)> {
    let cfg = DatasetConfig::with_sizes(seed, train_per_category, test_per_category);
    let data = py.detach(|| sample(&cfg)).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let wrap_all = |split| {
        data.split(split)
            .tasks
            .iter()
            .map(|t| Task { inner: t.clone() })
            .collect::<Vec<_>>()
    };
    Ok((wrap_all(Split::Train), wrap_all(Split::Test)))
}

/// PNG bytes of the stacked demonstration image.
#[pyfunction]
#[pyo3(signature = (task, cell_px=24, include_test_input=false, annotate_shapes=true))]
fn render_task<'py>(
    py: Python<'py>,
    task: &Task,
    cell_px: usize,
    include_test_input: bool,
    annotate_shapes: bool,
) -> PyResult<Bound<'py, PyBytes>> {
    let style = RenderStyle {
        cell_px,
        include_test_input,
        annotate_shapes,
        ..RenderStyle::default()
    };
    let png = py.detach(|| render(&task.inner, &style)).map_err(value_error)?;
    Ok(PyBytes::new(py, &png))
}

#[pyfunction]
fn build_prompt(test_input: &Grid) -> String {
    prompt::build_prompt(&test_input.inner)
}

/// Returns `(status, grid or None, diagnostics)` for the last fenced block.
#[pyfunction]
fn extract_answer(text: &str) -> (&'static str, Option<Grid>, String) {
    let outcome = prompt::extract_answer(text);
    (outcome.status.name(), outcome.grid.map(|inner| Grid { inner }), outcome.diagnostics)
}

#[pyfunction]
fn verify(expected: &Grid, predicted: &Grid) -> bool {
    core_task::verify(&expected.inner, &predicted.inner)
}

/// Returns `(correct, parse_status)`.
#[pyfunction]
fn score_response(task: &Task, text: &str) -> (bool, &'static str) {
    let record = gridrule::eval::score_response(&task.inner, text);
    let status = record.parse_status.map_or("parse_error", |s| s.name());
    (record.correct, status)
}

#[pyfunction]
#[pyo3(signature = (task, answer, mode="binary"))]
fn compute_reward(task: &Task, answer: &str, mode: &str) -> PyResult<f64> {
    let mode: RewardMode = mode.parse().map_err(value_error)?;
    Ok(reward(&task.inner, answer, mode))
}

/// In-process environment service speaking the line protocol.
#[pyclass(frozen, module = "gridrule")]
struct EnvService {
    inner: Service,
}

#[pymethods]
impl EnvService {
    #[new]
    #[pyo3(signature = (seed=0, reward_mode="binary", reveal_expected=false))]
    fn new(seed: u64, reward_mode: &str, reveal_expected: bool) -> PyResult<EnvService> {
        let cfg = EnvConfig {
            seed,
            reward_mode: reward_mode.parse().map_err(value_error)?,
            reveal_expected,
            ..EnvConfig::default()
        };
        Service::new(cfg).map(|inner| EnvService { inner }).map_err(PyValueError::new_err)
    }

    /// Answers one JSON request line with one JSON reply line.
    fn handle_line(&self, py: Python<'_>, line: &str) -> String {
        py.detach(|| self.inner.handle_line(line))
    }

    /// Like `handle_line` but with dicts on both sides.
    fn request<'py>(&self, py: Python<'py>, message: &Bound<'py, PyDict>) -> PyResult<Bound<'py, PyAny>> {
        let json = py.import("json")?;
        let line: String = json.call_method1("dumps", (message,))?.extract()?;
        let reply = py.detach(|| self.inner.handle_line(&line));
        json.call_method1("loads", (reply,))
    }

    /// The task awaiting an answer in `session`, if any.
    fn active_task(&self, session: &str) -> Option<Task> {
        self.inner.active_task(session).map(|inner| Task { inner })
    }
}

#[pymodule(name = "gridrule")]
mod gridrule_module {
    #[pymodule_export]
    use super::{
        build_prompt, compute_reward, extract_answer, generate_task, render_task, sample_dataset, score_response,
        verify, EnvService, Grid, Task,
    };

    #[pymodule_init]
    fn init(m: &pyo3::Bound<'_, pyo3::types::PyModule>) -> pyo3::PyResult<()> {
        use pyo3::types::PyModuleMethods;
        m.add("PROTOCOL_VERSION", gridrule::env::PROTOCOL_VERSION)?;
        m.add("__version__", env!("CARGO_PKG_VERSION"))
    }
}
