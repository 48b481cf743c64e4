//! Python bindings: exact angles and the unmating pipeline on map files.
//!
//! Structured results cross the boundary as the same JSON documents the CLI
//! prints, decoded into plain Python dicts and lists.

use pyo3::basic::CompareOp;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use unmate::circle::{self, Angle};
use unmate::complex::{self, MapSpec};
use unmate::laminations::AngleClasses;
use unmate::pipeline::{self, PipelineOptions};
use unmate::render::{render_svg, SvgScene};

create_exception!(unmate_py, UnmateError, PyException);

fn to_py(e: unmate::Error) -> PyErr {
    UnmateError::new_err(format!("[{}] {e}", e.stage().name()))
}

fn to_python<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (value.to_string(),))
}

fn parse_angle(text: &str) -> PyResult<Angle> {
    text.parse().map_err(|e: unmate::Error| PyValueError::new_err(e.to_string()))
}

/// A point of ℝ/ℤ as an exact fraction in [0, 1).
#[pyclass(name = "Angle", module = "unmate_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyAngle(Angle);

#[pymethods]
impl PyAngle {
    /// `Angle("5/24")`, `Angle(5, 24)` or `Angle(0)`.
    #[new]
    #[pyo3(signature = (value, denom = None))]
    fn new(value: &Bound<'_, PyAny>, denom: Option<i64>) -> PyResult<PyAngle> {
        if let Ok(text) = value.extract::<String>() {
            return parse_angle(&text).map(PyAngle);
        }
        let numer: i64 = value.extract()?;
        let denom = denom.unwrap_or(1);
        if denom == 0 {
            return Err(PyValueError::new_err("zero denominator"));
        }
        Ok(PyAngle(Angle::new(numer, denom)))
    }

    #[getter]
    fn numerator(&self) -> String {
        self.0.numer().to_string()
    }

    #[getter]
    fn denominator(&self) -> String {
        self.0.denom().to_string()
    }

    fn q_apply(&self, degree: u32) -> PyResult<PyAngle> {
        check_degree(degree)?;
        Ok(PyAngle(circle::q_apply(&self.0, degree)))
    }

    fn preimages(&self, degree: u32) -> PyResult<Vec<PyAngle>> {
        check_degree(degree)?;
        Ok(circle::q_preimages(&self.0, degree).into_iter().map(PyAngle).collect())
    }

    /// `(preperiod, period)` under `t ↦ d·t`.
    fn orbit_signature(&self, degree: u32) -> PyResult<(usize, usize)> {
        check_degree(degree)?;
        let sig = circle::orbit_signature(&self.0, degree);
        Ok((sig.preperiod, sig.period))
    }

    fn __float__(&self) -> f64 {
        self.0.to_f64()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Angle('{}')", self.0)
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.0.hash(&mut h);
        h.finish()
    }

    fn __richcmp__(&self, other: &PyAngle, op: CompareOp) -> bool {
        op.matches(self.0.cmp(&other.0))
    }
}

fn check_degree(degree: u32) -> PyResult<()> {
    if degree < 2 {
        Err(PyValueError::new_err("degree must be at least 2"))
    } else {
        Ok(())
    }
}

/// Whether the chords `{a, b}` and `{c, d}` cross in the open disk.
#[pyfunction]
fn is_linked(a: &str, b: &str, c: &str, d: &str) -> PyResult<bool> {
    let leaf = |x: &str, y: &str| -> PyResult<circle::Leaf> {
        circle::Leaf::new(parse_angle(x)?, parse_angle(y)?)
            .ok_or_else(|| PyValueError::new_err("leaf endpoints must differ"))
    };
    Ok(circle::is_linked(&leaf(a, b)?, &leaf(c, d)?))
}

/// A parsed map description.
#[pyclass(name = "MapSpec", module = "unmate_py", frozen)]
struct PyMapSpec(MapSpec);

fn side_classes(result: &unmate::PipelineResult, depth: usize, side: &str) -> PyResult<AngleClasses> {
    let level = result
        .level(depth.max(1))
        .ok_or_else(|| PyValueError::new_err("depth not computed"))?;
    match side {
        "w" | "white" => Ok(level.white.clone()),
        "b" | "black" => Ok(level.black.clone()),
        "join" => Ok(level.join.clone()),
        other => Err(PyValueError::new_err(format!("unknown side {other:?}"))),
    }
}

#[pymethods]
impl PyMapSpec {
    #[staticmethod]
    fn load(path: &str) -> PyResult<PyMapSpec> {
        complex::load(path).map(PyMapSpec).map_err(to_py)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<PyMapSpec> {
        complex::parse(text.as_bytes()).map(PyMapSpec).map_err(to_py)
    }

    #[getter]
    fn degree(&self) -> u32 {
        self.0.degree
    }

    #[getter]
    fn post(&self) -> Vec<String> {
        self.0.post.clone()
    }

    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let report = complex::validate(&self.0);
        to_python(py, &serde_json::to_value(&report).expect("serializable"))
    }

    fn matrix<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        pipeline::require_valid(&self.0).map_err(to_py)?;
        let (m, l) = pipeline::spectral_stage(&self.0).map_err(to_py)?;
        to_python(py, &pipeline::matrix_json(&m, &l))
    }

    #[pyo3(signature = (branch = 0))]
    fn parameters<'py>(&self, py: Python<'py>, branch: u32) -> PyResult<Bound<'py, PyAny>> {
        pipeline::require_valid(&self.0).map_err(to_py)?;
        let (_, l) = pipeline::spectral_stage(&self.0).map_err(to_py)?;
        let (t, s) = pipeline::parameter_stage(&self.0, &l, branch).map_err(to_py)?;
        to_python(py, &pipeline::parameters_json(&self.0.marker_labels(), &t, &s))
    }

    #[pyo3(signature = (branch = 0, depth = 3))]
    fn unmate<'py>(&self, py: Python<'py>, branch: u32, depth: usize) -> PyResult<Bound<'py, PyAny>> {
        let result = unmate::run_pipeline(&self.0, PipelineOptions { branch, depth }).map_err(to_py)?;
        to_python(py, &result.to_json())
    }

    #[pyo3(signature = (depth = 3, side = "join", branch = 0))]
    fn lamination<'py>(&self, py: Python<'py>, depth: usize, side: &str, branch: u32) -> PyResult<Bound<'py, PyAny>> {
        let result = unmate::run_pipeline(&self.0, PipelineOptions { branch, depth }).map_err(to_py)?;
        to_python(py, &pipeline::lamination_json(&side_classes(&result, depth, side)?))
    }

    #[pyo3(signature = (depth = 3, side = "join", branch = 0))]
    fn render_svg(&self, depth: usize, side: &str, branch: u32) -> PyResult<String> {
        let result = unmate::run_pipeline(&self.0, PipelineOptions { branch, depth }).map_err(to_py)?;
        let mut scene = SvgScene::new(format!("depth {depth}"));
        scene.add_classes(&side_classes(&result, depth, side)?);
        Ok(render_svg(&scene))
    }
}

#[pymodule]
mod unmate_py {
    #[pymodule_export]
    use super::{is_linked, PyAngle, PyMapSpec, UnmateError};
}
