//! Python bindings for divlab.
//!
//! PMFs and prefix codes are classes; reports come back as plain dicts and
//! lists built from their JSON form, with infinite values as `float("inf")`
//! (so a string field holding exactly `"inf"` also becomes a float).
//! Validation errors raise `ValueError`, unreadable files `OSError`.

use std::path::PathBuf;

use divlab_core::coding;
use divlab_core::costbenefit;
use divlab_core::curves::{self, CurveSpec, Grid};
use divlab_core::divergence::compute;
use divlab_core::io;
use divlab_core::mcda;
use divlab_core::pmf::{self as pmf_mod, Alphabet};
use divlab_core::reproduce;
use divlab_core::scenarios;
use divlab_core::MeasureId;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyAny, PyBool, PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

fn py_err(e: divlab_core::Error) -> PyErr {
    if e.is_io() {
        PyIOError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

trait OrPy<T> {
    fn or_py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for divlab_core::Result<T> {
    fn or_py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn measure(s: &str) -> PyResult<MeasureId> {
    s.parse().or_py()
}

fn fixtures(dir: Option<PathBuf>) -> PathBuf {
    dir.unwrap_or_else(io::fixtures_dir)
}

/// Convert through JSON, turning the `"inf"`/`"-inf"` markers back into floats.
fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) if s == "inf" => f64::INFINITY.into_pyobject(py)?.into_any(),
        Value::String(s) if s == "-inf" => f64::NEG_INFINITY.into_pyobject(py)?.into_any(),
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

/// Probability mass function over named letters.
#[pyclass(name = "Pmf", module = "divlab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPmf {
    inner: divlab_core::Pmf,
}

#[pymethods]
impl PyPmf {
    /// `Pmf(p, letters=None)`; letters default to `z1..zn`.
    #[new]
    #[pyo3(signature = (p, letters=None))]
    fn new(p: Vec<f64>, letters: Option<Vec<String>>) -> PyResult<Self> {
        let alphabet = match letters {
            Some(l) => Alphabet::new(l),
            None => Alphabet::indexed(p.len()),
        }
        .or_py()?;
        Ok(Self {
            inner: divlab_core::Pmf::new(alphabet, p).or_py()?,
        })
    }

    /// Load a PMF from a JSON or CSV file.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: io::load_pmf(&path).or_py()?,
        })
    }

    #[staticmethod]
    fn uniform(letters: Vec<String>) -> PyResult<Self> {
        Ok(Self {
            inner: pmf_mod::uniform(&Alphabet::new(letters).or_py()?),
        })
    }

    #[staticmethod]
    fn one_hot(letters: Vec<String>, letter: &str) -> PyResult<Self> {
        let alphabet = Alphabet::new(letters).or_py()?;
        Ok(Self {
            inner: pmf_mod::one_hot_letter(&alphabet, letter).or_py()?,
        })
    }

    /// Geometric PMF whose Huffman code has a codeword of length `n - 1`.
    #[staticmethod]
    fn worst_case(n: usize, epsilon: f64) -> PyResult<Self> {
        Ok(Self {
            inner: pmf_mod::worst_case_pmf(n, epsilon).or_py()?,
        })
    }

    /// Piecewise walking-time PMF centred on `xi` over `1..=n` minutes.
    #[staticmethod]
    #[pyo3(signature = (xi, n=scenarios::LONDON_ALPHABET))]
    fn london(xi: usize, n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: pmf_mod::piecewise_london_pmf(xi, n).or_py()?,
        })
    }

    #[getter]
    fn letters(&self) -> Vec<String> {
        self.inner.alphabet().letters().to_vec()
    }

    #[getter]
    fn probs(&self) -> Vec<f64> {
        self.inner.probs().to_vec()
    }

    fn get(&self, letter: &str) -> Option<f64> {
        self.inner.get(letter)
    }

    fn entropy(&self) -> f64 {
        self.inner.entropy()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        let body: Vec<String> = self
            .inner
            .alphabet()
            .letters()
            .iter()
            .zip(self.inner.probs())
            .take(8)
            .map(|(l, p)| format!("{l:?}: {p}"))
            .collect();
        let more = if self.inner.len() > 8 { ", ..." } else { "" };
        format!("Pmf({{{}{more}}})", body.join(", "))
    }
}

/// Prefix code over a PMF's alphabet.
#[pyclass(name = "PrefixCode", module = "divlab", frozen, skip_from_py_object)]
struct PyPrefixCode {
    inner: coding::PrefixCode,
}

#[pymethods]
impl PyPrefixCode {
    #[getter]
    fn letters(&self) -> Vec<String> {
        self.inner.alphabet().letters().to_vec()
    }

    #[getter]
    fn codewords(&self) -> Vec<String> {
        self.inner.codewords().to_vec()
    }

    #[getter]
    fn lengths(&self) -> Vec<usize> {
        self.inner.lengths()
    }

    #[getter]
    fn max_length(&self) -> usize {
        self.inner.max_length()
    }

    fn kraft_sum(&self) -> f64 {
        self.inner.kraft_sum()
    }

    fn avg_length_under(&self, p: &PyPmf) -> PyResult<f64> {
        self.inner.avg_length_under(&p.inner).or_py()
    }

    fn __repr__(&self) -> String {
        format!("PrefixCode({:?})", self.inner.codewords())
    }
}

/// Shannon entropy in bits.
#[pyfunction]
fn entropy(p: &PyPmf) -> f64 {
    p.inner.entropy()
}

/// `measure(p, q)` for a measure string such as `"js"` or `"dnew:k=2"`.
#[pyfunction]
fn divergence(measure_name: &str, p: &PyPmf, q: &PyPmf) -> PyResult<f64> {
    Ok(compute(measure(measure_name)?, &p.inner, &q.inner, None)
        .or_py()?
        .total)
}

/// Per-letter contributions of `measure(p, q)`.
#[pyfunction]
fn divergence_per_letter(measure_name: &str, p: &PyPmf, q: &PyPmf) -> PyResult<Vec<f64>> {
    Ok(compute(measure(measure_name)?, &p.inner, &q.inner, None)
        .or_py()?
        .per_letter)
}

/// Benefit breakdown; `hmax` overrides the scale of bounded measures.
#[pyfunction]
#[pyo3(signature = (input, output, reconstruction, measure_name="dnew:k=2", hmax=None, cost=None))]
fn benefit<'py>(
    py: Python<'py>,
    input: &PyPmf,
    output: &PyPmf,
    reconstruction: &PyPmf,
    measure_name: &str,
    hmax: Option<f64>,
    cost: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let mut b = costbenefit::benefit_with(
        measure(measure_name)?,
        &input.inner,
        &output.inner,
        &reconstruction.inner,
        hmax,
    )
    .or_py()?;
    if let Some(c) = cost {
        b = costbenefit::ratio(b, c).or_py()?;
    }
    to_py(py, &b)
}

#[pyfunction]
fn huffman(q: &PyPmf) -> PyPrefixCode {
    PyPrefixCode {
        inner: coding::huffman(&q.inner),
    }
}

/// Lengths `ceil(log2(1/q))` and their average under `q`.
#[pyfunction]
fn shannon_literal_lengths(q: &PyPmf) -> PyResult<(Vec<usize>, f64)> {
    let s = coding::shannon_literal_lengths(&q.inner).or_py()?;
    Ok((s.lengths, s.average))
}

/// Average codeword length under `p` of a code built for another PMF.
#[pyfunction]
fn conceptual_cross_entropy(p: &PyPmf, code: &PyPrefixCode) -> PyResult<f64> {
    coding::conceptual_cross_entropy(&p.inner, &code.inner).or_py()
}

/// Check the `n - 1` cross-entropy bound on random PMF pairs.
#[pyfunction]
#[pyo3(signature = (n, trials, seed=0))]
fn bound_report<'py>(
    py: Python<'py>,
    n: usize,
    trials: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &coding::bound_report(n, trials, seed).or_py()?)
}

/// Two-letter family sweep; returns `{"measures": [...], "rows": [...]}`.
#[pyfunction]
#[pyo3(signature = (measures, alphas, points=curves::DEFAULT_LINEAR_POINTS))]
fn curve<'py>(
    py: Python<'py>,
    measures: Vec<String>,
    alphas: Vec<f64>,
    points: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let measures = measures
        .iter()
        .map(|m| measure(m))
        .collect::<PyResult<_>>()?;
    let spec = CurveSpec {
        grid: Grid::Linear { count: points },
        ..CurveSpec::linear(measures, alphas)
    };
    to_py(py, &curves::sweep(&spec).or_py()?)
}

#[pyfunction]
#[pyo3(signature = (measures, lo=curves::NEAR_ZERO_RANGE.0, hi=curves::NEAR_ZERO_RANGE.1, per_decade=curves::DEFAULT_POINTS_PER_DECADE))]
fn near_zero<'py>(
    py: Python<'py>,
    measures: Vec<String>,
    lo: f64,
    hi: f64,
    per_decade: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let measures: Vec<MeasureId> = measures
        .iter()
        .map(|m| measure(m))
        .collect::<PyResult<_>>()?;
    to_py(
        py,
        &curves::near_zero_sweep(&measures, (lo, hi), per_decade).or_py()?,
    )
}

/// Names of the scenario bundles in the fixtures directory.
#[pyfunction]
#[pyo3(signature = (fixtures_dir=None))]
fn scenario_names(fixtures_dir: Option<PathBuf>) -> PyResult<Vec<String>> {
    Ok(io::load_bundles(&fixtures(fixtures_dir))
        .or_py()?
        .iter()
        .map(|b| b.name().to_string())
        .collect())
}

/// Evaluate a scenario bundle by name.
#[pyfunction]
#[pyo3(signature = (name, fixtures_dir=None))]
fn run_scenario<'py>(
    py: Python<'py>,
    name: &str,
    fixtures_dir: Option<PathBuf>,
) -> PyResult<Bound<'py, PyAny>> {
    let bundle = io::find_bundle(&fixtures(fixtures_dir), name).or_py()?;
    to_py(py, &scenarios::run_scenario(&bundle).or_py()?)
}

/// Walking-time survey report for one measure.
#[pyfunction]
#[pyo3(signature = (answers, questions, measure_name="dnew:k=2"))]
fn analyze_survey<'py>(
    py: Python<'py>,
    answers: PathBuf,
    questions: PathBuf,
    measure_name: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let records = io::load_survey(&answers).or_py()?;
    let bands = io::load_questions(&questions).or_py()?.bands().or_py()?;
    to_py(
        py,
        &scenarios::analyze_survey(&records, &bands, measure(measure_name)?).or_py()?,
    )
}

/// Staged elimination over a criteria table.
#[pyfunction]
fn run_plan<'py>(py: Python<'py>, table: PathBuf, plan: PathBuf) -> PyResult<Bound<'py, PyAny>> {
    let table = io::load_criteria(&table).or_py()?;
    let plan = io::load_plan(&plan).or_py()?;
    to_py(py, &mcda::run_plan(&table, &plan).or_py()?)
}

/// Check every fixture; returns the report with a top-level `passed` flag.
#[pyfunction]
#[pyo3(signature = (fixtures_dir=None))]
fn reproduce_all<'py>(
    py: Python<'py>,
    fixtures_dir: Option<PathBuf>,
) -> PyResult<Bound<'py, PyAny>> {
    let report = reproduce::reproduce_all(&fixtures(fixtures_dir)).or_py()?;
    let out = to_py(py, &report)?;
    out.set_item("passed", report.all_passed())?;
    Ok(out)
}

#[pymodule]
fn divlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPmf>()?;
    m.add_class::<PyPrefixCode>()?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(divergence, m)?)?;
    m.add_function(wrap_pyfunction!(divergence_per_letter, m)?)?;
    m.add_function(wrap_pyfunction!(benefit, m)?)?;
    m.add_function(wrap_pyfunction!(huffman, m)?)?;
    m.add_function(wrap_pyfunction!(shannon_literal_lengths, m)?)?;
    m.add_function(wrap_pyfunction!(conceptual_cross_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(bound_report, m)?)?;
    m.add_function(wrap_pyfunction!(curve, m)?)?;
    m.add_function(wrap_pyfunction!(near_zero, m)?)?;
    m.add_function(wrap_pyfunction!(scenario_names, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_survey, m)?)?;
    m.add_function(wrap_pyfunction!(run_plan, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce_all, m)?)?;
    Ok(())
}
