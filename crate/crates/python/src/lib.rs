//! Python bindings: `SMatrix` plus free functions over the core library.
//! Reports come back as plain dicts with the CLI's JSON schema.

use hwspinc::enumeration::{self, EnumOptions};
use hwspinc::structures::{self, analyze_with};
use hwspinc::verification::{self, Budget, LemmaId};
use hwspinc::{Criterion, Error, GroupElement, Mode, Subset};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde_json::Value;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    match v {
        Value::Null => Ok(py.None().into_bound(py)),
        Value::Bool(b) => b.into_bound_py_any(py),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_bound_py_any(py),
            None => match n.as_u64() {
                Some(u) => u.into_bound_py_any(py),
                None => n.as_f64().unwrap_or(f64::NAN).into_bound_py_any(py),
            },
        },
        Value::String(s) => s.into_bound_py_any(py),
        Value::Array(xs) => {
            let list = PyList::empty(py);
            for x in xs {
                list.append(to_py(py, x)?)?;
            }
            Ok(list.into_any())
        }
        Value::Object(map) => {
            let d = PyDict::new(py);
            for (k, x) in map {
                d.set_item(k, to_py(py, x)?)?;
            }
            Ok(d.into_any())
        }
    }
}

fn serialize<'py, T: serde::Serialize>(py: Python<'py>, t: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(t).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// 1-based indices to a subset of `{1..universe}`.
fn subset(indices: Vec<usize>, universe: usize) -> PyResult<Subset> {
    if let Some(&i) = indices.iter().find(|&&i| i == 0 || i > universe) {
        return Err(PyValueError::new_err(format!("index {i} outside 1..={universe}")));
    }
    Subset::from_indices(indices.into_iter().map(|i| i - 1), universe).map_err(err)
}

/// Matrix over {0,1,2,3} in digit rows, e.g. `SMatrix(["122", "213", "331"])`.
#[pyclass(name = "SMatrix", module = "hwspinc_py", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PySMatrix {
    inner: hwspinc::SMatrix,
}

impl From<hwspinc::SMatrix> for PySMatrix {
    fn from(inner: hwspinc::SMatrix) -> PySMatrix {
        PySMatrix { inner }
    }
}

#[pymethods]
impl PySMatrix {
    #[new]
    fn new(rows: Vec<String>) -> PyResult<PySMatrix> {
        Ok(hwspinc::SMatrix::from_digit_rows(&rows).map_err(err)?.into())
    }

    /// Every matrix in a digit-format document.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Vec<PySMatrix>> {
        parse_matrices(text)
    }

    #[getter]
    fn rows(&self) -> Vec<String> {
        self.inner.to_digit_rows()
    }

    #[getter]
    fn n_rows(&self) -> usize {
        self.inner.n_rows()
    }

    #[getter]
    fn n_cols(&self) -> usize {
        self.inner.n_cols()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<u8> {
        if i >= self.inner.n_rows() || j >= self.inner.n_cols() {
            return Err(PyValueError::new_err(format!("entry ({i}, {j}) out of range")));
        }
        Ok(self.inner.get(i, j).index())
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn is_distinguished(&self) -> PyResult<bool> {
        self.inner.is_distinguished().map_err(err)
    }

    fn is_free(&self) -> bool {
        self.inner.is_free()
    }

    fn is_effective(&self) -> bool {
        self.inner.is_effective()
    }

    /// False for non-square input.
    fn is_hw(&self) -> PyResult<bool> {
        if !self.inner.is_square() {
            return Ok(false);
        }
        self.inner.is_hw_matrix().map_err(err)
    }

    /// `J(U)` for 1-based row indices, as 1-based column indices.
    fn j_map(&self, rows: Vec<usize>) -> PyResult<Vec<usize>> {
        let u = subset(rows, self.inner.n_rows())?;
        Ok(self.inner.j_map(u).map_err(err)?.to_one_based())
    }

    /// Completes an `(n-1) x n` defining matrix to a HW-matrix.
    fn complete(&self) -> PyResult<PySMatrix> {
        Ok(self.inner.complete_to_hw().map_err(err)?.into())
    }

    /// Conjugates the 1-based columns `conj`, then applies the 0-based
    /// permutation `perm` to rows and columns.
    #[pyo3(signature = (perm, conj = Vec::new()))]
    fn act(&self, perm: Vec<usize>, conj: Vec<usize>) -> PyResult<PySMatrix> {
        let n = perm.len();
        let g = GroupElement::new(subset(conj, n)?, perm).map_err(err)?;
        Ok(g.act(&self.inner).map_err(err)?.into())
    }

    fn canonical_form(&self) -> PyResult<PySMatrix> {
        canonical_form(self)
    }

    fn __repr__(&self) -> String {
        format!("SMatrix({:?})", self.inner.to_digit_rows())
    }

    fn __str__(&self) -> String {
        self.inner.to_text()
    }
}

#[pyfunction]
fn parse_matrices(text: &str) -> PyResult<Vec<PySMatrix>> {
    Ok(hwspinc::parse_matrices(text).map_err(err)?.into_iter().map(PySMatrix::from).collect())
}

#[pyfunction]
fn format_matrices(matrices: Vec<PySMatrix>) -> String {
    hwspinc::format_matrices(matrices.iter().map(|m| &m.inner))
}

/// Spin / spin^c report as a dict.
#[pyfunction]
#[pyo3(signature = (m, criterion = "both"))]
fn analyze<'py>(py: Python<'py>, m: &PySMatrix, criterion: &str) -> PyResult<Bound<'py, PyAny>> {
    let c: Criterion = criterion.parse().map_err(err)?;
    let r = py.detach(|| analyze_with(&m.inner, c)).map_err(err)?;
    serialize(py, &r)
}

/// A spin^c set of a HW-matrix as 1-based columns, or `None`.
#[pyfunction]
fn find_spinc_set(py: Python<'_>, m: &PySMatrix) -> PyResult<Option<Vec<usize>>> {
    let s = py.detach(|| structures::find_spinc_set(&m.inner)).map_err(err)?;
    Ok(s.map(|s| s.to_one_based()))
}

#[pyfunction]
#[pyo3(signature = (m, columns, all_rows = true))]
fn is_spinc_set(m: &PySMatrix, columns: Vec<usize>, all_rows: bool) -> PyResult<bool> {
    let s = subset(columns, m.inner.n_cols())?;
    let scope = if all_rows { structures::Scope::AllU } else { structures::Scope::OmitLast };
    structures::is_spinc_set(&m.inner, s, scope).map_err(err)
}

#[pyfunction]
fn canonical_form(m: &PySMatrix) -> PyResult<PySMatrix> {
    Ok(hwspinc::canonical_form(&m.inner).map_err(err)?.into())
}

#[pyfunction]
fn are_equivalent(a: &PySMatrix, b: &PySMatrix) -> PyResult<bool> {
    hwspinc::are_equivalent(&a.inner, &b.inner).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, canonical = false, allow_long = false))]
fn enumerate(py: Python<'_>, n: usize, canonical: bool, allow_long: bool) -> PyResult<Vec<PySMatrix>> {
    let mode = if canonical { Mode::Canonical } else { Mode::Raw };
    let ms = py.detach(|| enumeration::enumerate_hw(n, mode, EnumOptions { allow_long })).map_err(err)?;
    Ok(ms.into_iter().map(PySMatrix::from).collect())
}

#[pyfunction]
#[pyo3(signature = (n, allow_long = false))]
fn count_hw<'py>(py: Python<'py>, n: usize, allow_long: bool) -> PyResult<Bound<'py, PyAny>> {
    let c = py.detach(|| enumeration::count_hw(n, EnumOptions { allow_long })).map_err(err)?;
    serialize(py, &c)
}

/// Machine check of a lemma; the dict carries `passed` and any counterexample.
#[pyfunction]
#[pyo3(signature = (lemma, n, cases = verification::DEFAULT_CASES, seed = verification::DEFAULT_SEED, allow_long = false))]
fn verify_lemma<'py>(
    py: Python<'py>,
    lemma: &str,
    n: usize,
    cases: u64,
    seed: u64,
    allow_long: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let id: LemmaId = lemma.parse().map_err(err)?;
    let r = py
        .detach(|| verification::verify_lemma(id, n, Budget { cases, seed, allow_long }))
        .map_err(err)?;
    serialize(py, &r)
}

#[pyfunction]
fn lemma_ids() -> Vec<&'static str> {
    LemmaId::ALL.iter().map(|l| l.as_str()).collect()
}

#[pymodule]
fn hwspinc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySMatrix>()?;
    m.add_function(wrap_pyfunction!(parse_matrices, m)?)?;
    m.add_function(wrap_pyfunction!(format_matrices, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(find_spinc_set, m)?)?;
    m.add_function(wrap_pyfunction!(is_spinc_set, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_form, m)?)?;
    m.add_function(wrap_pyfunction!(are_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(count_hw, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lemma, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_ids, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
