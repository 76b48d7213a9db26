//! Thin Python wrapper: reports travel as JSON strings.

use opverify_core::chain::{homology as chain_homology, ChainComplex};
use opverify_core::error::Error;
use opverify_core::operad::free_binary;
use opverify_core::report::{self, Config, Format};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Usage(m) | Error::Parse(m) => PyValueError::new_err(m),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Run a suite and return its JSON report.
#[pyfunction]
#[pyo3(signature = (suite, arity=4, window=(0, 8), smax=2, stages=vec![1, 2, 4, 6], seed=0))]
fn run_suite(suite: &str, arity: usize, window: (i64, i64), smax: usize, stages: Vec<u32>, seed: u64) -> PyResult<String> {
    let cfg = Config { arity, window, s_max: smax, stages, seed };
    let r = report::run_suite(suite, &cfg).map_err(py_err)?;
    Ok(report::emit_report(&r, Format::Json))
}

/// Re-emit a JSON report as json or markdown.
#[pyfunction]
#[pyo3(signature = (json, format="markdown"))]
fn emit_report(json: &str, format: &str) -> PyResult<String> {
    let r = report::parse_report(json).map_err(py_err)?;
    Ok(report::emit_report(&r, format.parse().map_err(py_err)?))
}

#[pyfunction]
fn exit_code(json: &str) -> PyResult<i32> {
    Ok(report::parse_report(json).map_err(py_err)?.exit_code())
}

/// Nonzero (degree, rank) pairs of a complex in text form.
#[pyfunction]
fn homology(text: &str) -> PyResult<Vec<(i64, usize)>> {
    let c = ChainComplex::from_text(text).map_err(py_err)?;
    Ok(chain_homology(&c).nonzero())
}

/// Arity dimensions of the free operad on one binary generator.
#[pyfunction]
fn free_operad_dims(bound: usize) -> PyResult<Vec<usize>> {
    Ok(free_binary(bound).map_err(py_err)?.operad.dims())
}

#[pymodule]
fn opverify(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(emit_report, m)?)?;
    m.add_function(wrap_pyfunction!(exit_code, m)?)?;
    m.add_function(wrap_pyfunction!(homology, m)?)?;
    m.add_function(wrap_pyfunction!(free_operad_dims, m)?)?;
    m.add("SUITES", report::SUITES.to_vec())?;
    Ok(())
}
