//! Python bindings: points are sequences of complex coordinates `(z_1, ..., z_n)`.

use std::collections::HashMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use siegel::cli::{exit_code, run_report, Task};
use siegel::geometry::{self, BPoint, HPoint, C64};
use siegel::integrate::{QuadratureSpec, Scheme};
use siegel::report::RunConfig;
use siegel::symbols::{make_symbol, Params, Symbol, CORPUS_IDS};
use siegel::{bloch, hankel, oscillation, verify, Error};

fn py_err(e: Error) -> PyErr {
    if exit_code(&e) == 2 || matches!(e, Error::NotInterior { .. } | Error::OutsideBall { .. }) {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn point(z: Vec<C64>) -> PyResult<HPoint> {
    if z.is_empty() {
        return Err(PyValueError::new_err("a point needs at least one coordinate"));
    }
    let p = HPoint::from_coords(&z);
    p.check_interior().map_err(py_err)?;
    Ok(p)
}

fn symbol(id: &str, params: Option<HashMap<String, f64>>) -> PyResult<Symbol> {
    let p: Params = params.unwrap_or_default().into_iter().collect();
    make_symbol(id, &p).map_err(py_err)
}

fn spec(n: usize, nodes: usize, seed: u64, scheme: &str) -> PyResult<QuadratureSpec> {
    let s = Scheme::parse(scheme).map_err(py_err)?;
    QuadratureSpec::new(s, nodes, seed, n).map_err(py_err)
}

/// `rho(z, w)`; `rho(z)` when `w` is omitted.
#[pyfunction]
#[pyo3(signature = (z, w=None))]
fn rho(z: Vec<C64>, w: Option<Vec<C64>>) -> PyResult<C64> {
    let z = point(z)?;
    match w {
        Some(w) => geometry::rho_pair(&z, &point(w)?).map_err(py_err),
        None => Ok(C64::new(geometry::rho(&z), 0.0)),
    }
}

#[pyfunction]
fn bergman_kernel(z: Vec<C64>, w: Vec<C64>) -> PyResult<C64> {
    geometry::bergman_kernel(&point(z)?, &point(w)?).map_err(py_err)
}

#[pyfunction]
fn bergman_metric(z: Vec<C64>, w: Vec<C64>) -> PyResult<f64> {
    geometry::bergman_metric(&point(z)?, &point(w)?).map_err(py_err)
}

/// Cayley map from the unit ball to the half-space.
#[pyfunction]
fn cayley(xi: Vec<C64>) -> PyResult<Vec<C64>> {
    Ok(geometry::cayley(&BPoint::new(xi)).map_err(py_err)?.coords())
}

#[pyfunction]
fn cayley_inv(z: Vec<C64>) -> PyResult<Vec<C64>> {
    Ok(geometry::cayley_inv(&point(z)?).map_err(py_err)?.into_vec())
}

#[pyfunction]
fn corpus() -> Vec<&'static str> {
    CORPUS_IDS.to_vec()
}

/// Berezin transform of a corpus symbol: `(value, std_error)`.
#[pyfunction]
#[pyo3(signature = (symbol_id, z, params=None, nodes=RunConfig::DEFAULT_NODES, seed=RunConfig::DEFAULT_SEED, scheme="quasi-random"))]
fn berezin(
    symbol_id: &str,
    z: Vec<C64>,
    params: Option<HashMap<String, f64>>,
    nodes: usize,
    seed: u64,
    scheme: &str,
) -> PyResult<(C64, f64)> {
    let z = point(z)?;
    let s = spec(z.dim(), nodes, seed, scheme)?;
    let est = oscillation::berezin(&symbol(symbol_id, params)?, &z, &s).map_err(py_err)?;
    Ok((est.value, est.std_error))
}

/// Mean oscillation `MO(f)(z)`, or `MO_r` when `radius` is given: `(value, std_error)`.
#[pyfunction]
#[pyo3(signature = (symbol_id, z, radius=None, params=None, nodes=RunConfig::DEFAULT_NODES, seed=RunConfig::DEFAULT_SEED, scheme="quasi-random"))]
fn mean_oscillation(
    symbol_id: &str,
    z: Vec<C64>,
    radius: Option<f64>,
    params: Option<HashMap<String, f64>>,
    nodes: usize,
    seed: u64,
    scheme: &str,
) -> PyResult<(f64, f64)> {
    let z = point(z)?;
    let s = spec(z.dim(), nodes, seed, scheme)?;
    let f = symbol(symbol_id, params)?;
    let est = match radius {
        Some(r) => oscillation::mean_oscillation_r(&f, &z, r, &s),
        None => oscillation::mean_oscillation(&f, &z, &s),
    }
    .map_err(py_err)?;
    Ok((est.value, est.std_error))
}

/// Truncated Hankel norm `||H_f||` on polynomials of degree at most `degree_cap`.
#[pyfunction]
#[pyo3(signature = (symbol_id, n=1, degree_cap=None, params=None, nodes=RunConfig::DEFAULT_NODES, seed=RunConfig::DEFAULT_SEED))]
fn hankel_norm(
    symbol_id: &str,
    n: usize,
    degree_cap: Option<usize>,
    params: Option<HashMap<String, f64>>,
    nodes: usize,
    seed: u64,
) -> PyResult<f64> {
    let s = spec(n, nodes, seed, "polar-product")?;
    let cap = degree_cap.unwrap_or_else(|| hankel::default_degree_cap(n));
    let est = hankel::truncated_hankel_norm(&symbol(symbol_id, params)?, n, cap, &s).map_err(py_err)?;
    Ok(est.norm_estimate)
}

/// `|grad~ f|(z)` for a holomorphic corpus symbol.
#[pyfunction]
#[pyo3(signature = (symbol_id, z, params=None))]
fn invariant_gradient(symbol_id: &str, z: Vec<C64>, params: Option<HashMap<String, f64>>) -> PyResult<f64> {
    bloch::invariant_gradient(&symbol(symbol_id, params)?, &point(z)?).map_err(py_err)
}

fn task(name: &str) -> PyResult<Task> {
    [Task::Berezin, Task::Mo, Task::BmoScan, Task::Hankel, Task::Bloch, Task::Decay]
        .into_iter()
        .find(|t| siegel::cli::task_name(*t) == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown task `{name}`")))
}

/// Report rows as JSON lines, without the header.
#[pyfunction]
#[pyo3(signature = (task_name, symbol_id, n=1, params=None, nodes=RunConfig::DEFAULT_NODES, seed=RunConfig::DEFAULT_SEED, grid="ray-ladder"))]
fn report(
    task_name: &str,
    symbol_id: &str,
    n: usize,
    params: Option<HashMap<String, f64>>,
    nodes: usize,
    seed: u64,
    grid: &str,
) -> PyResult<String> {
    let mut cfg = RunConfig::new(n);
    cfg.symbol = Some(symbol_id.into());
    cfg.params = params.unwrap_or_default().into_iter().collect();
    cfg.node_count = nodes;
    cfg.seed = seed;
    cfg.grid = oscillation::GridPreset::parse(grid).map_err(py_err)?;
    cfg.validate().map_err(py_err)?;
    Ok(run_report(&cfg, task(task_name)?).map_err(py_err)?.render_body())
}

/// Runs the check suites: `(all gating checks passed, JSON-lines rows)`.
#[pyfunction]
#[pyo3(signature = (n=1, nodes=RunConfig::DEFAULT_NODES, seed=RunConfig::DEFAULT_SEED))]
fn run_verify(py: Python<'_>, n: usize, nodes: usize, seed: u64) -> PyResult<(bool, String)> {
    let mut cfg = RunConfig::new(n);
    cfg.node_count = nodes;
    cfg.seed = seed;
    cfg.validate().map_err(py_err)?;
    let (rep, ok) = py.detach(|| verify::run_verify(&cfg)).map_err(py_err)?;
    Ok((ok, rep.render_body()))
}

#[pymodule]
fn siegelpy(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(rho, m)?)?;
    m.add_function(wrap_pyfunction!(bergman_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(bergman_metric, m)?)?;
    m.add_function(wrap_pyfunction!(cayley, m)?)?;
    m.add_function(wrap_pyfunction!(cayley_inv, m)?)?;
    m.add_function(wrap_pyfunction!(corpus, m)?)?;
    m.add_function(wrap_pyfunction!(berezin, m)?)?;
    m.add_function(wrap_pyfunction!(mean_oscillation, m)?)?;
    m.add_function(wrap_pyfunction!(hankel_norm, m)?)?;
    m.add_function(wrap_pyfunction!(invariant_gradient, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
