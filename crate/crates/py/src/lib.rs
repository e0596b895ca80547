//! Python bindings: thin functional wrappers over the core crate. Datasets
//! cross the boundary as lists of rows; weighted outputs carry the weight as
//! a trailing column, matching the CSV layout.

use binsynth_core::bounds::{
    beyond_worst_case_bound, gaussian_bound, worst_case_bound, BoundReport,
};
use binsynth_core::datagen::{
    kl_uniform_mixture_vs_gaussian as kl_core, optimal_uniform_weights as weights_core,
    sample_gaussian_mixture, GaussianMixtureSpec,
};
use binsynth_core::grid::GridConfig;
use binsynth_core::kernels::{
    mmd as mmd_core, mmd_vs_standard_gaussian as mmd_gauss_core, KernelParams,
};
use binsynth_core::noise::RunRng;
use binsynth_core::release::{
    synthesize_data_dependent, synthesize_data_independent, threshold_for_delta, SynthReport,
};
use binsynth_core::tree::{partition_shape as shape_core, tau_floor as tau_core, TreeConfig};
use binsynth_core::types::{bounding_box, Dataset, Point, WeightedDataset};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: binsynth_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn dataset(rows: Vec<Vec<f64>>) -> PyResult<Dataset> {
    Dataset::from_rows(rows).map_err(err)
}

fn weighted(entries: Vec<Vec<f64>>) -> PyResult<WeightedDataset> {
    let dim = match entries.first() {
        Some(row) if row.len() >= 2 => row.len() - 1,
        _ => return Err(PyValueError::new_err("entries need coords plus a weight")),
    };
    let pairs = entries
        .into_iter()
        .map(|mut row| {
            let w = row.pop().unwrap();
            Point::new(row).map(|p| (p, w))
        })
        .collect::<binsynth_core::Result<Vec<_>>>()
        .map_err(err)?;
    WeightedDataset::new(pairs, dim).map_err(err)
}

fn report_to_py(py: Python<'_>, report: SynthReport) -> PyResult<(Vec<Vec<f64>>, Py<PyDict>)> {
    let rows = report
        .output
        .entries()
        .iter()
        .map(|(p, w)| {
            let mut row = p.coords().to_vec();
            row.push(*w);
            row
        })
        .collect();
    let stats = PyDict::new(py);
    let s = &report.stats;
    stats.set_item("n", s.n)?;
    stats.set_item("heavy_bins", s.heavy_bins)?;
    stats.set_item("light_points", s.light_points)?;
    stats.set_item("log2_total_bins", s.log2_total_bins)?;
    stats.set_item("nonempty_bins", s.nonempty_bins)?;
    stats.set_item("released_bins", s.released_bins)?;
    stats.set_item("released_empty_bins", s.released_empty_bins)?;
    stats.set_item("h", s.h)?;
    stats.set_item("h_prime", s.h_prime)?;
    stats.set_item("total_epsilon", report.ledger.total())?;
    Ok((rows, stats.into()))
}

fn bound_to_py(py: Python<'_>, report: BoundReport) -> PyResult<Py<PyDict>> {
    let out = PyDict::new(py);
    out.set_item("name", report.name)?;
    out.set_item("value", report.value)?;
    out.set_item("preconditions_met", report.preconditions_met)?;
    out.set_item("explanation", report.explanation)?;
    let inputs = PyDict::new(py);
    for (k, v) in &report.inputs {
        inputs.set_item(k, v)?;
    }
    out.set_item("inputs", inputs)?;
    Ok(out.into())
}

/// Data-independent pipeline: regular grid of width `width`, noisy counts
/// under the full budget, threshold filtering, implicit empty-bin release.
#[pyfunction]
#[pyo3(signature = (rows, epsilon, width, threshold=None, delta=0.05, seed=0))]
fn generate_grid(
    py: Python<'_>,
    rows: Vec<Vec<f64>>,
    epsilon: f64,
    width: f64,
    threshold: Option<f64>,
    delta: f64,
    seed: u64,
) -> PyResult<(Vec<Vec<f64>>, Py<PyDict>)> {
    let data = dataset(rows)?;
    let t = match threshold {
        Some(t) => t,
        None => threshold_for_delta(epsilon, delta).map_err(err)?,
    };
    let config = GridConfig::new(width, epsilon, t).map_err(err)?;
    let report = synthesize_data_independent(&data, &config, &RunRng::new(seed)).map_err(err)?;
    report_to_py(py, report)
}

/// Data-dependent pipeline: adaptive partitioning between scales `s1` and
/// `s2` on half the budget, noisy leaf release on the other half. `tau`
/// defaults to the empty-node protection floor at confidence `1 - delta`.
#[pyfunction]
#[pyo3(signature = (rows, epsilon, s1, s2, tau=None, threshold=None, delta=0.05, split=0.5, seed=0))]
#[allow(clippy::too_many_arguments)]
fn generate_tree(
    py: Python<'_>,
    rows: Vec<Vec<f64>>,
    epsilon: f64,
    s1: f64,
    s2: f64,
    tau: Option<f64>,
    threshold: Option<f64>,
    delta: f64,
    split: f64,
    seed: u64,
) -> PyResult<(Vec<Vec<f64>>, Py<PyDict>)> {
    if !(0.0..1.0).contains(&split) || split == 0.0 {
        return Err(PyValueError::new_err("split must be in (0, 1)"));
    }
    let data = dataset(rows)?;
    let eps_partition = epsilon * split;
    let eps_release = epsilon - eps_partition;
    let bx = bounding_box(&data).map_err(err)?;
    let tau = match tau {
        Some(t) => t,
        None => {
            let (h, h_prime) = shape_core(data.dim(), bx.edge(), s1, s2).map_err(err)?;
            tau_core(h, h_prime, data.len() as u64, eps_partition, delta).map_err(err)?
        }
    };
    let t = match threshold {
        Some(t) => t,
        None => threshold_for_delta(eps_release, delta).map_err(err)?,
    };
    let config = TreeConfig::new(eps_partition, tau, s1, s2).map_err(err)?;
    let report =
        synthesize_data_dependent(&data, &config, eps_release, t, &RunRng::new(seed)).map_err(err)?;
    report_to_py(py, report)
}

/// MMD between two weighted point sets (trailing column is the weight).
#[pyfunction]
#[pyo3(signature = (p, q, bandwidth=1.0))]
fn mmd(p: Vec<Vec<f64>>, q: Vec<Vec<f64>>, bandwidth: f64) -> PyResult<f64> {
    let params = KernelParams::new(bandwidth).map_err(err)?;
    mmd_core(&weighted(p)?, &weighted(q)?, &params).map_err(err)
}

/// Closed-form squared MMD between a plain sample and the standard Gaussian
/// (unbiased; may be slightly negative).
#[pyfunction]
#[pyo3(signature = (rows, bandwidth=1.0))]
fn mmd_vs_standard_gaussian(rows: Vec<Vec<f64>>, bandwidth: f64) -> PyResult<f64> {
    let params = KernelParams::new(bandwidth).map_err(err)?;
    mmd_gauss_core(&dataset(rows)?, &params).map_err(err)
}

/// Seeded draw from the 10-component benchmark mixture.
#[pyfunction]
#[pyo3(signature = (dim, n, seed=0))]
fn sample_benchmark_mixture(dim: usize, n: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let run = RunRng::new(seed);
    let spec = GaussianMixtureSpec::standard_recipe(dim, &mut run.stream("recipe")).map_err(err)?;
    let data = sample_gaussian_mixture(&spec, n, &mut run.stream("sample")).map_err(err)?;
    Ok(data.points().iter().map(|p| p.coords().to_vec()).collect())
}

/// KL-optimal weights for the symmetric uniform mixture with 2k+1 boxes of
/// half-width c.
#[pyfunction]
fn optimal_uniform_weights(k: u32, c: f64) -> PyResult<Vec<f64>> {
    Ok(weights_core(k, c).map_err(err)?.weights)
}

/// KL divergence of that optimal mixture from the standard Gaussian.
#[pyfunction]
fn uniform_mixture_kl(k: u32, c: f64) -> PyResult<f64> {
    Ok(kl_core(&weights_core(k, c).map_err(err)?))
}

#[pyfunction]
fn bound_worst_case(
    py: Python<'_>,
    r: f64,
    w: f64,
    d: u32,
    n: u64,
    epsilon: f64,
    delta: f64,
) -> PyResult<Py<PyDict>> {
    bound_to_py(py, worst_case_bound(r, w, d, n, epsilon, delta))
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn bound_beyond_worst_case(
    py: Python<'_>,
    n: u64,
    m: u64,
    big_m: u64,
    epsilon: f64,
    delta: f64,
    w: f64,
    d: u32,
) -> PyResult<Py<PyDict>> {
    bound_to_py(py, beyond_worst_case_bound(n, m, big_m, epsilon, delta, w, d))
}

#[pyfunction]
fn bound_gaussian(
    py: Python<'_>,
    n: u64,
    d: u32,
    sigma: f64,
    w: f64,
    epsilon: f64,
    delta: f64,
) -> PyResult<Py<PyDict>> {
    bound_to_py(py, gaussian_bound(n, d, sigma, w, epsilon, delta))
}

/// Tree shape `(h, h')` implied by a bounding edge and the two scales.
#[pyfunction]
fn partition_shape(dim: usize, edge: f64, s1: f64, s2: f64) -> PyResult<(u32, u32)> {
    shape_core(dim, edge, s1, s2).map_err(err)
}

/// Smallest tau that keeps empty nodes unsplit with probability 1 - delta.
#[pyfunction]
fn tau_floor(h: u32, h_prime: u32, n: u64, epsilon_prime: f64, delta: f64) -> PyResult<f64> {
    tau_core(h, h_prime, n, epsilon_prime, delta).map_err(err)
}

#[pymodule]
fn binsynth(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(generate_grid, m)?)?;
    m.add_function(wrap_pyfunction!(generate_tree, m)?)?;
    m.add_function(wrap_pyfunction!(mmd, m)?)?;
    m.add_function(wrap_pyfunction!(mmd_vs_standard_gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(sample_benchmark_mixture, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_uniform_weights, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_mixture_kl, m)?)?;
    m.add_function(wrap_pyfunction!(bound_worst_case, m)?)?;
    m.add_function(wrap_pyfunction!(bound_beyond_worst_case, m)?)?;
    m.add_function(wrap_pyfunction!(bound_gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(partition_shape, m)?)?;
    m.add_function(wrap_pyfunction!(tau_floor, m)?)?;
    Ok(())
}
