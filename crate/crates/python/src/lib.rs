//! Python bindings.
//!
//! Exposes the simulator, the closed-form predictions, the exact oracle and
//! the trial aggregates to Python as the `unfair` module. Bin labels are
//! zero-based, matching the Rust API.
//!
//! ```python
//! import unfair
//! loads = unfair.simulate(n=100, m=10**6, d=2, seed=42)
//! curve = unfair.prediction_curve(n=100, d=2, m=10**6)
//! ```

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyTuple};

use unfair_core::analysis::{self, Stabilization};
use unfair_core::oracle::{self, DEFAULT_MAX_STATES};
use unfair_core::process::{self, LoadVector, Snapshot, Trace};
use unfair_core::{theory, trials, Error, Policy, ProcessConfig};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::BudgetExceeded { .. } | Error::Io(_) => PyRuntimeError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn config(n: usize, m: u64, d: usize, policy: &str, seed: u64) -> PyResult<ProcessConfig> {
    let policy: Policy = policy.parse().map_err(to_py)?;
    ProcessConfig::new(n, m, d, policy, seed).map_err(to_py)
}

/// Final loads of one run, indexed by bin label.
#[pyfunction]
#[pyo3(signature = (n, m, d, policy="unfair", seed=0))]
fn simulate(py: Python<'_>, n: usize, m: u64, d: usize, policy: &str, seed: u64) -> PyResult<Vec<u64>> {
    let config = config(n, m, d, policy, seed)?;
    py.detach(|| process::run_final(&config))
        .map(LoadVector::into_inner)
        .map_err(to_py)
}

/// Snapshots `(t, loads)` of one run, every `snapshot_every` balls plus the last.
#[pyfunction]
#[pyo3(signature = (n, m, d, snapshot_every, policy="unfair", seed=0))]
fn run_trace(
    n: usize,
    m: u64,
    d: usize,
    snapshot_every: u64,
    policy: &str,
    seed: u64,
) -> PyResult<Vec<(u64, Vec<u64>)>> {
    let config = config(n, m, d, policy, seed)?
        .with_snapshots(snapshot_every)
        .map_err(to_py)?;
    let out = process::run(&config).map_err(to_py)?;
    Ok(out
        .trace
        .snapshots
        .into_iter()
        .map(|s| (s.t, s.loads.into_inner()))
        .collect())
}

/// `(loads_sorted, rank_to_label)` with ties ordered by `tie_seed`.
#[pyfunction]
#[pyo3(signature = (loads, tie_seed=0))]
fn sort_profile(loads: Vec<u64>, tie_seed: u64) -> (Vec<u64>, Vec<usize>) {
    let p = analysis::sort_profile(&LoadVector::from(loads), tie_seed);
    (p.loads_sorted, p.rank_to_label)
}

/// Last strict order reversal of a per-ball trace given as a list of load
/// vectors (entry `t` is the state after `t` balls). Returns `(t, stabilized)`.
#[pyfunction]
fn rank_stabilization_time(per_ball_loads: Vec<Vec<u64>>) -> PyResult<(u64, bool)> {
    let trace = Trace {
        snapshots: per_ball_loads
            .into_iter()
            .enumerate()
            .map(|(t, l)| Snapshot {
                t: t as u64,
                loads: LoadVector::from(l),
            })
            .collect(),
    };
    let s = analysis::rank_stabilization_time(&trace).map_err(to_py)?;
    Ok((s.last_reversal(), matches!(s, Stabilization::At(_))))
}

#[pyfunction]
fn rank_hit_probability(i: usize, n: usize, d: usize) -> PyResult<f64> {
    theory::rank_hit_probability(i, n, d).map_err(to_py)
}

/// Exact `(numerator, denominator)` of the rank-hit probability.
#[pyfunction]
fn rank_hit_probability_exact(i: usize, n: usize, d: usize) -> PyResult<(BigInt, BigInt)> {
    let r = theory::rank_hit_probability_exact(i, n, d).map_err(to_py)?;
    Ok((r.numer().clone(), r.denom().clone()))
}

#[pyfunction]
fn expected_load(i: usize, n: usize, d: usize, m: u64) -> PyResult<f64> {
    theory::expected_load(i, n, d, m).map_err(to_py)
}

#[pyfunction]
fn prediction_curve(n: usize, d: usize, m: u64) -> PyResult<Vec<f64>> {
    Ok(theory::PredictionCurve::new(n, d, m).map_err(to_py)?.values)
}

#[pyfunction]
fn power_law_load(c: f64, d: usize, m: u64, n: usize) -> PyResult<f64> {
    theory::power_law_load(c, d, m, n).map_err(to_py)
}

#[pyfunction]
fn gambler_ruin_bound(gap: f64, n: usize, d: usize) -> PyResult<f64> {
    theory::gambler_ruin_bound(gap, n, d).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (trials, deviation, clamp=false))]
fn hoeffding_tail(trials: u64, deviation: f64, clamp: bool) -> PyResult<f64> {
    if clamp {
        theory::hoeffding_tail_clamped(trials, deviation)
    } else {
        theory::hoeffding_tail(trials, deviation)
    }
    .map_err(to_py)
}

/// Phase lengths as exact Python integers.
#[pyfunction]
fn phase_constants<'py>(py: Python<'py>, n: usize, d: usize) -> PyResult<Bound<'py, PyDict>> {
    let p = theory::phase_constants(n, d).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("t_init", p.t_init)?;
    out.set_item("phase_length", p.phase_length)?;
    out.set_item("pair_quota", p.pair_quota)?;
    out.set_item("gap_target", p.gap_target)?;
    out.set_item("pairwise_total", p.pairwise_total)?;
    out.set_item("convergence_threshold", p.convergence_threshold)?;
    Ok(out)
}

/// Exact law `{sorted_profile: (numerator, denominator)}` after `m` balls.
#[pyfunction]
#[pyo3(signature = (n, m, d, max_states=DEFAULT_MAX_STATES))]
fn oracle_distribution<'py>(
    py: Python<'py>,
    n: usize,
    m: u64,
    d: usize,
    max_states: u128,
) -> PyResult<Bound<'py, PyDict>> {
    let dist = oracle::exact_distribution(n, m, d, max_states).map_err(to_py)?;
    let out = PyDict::new(py);
    for (profile, p) in dist.support {
        out.set_item(PyTuple::new(py, profile)?, (p.numer().clone(), p.denom().clone()))?;
    }
    Ok(out)
}

/// Exact per-rank means as `(numerator, denominator)` pairs.
#[pyfunction]
#[pyo3(signature = (n, m, d, max_states=DEFAULT_MAX_STATES))]
fn exact_sorted_means(n: usize, m: u64, d: usize, max_states: u128) -> PyResult<Vec<(BigInt, BigInt)>> {
    Ok(oracle::exact_sorted_means(n, m, d, max_states)
        .map_err(to_py)?
        .into_iter()
        .map(|r| (r.numer().clone(), r.denom().clone()))
        .collect())
}

/// `(frequency, standard_error)` of a planted leader being overtaken.
#[pyfunction]
#[pyo3(signature = (n, d, initial_gap, m_horizon, trials, seed=0))]
fn swap_probability_estimate(
    py: Python<'_>,
    n: usize,
    d: usize,
    initial_gap: u64,
    m_horizon: u64,
    trials: u64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let e = py
        .detach(|| analysis::swap_probability_estimate(n, d, initial_gap, m_horizon, trials, seed))
        .map_err(to_py)?;
    Ok((e.frequency, e.std_error))
}

/// Per-rank statistics over `trials` seeded runs.
#[pyfunction]
#[pyo3(signature = (n, m, d, trials, policy="unfair", seed=0))]
fn aggregate<'py>(
    py: Python<'py>,
    n: usize,
    m: u64,
    d: usize,
    trials: u64,
    policy: &str,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let template = config(n, m, d, policy, seed)?;
    let threads = trials::parallelism_from_env();
    let agg = py
        .detach(|| {
            let records = trials::run_trials(&template, trials, threads)?;
            analysis::aggregate_trials(&records)
        })
        .map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("trials", agg.trials)?;
    out.set_item("mean", agg.ranks.iter().map(|r| r.mean).collect::<Vec<_>>())?;
    out.set_item("std", agg.ranks.iter().map(|r| r.std).collect::<Vec<_>>())?;
    out.set_item("min", agg.ranks.iter().map(|r| r.min).collect::<Vec<_>>())?;
    out.set_item("max", agg.ranks.iter().map(|r| r.max).collect::<Vec<_>>())?;
    out.set_item(
        "quantiles",
        agg.ranks.iter().map(|r| r.quantiles.to_vec()).collect::<Vec<_>>(),
    )?;
    out.set_item("label_mode", agg.ranks.iter().map(|r| r.label_mode).collect::<Vec<_>>())?;
    Ok(out)
}

/// A run advanced ball by ball.
#[pyclass(name = "Process")]
struct PyProcess {
    inner: process::Process,
}

#[pymethods]
impl PyProcess {
    #[new]
    #[pyo3(signature = (n, d, policy="unfair", seed=0, initial_loads=None))]
    fn new(n: usize, d: usize, policy: &str, seed: u64, initial_loads: Option<Vec<u64>>) -> PyResult<Self> {
        let config = config(n, 0, d, policy, seed)?;
        let loads = initial_loads.map_or_else(|| LoadVector::zeros(n), LoadVector::from);
        Ok(PyProcess {
            inner: process::Process::with_initial_loads(&config, loads).map_err(to_py)?,
        })
    }

    /// Places one ball and returns its bin.
    fn step(&mut self) -> usize {
        self.inner.step()
    }

    /// Places `count` balls.
    fn advance(&mut self, count: u64) {
        for _ in 0..count {
            self.inner.step();
        }
    }

    #[getter]
    fn loads(&self) -> Vec<u64> {
        self.inner.loads().to_vec()
    }

    #[getter]
    fn balls_placed(&self) -> u64 {
        self.inner.balls_placed()
    }
}

#[pymodule]
fn unfair(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProcess>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(run_trace, m)?)?;
    m.add_function(wrap_pyfunction!(sort_profile, m)?)?;
    m.add_function(wrap_pyfunction!(rank_stabilization_time, m)?)?;
    m.add_function(wrap_pyfunction!(rank_hit_probability, m)?)?;
    m.add_function(wrap_pyfunction!(rank_hit_probability_exact, m)?)?;
    m.add_function(wrap_pyfunction!(expected_load, m)?)?;
    m.add_function(wrap_pyfunction!(prediction_curve, m)?)?;
    m.add_function(wrap_pyfunction!(power_law_load, m)?)?;
    m.add_function(wrap_pyfunction!(gambler_ruin_bound, m)?)?;
    m.add_function(wrap_pyfunction!(hoeffding_tail, m)?)?;
    m.add_function(wrap_pyfunction!(phase_constants, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(exact_sorted_means, m)?)?;
    m.add_function(wrap_pyfunction!(swap_probability_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate, m)?)?;
    Ok(())
}
