//! Python bindings for `bellpur`.

use bellpur::bell::{apply_gates, format_gate_list, parse_gate_list};
use bellpur::capacity::{emit_curves, hashing_threshold as threshold, linear_grid};
use bellpur::codesearch::{monte_carlo_search as search, verify_published as check_published, SearchConfig};
use bellpur::density::{minimal_ensemble, Basis};
use bellpur::hashing::{hashing_simulate as simulate, hashing_yield as yield_of};
use bellpur::protocols::{direct_purify_sim, recurrence_iterate, StopRule, Variant};
use bellpur::qecc::{decode_with, kl_check, published_codewords, random_logical, standard_errors, Decoder};
use bellpur::twirl::{apply_twirl, twirl_battery, twirl_group, TwirlKind};
use bellpur::{C64, Error};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn variant(name: &str) -> PyResult<Variant> {
    name.parse().map_err(err)
}

/// Bell-diagonal two-qubit state, weights ordered Φ+, Ψ+, Φ−, Ψ−.
#[pyclass(name = "BellDiagonal", frozen)]
struct PyBellDiagonal(bellpur::BellDiagonal);

#[pymethods]
impl PyBellDiagonal {
    #[new]
    fn new(probs: [f64; 4]) -> PyResult<Self> {
        bellpur::BellDiagonal::new(probs).map(Self).map_err(err)
    }

    #[staticmethod]
    fn werner(f: f64) -> PyResult<Self> {
        bellpur::density::werner(f).map(Self).map_err(err)
    }

    #[getter]
    fn probs(&self) -> [f64; 4] {
        self.0.probs()
    }

    fn fidelity(&self) -> f64 {
        self.0.fidelity()
    }

    fn entropy(&self) -> f64 {
        self.0.entropy()
    }

    fn entanglement_of_formation(&self) -> f64 {
        self.0.entanglement_of_formation()
    }

    fn hashing_yield(&self) -> f64 {
        yield_of(&self.0)
    }

    /// One recurrence step: `(state, p_pass)`, before any variant map.
    fn recurrence_step(&self) -> PyResult<(Self, f64)> {
        bellpur::protocols::recurrence_step(&self.0)
            .map(|(s, p)| (Self(s), p))
            .map_err(err)
    }

    /// Size of the minimal pure-state ensemble and its average entanglement.
    fn minimal_ensemble(&self) -> (usize, f64) {
        let e = minimal_ensemble(&self.0);
        (e.len(), e.average_entanglement())
    }

    fn to_density(&self) -> PyDensityMatrix {
        PyDensityMatrix(self.0.to_density())
    }

    fn __repr__(&self) -> String {
        let [a, b, c, d] = self.0.probs();
        format!("BellDiagonal([{a}, {b}, {c}, {d}])")
    }
}

/// Two-qubit density matrix in the computational basis.
#[pyclass(name = "DensityMatrix", frozen)]
struct PyDensityMatrix(bellpur::DensityMatrix);

#[pymethods]
impl PyDensityMatrix {
    #[new]
    fn new(rows: [[C64; 4]; 4]) -> PyResult<Self> {
        let m = nalgebra::Matrix4::from_fn(|r, c| rows[r][c]);
        bellpur::DensityMatrix::new(m, Basis::Computational).map(Self).map_err(err)
    }

    fn to_list(&self) -> Vec<Vec<C64>> {
        let m = self.0.to_computational();
        (0..4).map(|r| (0..4).map(|c| m.matrix()[(r, c)]).collect()).collect()
    }

    fn entropy(&self) -> f64 {
        self.0.entropy()
    }

    fn fully_entangled_fraction(&self) -> f64 {
        self.0.fully_entangled_fraction()
    }

    fn bell_weights(&self) -> [f64; 4] {
        self.0.bell_weights()
    }

    /// Average over a discrete twirl: "t12" (default), "d2", "triple", "axes".
    #[pyo3(signature = (kind = "t12"))]
    fn twirl(&self, kind: &str) -> PyResult<Self> {
        let kind = match kind {
            "t12" => TwirlKind::T12,
            "d2" => TwirlKind::D2,
            "triple" => TwirlKind::Triple,
            "axes" => TwirlKind::Axes,
            other => return Err(PyValueError::new_err(format!("unknown twirl {other:?}"))),
        };
        Ok(Self(apply_twirl(&self.0, &twirl_group(kind))))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

/// Applies a gate list (text format, one gate per line) to a Bell string
/// such as `"00,11,01"`.
#[pyfunction]
fn apply_gate_list(gates: &str, string: &str) -> PyResult<String> {
    let g = parse_gate_list(gates).map_err(err)?;
    let x: bellpur::BellString = string.parse().map_err(err)?;
    apply_gates(&g, &x).map(|y| y.to_string()).map_err(err)
}

#[pyfunction]
fn hashing_threshold() -> f64 {
    threshold()
}

#[pyfunction]
#[pyo3(signature = (f, variant = "macchiavello"))]
fn combined_yield(f: f64, variant: &str) -> PyResult<f64> {
    Ok(bellpur::capacity::combined_yield(f, self::variant(variant)?))
}

/// `(F, E_formation, D_hash, D_recur_hash, D_macch_hash, KL_upper)`.
type CurveRow = (f64, f64, f64, f64, f64, f64);

#[pyfunction]
fn curves(fmin: f64, fmax: f64, points: usize) -> PyResult<Vec<CurveRow>> {
    let pts = emit_curves(&linear_grid(fmin, fmax, points)).map_err(err)?;
    Ok(pts
        .iter()
        .map(|p| (p.f, p.e_formation, p.d_hash, p.d_recur_hash, p.d_macch_hash, p.kl_upper))
        .collect())
}

/// Rows `(step, F, p_pass, fraction_remaining)`.
#[pyfunction]
#[pyo3(signature = (f0, variant = "twirl", target = 1.0 - 1e-6, max_steps = 64))]
fn recurrence(f0: f64, variant: &str, target: f64, max_steps: usize) -> PyResult<Vec<(usize, f64, f64, f64)>> {
    let trace = recurrence_iterate(f0, self::variant(variant)?, StopRule { target, max_steps }).map_err(err)?;
    Ok(trace
        .steps
        .iter()
        .enumerate()
        .map(|(k, s)| (k + 1, s.p.fidelity(), s.p_pass, s.fraction_remaining))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (n, f, rounds, seed = 0))]
fn hashing_simulate<'py>(py: Python<'py>, n: usize, f: f64, rounds: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let w = bellpur::density::werner(f).map_err(err)?;
    let r = simulate(&w, n, rounds, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("rounds", r.rounds)?;
    d.set_item("identified", r.identified)?;
    d.set_item("failure_mode", r.failure_mode.to_string())?;
    d.set_item("entropy_trace", r.entropy_trace)?;
    d.set_item("candidate_trace", r.candidate_trace)?;
    Ok(d)
}

/// Best circuit found as `(gate_list_text, summary)`, or `None`.
#[pyfunction]
#[pyo3(signature = (n, m = 1, t = 1, budget = 1_000_000, restarts = 8, seed = 0))]
fn monte_carlo_search(
    n: usize,
    m: usize,
    t: usize,
    budget: u64,
    restarts: usize,
    seed: u64,
) -> PyResult<Option<(String, String)>> {
    let cfg = SearchConfig {
        restarts,
        ..SearchConfig::new(n, m, t, budget)
    };
    let out = search(&cfg, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(err)?;
    Ok(out.best.map(|s| (format_gate_list(&s.gates), s.summary())))
}

#[pyfunction]
fn verify_published() -> PyResult<bool> {
    check_published().map(|r| r.goodcon && r.badcon && r.det_one).map_err(err)
}

/// `(kl_holds, worst_decode_fidelity)` for the five-qubit codewords over
/// identity and the fifteen single-qubit Paulis.
#[pyfunction]
#[pyo3(signature = (logicals = 20, seed = 0))]
fn verify_code(logicals: usize, seed: u64) -> PyResult<(bool, f64)> {
    let code = published_codewords();
    let errors = standard_errors(5);
    let kl = kl_check(&code, &errors, 1e-10);
    let decoder = Decoder::new(&code, &errors);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..logicals {
        let (a, b) = random_logical(&mut rng);
        for e in &errors {
            worst = worst.min(decode_with(&decoder, &code, a, b, e).map_err(err)?);
        }
    }
    Ok((kl.holds, worst))
}

#[pyfunction]
#[pyo3(signature = (samples = 100, seed = 0))]
fn twirl_check(samples: usize, seed: u64) -> bool {
    twirl_battery(samples, &mut ChaCha8Rng::seed_from_u64(seed)).passed()
}

/// `(success_prob, sigma, yield, min_survivor_fidelity)`.
#[pyfunction]
#[pyo3(signature = (p = 0.5, pairs = 100_000, seed = 0))]
fn direct_purify(p: f64, pairs: u64, seed: u64) -> PyResult<(f64, f64, f64, f64)> {
    let r = direct_purify_sim(p, pairs, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(err)?;
    Ok((r.estimated_success_prob, r.success_sigma(), r.estimated_yield, r.min_survivor_fidelity))
}

#[pymodule]
fn bellpur_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBellDiagonal>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_function(wrap_pyfunction!(apply_gate_list, m)?)?;
    m.add_function(wrap_pyfunction!(hashing_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(combined_yield, m)?)?;
    m.add_function(wrap_pyfunction!(curves, m)?)?;
    m.add_function(wrap_pyfunction!(recurrence, m)?)?;
    m.add_function(wrap_pyfunction!(hashing_simulate, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo_search, m)?)?;
    m.add_function(wrap_pyfunction!(verify_published, m)?)?;
    m.add_function(wrap_pyfunction!(verify_code, m)?)?;
    m.add_function(wrap_pyfunction!(twirl_check, m)?)?;
    m.add_function(wrap_pyfunction!(direct_purify, m)?)?;
    Ok(())
}
