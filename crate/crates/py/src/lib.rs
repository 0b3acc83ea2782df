//! Python bindings: the main types and operations of the flatwalk toolkit.
//!
//! Build with `cargo build --release -p flatwalk-py`; the produced
//! `libflatwalk_py.so` imports as the `flatwalk_py` module (see
//! `python/smoke_test.py`).

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use flatwalk::experiment::{run_experiment as run_experiment_rs, ExperimentConfig, Scenario};
use flatwalk::{compressor, hamiltonian, lattice, metrics, simulator};

fn err(e: flatwalk::Error) -> PyErr {
    match e {
        flatwalk::Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Weighted hopping graph with complex amplitudes.
#[pyclass(name = "LatticeSpec", skip_from_py_object)]
#[derive(Clone)]
struct PyLatticeSpec {
    inner: lattice::LatticeSpec,
}

#[pymethods]
impl PyLatticeSpec {
    #[getter]
    fn n_sites(&self) -> usize {
        self.inner.n_sites()
    }

    /// Edges as `(i, j, amplitude)` tuples.
    fn edges(&self) -> Vec<(usize, usize, Complex64)> {
        self.inner
            .edges()
            .iter()
            .map(|e| (e.i, e.j, e.amplitude))
            .collect()
    }

    fn site_labels(&self) -> Vec<String> {
        self.inner
            .site_labels()
            .iter()
            .map(|l| l.to_string())
            .collect()
    }

    fn qubit_order(&self) -> Vec<usize> {
        self.inner.qubit_order().to_vec()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: lattice::LatticeSpec::from_text(text).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "LatticeSpec(n_sites={}, n_edges={})",
            self.inner.n_sites(),
            self.inner.edges().len()
        )
    }
}

/// Real-coefficient Pauli-string Hamiltonian.
#[pyclass(name = "HamiltonianTerms", skip_from_py_object)]
#[derive(Clone)]
struct PyHamiltonianTerms {
    inner: hamiltonian::HamiltonianTerms,
}

#[pymethods]
impl PyHamiltonianTerms {
    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    #[getter]
    fn n_terms(&self) -> usize {
        self.inner.terms().len()
    }

    #[getter]
    fn energy_offset(&self) -> f64 {
        self.inner.energy_offset()
    }

    /// `(coefficient, pauli_string)` pairs.
    fn terms(&self) -> Vec<(f64, String)> {
        self.inner
            .terms()
            .iter()
            .map(|t| {
                (
                    t.coefficient(),
                    t.operators().iter().map(|p| p.as_char()).collect(),
                )
            })
            .collect()
    }

    fn to_lines(&self) -> String {
        self.inner.to_lines()
    }

    fn merge(&self, other: &PyHamiltonianTerms) -> PyResult<Self> {
        Ok(Self {
            inner: self
                .inner
                .clone()
                .merge(other.inner.clone())
                .map_err(err)?,
        })
    }

    /// Dense matrix rows (full space, or a fixed particle-number sector).
    #[pyo3(signature = (sector=None))]
    fn to_matrix(&self, sector: Option<usize>) -> PyResult<Vec<Vec<Complex64>>> {
        let m = self.inner.to_matrix(sector).map_err(err)?;
        Ok((0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "HamiltonianTerms(n_qubits={}, n_terms={})",
            self.inner.n_qubits(),
            self.inner.terms().len()
        )
    }
}

/// Ordered one-/two-qubit gate circuit.
#[pyclass(name = "Circuit", skip_from_py_object)]
#[derive(Clone)]
struct PyCircuit {
    inner: flatwalk::Circuit,
}

#[pymethods]
impl PyCircuit {
    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    #[getter]
    fn n_gates(&self) -> usize {
        self.inner.gates().len()
    }

    /// Number of layers containing at least one two-qubit gate.
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: flatwalk::Circuit::from_text(text).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Circuit(n_qubits={}, n_gates={}, depth={})",
            self.inner.n_qubits(),
            self.inner.gates().len(),
            self.inner.depth()
        )
    }
}

/// Normalized statevector over the computational basis.
#[pyclass(name = "StateVector", skip_from_py_object)]
#[derive(Clone)]
struct PyStateVector {
    inner: simulator::StateVector,
}

#[pymethods]
impl PyStateVector {
    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    fn densities(&self) -> Vec<f64> {
        self.inner.densities()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn fidelity(&self, other: &PyStateVector) -> PyResult<f64> {
        self.inner.fidelity(&other.inner).map_err(err)
    }

    fn particle_sector(&self) -> PyResult<usize> {
        self.inner.particle_sector().map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("StateVector(n_qubits={})", self.inner.n_qubits())
    }
}

/// Measurement-shot histogram.
#[pyclass(name = "ShotRecord", skip_from_py_object)]
#[derive(Clone)]
struct PyShotRecord {
    inner: simulator::ShotRecord,
}

#[pymethods]
impl PyShotRecord {
    #[getter]
    fn n_shots(&self) -> u64 {
        self.inner.n_shots()
    }

    #[getter]
    fn discarded(&self) -> u64 {
        self.inner.discarded()
    }

    fn counts<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for (k, v) in self.inner.counts() {
            d.set_item(k, v)?;
        }
        Ok(d)
    }

    /// Per-site occupations over the kept shots (they sum to the particle
    /// number after post-selection).
    fn densities(&self) -> PyResult<Vec<f64>> {
        metrics::site_densities_from_record(&self.inner).map_err(err)
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn __repr__(&self) -> String {
        format!(
            "ShotRecord(n_shots={}, discarded={})",
            self.inner.n_shots(),
            self.inner.discarded()
        )
    }
}

/// Optimized brick-wall compression of a time-evolution circuit.
#[pyclass(name = "CompressionResult", skip_from_py_object)]
#[derive(Clone)]
struct PyCompressionResult {
    inner: compressor::CompressionResult,
}

#[pymethods]
impl PyCompressionResult {
    #[getter]
    fn parameters(&self) -> Vec<f64> {
        self.inner.parameters.clone()
    }

    #[getter]
    fn n_layers(&self) -> usize {
        self.inner.n_layers
    }

    #[getter]
    fn infidelity(&self) -> f64 {
        self.inner.infidelity
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn cr(&self) -> f64 {
        self.inner.cr
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn t(&self) -> f64 {
        self.inner.t
    }

    fn to_circuit(&self, n_qubits: usize) -> PyResult<PyCircuit> {
        Ok(PyCircuit {
            inner: self.inner.to_circuit(n_qubits).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "CompressionResult(t={}, n_layers={}, infidelity={:.3e}, cr={:.1}%, converged={})",
            self.inner.t, self.inner.n_layers, self.inner.infidelity, self.inner.cr, self.inner.converged
        )
    }
}

#[pyfunction]
fn build_diamond_chain(n_cells: usize, phi: f64) -> PyResult<PyLatticeSpec> {
    Ok(PyLatticeSpec {
        inner: lattice::build_diamond_chain(n_cells, phi).map_err(err)?,
    })
}

#[pyfunction]
fn build_single_plaquette(reversed_link: bool) -> PyLatticeSpec {
    PyLatticeSpec {
        inner: lattice::build_single_plaquette(reversed_link),
    }
}

#[pyfunction]
fn build_embedded_chain(
    n_left: usize,
    n_right: usize,
    plaquette_amp: f64,
    reversed_link: bool,
) -> PyResult<PyLatticeSpec> {
    Ok(PyLatticeSpec {
        inner: lattice::build_embedded_chain(n_left, n_right, plaquette_amp, reversed_link)
            .map_err(err)?,
    })
}

/// Bloch bands of the diamond chain: `(q_grid, [band0, band1, band2])`.
#[pyfunction]
fn band_structure(phi: f64, n_q: usize) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let bs = lattice::band_structure(phi, n_q).map_err(err)?;
    Ok((bs.q_grid, bs.bands.to_vec()))
}

#[pyfunction]
fn hopping_terms(spec: &PyLatticeSpec) -> PyResult<PyHamiltonianTerms> {
    Ok(PyHamiltonianTerms {
        inner: hamiltonian::hopping_terms(&spec.inner).map_err(err)?,
    })
}

#[pyfunction]
fn interaction_terms(spec: &PyLatticeSpec, v: f64) -> PyResult<PyHamiltonianTerms> {
    Ok(PyHamiltonianTerms {
        inner: hamiltonian::interaction_terms(&spec.inner, v).map_err(err)?,
    })
}

#[pyfunction]
fn trotter_step(terms: &PyHamiltonianTerms, dt: f64) -> PyResult<PyCircuit> {
    Ok(PyCircuit {
        inner: flatwalk::trotter_step(&terms.inner, dt).map_err(err)?,
    })
}

#[pyfunction]
fn trotter_circuit(terms: &PyHamiltonianTerms, t: f64, dt: f64) -> PyResult<PyCircuit> {
    Ok(PyCircuit {
        inner: flatwalk::trotter_circuit(&terms.inner, t, dt).map_err(err)?,
    })
}

#[pyfunction]
fn compression_ratio(d_uqc: usize, d_oqc: usize) -> PyResult<f64> {
    flatwalk::compression_ratio(d_uqc, d_oqc).map_err(err)
}

#[pyfunction]
fn prepare_initial(n_qubits: usize, occupied: Vec<usize>) -> PyResult<PyStateVector> {
    Ok(PyStateVector {
        inner: simulator::StateVector::prepare_initial(n_qubits, &occupied).map_err(err)?,
    })
}

#[pyfunction]
fn apply_circuit(state: &PyStateVector, circuit: &PyCircuit) -> PyResult<PyStateVector> {
    Ok(PyStateVector {
        inner: simulator::apply_circuit(&state.inner, &circuit.inner).map_err(err)?,
    })
}

#[pyfunction]
fn exact_evolve(terms: &PyHamiltonianTerms, state: &PyStateVector, t: f64) -> PyResult<PyStateVector> {
    Ok(PyStateVector {
        inner: simulator::exact_evolve(&terms.inner, &state.inner, t).map_err(err)?,
    })
}

#[pyfunction]
fn sample_shots(state: &PyStateVector, n_shots: u64, seed: u64) -> PyResult<PyShotRecord> {
    Ok(PyShotRecord {
        inner: simulator::sample_shots(&state.inner, n_shots, seed).map_err(err)?,
    })
}

#[pyfunction]
fn post_select(record: &PyShotRecord, n_particles: usize) -> PyResult<PyShotRecord> {
    Ok(PyShotRecord {
        inner: simulator::post_select(&record.inner, n_particles).map_err(err)?,
    })
}

#[pyfunction]
fn apply_noisy_circuit(
    state: &PyStateVector,
    circuit: &PyCircuit,
    p2: f64,
    seed: u64,
) -> PyResult<PyStateVector> {
    Ok(PyStateVector {
        inner: simulator::apply_noisy_circuit(&state.inner, &circuit.inner, p2, seed)
            .map_err(err)?,
    })
}

fn compress_config(
    fidelity_target: f64,
    max_layers: usize,
    seed: u64,
    restarts: usize,
) -> compressor::CompressConfig {
    compressor::CompressConfig {
        fidelity_target,
        max_layers,
        seed,
        restarts,
        ..Default::default()
    }
}

/// Variationally compresses `e^{-iHt}|initial>` into a brick-wall circuit.
#[pyfunction]
#[pyo3(signature = (terms, initial, t, fidelity_target=0.999, max_layers=16, seed=7, restarts=1))]
fn compress(
    terms: &PyHamiltonianTerms,
    initial: &PyStateVector,
    t: f64,
    fidelity_target: f64,
    max_layers: usize,
    seed: u64,
    restarts: usize,
) -> PyResult<PyCompressionResult> {
    let config = compress_config(fidelity_target, max_layers, seed, restarts);
    Ok(PyCompressionResult {
        inner: compressor::compress(&terms.inner, &initial.inner, t, &config).map_err(err)?,
    })
}

/// Advances a converged compression by `dt`, warm-starting from `previous`.
#[pyfunction]
#[pyo3(signature = (previous, terms, initial, dt, fidelity_target=0.999, max_layers=16, seed=7, restarts=1))]
#[allow(clippy::too_many_arguments)]
fn compress_incremental(
    previous: &PyCompressionResult,
    terms: &PyHamiltonianTerms,
    initial: &PyStateVector,
    dt: f64,
    fidelity_target: f64,
    max_layers: usize,
    seed: u64,
    restarts: usize,
) -> PyResult<PyCompressionResult> {
    let config = compress_config(fidelity_target, max_layers, seed, restarts);
    Ok(PyCompressionResult {
        inner: compressor::compress_incremental(
            &previous.inner,
            &terms.inner,
            &initial.inner,
            dt,
            &config,
        )
        .map_err(err)?,
    })
}

#[pyfunction]
fn fidelity_bc(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    metrics::fidelity_bc(&p, &q).map_err(err)
}

#[pyfunction]
fn overlap(n0: Vec<f64>, nt: Vec<f64>) -> PyResult<f64> {
    metrics::overlap(&n0, &nt).map_err(err)
}

/// `(frequencies, magnitudes)` of the discrete spectrum.
#[pyfunction]
fn fft_spectrum(series: Vec<f64>, dt: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let s = metrics::fft_spectrum(&series, dt).map_err(err)?;
    Ok((s.frequencies, s.magnitudes))
}

#[pyfunction]
fn transmission(densities: Vec<f64>, sites: Vec<usize>) -> PyResult<f64> {
    metrics::transmission(&densities, &sites).map_err(err)
}

/// Default config document (TOML) for a scenario.
#[pyfunction]
fn scenario_defaults(name: &str) -> PyResult<String> {
    Ok(ExperimentConfig::for_scenario(Scenario::parse(name).map_err(err)?).to_toml())
}

fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match value {
        serde_json::Value::Null => py.None().into_bound(py),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.into_any(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.into_any()
        }
    })
}

/// Runs an experiment from a TOML config document (with optional
/// `key=value` overrides) and returns the run summary as a dict.
#[pyfunction]
#[pyo3(signature = (config_toml, overrides=None, output_dir=None))]
fn run_experiment(
    py: Python<'_>,
    config_toml: &str,
    overrides: Option<Vec<String>>,
    output_dir: Option<String>,
) -> PyResult<Py<PyAny>> {
    let mut config = ExperimentConfig::from_toml_str(config_toml).map_err(err)?;
    for entry in overrides.unwrap_or_default() {
        let (key, value) = entry.split_once('=').ok_or_else(|| {
            PyValueError::new_err(format!("override must be KEY=VALUE, got `{entry}`"))
        })?;
        config.apply_override(key.trim(), value.trim()).map_err(err)?;
    }
    if let Some(dir) = output_dir {
        config.output_dir = dir.into();
    }
    config.validate().map_err(err)?;
    let summary = run_experiment_rs(&config).map_err(err)?;
    let value = serde_json::to_value(&summary)
        .map_err(|e| PyValueError::new_err(format!("summary serialization: {e}")))?;
    Ok(json_to_py(py, &value)?.unbind())
}

#[pymodule]
fn flatwalk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyLatticeSpec>()?;
    m.add_class::<PyHamiltonianTerms>()?;
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyStateVector>()?;
    m.add_class::<PyShotRecord>()?;
    m.add_class::<PyCompressionResult>()?;
    m.add_function(wrap_pyfunction!(build_diamond_chain, m)?)?;
    m.add_function(wrap_pyfunction!(build_single_plaquette, m)?)?;
    m.add_function(wrap_pyfunction!(build_embedded_chain, m)?)?;
    m.add_function(wrap_pyfunction!(band_structure, m)?)?;
    m.add_function(wrap_pyfunction!(hopping_terms, m)?)?;
    m.add_function(wrap_pyfunction!(interaction_terms, m)?)?;
    m.add_function(wrap_pyfunction!(trotter_step, m)?)?;
    m.add_function(wrap_pyfunction!(trotter_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(compression_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(prepare_initial, m)?)?;
    m.add_function(wrap_pyfunction!(apply_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(exact_evolve, m)?)?;
    m.add_function(wrap_pyfunction!(sample_shots, m)?)?;
    m.add_function(wrap_pyfunction!(post_select, m)?)?;
    m.add_function(wrap_pyfunction!(apply_noisy_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(compress, m)?)?;
    m.add_function(wrap_pyfunction!(compress_incremental, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_bc, m)?)?;
    m.add_function(wrap_pyfunction!(overlap, m)?)?;
    m.add_function(wrap_pyfunction!(fft_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(transmission, m)?)?;
    m.add_function(wrap_pyfunction!(scenario_defaults, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
