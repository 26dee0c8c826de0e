//! Python bindings: Hamiltonian construction from FCIDUMP files or the
//! builtin TFIM, the two solvers, the FCI oracle, and the gate census.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use cadmrg_core::clifford2::enumerate_gates;
use cadmrg_core::dmrg::{run_dmrg, RunConfig, RunResult};
use cadmrg_core::camps::run_cadmrg;
use cadmrg_core::fci;
use cadmrg_core::fcidump::parse_fcidump;
use cadmrg_core::fermion::{jordan_wigner, spin_orbital_hamiltonian, SpinOrdering};
use cadmrg_core::model;
use cadmrg_core::mps_mpo::mpo_from_pauli_sum;
use cadmrg_core::pauli::PauliSum;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// A qubit Hamiltonian (sum of Pauli strings) ready for the solvers.
#[pyclass]
struct Hamiltonian {
    sum: PauliSum,
    label: String,
    sector: Option<(usize, usize)>,
}

#[pymethods]
impl Hamiltonian {
    /// Molecular Hamiltonian: FCIDUMP integrals -> interleaved spin
    /// orbitals -> Jordan-Wigner.
    #[staticmethod]
    fn from_fcidump(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(err)?;
        let t = parse_fcidump(&text).map_err(err)?;
        let n_alpha = ((t.n_electrons as i32 + t.ms2) / 2) as usize;
        let n_beta = t.n_electrons - n_alpha;
        let sum = jordan_wigner(&spin_orbital_hamiltonian(&t, SpinOrdering::Interleaved));
        Ok(Hamiltonian {
            sum,
            label: path.to_string(),
            sector: Some((n_alpha, n_beta)),
        })
    }

    /// Open transverse-field Ising chain -J sum ZZ - g sum X.
    #[staticmethod]
    #[pyo3(signature = (n, j=1.0, g=1.0))]
    fn tfim(n: usize, j: f64, g: f64) -> Self {
        Hamiltonian { sum: model::tfim(n, j, g), label: format!("tfim(n={n})"), sector: None }
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.sum.n_qubits
    }

    #[getter]
    fn n_terms(&self) -> usize {
        self.sum.n_terms()
    }

    /// Exact ground energy by dense diagonalization (<= 14 qubits).
    fn exact_energy(&self) -> PyResult<f64> {
        fci::dense_ground_energy(&self.sum).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Hamiltonian({}, {} qubits, {} terms)",
            self.label,
            self.sum.n_qubits,
            self.sum.n_terms()
        )
    }
}

/// Outcome of a DMRG / CA-DMRG run.
#[pyclass]
struct RunOutcome {
    #[pyo3(get)]
    best_energy: f64,
    #[pyo3(get)]
    converged: bool,
    /// energy at the end of each sweep (best restart)
    #[pyo3(get)]
    energies: Vec<f64>,
    #[pyo3(get)]
    max_discarded: Vec<f64>,
    #[pyo3(get)]
    chi_w_max: Vec<usize>,
    #[pyo3(get)]
    restart_energies: Vec<f64>,
    /// recorded gates: (sweep, bond, gate_id, gate_class)
    #[pyo3(get)]
    circuit: Vec<(usize, usize, usize, String)>,
}

#[pymethods]
impl RunOutcome {
    fn __repr__(&self) -> String {
        format!(
            "RunOutcome(best_energy={:.10}, sweeps={}, gates={}, converged={})",
            self.best_energy,
            self.energies.len(),
            self.circuit.len(),
            self.converged
        )
    }
}

fn outcome(r: RunResult) -> RunOutcome {
    let gates = enumerate_gates();
    RunOutcome {
        best_energy: r.best_energy,
        converged: r.converged,
        energies: r.reports.iter().map(|s| s.energy).collect(),
        max_discarded: r.reports.iter().map(|s| s.max_discarded).collect(),
        chi_w_max: r.reports.iter().map(|s| s.chi_w_max).collect(),
        restart_energies: r.restart_energies,
        circuit: r
            .circuit
            .record
            .iter()
            .map(|g| (g.sweep, g.bond, g.gate_id, gates[g.gate_id].gate_class.as_str().to_string()))
            .collect(),
    }
}

fn config(
    chi: usize,
    restarts: usize,
    max_sweeps: usize,
    min_sweeps: usize,
    energy_tol: f64,
    seed: u64,
    sector: Option<(usize, usize)>,
) -> PyResult<RunConfig> {
    if chi == 0 || restarts == 0 {
        return Err(PyValueError::new_err("chi and restarts must be >= 1"));
    }
    let mut cfg = RunConfig::new(chi);
    cfg.n_restarts = restarts;
    cfg.max_sweeps = max_sweeps;
    cfg.min_sweeps_before_stop = min_sweeps;
    cfg.energy_tol = energy_tol;
    cfg.seed = seed;
    cfg.sector = sector;
    Ok(cfg)
}

/// Two-site DMRG ground-state search.
#[pyfunction]
#[pyo3(signature = (h, chi, *, restarts=5, max_sweeps=50, min_sweeps=20, energy_tol=1e-6, seed=0))]
fn dmrg(
    h: &Hamiltonian,
    chi: usize,
    restarts: usize,
    max_sweeps: usize,
    min_sweeps: usize,
    energy_tol: f64,
    seed: u64,
) -> PyResult<RunOutcome> {
    let cfg = config(chi, restarts, max_sweeps, min_sweeps, energy_tol, seed, h.sector)?;
    let mpo = mpo_from_pauli_sum(&h.sum).map_err(err)?;
    run_dmrg(&mpo, &cfg).map(outcome).map_err(err)
}

/// Clifford-augmented DMRG: every truncation scans the 720 two-qubit
/// Clifford cosets and folds the winner into the Hamiltonian.
#[pyfunction]
#[pyo3(signature = (h, chi, *, restarts=5, max_sweeps=50, min_sweeps=20, energy_tol=1e-6, seed=0))]
fn cadmrg(
    h: &Hamiltonian,
    chi: usize,
    restarts: usize,
    max_sweeps: usize,
    min_sweeps: usize,
    energy_tol: f64,
    seed: u64,
) -> PyResult<RunOutcome> {
    let cfg = config(chi, restarts, max_sweeps, min_sweeps, energy_tol, seed, h.sector)?;
    let mpo = mpo_from_pauli_sum(&h.sum).map_err(err)?;
    run_cadmrg(&mpo, &cfg).map(outcome).map_err(err)
}

/// Exact ground energy of an FCIDUMP file via determinant FCI.
#[pyfunction]
#[pyo3(signature = (path, tol=1e-9))]
fn fci_energy(path: &str, tol: f64) -> PyResult<f64> {
    let text = std::fs::read_to_string(path).map_err(err)?;
    let t = parse_fcidump(&text).map_err(err)?;
    let n_alpha = ((t.n_electrons as i32 + t.ms2) / 2) as usize;
    let n_beta = t.n_electrons - n_alpha;
    let r = fci::fci_ground_energy(&t, n_alpha, n_beta, tol).map_err(err)?;
    Ok(r.energy)
}

/// Census of the two-qubit Clifford cosets by gate class.
#[pyfunction]
fn gate_census() -> std::collections::HashMap<String, usize> {
    let mut census = std::collections::HashMap::new();
    for g in enumerate_gates() {
        *census.entry(g.gate_class.as_str().to_string()).or_insert(0) += 1;
    }
    census
}

#[pymodule]
fn cadmrg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Hamiltonian>()?;
    m.add_class::<RunOutcome>()?;
    m.add_function(wrap_pyfunction!(dmrg, m)?)?;
    m.add_function(wrap_pyfunction!(cadmrg, m)?)?;
    m.add_function(wrap_pyfunction!(fci_energy, m)?)?;
    m.add_function(wrap_pyfunction!(gate_census, m)?)?;
    Ok(())
}
