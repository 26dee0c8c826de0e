//! Experiment execution: Hamiltonian assembly, the (method, chi, restart)
//! cell grid, and the runs.csv / summary.csv / circuit.csv writers.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{Context, Result};
use cadmrg_core::clifford2::enumerate_gates;
use cadmrg_core::dmrg::{run_engine, RunResult};
use cadmrg_core::fci::fci_ground_energy;
use cadmrg_core::fcidump::parse_fcidump;
use cadmrg_core::fermion::{jordan_wigner, spin_orbital_hamiltonian, SpinOrdering};
use cadmrg_core::model::{tfim, tfim_ground_energy};
use cadmrg_core::mps_mpo::{mpo_from_pauli_sum, Mpo};
use cadmrg_core::pauli::PauliSum;

use crate::config::{ExperimentSpec, Method, Source};

pub const RUNS_SCHEMA: &str = "# schema: cadmrg.runs.v1";
pub const SUMMARY_SCHEMA: &str = "# schema: cadmrg.summary.v1";
pub const CIRCUIT_SCHEMA: &str = "# schema: cadmrg.circuit.v1";

pub struct Problem {
    pub hamiltonian: PauliSum,
    pub mpo: Mpo,
    /// reference ground energy from the matching exact oracle
    pub fci_energy: f64,
    /// (n_alpha, n_beta) for molecular problems; restarts are then seeded
    /// inside that occupation sector
    pub sector: Option<(usize, usize)>,
}

pub fn build_problem(source: &Source) -> Result<Problem> {
    match source {
        Source::Fcidump(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let t = parse_fcidump(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            let n_alpha = ((t.n_electrons as i32 + t.ms2) / 2) as usize;
            let n_beta = t.n_electrons - n_alpha;
            let fci = fci_ground_energy(&t, n_alpha, n_beta, 1e-9)
                .with_context(|| format!("FCI oracle on {}", path.display()))?;
            let p = jordan_wigner(&spin_orbital_hamiltonian(&t, SpinOrdering::Interleaved));
            let mpo = mpo_from_pauli_sum(&p).context("MPO construction")?;
            Ok(Problem {
                hamiltonian: p,
                mpo,
                fci_energy: fci.energy,
                sector: Some((n_alpha, n_beta)),
            })
        }
        Source::Tfim { n, j, g } => {
            let p = tfim(*n, *j, *g);
            let mpo = mpo_from_pauli_sum(&p).context("MPO construction")?;
            Ok(Problem {
                hamiltonian: p,
                mpo,
                fci_energy: tfim_ground_energy(*n, *j, *g),
                sector: None,
            })
        }
    }
}

/// One (method, chi, restart) unit of work.
#[derive(Clone, Copy)]
pub struct Cell {
    pub method: Method,
    pub chi: usize,
    pub restart: usize,
}

pub struct CellOutcome {
    pub cell: Cell,
    pub result: std::result::Result<RunResult, String>,
}

/// Run every cell of the grid, at most `workers` concurrently; outcomes
/// come back in grid order regardless of completion order.
pub fn run_grid(spec: &ExperimentSpec, problem: &Problem) -> Vec<CellOutcome> {
    let gates = enumerate_gates();
    let mut cells = Vec::new();
    for &method in &spec.methods {
        for &chi in &spec.chis {
            for restart in 0..spec.n_restarts {
                cells.push(Cell { method, chi, restart });
            }
        }
    }
    let slots: Mutex<Vec<Option<CellOutcome>>> =
        Mutex::new((0..cells.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = spec.workers.min(cells.len()).max(1);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= cells.len() {
                    break;
                }
                let cell = cells[k];
                let mut cfg = spec.run_config(cell.chi);
                cfg.n_restarts = 1;
                cfg.seed = spec.seed + cell.restart as u64;
                cfg.sector = problem.sector;
                let table = match cell.method {
                    Method::Dmrg => &gates[0..1],
                    Method::Cadmrg => &gates[..],
                };
                let result = run_engine(&problem.mpo, &cfg, table).map_err(|e| e.to_string());
                slots.lock().unwrap()[k] = Some(CellOutcome { cell, result });
            });
        }
    });

    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|o| o.expect("all cells executed"))
        .collect()
}

/// Best finished run per (method, chi), in grid order.
pub struct CellSummary {
    pub method: Method,
    pub chi: usize,
    pub best: Option<RunResult>,
    pub total_seconds: f64,
    pub status: String,
}

pub fn summarize(spec: &ExperimentSpec, outcomes: &[CellOutcome]) -> Vec<CellSummary> {
    let mut out = Vec::new();
    for &method in &spec.methods {
        for &chi in &spec.chis {
            let mut best: Option<&RunResult> = None;
            let mut total = 0.0;
            let mut errors = Vec::new();
            for o in outcomes
                .iter()
                .filter(|o| o.cell.method == method && o.cell.chi == chi)
            {
                match &o.result {
                    Ok(r) => {
                        total += r.reports.iter().map(|s| s.wall_seconds).sum::<f64>();
                        if best.map_or(true, |b| r.best_energy < b.best_energy) {
                            best = Some(r);
                        }
                    }
                    Err(e) => errors.push(format!("restart {}: {e}", o.cell.restart)),
                }
            }
            let status = if errors.is_empty() {
                "ok".to_string()
            } else if best.is_some() {
                format!("partial ({})", errors.join("; "))
            } else {
                format!("failed ({})", errors.join("; "))
            };
            out.push(CellSummary {
                method,
                chi,
                best: best.cloned(),
                total_seconds: total,
                status,
            });
        }
    }
    out
}

pub fn write_runs_csv(path: &Path, outcomes: &[CellOutcome]) -> Result<()> {
    let mut s = String::new();
    writeln!(s, "{RUNS_SCHEMA}")?;
    writeln!(
        s,
        "method,chi,restart,sweep,energy,max_discarded,chi_w_max,wall_seconds"
    )?;
    for o in outcomes {
        if let Ok(r) = &o.result {
            for rep in &r.reports {
                writeln!(
                    s,
                    "{},{},{},{},{:.12e},{:.6e},{},{:.4}",
                    o.cell.method.as_str(),
                    o.cell.chi,
                    o.cell.restart,
                    rep.sweep,
                    rep.energy,
                    rep.max_discarded,
                    rep.chi_w_max,
                    rep.wall_seconds
                )?;
            }
        }
    }
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn write_summary_csv(
    path: &Path,
    spec: &ExperimentSpec,
    summaries: &[CellSummary],
    fci_energy: f64,
) -> Result<()> {
    let mut s = String::new();
    writeln!(s, "{SUMMARY_SCHEMA}")?;
    writeln!(
        s,
        "method,chi,best_energy,fci_energy,abs_error,sweeps_to_converge,total_seconds,status"
    )?;
    for c in summaries {
        match &c.best {
            Some(r) => {
                let conv = r
                    .sweeps_to_converge(spec.energy_tol)
                    .map(|k| k.to_string())
                    .unwrap_or_default();
                writeln!(
                    s,
                    "{},{},{:.12e},{:.12e},{:.6e},{},{:.4},{}",
                    c.method.as_str(),
                    c.chi,
                    r.best_energy,
                    fci_energy,
                    (r.best_energy - fci_energy).abs(),
                    conv,
                    c.total_seconds,
                    c.status
                )?;
            }
            None => {
                writeln!(s, "{},{},,,,,,{}", c.method.as_str(), c.chi, c.status)?;
            }
        }
    }
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Gate record of the best restart of every CA-DMRG cell.
pub fn write_circuit_csv(path: &Path, summaries: &[CellSummary]) -> Result<()> {
    let gates = enumerate_gates();
    let mut s = String::new();
    writeln!(s, "{CIRCUIT_SCHEMA}")?;
    writeln!(s, "method,chi,sweep,bond,gate_id,gate_class")?;
    for c in summaries {
        if c.method != Method::Cadmrg {
            continue;
        }
        if let Some(r) = &c.best {
            for rec in &r.circuit.record {
                writeln!(
                    s,
                    "cadmrg,{},{},{},{},{}",
                    c.chi,
                    rec.sweep,
                    rec.bond,
                    rec.gate_id,
                    gates[rec.gate_id].gate_class.as_str()
                )?;
            }
        }
    }
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn cmd_run(spec: &ExperimentSpec) -> Result<()> {
    std::fs::create_dir_all(&spec.out)
        .with_context(|| format!("creating {}", spec.out.display()))?;
    let problem = build_problem(&spec.source)?;
    eprintln!(
        "[{}] {} sites, {} Hamiltonian terms, reference energy {:.10}",
        spec.label,
        problem.mpo.n_sites(),
        problem.hamiltonian.n_terms(),
        problem.fci_energy
    );
    let outcomes = run_grid(spec, &problem);
    let summaries = summarize(spec, &outcomes);
    write_runs_csv(&spec.out.join("runs.csv"), &outcomes)?;
    write_summary_csv(&spec.out.join("summary.csv"), spec, &summaries, problem.fci_energy)?;
    write_circuit_csv(&spec.out.join("circuit.csv"), &summaries)?;
    for c in &summaries {
        match &c.best {
            Some(r) => eprintln!(
                "  {} chi={}: E = {:.10}  |err| = {:.3e}  [{}]",
                c.method.as_str(),
                c.chi,
                r.best_energy,
                (r.best_energy - problem.fci_energy).abs(),
                c.status
            ),
            None => eprintln!("  {} chi={}: {}", c.method.as_str(), c.chi, c.status),
        }
    }
    Ok(())
}

pub fn cmd_curve(spec: &ExperimentSpec) -> Result<()> {
    anyhow::ensure!(!spec.points.is_empty(), "curve config needs point= lines");
    std::fs::create_dir_all(&spec.out)
        .with_context(|| format!("creating {}", spec.out.display()))?;
    let mut s = String::new();
    writeln!(s, "# schema: cadmrg.curve.v1")?;
    writeln!(s, "bond_length_label,method,chi,energy,fci_energy,abs_error")?;
    for (label, path) in &spec.points {
        if !path.exists() {
            eprintln!("warning: skipping point {label}: missing {}", path.display());
            continue;
        }
        let problem = match build_problem(&Source::Fcidump(path.clone())) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("warning: skipping point {label}: {e:#}");
                continue;
            }
        };
        eprintln!("[{} @ {label}] reference energy {:.10}", spec.label, problem.fci_energy);
        let outcomes = run_grid(spec, &problem);
        let summaries = summarize(spec, &outcomes);
        for c in &summaries {
            if let Some(r) = &c.best {
                writeln!(
                    s,
                    "{},{},{},{:.12e},{:.12e},{:.6e}",
                    label,
                    c.method.as_str(),
                    c.chi,
                    r.best_energy,
                    problem.fci_energy,
                    (r.best_energy - problem.fci_energy).abs()
                )?;
            } else {
                eprintln!("warning: point {label} {} chi={}: {}", c.method.as_str(), c.chi, c.status);
            }
        }
    }
    let path = spec.out.join("curve.csv");
    std::fs::write(&path, s).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
