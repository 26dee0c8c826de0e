//! Derived tables from a run directory: error vs 1/chi, runtime ratios,
//! chi_w traces and the gate timeline. Inputs are the CSVs cmd_run wrote;
//! incomplete inputs produce partial outputs plus warnings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};

fn read_csv(path: &Path) -> Result<Vec<Vec<String>>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .skip(1) // header
        .map(|l| l.split(',').map(|c| c.trim().to_string()).collect())
        .collect())
}

pub fn cmd_report(dir: &Path) -> Result<()> {
    let runs_path = dir.join("runs.csv");
    anyhow::ensure!(runs_path.exists(), "no runs.csv in {}", dir.display());
    let runs = read_csv(&runs_path)?;

    // chiw_vs_sweep.csv straight from the per-sweep log
    {
        let mut s = String::new();
        writeln!(s, "# schema: cadmrg.chiw.v1")?;
        writeln!(s, "method,chi,restart,sweep,chi_w_max")?;
        for row in &runs {
            // method,chi,restart,sweep,energy,max_discarded,chi_w_max,wall_seconds
            if row.len() >= 8 {
                writeln!(s, "{},{},{},{},{}", row[0], row[1], row[2], row[3], row[6])?;
            }
        }
        std::fs::write(dir.join("chiw_vs_sweep.csv"), s)?;
    }

    let summary_path = dir.join("summary.csv");
    if summary_path.exists() {
        let summary = read_csv(&summary_path)?;
        // method,chi,best_energy,fci_energy,abs_error,sweeps_to_converge,total_seconds,status
        let mut s = String::new();
        writeln!(s, "# schema: cadmrg.error_vs_invchi.v1")?;
        writeln!(s, "method,chi,inv_chi,abs_error")?;
        let mut per_method: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
        let mut seconds: BTreeMap<(String, usize), f64> = BTreeMap::new();
        for row in &summary {
            if row.len() < 8 || row[4].is_empty() {
                eprintln!("warning: summary row without results: {}", row.join(","));
                continue;
            }
            let chi: usize = row[1].parse().context("chi column")?;
            let err: f64 = row[4].parse().context("abs_error column")?;
            writeln!(s, "{},{},{:.8e},{:.6e}", row[0], chi, 1.0 / chi as f64, err)?;
            per_method.entry(row[0].clone()).or_default().push((chi, err));
            seconds.insert((row[0].clone(), chi), row[6].parse().context("total_seconds")?);
        }
        std::fs::write(dir.join("error_vs_invchi.csv"), s)?;

        // soft monotonicity check: error should not grow with chi
        for (method, mut pts) in per_method {
            pts.sort_by_key(|&(chi, _)| chi);
            for w in pts.windows(2) {
                if w[1].1 > w[0].1 + 1e-9 {
                    eprintln!(
                        "warning: {method} abs_error rises from chi={} ({:.3e}) to chi={} ({:.3e})",
                        w[0].0, w[0].1, w[1].0, w[1].1
                    );
                }
            }
        }

        let mut s = String::new();
        writeln!(s, "# schema: cadmrg.runtime_ratio.v1")?;
        writeln!(s, "chi,dmrg_seconds,cadmrg_seconds,ratio")?;
        let chis: Vec<usize> = seconds
            .keys()
            .filter(|(m, _)| m == "dmrg")
            .map(|&(_, c)| c)
            .collect();
        for chi in chis {
            if let (Some(&d), Some(&c)) = (
                seconds.get(&("dmrg".to_string(), chi)),
                seconds.get(&("cadmrg".to_string(), chi)),
            ) {
                if d > 0.0 {
                    writeln!(s, "{chi},{d:.4},{c:.4},{:.4}", c / d)?;
                }
            }
        }
        std::fs::write(dir.join("runtime_ratio.csv"), s)?;
    } else {
        eprintln!("warning: no summary.csv; skipping error and runtime tables");
    }

    let circuit_path = dir.join("circuit.csv");
    if circuit_path.exists() {
        let circuit = read_csv(&circuit_path)?;
        let mut s = String::new();
        writeln!(s, "# schema: cadmrg.gate_timeline.v1")?;
        writeln!(s, "sweep,bond,gate_class")?;
        for row in &circuit {
            // method,chi,sweep,bond,gate_id,gate_class
            if row.len() >= 6 {
                writeln!(s, "{},{},{}", row[2], row[3], row[5])?;
            }
        }
        std::fs::write(dir.join("gate_timeline.csv"), s)?;
    } else {
        eprintln!("warning: no circuit.csv; skipping gate timeline");
    }

    Ok(())
}
