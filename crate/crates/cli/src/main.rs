mod config;
mod report;
mod run;

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{Context, Result};
use cadmrg_core::clifford2::enumerate_gates;
use cadmrg_core::fci::fci_ground_energy;
use cadmrg_core::fcidump::parse_fcidump;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cadmrg", about = "DMRG / Clifford-augmented DMRG benchmark driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a chi scan from a config file; writes runs.csv, summary.csv, circuit.csv
    Run {
        #[arg(long)]
        config: PathBuf,
        /// override the config's base seed
        #[arg(long)]
        seed: Option<u64>,
        /// override the config's worker count
        #[arg(long)]
        workers: Option<usize>,
        /// override the config's output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a bond-length series (point= lines in the config); writes curve.csv
    Curve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derive plot-ready tables from a run directory
    Report {
        /// directory holding runs.csv (and optionally summary.csv, circuit.csv)
        dir: PathBuf,
    },
    /// Exact ground-state energy of an FCIDUMP file (determinant FCI)
    Fci {
        fcidump: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Print the two-qubit Clifford gate census
    Gates,
}

fn apply_overrides(
    spec: &mut config::ExperimentSpec,
    seed: Option<u64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
) {
    if let Some(s) = seed {
        spec.seed = s;
    }
    if let Some(w) = workers {
        spec.workers = w.max(1);
    }
    if let Some(o) = out {
        spec.out = o;
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, seed, workers, out } => {
            let mut spec = config::load_spec(&config)?;
            apply_overrides(&mut spec, seed, workers, out);
            run::cmd_run(&spec)
        }
        Command::Curve { config, seed, workers, out } => {
            let mut spec = config::load_spec(&config)?;
            apply_overrides(&mut spec, seed, workers, out);
            run::cmd_curve(&spec)
        }
        Command::Report { dir } => report::cmd_report(&dir),
        Command::Fci { fcidump, tol } => {
            let text = std::fs::read_to_string(&fcidump)
                .with_context(|| format!("reading {}", fcidump.display()))?;
            let t = parse_fcidump(&text)
                .with_context(|| format!("parsing {}", fcidump.display()))?;
            let n_alpha = ((t.n_electrons as i32 + t.ms2) / 2) as usize;
            let n_beta = t.n_electrons - n_alpha;
            let r = fci_ground_energy(&t, n_alpha, n_beta, tol)?;
            println!(
                "E = {:.12} Ha  (sector dim {}, residual {:.2e}, converged {})",
                r.energy, r.sector_dim, r.residual, r.converged
            );
            Ok(())
        }
        Command::Gates => {
            let gates = enumerate_gates();
            let mut by_class: BTreeMap<&str, usize> = BTreeMap::new();
            let mut by_rank: BTreeMap<usize, usize> = BTreeMap::new();
            for g in &gates {
                *by_class.entry(g.gate_class.as_str()).or_default() += 1;
                *by_rank.entry(g.schmidt_rank).or_default() += 1;
            }
            println!("{} two-qubit Clifford cosets", gates.len());
            for (class, n) in by_class {
                println!("  {class:<11} {n}");
            }
            for (rank, n) in by_rank {
                println!("  operator Schmidt rank {rank}: {n}");
            }
            Ok(())
        }
    }
}
