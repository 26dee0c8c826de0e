//! Diagnostic: run DMRG on an FCIDUMP and report <N> and <Sz> of the
//! converged state, to tell a particle-sector miss apart from a plain
//! local minimum. Usage: sector_probe <fcidump> [chi] [sweeps] [seed]

use cadmrg_core::dmrg::{run_dmrg, RunConfig};
use cadmrg_core::fcidump::parse_fcidump;
use cadmrg_core::fermion::{jordan_wigner, spin_orbital_hamiltonian, SpinOrdering};
use cadmrg_core::mps_mpo::{expectation, mpo_from_pauli_sum};
use cadmrg_core::pauli::{Pauli, PauliSum};
use num_complex::Complex64 as C64;

fn number_like(n: usize, weights: impl Fn(usize) -> f64) -> PauliSum {
    // sum_i w_i (I - Z_i)/2
    let mut p = PauliSum::new(n);
    let mut id_coeff = 0.0;
    for i in 0..n {
        let w = weights(i);
        id_coeff += 0.5 * w;
        let mut s = vec![Pauli::I; n];
        s[i] = Pauli::Z;
        p.add_term(s, C64::new(-0.5 * w, 0.0));
    }
    p.add_term(vec![Pauli::I; n], C64::new(id_coeff, 0.0));
    p
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let path = args.get(1).expect("usage: sector_probe <fcidump> [chi] [sweeps] [seed]");
    let chi: usize = args.get(2).map_or(40, |s| s.parse().unwrap());
    let sweeps: usize = args.get(3).map_or(4, |s| s.parse().unwrap());
    let seed: u64 = args.get(4).map_or(0, |s| s.parse().unwrap());
    let chi_init: usize = args.get(5).map_or(0, |s| s.parse().unwrap());

    let t = parse_fcidump(&std::fs::read_to_string(path).unwrap()).unwrap();
    let p = jordan_wigner(&spin_orbital_hamiltonian(&t, SpinOrdering::Interleaved));
    let h = mpo_from_pauli_sum(&p).unwrap();
    let nq = p.n_qubits;

    let n_alpha = ((t.n_electrons as i32 + t.ms2) / 2) as usize;
    let n_beta = t.n_electrons - n_alpha;
    let mut cfg = RunConfig::new(chi);
    if std::env::var("SECTOR_INIT").is_ok() {
        cfg.sector = Some((n_alpha, n_beta));
    }
    cfg.chi_init = chi_init;
    cfg.n_restarts = 1;
    cfg.seed = seed;
    cfg.max_sweeps = sweeps;
    cfg.min_sweeps_before_stop = sweeps;
    cfg.eig_tol = 1e-8;
    cfg.eig_max_iter = 40;
    let r = run_dmrg(&h, &cfg).unwrap();

    // interleaved ordering: even qubits = alpha, odd = beta
    let n_op = mpo_from_pauli_sum(&number_like(nq, |_| 1.0)).unwrap();
    let sz_op = mpo_from_pauli_sum(&number_like(nq, |i| if i % 2 == 0 { 0.5 } else { -0.5 })).unwrap();
    let n_val = expectation(&r.mps, &n_op).unwrap();
    let sz_val = expectation(&r.mps, &sz_op).unwrap();
    println!(
        "seed {seed} chi {chi} sweeps {sweeps}: E = {:.10}  <N> = {:.6} (want {})  <Sz> = {:.6} (want {})",
        r.best_energy,
        n_val,
        t.n_electrons,
        sz_val,
        t.ms2 as f64 / 2.0
    );
}
