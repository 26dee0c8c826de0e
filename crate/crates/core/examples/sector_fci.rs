//! Diagnostic: FCI ground energies of an FCIDUMP in neighboring
//! (n_alpha, n_beta) sectors. Usage: sector_fci <fcidump>

use cadmrg_core::fci::fci_ground_energy;
use cadmrg_core::fcidump::parse_fcidump;

fn main() {
    let path = std::env::args().nth(1).expect("usage: sector_fci <fcidump>");
    let t = parse_fcidump(&std::fs::read_to_string(path).unwrap()).unwrap();
    let na = ((t.n_electrons as i32 + t.ms2) / 2) as usize;
    let nb = t.n_electrons - na;
    for (a, b) in [
        (na, nb),
        (na + 1, nb.saturating_sub(1)),
        (na.saturating_sub(1), nb + 1),
        (na + 1, nb),
        (na, nb.saturating_sub(1)),
    ] {
        match fci_ground_energy(&t, a, b, 1e-9) {
            Ok(r) => println!("sector ({a},{b}): E = {:.10}", r.energy),
            Err(e) => println!("sector ({a},{b}): {e}"),
        }
    }
}
