//! Second-quantized fermionic operators and the Jordan-Wigner transform.

use crate::fcidump::IntegralTable;
use crate::pauli::{mul_strings, Pauli, PauliString, PauliSum};
use crate::tensor::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FermionOp {
    pub mode: usize,
    pub dagger: bool,
}

#[derive(Debug, Clone)]
pub struct FermionTerm {
    pub coeff: C64,
    /// Operator string, applied right-to-left like a matrix product.
    pub ops: Vec<FermionOp>,
}

#[derive(Debug, Clone)]
pub struct FermionOpSum {
    pub n_modes: usize,
    pub terms: Vec<FermionTerm>,
}

impl FermionOpSum {
    pub fn new(n_modes: usize) -> Self {
        FermionOpSum {
            n_modes,
            terms: Vec::new(),
        }
    }

    pub fn add(&mut self, coeff: C64, ops: Vec<FermionOp>) {
        debug_assert!(ops.iter().all(|o| o.mode < self.n_modes));
        self.terms.push(FermionTerm { coeff, ops });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinOrdering {
    /// spatial orbital P, spin s -> mode 2P + s
    Interleaved,
    /// spatial orbital P, spin s -> mode s*n_spatial + P
    Blocked,
}

impl SpinOrdering {
    pub fn mode(self, n_spatial: usize, p: usize, spin: usize) -> usize {
        match self {
            SpinOrdering::Interleaved => 2 * p + spin,
            SpinOrdering::Blocked => spin * n_spatial + p,
        }
    }
}

/// Build the spin-orbital Hamiltonian from spatial integrals.
///
/// One-body: `sum_{PQ,s} h_PQ a+_{Ps} a_{Qs}`. Two-body, directly from the
/// stored chemist (PQ|RS) integrals:
/// `1/2 sum_{PQRS,st} (PQ|RS) a+_{Ps} a+_{Rt} a_{St} a_{Qs}`,
/// which is the physicist-convention form of the electronic Hamiltonian with
/// g re-indexed from the chemist storage. The core energy enters as an
/// identity term.
pub fn spin_orbital_hamiltonian(t: &IntegralTable, ordering: SpinOrdering) -> FermionOpSum {
    let n = t.n_spatial;
    let mut h = FermionOpSum::new(2 * n);
    if t.core_energy != 0.0 {
        h.add(C64::new(t.core_energy, 0.0), vec![]);
    }
    for p in 0..n {
        for q in 0..n {
            let v = t.one_body[[p, q]];
            if v.abs() < 1e-14 {
                continue;
            }
            for spin in 0..2 {
                h.add(
                    C64::new(v, 0.0),
                    vec![
                        FermionOp { mode: ordering.mode(n, p, spin), dagger: true },
                        FermionOp { mode: ordering.mode(n, q, spin), dagger: false },
                    ],
                );
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = t.two_body[[p, q, r, s]];
                    if v.abs() < 1e-14 {
                        continue;
                    }
                    for sa in 0..2 {
                        for sb in 0..2 {
                            h.add(
                                C64::new(0.5 * v, 0.0),
                                vec![
                                    FermionOp { mode: ordering.mode(n, p, sa), dagger: true },
                                    FermionOp { mode: ordering.mode(n, r, sb), dagger: true },
                                    FermionOp { mode: ordering.mode(n, s, sb), dagger: false },
                                    FermionOp { mode: ordering.mode(n, q, sa), dagger: false },
                                ],
                            );
                        }
                    }
                }
            }
        }
    }
    h
}

/// Jordan-Wigner image of a single ladder operator:
/// `a+_p = (prod_{q<p} Z_q)(X_p - iY_p)/2`, `a_p` the conjugate.
fn jw_ladder(n_modes: usize, op: FermionOp) -> [(C64, PauliString); 2] {
    let mut x_string = vec![Pauli::I; n_modes];
    let mut y_string = vec![Pauli::I; n_modes];
    for q in 0..op.mode {
        x_string[q] = Pauli::Z;
        y_string[q] = Pauli::Z;
    }
    x_string[op.mode] = Pauli::X;
    y_string[op.mode] = Pauli::Y;
    let half = C64::new(0.5, 0.0);
    let ihalf = C64::new(0.0, 0.5);
    if op.dagger {
        [(half, x_string), (-ihalf, y_string)]
    } else {
        [(half, x_string), (ihalf, y_string)]
    }
}

pub fn jordan_wigner(f: &FermionOpSum) -> PauliSum {
    let n = f.n_modes;
    let mut sum = PauliSum::new(n);
    for term in &f.terms {
        // expand the operator product left-to-right
        let mut partial: Vec<(C64, PauliString)> = vec![(term.coeff, vec![Pauli::I; n])];
        for &op in &term.ops {
            let images = jw_ladder(n, op);
            let mut next = Vec::with_capacity(partial.len() * 2);
            for (c, s) in &partial {
                for (ci, si) in &images {
                    let (phase, prod) = mul_strings(s, si);
                    next.push((c * ci * phase, prod));
                }
            }
            partial = next;
        }
        for (c, s) in partial {
            sum.add_term(s, c);
        }
    }
    sum.simplify(1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::prelude::*;

    #[test]
    fn number_operator_identity() {
        // a+_0 a_0 on one mode -> 0.5 I - 0.5 Z
        let mut f = FermionOpSum::new(1);
        f.add(
            C64::new(1.0, 0.0),
            vec![
                FermionOp { mode: 0, dagger: true },
                FermionOp { mode: 0, dagger: false },
            ],
        );
        let p = jordan_wigner(&f);
        assert_eq!(p.n_terms(), 2);
        assert_abs_diff_eq!(p.terms[&vec![Pauli::I]].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.terms[&vec![Pauli::Z]].re, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn hopping_term_matches_dense_matrix() {
        // a+_0 a_1 + a+_1 a_0 -> 0.5 X0X1 + 0.5 Y0Y1, verified against the
        // explicit 4x4 matrix in the occupation basis |n1 n0>
        let mut f = FermionOpSum::new(2);
        for (a, b) in [(0usize, 1usize), (1, 0)] {
            f.add(
                C64::new(1.0, 0.0),
                vec![
                    FermionOp { mode: a, dagger: true },
                    FermionOp { mode: b, dagger: false },
                ],
            );
        }
        let p = jordan_wigner(&f);
        assert_eq!(p.n_terms(), 2);
        assert_abs_diff_eq!(p.terms[&vec![Pauli::X, Pauli::X]].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.terms[&vec![Pauli::Y, Pauli::Y]].re, 0.5, epsilon = 1e-15);
        // dense oracle: hopping connects |01> (mode0 occupied) and |10>
        let m = p.to_dense().unwrap();
        let mut expect = Array2::<C64>::zeros((4, 4));
        expect[[1, 2]] = C64::new(1.0, 0.0);
        expect[[2, 1]] = C64::new(1.0, 0.0);
        let diff = (&m - &expect).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-14);
    }

    #[test]
    fn anticommutation_preserved() {
        // {a_p, a_q} = 0 for p != q, as dense matrices on 4 modes
        for p in 0..4usize {
            for q in 0..4usize {
                if p == q {
                    continue;
                }
                let mut f = FermionOpSum::new(4);
                f.add(
                    C64::new(1.0, 0.0),
                    vec![
                        FermionOp { mode: p, dagger: false },
                        FermionOp { mode: q, dagger: false },
                    ],
                );
                f.add(
                    C64::new(1.0, 0.0),
                    vec![
                        FermionOp { mode: q, dagger: false },
                        FermionOp { mode: p, dagger: false },
                    ],
                );
                let sum = jordan_wigner(&f);
                assert_eq!(sum.n_terms(), 0, "anticommutator of a_{p}, a_{q}");
            }
        }
    }

    #[test]
    fn single_orbital_table() {
        let mut t = crate::fcidump::IntegralTable::new(1, 2, 0);
        t.core_energy = 0.25;
        t.set_one_body(0, 0, -1.5);
        let f = spin_orbital_hamiltonian(&t, SpinOrdering::Interleaved);
        // core + two spin channels
        assert_eq!(f.terms.len(), 3);
        let p = jordan_wigner(&f);
        // eigenvalue on the doubly occupied state |11>: 2*(-1.5) + 0.25
        let m = p.to_dense().unwrap();
        assert_abs_diff_eq!(m[[3, 3]].re, -2.75, epsilon = 1e-12);
    }

    #[test]
    fn hermitian_input_gives_real_coefficients() {
        let mut t = crate::fcidump::IntegralTable::new(2, 2, 0);
        t.set_one_body(0, 0, -1.2);
        t.set_one_body(1, 1, -0.4);
        t.set_one_body(0, 1, 0.15);
        t.set_two_body(0, 0, 0, 0, 0.6);
        t.set_two_body(1, 0, 0, 0, 0.1);
        t.set_two_body(1, 1, 0, 0, 0.5);
        let f = spin_orbital_hamiltonian(&t, SpinOrdering::Interleaved);
        let p = jordan_wigner(&f);
        assert!(p.max_imag() < 1e-12);
    }
}
