//! Weighted sums of N-qubit Pauli strings with dense action for
//! brute-force checks.
//!
//! Qubit `q` corresponds to bit `q` of a computational-basis index
//! (qubit 0 is the least significant bit).

use std::collections::BTreeMap;

use ndarray::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::C64;

/// Hard cap on dense operations; 2^14 complex amplitudes.
pub const DENSE_QUBIT_CAP: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> Array2<C64> {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::I => array![[o, z], [z, o]],
            Pauli::X => array![[z, o], [o, z]],
            Pauli::Y => array![[z, -i], [i, z]],
            Pauli::Z => array![[o, z], [z, -o]],
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Single-qubit product `a * b = phase * c`.
pub fn mul_pauli(a: Pauli, b: Pauli) -> (C64, Pauli) {
    use Pauli::*;
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match (a, b) {
        (I, p) | (p, I) => (one, p),
        (X, X) | (Y, Y) | (Z, Z) => (one, I),
        (X, Y) => (i, Z),
        (Y, X) => (-i, Z),
        (Y, Z) => (i, X),
        (Z, Y) => (-i, X),
        (Z, X) => (i, Y),
        (X, Z) => (-i, Y),
    }
}

pub type PauliString = Vec<Pauli>;

/// Product of two equal-length strings, with accumulated phase.
pub fn mul_strings(a: &[Pauli], b: &[Pauli]) -> (C64, PauliString) {
    debug_assert_eq!(a.len(), b.len());
    let mut phase = C64::new(1.0, 0.0);
    let out = a
        .iter()
        .zip(b.iter())
        .map(|(&x, &y)| {
            let (p, c) = mul_pauli(x, y);
            phase *= p;
            c
        })
        .collect();
    (phase, out)
}

pub fn string_label(s: &[Pauli]) -> String {
    s.iter().map(|p| p.symbol()).collect()
}

/// A sum of Pauli strings. Terms are kept in a `BTreeMap` so iteration order
/// (and everything derived from it, like MPO construction) is deterministic.
#[derive(Debug, Clone, Default)]
pub struct PauliSum {
    pub n_qubits: usize,
    pub terms: BTreeMap<PauliString, C64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        PauliSum {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, string: PauliString, coeff: C64) {
        debug_assert_eq!(string.len(), self.n_qubits);
        let entry = self.terms.entry(string).or_insert(C64::new(0.0, 0.0));
        *entry += coeff;
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Merge like terms (already merged by the map) and drop terms with
    /// `|coeff| < tol`.
    pub fn simplify(mut self, tol: f64) -> Self {
        self.terms.retain(|_, c| c.norm() >= tol && c.norm() > 0.0);
        self
    }

    /// Largest imaginary part over all coefficients; a Hermitian sum has
    /// this at numerical zero.
    pub fn max_imag(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.im.abs())
            .fold(0.0, f64::max)
    }

    /// Apply one phased index-permutation Pauli string to `v`, accumulating
    /// `coeff * P v` into `out`.
    fn accumulate_string(string: &[Pauli], coeff: C64, v: &[C64], out: &mut [C64]) {
        let n = string.len();
        let mut flip: usize = 0;
        // phase bookkeeping: P|b> = phase(b) |b ^ flip>
        let mut y_qubits: Vec<usize> = Vec::new();
        let mut z_mask: usize = 0;
        for (q, &p) in string.iter().enumerate().take(n) {
            match p {
                Pauli::I => {}
                Pauli::X => flip |= 1 << q,
                Pauli::Y => {
                    flip |= 1 << q;
                    y_qubits.push(q);
                }
                Pauli::Z => z_mask |= 1 << q,
            }
        }
        let i = C64::new(0.0, 1.0);
        for (b, &amp) in v.iter().enumerate() {
            if amp == C64::new(0.0, 0.0) {
                continue;
            }
            let mut phase = C64::new(1.0, 0.0);
            // Z part and the Z component of Y act on the source bit
            let zbits = (b & z_mask).count_ones();
            if zbits % 2 == 1 {
                phase = -phase;
            }
            for &q in &y_qubits {
                // Y|0> = i|1>, Y|1> = -i|0>
                phase *= if b & (1 << q) == 0 { i } else { -i };
            }
            out[b ^ flip] += coeff * phase * amp;
        }
    }

    /// Dense action `sum_t c_t P_t |v>`.
    pub fn matvec(&self, v: &Array1<C64>) -> Result<Array1<C64>> {
        if self.n_qubits > DENSE_QUBIT_CAP {
            return Err(Error::SizeCap(format!(
                "dense Pauli action limited to {} qubits, got {}",
                DENSE_QUBIT_CAP, self.n_qubits
            )));
        }
        let dim = 1usize << self.n_qubits;
        if v.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "state vector length {} != 2^{}",
                v.len(),
                self.n_qubits
            )));
        }
        let vs = v.as_slice().expect("contiguous state vector");
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for (string, &coeff) in &self.terms {
            Self::accumulate_string(string, coeff, vs, &mut out);
        }
        Ok(Array1::from_vec(out))
    }

    /// Explicit dense matrix, for small-N oracles only.
    pub fn to_dense(&self) -> Result<Array2<C64>> {
        if self.n_qubits > 12 {
            return Err(Error::SizeCap(format!(
                "dense matrix limited to 12 qubits, got {}",
                self.n_qubits
            )));
        }
        let dim = 1usize << self.n_qubits;
        let mut m = Array2::<C64>::zeros((dim, dim));
        for col in 0..dim {
            let mut v = vec![C64::new(0.0, 0.0); dim];
            v[col] = C64::new(1.0, 0.0);
            let mut out = vec![C64::new(0.0, 0.0); dim];
            for (string, &coeff) in &self.terms {
                Self::accumulate_string(string, coeff, &v, &mut out);
            }
            for (row, z) in out.into_iter().enumerate() {
                m[[row, col]] = z;
            }
        }
        Ok(m)
    }

    /// Diagonal matrix element `<b|H|b>` for a computational-basis state.
    pub fn diagonal_element(&self, basis_state: usize) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        'terms: for (string, &coeff) in &self.terms {
            let mut sign = 1.0;
            for (q, &p) in string.iter().enumerate() {
                match p {
                    Pauli::I => {}
                    Pauli::Z => {
                        if basis_state & (1 << q) != 0 {
                            sign = -sign;
                        }
                    }
                    _ => continue 'terms,
                }
            }
            acc += coeff * sign;
        }
        acc
    }
}
