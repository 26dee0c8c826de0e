//! The two-qubit Clifford group modulo Paulis: 720 coset representatives.
//!
//! Each coset is identified with a 4x4 symplectic matrix over GF(2) acting
//! on (x0, z0, x1, z1) vectors, built by BFS closure over the generator set
//! {H0, H1, S0, S1, CNOT01, CNOT10}. The BFS word also provides a concrete
//! unitary lift and a signed tableau for conjugating Pauli operators without
//! matrix arithmetic.
//!
//! Index convention: basis index bit 0 is qubit 0 (the first/left site of
//! the pair), matching the dense convention in [`crate::pauli`].

use ndarray::prelude::*;

use crate::pauli::Pauli;
use crate::tensor::{svd_truncate, C64};

pub const N_GATES: usize = 720;

/// 4x4 GF(2) matrix packed row-major into a u16: bit (4*row + col).
pub type SymMatrix = u16;

fn sym_get(m: SymMatrix, r: usize, c: usize) -> u8 {
    ((m >> (4 * r + c)) & 1) as u8
}

fn sym_identity() -> SymMatrix {
    let mut m = 0u16;
    for i in 0..4 {
        m |= 1 << (4 * i + i);
    }
    m
}

fn sym_mul(a: SymMatrix, b: SymMatrix) -> SymMatrix {
    let mut out = 0u16;
    for r in 0..4 {
        for c in 0..4 {
            let mut bit = 0u8;
            for k in 0..4 {
                bit ^= sym_get(a, r, k) & sym_get(b, k, c);
            }
            if bit == 1 {
                out |= 1 << (4 * r + c);
            }
        }
    }
    out
}

/// M^T Omega M == Omega over GF(2), Omega pairing x_i with z_i.
pub fn is_symplectic(m: SymMatrix) -> bool {
    let omega: [[u8; 4]; 4] = [
        [0, 1, 0, 0],
        [1, 0, 0, 0],
        [0, 0, 0, 1],
        [0, 0, 1, 0],
    ];
    for r in 0..4 {
        for c in 0..4 {
            let mut bit = 0u8;
            for k in 0..4 {
                for l in 0..4 {
                    bit ^= sym_get(m, k, r) & omega[k][l] & sym_get(m, l, c);
                }
            }
            if bit != omega[r][c] {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Gen {
    H0,
    H1,
    S0,
    S1,
    Cx01,
    Cx10,
}

const GENS: [Gen; 6] = [Gen::H0, Gen::H1, Gen::S0, Gen::S1, Gen::Cx01, Gen::Cx10];

/// Column c of the matrix is the image of basis vector c (X0, Z0, X1, Z1).
fn gen_matrix(g: Gen) -> SymMatrix {
    let cols: [[u8; 4]; 4] = match g {
        // H: X <-> Z on one qubit
        Gen::H0 => [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        Gen::H1 => [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
        // S: X -> Y = XZ
        Gen::S0 => [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        Gen::S1 => [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1], [0, 0, 0, 1]],
        // CNOT(c,t): X_c -> X_c X_t, Z_t -> Z_c Z_t
        Gen::Cx01 => [[1, 0, 1, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 1, 0, 1]],
        Gen::Cx10 => [[1, 0, 0, 0], [0, 1, 0, 1], [1, 0, 1, 0], [0, 0, 0, 1]],
    };
    let mut m = 0u16;
    for (c, col) in cols.iter().enumerate() {
        for (r, &bit) in col.iter().enumerate() {
            if bit == 1 {
                m |= 1 << (4 * r + c);
            }
        }
    }
    m
}

fn kron2(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    // index p = 2*p1 + p0: the first factor `a` acts on qubit 1 (slow bit)
    let mut out = Array2::zeros((4, 4));
    for i1 in 0..2 {
        for j1 in 0..2 {
            for i0 in 0..2 {
                for j0 in 0..2 {
                    out[[2 * i1 + i0, 2 * j1 + j0]] = a[[i1, j1]] * b[[i0, j0]];
                }
            }
        }
    }
    out
}

fn gen_unitary(g: Gen) -> Array2<C64> {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let h = array![
        [C64::new(s2, 0.0), C64::new(s2, 0.0)],
        [C64::new(s2, 0.0), C64::new(-s2, 0.0)]
    ];
    let s = array![
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(0.0, 1.0)]
    ];
    let id = Array2::eye(2);
    let perm = |pairs: [usize; 4]| {
        let mut m = Array2::zeros((4, 4));
        for (src, &dst) in pairs.iter().enumerate() {
            m[[dst, src]] = C64::new(1.0, 0.0);
        }
        m
    };
    match g {
        Gen::H0 => kron2(&id, &h),
        Gen::H1 => kron2(&h, &id),
        Gen::S0 => kron2(&id, &s),
        Gen::S1 => kron2(&s, &id),
        // control qubit 0 (bit 0), target qubit 1
        Gen::Cx01 => perm([0, 3, 2, 1]),
        // control qubit 1, target qubit 0
        Gen::Cx10 => perm([0, 1, 3, 2]),
    }
}

/// A two-qubit Pauli in XZ form: i^phase * (X^x0 Z^z0 on qubit 0) tensor
/// (X^x1 Z^z1 on qubit 1). Y corresponds to x=z=1 with an extra factor i.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedPauli2 {
    pub x: [u8; 2],
    pub z: [u8; 2],
    /// power of i, mod 4
    pub phase: u8,
}

impl SignedPauli2 {
    pub fn identity() -> Self {
        SignedPauli2 { x: [0, 0], z: [0, 0], phase: 0 }
    }

    /// Product self * rhs with the XZ reordering sign per qubit:
    /// Z^z X^x = (-1)^(z x) X^x Z^z.
    pub fn mul(&self, rhs: &SignedPauli2) -> SignedPauli2 {
        let mut phase = (self.phase + rhs.phase) % 4;
        for q in 0..2 {
            if self.z[q] & rhs.x[q] == 1 {
                phase = (phase + 2) % 4;
            }
        }
        SignedPauli2 {
            x: [self.x[0] ^ rhs.x[0], self.x[1] ^ rhs.x[1]],
            z: [self.z[0] ^ rhs.z[0], self.z[1] ^ rhs.z[1]],
            phase,
        }
    }

    /// From Pauli letters with a scalar phase (must be a power of i).
    pub fn from_letters(p0: Pauli, p1: Pauli, phase: C64) -> Self {
        let letter = |p: Pauli| -> (u8, u8, u8) {
            match p {
                Pauli::I => (0, 0, 0),
                Pauli::X => (1, 0, 0),
                Pauli::Y => (1, 1, 1), // Y = i X Z
                Pauli::Z => (0, 1, 0),
            }
        };
        let (x0, z0, k0) = letter(p0);
        let (x1, z1, k1) = letter(p1);
        let mut k = (k0 + k1) % 4;
        let mut best = 0u8;
        let mut err = f64::INFINITY;
        for cand in 0..4u8 {
            let val = C64::i().powu(cand as u32);
            let d = (phase - val).norm();
            if d < err {
                err = d;
                best = cand;
            }
        }
        assert!(err < 1e-9, "phase {phase} is not a power of i");
        k = (k + best) % 4;
        SignedPauli2 { x: [x0, x1], z: [z0, z1], phase: k }
    }

    pub fn to_letters(&self) -> (Pauli, Pauli, C64) {
        let mut k = self.phase;
        let mut letters = [Pauli::I; 2];
        for q in 0..2 {
            letters[q] = match (self.x[q], self.z[q]) {
                (0, 0) => Pauli::I,
                (1, 0) => Pauli::X,
                (0, 1) => Pauli::Z,
                (1, 1) => {
                    // X Z = -i Y
                    k = (k + 3) % 4;
                    Pauli::Y
                }
                _ => unreachable!(),
            };
        }
        (letters[0], letters[1], C64::i().powu(k as u32))
    }

    pub fn to_dense(&self) -> Array2<C64> {
        let (p0, p1, ph) = self.to_letters();
        kron2(&p1.matrix(), &p0.matrix()).mapv(|v| v * ph)
    }
}

/// Conjugation action of one generator on a signed Pauli, by the textbook
/// stabilizer update rules (H: X<->Z with Y -> -Y; S: X -> Y; CNOT spreads
/// X from control and Z from target).
fn conjugate_by_gen(g: Gen, p: &SignedPauli2) -> SignedPauli2 {
    // images of X_q and Z_q under the generator
    let x_img = |q: usize| -> SignedPauli2 {
        let mut r = SignedPauli2::identity();
        match (g, q) {
            (Gen::H0, 0) | (Gen::H1, 1) => r.z[q] = 1,
            (Gen::S0, 0) | (Gen::S1, 1) => {
                // S X S^dag = Y = i X Z
                r.x[q] = 1;
                r.z[q] = 1;
                r.phase = 1;
            }
            (Gen::Cx01, 0) | (Gen::Cx10, 1) => {
                r.x[0] = 1;
                r.x[1] = 1;
            }
            _ => r.x[q] = 1,
        }
        r
    };
    let z_img = |q: usize| -> SignedPauli2 {
        let mut r = SignedPauli2::identity();
        match (g, q) {
            (Gen::H0, 0) | (Gen::H1, 1) => r.x[q] = 1,
            (Gen::Cx01, 1) | (Gen::Cx10, 0) => {
                r.z[0] = 1;
                r.z[1] = 1;
            }
            _ => r.z[q] = 1,
        }
        r
    };
    // U (i^k X0^a Z0^b X1^c Z1^d) U^dag expanded factor by factor, keeping
    // the X-before-Z order of the input form
    let mut out = SignedPauli2 { x: [0, 0], z: [0, 0], phase: p.phase };
    let mut acc = SignedPauli2::identity();
    for q in 0..2 {
        if p.x[q] == 1 {
            acc = acc.mul(&x_img(q));
        }
        if p.z[q] == 1 {
            acc = acc.mul(&z_img(q));
        }
    }
    out.x = acc.x;
    out.z = acc.z;
    out.phase = (out.phase + acc.phase) % 4;
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateClass {
    Local,
    CnotClass,
    SwapClass,
}

impl GateClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            GateClass::Local => "local",
            GateClass::CnotClass => "cnot_class",
            GateClass::SwapClass => "swap_class",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticRep {
    pub matrix: SymMatrix,
    pub id: usize,
}

#[derive(Debug, Clone)]
pub struct CliffordGate2 {
    pub sym: SymplecticRep,
    pub unitary: Array2<C64>,
    pub gate_class: GateClass,
    pub schmidt_rank: usize,
    /// signed tableau: images of X0, Z0, X1, Z1 under conjugation
    images: [SignedPauli2; 4],
}

impl CliffordGate2 {
    pub fn is_identity(&self) -> bool {
        self.sym.id == 0
    }
}

/// Operator Schmidt rank of a 4x4 two-qubit unitary: singular values of the
/// reshuffle u[(i1 i0),(j1 j0)] -> r[(i1 j1),(i0 j0)].
fn operator_schmidt_rank(u: &Array2<C64>) -> usize {
    let mut r = Array2::<C64>::zeros((4, 4));
    for i1 in 0..2 {
        for i0 in 0..2 {
            for j1 in 0..2 {
                for j0 in 0..2 {
                    r[[2 * i1 + j1, 2 * i0 + j0]] = u[[2 * i1 + i0, 2 * j1 + j0]];
                }
            }
        }
    }
    let svd = svd_truncate(&r.into_dyn(), &[0], usize::MAX, 0.0).expect("4x4 svd");
    let top = svd.s[0];
    svd.s.iter().filter(|&&v| v > 1e-9 * top).count()
}

fn classify_rank(rank: usize) -> GateClass {
    match rank {
        1 => GateClass::Local,
        2 => GateClass::CnotClass,
        4 => GateClass::SwapClass,
        other => panic!("operator Schmidt rank {other} outside {{1,2,4}}"),
    }
}

/// The full deterministic gate table. Gate 0 is the identity; the rest are
/// ordered by the packed encoding of their symplectic matrix.
pub fn enumerate_gates() -> Vec<CliffordGate2> {
    // BFS closure over the generators at the symplectic level, recording a
    // shortest generator word per coset
    let mut words: std::collections::HashMap<SymMatrix, Vec<Gen>> =
        std::collections::HashMap::new();
    let id = sym_identity();
    words.insert(id, Vec::new());
    let mut frontier = vec![id];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for m in frontier {
            let base = words[&m].clone();
            for &g in &GENS {
                let m2 = sym_mul(gen_matrix(g), m);
                if !words.contains_key(&m2) {
                    let mut w = base.clone();
                    w.push(g);
                    words.insert(m2, w);
                    next.push(m2);
                }
            }
        }
        frontier = next;
    }
    assert_eq!(words.len(), N_GATES, "symplectic closure size");

    let mut keys: Vec<SymMatrix> = words.keys().copied().collect();
    keys.sort_unstable();
    keys.retain(|&k| k != id);
    keys.insert(0, id);

    keys.iter()
        .enumerate()
        .map(|(gid, &m)| {
            let word = &words[&m];
            let mut unitary = Array2::eye(4);
            let mut images = [
                SignedPauli2 { x: [1, 0], z: [0, 0], phase: 0 },
                SignedPauli2 { x: [0, 0], z: [1, 0], phase: 0 },
                SignedPauli2 { x: [0, 1], z: [0, 0], phase: 0 },
                SignedPauli2 { x: [0, 0], z: [0, 1], phase: 0 },
            ];
            for &g in word {
                unitary = gen_unitary(g).dot(&unitary);
                for img in images.iter_mut() {
                    *img = conjugate_by_gen(g, img);
                }
            }
            let rank = operator_schmidt_rank(&unitary);
            CliffordGate2 {
                sym: SymplecticRep { matrix: m, id: gid },
                unitary,
                gate_class: classify_rank(rank),
                schmidt_rank: rank,
                images,
            }
        })
        .collect()
}

/// U p U^dag by tableau arithmetic: substitute the precomputed generator
/// images into the XZ decomposition of `p`.
pub fn conjugate_pauli(g: &CliffordGate2, p: &SignedPauli2) -> SignedPauli2 {
    let mut acc = SignedPauli2::identity();
    // generator order X0, Z0, X1, Z1 matches the XZ form of p
    let slots = [(p.x[0], 0), (p.z[0], 1), (p.x[1], 2), (p.z[1], 3)];
    for (bit, idx) in slots {
        if bit == 1 {
            acc = acc.mul(&g.images[idx]);
        }
    }
    acc.phase = (acc.phase + p.phase) % 4;
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateRecord {
    pub sweep: usize,
    /// bond index i in [1, n_sites-1]: the gate straddles sites (i-1, i)
    pub bond: usize,
    pub gate_id: usize,
}

/// The Clifford side of a CAMPS ansatz: an ordered record of two-site gates.
#[derive(Debug, Clone)]
pub struct CliffordCircuit {
    pub n_sites: usize,
    pub record: Vec<GateRecord>,
}

impl CliffordCircuit {
    pub fn new(n_sites: usize) -> Self {
        CliffordCircuit { n_sites, record: Vec::new() }
    }

    pub fn push(&mut self, sweep: usize, bond: usize, gate_id: usize) {
        assert!(bond >= 1 && bond < self.n_sites);
        self.record.push(GateRecord { sweep, bond, gate_id });
    }

    pub fn len(&self) -> usize {
        self.record.len()
    }

    pub fn is_empty(&self) -> bool {
        self.record.is_empty()
    }

    /// CSV rows (sweep, bond, gate_id, gate_class) for timeline plots.
    pub fn to_csv(&self, gates: &[CliffordGate2]) -> String {
        let mut out = String::from("sweep,bond,gate_id,gate_class\n");
        for r in &self.record {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.sweep,
                r.bond,
                r.gate_id,
                gates[r.gate_id].gate_class.as_str()
            ));
        }
        out
    }
}
