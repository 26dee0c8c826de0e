//! Clifford-augmented DMRG: the 720-gate scan that replaces plain
//! truncation, the local C H C^dag update of the MPO canonical center,
//! and dense reconstruction of the represented state C|MPS>.
//!
//! Gate index convention matches [`crate::clifford2`]: the joint physical
//! index of a two-site pair is p = s_i + 2 s_{i+1}, i.e. the left site is
//! qubit 0 of the gate.

use ndarray::prelude::*;

use crate::clifford2::{enumerate_gates, CliffordCircuit, CliffordGate2};
use crate::dmrg::{run_engine, truncate_split, RunConfig, RunResult};
use crate::error::{Error, Result};
use crate::linalg::eigvalsh_hermitian;
use crate::mps_mpo::{Mpo, Mps};
use crate::tensor::{contract, svd_truncate, Direction, Tensor, C64};

/// Weights within this window of the minimum count as tied; ties are broken
/// by (operator Schmidt rank ascending, gate id ascending).
pub const TIE_WINDOW: f64 = 1e-14;

pub struct ScanResult {
    pub gate_id: usize,
    /// thrown weight of the winning gate at the bond cut
    pub discarded_weight: f64,
    /// thrown weight the identity gate would have produced
    pub weight_identity: f64,
    /// split tensors of the winning transformed state
    pub left: Tensor,
    pub right: Tensor,
    /// untruncated transformed two-site tensor (l, s1, s2, r)
    pub psi_transformed: Tensor,
}

/// Thrown weight of each candidate gate applied to psi, from the spectrum
/// of the bond reduced density matrix; returns the winner with its split.
pub fn clifford_scan(
    psi: &Tensor,
    chi_cap: usize,
    gates: &[CliffordGate2],
    direction: Direction,
) -> Result<ScanResult> {
    let (l, r) = (psi.shape()[0], psi.shape()[3]);
    // (s2, s1, l, r) layout puts the gate index p = s1 + 2 s2 in front
    let b_mat = psi
        .view()
        .permuted_axes(IxDyn(&[2, 1, 0, 3]))
        .as_standard_layout()
        .into_owned()
        .into_shape((4, l * r))
        .expect("scan matricize");

    let transformed = |g: &CliffordGate2| -> Tensor {
        let a = g.unitary.dot(&b_mat);
        a.into_shape((2, 2, l, r))
            .expect("scan reshape")
            .permuted_axes([2, 1, 0, 3])
            .as_standard_layout()
            .into_owned()
            .into_dyn()
    };

    let mut weights = Vec::with_capacity(gates.len());
    for g in gates {
        let a = g.unitary.dot(&b_mat);
        // bond cut groups (s1, l) against (s2, r); Gram on the smaller side
        let m2 = a
            .into_shape((2, 2, l, r))
            .expect("scan reshape")
            .permuted_axes([1, 2, 0, 3])
            .as_standard_layout()
            .into_owned()
            .into_shape((2 * l, 2 * r))
            .expect("scan bond matrix");
        let gram = if l <= r {
            let mh = m2.t().mapv(|z| z.conj());
            m2.dot(&mh)
        } else {
            let mh = m2.t().mapv(|z| z.conj());
            mh.dot(&m2)
        };
        let ev = eigvalsh_hermitian(&gram); // ascending
        let d = ev.len();
        let total: f64 = ev.iter().sum();
        let kept: f64 = ev.iter().skip(d.saturating_sub(chi_cap)).sum();
        weights.push(((total - kept) / total).max(0.0));
    }

    let min_w = weights.iter().copied().fold(f64::INFINITY, f64::min);
    let mut winner = 0usize;
    let mut winner_key = (usize::MAX, usize::MAX);
    for (gid, &w) in weights.iter().enumerate() {
        if w <= min_w + TIE_WINDOW {
            let key = (gates[gid].schmidt_rank, gid);
            if key < winner_key {
                winner_key = key;
                winner = gid;
            }
        }
    }

    let psi_t = transformed(&gates[winner]);
    let (left, right, w_svd) = truncate_split(&psi_t, chi_cap, direction)?;
    debug_assert!(
        (w_svd - weights[winner]).abs() < 1e-8,
        "gram weight {} vs svd weight {w_svd}",
        weights[winner]
    );
    Ok(ScanResult {
        gate_id: winner,
        discarded_weight: weights[winner],
        weight_identity: weights[0],
        left,
        right,
        psi_transformed: psi_t,
    })
}

/// Conjugate the two central MPO tensors by U ... U^dag and re-split with
/// the working threshold. The canonical center (site i or i+1) is
/// preserved; cost is O(chi_w^3).
pub fn apply_gate_to_mpo_center(
    h: &mut Mpo,
    gate: &CliffordGate2,
    i: usize,
    rel_threshold: f64,
) -> Result<()> {
    if h.center != i && h.center != i + 1 {
        return Err(Error::State(format!(
            "MPO center {} not at bond ({}, {})",
            h.center,
            i,
            i + 1
        )));
    }
    let u = &gate.unitary;
    let uc = u.mapv(|z| z.conj());
    // W_i(l,o1,i1,m) . W_{i+1}(m,o2,i2,r) -> (l,o1,i1,o2,i2,r)
    let t = contract(&h.tensors[i], &h.tensors[i + 1], &[(3, 0)])?;
    let (l, r) = (t.shape()[0], t.shape()[5]);
    // out pair and in pair as gate indices: q = o1 + 2 o2
    // permute to (l, r, o2, o1, i2, i1) and flatten the pairs
    let t = t
        .permuted_axes(IxDyn(&[0, 5, 3, 1, 4, 2]))
        .as_standard_layout()
        .into_owned()
        .into_shape(IxDyn(&[l * r, 4, 4]))
        .expect("mpo pair flatten");
    // slab -> U slab U^dag
    let t1 = contract(&t, &u.clone().into_dyn(), &[(1, 1)])?; // (k, i, o')
    let t2 = contract(&t1, &uc.into_dyn(), &[(1, 1)])?; // (k, o', i')
    let t2 = t2
        .into_shape(IxDyn(&[l, r, 2, 2, 2, 2]))
        .expect("mpo pair unflatten");
    // axes (l, r, o2', o1', i2', i1') -> (l, o1', i1', o2', i2', r)
    let t2 = t2.permuted_axes(IxDyn(&[0, 3, 5, 2, 4, 1]));
    let svd = svd_truncate(&t2.as_standard_layout().into_owned(), &[0, 1, 2], usize::MAX, rel_threshold)?;
    if h.center == i {
        // keep the right factor isometric
        let mut us = svd.u;
        for (k, &x) in svd.s.iter().enumerate() {
            us.index_axis_mut(Axis(3), k).mapv_inplace(|z| z * x);
        }
        h.tensors[i] = us;
        h.tensors[i + 1] = svd.vt;
    } else {
        let mut sv = svd.vt;
        for (k, &x) in svd.s.iter().enumerate() {
            sv.index_axis_mut(Axis(0), k).mapv_inplace(|z| z * x);
        }
        h.tensors[i] = svd.u;
        h.tensors[i + 1] = sv;
    }
    Ok(())
}

/// CA-DMRG: the shared sweep engine with the full 720-gate table.
pub fn run_cadmrg(h: &Mpo, cfg: &RunConfig) -> Result<RunResult> {
    let gates = enumerate_gates();
    run_engine(h, cfg, &gates)
}

fn apply_two_qubit(state: &mut Array1<C64>, u: &Array2<C64>, q0: usize, q1: usize) {
    let n = state.len();
    let (b0, b1) = (1usize << q0, 1usize << q1);
    for base in 0..n {
        if base & b0 != 0 || base & b1 != 0 {
            continue;
        }
        let idx = [base, base | b0, base | b1, base | b0 | b1];
        let old: Vec<C64> = idx.iter().map(|&k| state[k]).collect();
        for p in 0..4 {
            let mut acc = C64::new(0.0, 0.0);
            for q in 0..4 {
                acc += u[[p, q]] * old[q];
            }
            state[idx[p]] = acc;
        }
    }
}

/// Dense state vector of the ansatz C|MPS>: the daggers of the recorded
/// gates applied in reverse record order to the densified MPS.
pub fn reconstruct_state(
    circuit: &CliffordCircuit,
    s: &Mps,
    gates: &[CliffordGate2],
) -> Result<Array1<C64>> {
    let mut psi = s.to_dense()?;
    for rec in circuit.record.iter().rev() {
        let u = &gates[rec.gate_id].unitary;
        let ud = u.t().mapv(|z| z.conj());
        // bond b straddles sites (b-1, b); site b-1 is gate qubit 0
        apply_two_qubit(&mut psi, &ud, rec.bond - 1, rec.bond);
    }
    Ok(psi)
}
