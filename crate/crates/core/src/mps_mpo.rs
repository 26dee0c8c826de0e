//! MPS/MPO containers in mixed-canonical form, MPO construction from a
//! PauliSum, canonicalization sweeps, environments and expectation values.
//!
//! Axis conventions used throughout:
//! - MPS site tensor: (left bond, sigma, right bond), sigma of extent 2.
//! - MPO site tensor: (left bond, out, in, right bond); the operator is
//!   sum W[l,o,i,r] |o><i| per site.
//! - Environments: (bra bond, mpo bond, ket bond).
//! - Site i of the chain is qubit i, i.e. bit i (LSB first) of a dense
//!   basis index, matching [`crate::pauli`].

use std::collections::BTreeMap;

use ndarray::prelude::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliSum};
use crate::tensor::{contract, orthonormalize, svd_truncate, Direction, Tensor, C64};

#[derive(Debug, Clone)]
pub struct Mps {
    pub tensors: Vec<Tensor>,
    pub center: usize,
}

#[derive(Debug, Clone)]
pub struct Mpo {
    pub tensors: Vec<Tensor>,
    pub center: usize,
}

/// One canonical-move step on a chain whose site tensors have `phys` physical
/// axes between the two bond axes. A `max_rank`/`rel_threshold` pair turns the
/// QR step into a truncating SVD step.
fn shift_center(
    tensors: &mut [Tensor],
    center: &mut usize,
    to: usize,
    max_rank: usize,
    rel_threshold: f64,
    phys: usize,
) -> Result<f64> {
    let truncating = max_rank != usize::MAX || rel_threshold > 0.0;
    let mut max_discarded = 0.0f64;
    while *center != to {
        let c = *center;
        if to > c {
            let last_axis = phys + 1;
            let left_axes: Vec<usize> = (0..last_axis).collect();
            let (q, carry) = if truncating {
                let svd = svd_truncate(&tensors[c], &left_axes, max_rank, rel_threshold)?;
                max_discarded = max_discarded.max(svd.discarded_weight);
                let mut sv = svd.vt;
                for (i, &s) in svd.s.iter().enumerate() {
                    sv.index_axis_mut(Axis(0), i).mapv_inplace(|z| z * s);
                }
                (svd.u, sv)
            } else {
                orthonormalize(&tensors[c], &left_axes, Direction::Left)?
            };
            tensors[c] = q;
            tensors[c + 1] = contract(&carry, &tensors[c + 1], &[(1, 0)])?;
            *center = c + 1;
        } else {
            let (q, carry) = if truncating {
                let svd = svd_truncate(&tensors[c], &[0], max_rank, rel_threshold)?;
                max_discarded = max_discarded.max(svd.discarded_weight);
                let mut us = svd.u;
                for (i, &s) in svd.s.iter().enumerate() {
                    us.index_axis_mut(Axis(1), i).mapv_inplace(|z| z * s);
                }
                (svd.vt, us)
            } else {
                orthonormalize(&tensors[c], &[0], Direction::Right)?
            };
            tensors[c] = q;
            let left = &tensors[c - 1];
            let last = left.ndim() - 1;
            tensors[c - 1] = contract(left, &carry, &[(last, 0)])?;
            *center = c - 1;
        }
    }
    Ok(max_discarded)
}

impl Mps {
    pub fn n_sites(&self) -> usize {
        self.tensors.len()
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.tensors.iter().map(|t| t.shape()[0]).collect();
        out.push(1);
        out
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Relocate the canonical center by QR steps; the represented state is
    /// unchanged up to rounding.
    pub fn move_center(&mut self, to: usize) -> Result<()> {
        shift_center(&mut self.tensors, &mut self.center, to, usize::MAX, 0.0, 1)?;
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        crate::tensor::norm(&self.tensors[self.center])
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.tensors[self.center].mapv_inplace(|z| z / n);
        }
    }

    /// Dense state vector, basis index bit i = sigma_i. Only for small N.
    pub fn to_dense(&self) -> Result<Array1<C64>> {
        let n = self.n_sites();
        if n > crate::pauli::DENSE_QUBIT_CAP {
            return Err(Error::SizeCap(format!("dense MPS limited to {n} sites")));
        }
        let mut acc = self.tensors[0].clone();
        for t in &self.tensors[1..] {
            let last = acc.ndim() - 1;
            acc = contract(&acc, t, &[(last, 0)])?;
        }
        // axes now (1, s_0, ..., s_{N-1}, 1); C-order reshape needs s_0 slowest
        // reversed so that s_0 lands in bit 0
        let mut perm: Vec<usize> = (1..=n).rev().collect();
        perm.insert(0, 0);
        perm.push(n + 1);
        let acc = acc.permuted_axes(IxDyn(&perm));
        let v = acc
            .as_standard_layout()
            .into_owned()
            .into_shape(IxDyn(&[1 << n]))
            .expect("dense reshape");
        Ok(v.into_dimensionality().expect("rank 1"))
    }
}

impl Mpo {
    pub fn n_sites(&self) -> usize {
        self.tensors.len()
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.tensors.iter().map(|t| t.shape()[0]).collect();
        out.push(1);
        out
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Relocate the canonical center with SVD steps at the given relative
    /// weight threshold.
    pub fn move_center(&mut self, to: usize, rel_threshold: f64) -> Result<()> {
        shift_center(
            &mut self.tensors,
            &mut self.center,
            to,
            usize::MAX,
            rel_threshold,
            2,
        )?;
        Ok(())
    }

    /// Dense operator matrix; row index from the `out` legs, column from the
    /// `in` legs, bit i = site i. Only for small N.
    pub fn to_dense(&self) -> Result<Array2<C64>> {
        let n = self.n_sites();
        if n > 10 {
            return Err(Error::SizeCap(format!("dense MPO limited to 10 sites, got {n}")));
        }
        let mut acc = self.tensors[0].clone();
        for t in &self.tensors[1..] {
            let last = acc.ndim() - 1;
            acc = contract(&acc, t, &[(last, 0)])?;
        }
        // axes (1, o_0, i_0, ..., o_{N-1}, i_{N-1}, 1)
        let mut perm: Vec<usize> = vec![0];
        perm.extend((0..n).rev().map(|j| 1 + 2 * j));
        perm.extend((0..n).rev().map(|j| 2 + 2 * j));
        perm.push(2 * n + 1);
        let acc = acc.permuted_axes(IxDyn(&perm));
        let m = acc
            .as_standard_layout()
            .into_owned()
            .into_shape(IxDyn(&[1 << n, 1 << n]))
            .expect("dense reshape");
        Ok(m.into_dimensionality().expect("rank 2"))
    }
}

/// Random right-canonical normalized MPS with bond dimension chi_init
/// (clipped by the exact-representability bound near the boundaries).
pub fn random_mps(n_sites: usize, chi_init: usize, seed: u64) -> Mps {
    assert!(n_sites >= 2 && chi_init >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = |i: usize| -> usize {
        // exact-representability bound min(2^i, 2^(n-i)), saturating
        let left = if i >= 30 { usize::MAX } else { 1usize << i };
        let right = if n_sites - i >= 30 { usize::MAX } else { 1usize << (n_sites - i) };
        chi_init.min(left).min(right)
    };
    let mut tensors = Vec::with_capacity(n_sites);
    for i in 0..n_sites {
        let l = if i == 0 { 1 } else { dim(i) };
        let r = if i == n_sites - 1 { 1 } else { dim(i + 1) };
        let t = ArrayD::from_shape_fn(IxDyn(&[l, 2, r]), |_| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        tensors.push(t);
    }
    let mut s = Mps { tensors, center: n_sites - 1 };
    s.move_center(0).expect("canonicalize random MPS");
    s.normalize();
    s
}

/// Normalized superposition of computational-basis states, built as a
/// direct sum of product states (bond dimension = number of terms) and then
/// canonicalized. Basis index bit i = sigma_i, as in [`Mps::to_dense`].
pub fn superposition_mps(n_sites: usize, terms: &[(usize, C64)]) -> Mps {
    assert!(n_sites >= 2 && !terms.is_empty());
    let k = terms.len();
    let mut tensors = Vec::with_capacity(n_sites);
    for i in 0..n_sites {
        let (l, r) = match i {
            0 => (1, k),
            i if i == n_sites - 1 => (k, 1),
            _ => (k, k),
        };
        let mut t = ArrayD::zeros(IxDyn(&[l, 2, r]));
        for (d, &(bits, c)) in terms.iter().enumerate() {
            let s = (bits >> i) & 1;
            match i {
                0 => t[[0, s, d]] = c,
                i if i == n_sites - 1 => t[[d, s, 0]] = C64::new(1.0, 0.0),
                _ => t[[d, s, d]] = C64::new(1.0, 0.0),
            }
        }
        tensors.push(t);
    }
    let mut s = Mps { tensors, center: n_sites - 1 };
    s.move_center(0).expect("canonicalize superposition MPS");
    s.normalize();
    s
}

/// Computational-basis product state MPS (bond dimension 1), site i set to
/// bit i of `bits`.
pub fn product_mps(n_sites: usize, bits: usize) -> Mps {
    let tensors = (0..n_sites)
        .map(|i| {
            let mut t = ArrayD::zeros(IxDyn(&[1, 2, 1]));
            t[[0, (bits >> i) & 1, 0]] = C64::new(1.0, 0.0);
            t
        })
        .collect();
    Mps { tensors, center: 0 }
}

/// Identity MPO on n sites, all bond dims 1.
pub fn identity_mpo(n_sites: usize) -> Mpo {
    let tensors = (0..n_sites)
        .map(|_| {
            let mut t = ArrayD::zeros(IxDyn(&[1, 2, 2, 1]));
            t[[0, 0, 0, 0]] = C64::new(1.0, 0.0);
            t[[0, 1, 1, 0]] = C64::new(1.0, 0.0);
            t
        })
        .collect();
    Mpo { tensors, center: 0 }
}

fn pauli_index(p: Pauli) -> usize {
    match p {
        Pauli::I => 0,
        Pauli::X => 1,
        Pauli::Y => 2,
        Pauli::Z => 3,
    }
}

/// Exact MPO for a sum of Pauli strings, built site by site with suffix
/// deduplication and a near-lossless SVD compression of the growing bond.
/// The result is left-canonical with the center at the last site; a
/// follow-up [`mpo_canonicalize`] applies the working truncation threshold.
pub fn mpo_from_pauli_sum(p: &PauliSum) -> Result<Mpo> {
    let n = p.n_qubits;
    if p.terms.is_empty() {
        return Err(Error::DegenerateInput("mpo_from_pauli_sum on empty sum".into()));
    }
    if n < 2 {
        return Err(Error::DimensionMismatch("MPO needs at least 2 sites".into()));
    }

    // b: (chi_l, n_suffixes) coefficients of the remaining suffixes in the
    // current left-bond basis; suffixes are the full strings initially
    let mut suffixes: Vec<Vec<Pauli>> = p.terms.keys().cloned().collect();
    let mut b = Array2::<C64>::zeros((1, suffixes.len()));
    for (t, (_, &c)) in p.terms.iter().enumerate() {
        b[[0, t]] = c;
    }

    let pauli_mats: [Array2<C64>; 4] =
        [Pauli::I.matrix(), Pauli::X.matrix(), Pauli::Y.matrix(), Pauli::Z.matrix()];
    let mut tensors: Vec<Tensor> = Vec::with_capacity(n);

    for _site in 0..n {
        let chi_l = b.shape()[0];
        // group by the suffix after this site, deterministically
        let mut classes: BTreeMap<Vec<Pauli>, usize> = BTreeMap::new();
        for s in &suffixes {
            let rest = s[1..].to_vec();
            let next = classes.len();
            classes.entry(rest).or_insert(next);
        }
        let k = classes.len();
        let mut m = Array2::<C64>::zeros((chi_l * 4, k));
        for (t, s) in suffixes.iter().enumerate() {
            let letter = pauli_index(s[0]);
            let cls = classes[&s[1..].to_vec()];
            for l in 0..chi_l {
                m[[l * 4 + letter, cls]] += b[[l, t]];
            }
        }
        let svd = svd_truncate(&m.into_dyn(), &[0], usize::MAX, 1e-28)?;
        let r = svd.s.len();
        // letters -> (out, in) physical pair
        let u = svd
            .u
            .into_shape(IxDyn(&[chi_l, 4, r]))
            .expect("reshape letter tensor");
        let mut w = ArrayD::zeros(IxDyn(&[chi_l, 2, 2, r]));
        for l in 0..chi_l {
            for (letter, mat) in pauli_mats.iter().enumerate() {
                for o in 0..2 {
                    for i in 0..2 {
                        if mat[[o, i]] != C64::new(0.0, 0.0) {
                            for rr in 0..r {
                                w[[l, o, i, rr]] += u[[l, letter, rr]] * mat[[o, i]];
                            }
                        }
                    }
                }
            }
        }
        tensors.push(w);

        let mut sv = svd
            .vt
            .into_dimensionality::<Ix2>()
            .expect("rank 2 residual");
        for (i, &s) in svd.s.iter().enumerate() {
            sv.row_mut(i).mapv_inplace(|z| z * s);
        }
        b = sv;
        let mut next_suffixes = vec![Vec::new(); k];
        for (s, idx) in classes {
            next_suffixes[idx] = s;
        }
        suffixes = next_suffixes;
    }
    // after the last site the residual is a 1x1 scalar
    debug_assert_eq!(b.shape(), &[1, 1]);
    let scale = b[[0, 0]];
    tensors.last_mut().unwrap().mapv_inplace(|z| z * scale);
    Ok(Mpo { tensors, center: n - 1 })
}

/// Right-canonicalize with the working relative-weight threshold; center
/// ends at site 0.
pub fn mpo_canonicalize(h: &mut Mpo, rel_threshold: f64) -> Result<()> {
    let n = h.n_sites();
    // make sure the center claim covers the whole chain: push to the right
    // end with a lossless sweep first if needed
    if h.center != n - 1 {
        shift_center(&mut h.tensors, &mut h.center, n - 1, usize::MAX, 0.0, 2)?;
    }
    h.move_center(0, rel_threshold)
}

/// Environment tensors for an (MPS, MPO) pair.
///
/// `left[i]` contracts everything strictly left of site i, `right[i]`
/// everything from site i to the end; both have axes (bra, mpo, ket).
/// `left[0]` and `right[n]` are trivial scalar-1 tensors.
pub struct EnvCache {
    pub left: Vec<Tensor>,
    pub right: Vec<Tensor>,
}

fn trivial_env() -> Tensor {
    ArrayD::from_elem(IxDyn(&[1, 1, 1]), C64::new(1.0, 0.0))
}

/// left[i+1] from left[i] and the site-i tensors.
pub fn env_advance_left(env: &Tensor, mps_site: &Tensor, mpo_site: &Tensor) -> Result<Tensor> {
    let bra = mps_site.mapv(|z| z.conj());
    // (b,w,k) . ket(k,s,k') -> (b,w,s,k')
    let t1 = contract(env, mps_site, &[(2, 0)])?;
    // . W(w,o,i,w') over (w,w),(s,i) -> (b,k',o,w')
    let t2 = contract(&t1, mpo_site, &[(1, 0), (2, 2)])?;
    // . bra(b,s',b') over (b,b),(o,s') -> (k',w',b')
    let t3 = contract(&t2, &bra, &[(0, 0), (2, 1)])?;
    Ok(t3.permuted_axes(IxDyn(&[2, 1, 0])))
}

/// right[i] from right[i+1] and the site-i tensors.
pub fn env_advance_right(env: &Tensor, mps_site: &Tensor, mpo_site: &Tensor) -> Result<Tensor> {
    let bra = mps_site.mapv(|z| z.conj());
    // ket(k,s,k') . (b,w,k') -> (k,s,b,w)
    let t1 = contract(mps_site, env, &[(2, 2)])?;
    // . W(w,o,i,w') over (w,w'),(s,i) -> (k,b,w,o)
    let t2 = contract(&t1, mpo_site, &[(3, 3), (1, 2)])?;
    // . bra(b,s',b') over (b,b'),(o,s') -> (k,w,b)
    let t3 = contract(&t2, &bra, &[(1, 2), (3, 1)])?;
    Ok(t3.permuted_axes(IxDyn(&[2, 1, 0])))
}

impl EnvCache {
    pub fn new(s: &Mps, h: &Mpo) -> Result<Self> {
        let n = s.n_sites();
        if n != h.n_sites() {
            return Err(Error::DimensionMismatch(format!(
                "MPS has {n} sites, MPO has {}",
                h.n_sites()
            )));
        }
        let mut left = vec![trivial_env(); n + 1];
        let mut right = vec![trivial_env(); n + 1];
        for i in 0..n {
            left[i + 1] = env_advance_left(&left[i], &s.tensors[i], &h.tensors[i])?;
        }
        for i in (0..n).rev() {
            right[i] = env_advance_right(&right[i + 1], &s.tensors[i], &h.tensors[i])?;
        }
        Ok(EnvCache { left, right })
    }

    pub fn refresh_left(&mut self, i: usize, s: &Mps, h: &Mpo) -> Result<()> {
        self.left[i + 1] = env_advance_left(&self.left[i], &s.tensors[i], &h.tensors[i])?;
        Ok(())
    }

    pub fn refresh_right(&mut self, i: usize, s: &Mps, h: &Mpo) -> Result<()> {
        self.right[i] = env_advance_right(&self.right[i + 1], &s.tensors[i], &h.tensors[i])?;
        Ok(())
    }
}

/// <s|h|s> for a (near-)Hermitian h; the imaginary part is discarded after
/// being checked to be rounding-level relative to the magnitude.
pub fn expectation(s: &Mps, h: &Mpo) -> Result<f64> {
    let n = s.n_sites();
    if n != h.n_sites() {
        return Err(Error::DimensionMismatch(format!(
            "MPS has {n} sites, MPO has {}",
            h.n_sites()
        )));
    }
    let mut env = trivial_env();
    for i in 0..n {
        env = env_advance_left(&env, &s.tensors[i], &h.tensors[i])?;
    }
    let z = env[[0, 0, 0]];
    Ok(z.re)
}
