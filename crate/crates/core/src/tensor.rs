//! Dense complex tensor kernels: pairwise contraction, truncated SVD and
//! QR-based orthogonalization.
//!
//! A tensor is stored as an n-dimensional array of `Complex64` in row-major
//! (C) order; `reshape` reinterprets that linear order and `permute`
//! reorders axes. All heavy lifting below reduces to matricization plus a
//! BLAS/LAPACK call.

use ndarray::prelude::*;
use ndarray_linalg::{QRInto, SVDInto};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Tensor = ArrayD<C64>;

pub fn scalar(z: C64) -> Tensor {
    ArrayD::from_elem(IxDyn(&[]), z)
}

pub fn norm(t: &Tensor) -> f64 {
    t.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Contract `a` and `b` over the given `(axis-of-a, axis-of-b)` pairs.
///
/// The result carries the unpaired axes of `a` (in original order) followed
/// by the unpaired axes of `b`.
pub fn contract(a: &Tensor, b: &Tensor, pairs: &[(usize, usize)]) -> Result<Tensor> {
    for &(ia, ib) in pairs {
        if ia >= a.ndim() || ib >= b.ndim() {
            return Err(Error::DimensionMismatch(format!(
                "contraction axes ({ia},{ib}) out of range for ranks {}/{}",
                a.ndim(),
                b.ndim()
            )));
        }
        if a.shape()[ia] != b.shape()[ib] {
            return Err(Error::DimensionMismatch(format!(
                "axis {ia} of lhs has extent {}, axis {ib} of rhs has extent {}",
                a.shape()[ia],
                b.shape()[ib]
            )));
        }
    }
    let a_paired: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    let b_paired: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    let a_keep: Vec<usize> = (0..a.ndim()).filter(|i| !a_paired.contains(i)).collect();
    let b_keep: Vec<usize> = (0..b.ndim()).filter(|i| !b_paired.contains(i)).collect();

    let mut a_perm = a_keep.clone();
    a_perm.extend(&a_paired);
    let mut b_perm = b_paired.clone();
    b_perm.extend(&b_keep);

    let m: usize = a_keep.iter().map(|&i| a.shape()[i]).product();
    let k: usize = a_paired.iter().map(|&i| a.shape()[i]).product();
    let n: usize = b_keep.iter().map(|&i| b.shape()[i]).product();

    let am = a
        .view()
        .permuted_axes(a_perm.as_slice())
        .as_standard_layout()
        .into_owned()
        .into_shape((m, k))
        .expect("matricize lhs");
    let bm = b
        .view()
        .permuted_axes(b_perm.as_slice())
        .as_standard_layout()
        .into_owned()
        .into_shape((k, n))
        .expect("matricize rhs");

    let cm = am.dot(&bm);
    let mut out_shape: Vec<usize> = a_keep.iter().map(|&i| a.shape()[i]).collect();
    out_shape.extend(b_keep.iter().map(|&i| b.shape()[i]));
    Ok(cm.into_shape(IxDyn(&out_shape)).expect("reshape result"))
}

fn matricize(t: &Tensor, left_axes: &[usize]) -> (Array2<C64>, Vec<usize>, Vec<usize>) {
    let right_axes: Vec<usize> = (0..t.ndim()).filter(|i| !left_axes.contains(i)).collect();
    let mut perm = left_axes.to_vec();
    perm.extend(&right_axes);
    let ldims: Vec<usize> = left_axes.iter().map(|&i| t.shape()[i]).collect();
    let rdims: Vec<usize> = right_axes.iter().map(|&i| t.shape()[i]).collect();
    let m: usize = ldims.iter().product();
    let n: usize = rdims.iter().product();
    let mat = t
        .view()
        .permuted_axes(perm.as_slice())
        .as_standard_layout()
        .into_owned()
        .into_shape((m, n))
        .expect("matricize");
    (mat, ldims, rdims)
}

pub struct SvdResult {
    /// Left factor with axes: left axes of the input then the new bond.
    pub u: Tensor,
    /// Kept singular values, descending.
    pub s: Vec<f64>,
    /// Right factor with axes: the new bond then the right axes.
    pub vt: Tensor,
    /// Relative squared weight of the dropped singular values.
    pub discarded_weight: f64,
}

/// Truncated SVD across the cut separating `left_axes` from the rest.
///
/// The kept rank is `min(max_rank, #{i : s_i^2 / sum_j s_j^2 >= rel_threshold})`
/// and always at least one. Pass `usize::MAX` for `max_rank` to apply the
/// relative-weight rule alone.
pub fn svd_truncate(
    t: &Tensor,
    left_axes: &[usize],
    max_rank: usize,
    rel_threshold: f64,
) -> Result<SvdResult> {
    if max_rank == 0 {
        return Err(Error::DimensionMismatch("max_rank must be >= 1".into()));
    }
    let (mat, ldims, rdims) = matricize(t, left_axes);
    let (u, s, vt) = mat.svd_into(true, true)?;
    let u = u.expect("left singular vectors");
    let vt = vt.expect("right singular vectors");

    let total: f64 = s.iter().map(|x| x * x).sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::DegenerateInput(
            "svd_truncate on zero or non-finite tensor".into(),
        ));
    }
    let by_threshold = s.iter().filter(|&&x| x * x / total >= rel_threshold).count();
    let r = by_threshold.min(max_rank).max(1);
    let discarded: f64 = s.iter().skip(r).map(|x| x * x).sum::<f64>() / total;

    let mut ushape = ldims.clone();
    ushape.push(r);
    let mut vshape = vec![r];
    vshape.extend(&rdims);

    let uk = u
        .slice(s![.., ..r])
        .to_owned()
        .into_shape(IxDyn(&ushape))
        .expect("reshape U");
    let vk = vt
        .slice(s![..r, ..])
        .to_owned()
        .into_shape(IxDyn(&vshape))
        .expect("reshape V");
    Ok(SvdResult {
        u: uk,
        s: s.iter().take(r).copied().collect(),
        vt: vk,
        discarded_weight: discarded,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Left,
    Right,
}

/// QR-based orthogonalization across the cut separating `left_axes` from the
/// complementary axes.
///
/// `Direction::Left` returns `(Q, R)` with `Q` isometric over the left axes
/// and `t = Q . R` (bond = last axis of Q, first of R). `Direction::Right`
/// returns `(Q, R)` with `Q` isometric over the complementary axes and
/// `t = R . Q` (bond = last axis of R, first of Q).
pub fn orthonormalize(
    t: &Tensor,
    left_axes: &[usize],
    direction: Direction,
) -> Result<(Tensor, Tensor)> {
    if norm(t) < 1e-300 {
        return Err(Error::DegenerateInput("orthonormalize on zero tensor".into()));
    }
    let (mat, ldims, rdims) = matricize(t, left_axes);
    match direction {
        Direction::Left => {
            let (q, r) = mat.qr_into()?;
            let rank = q.shape()[1];
            let mut qshape = ldims;
            qshape.push(rank);
            let mut rshape = vec![rank];
            rshape.extend(&rdims);
            Ok((
                q.into_shape(IxDyn(&qshape)).expect("reshape Q"),
                r.into_shape(IxDyn(&rshape)).expect("reshape R"),
            ))
        }
        Direction::Right => {
            // LQ via QR of the conjugate transpose
            let math = mat.t().mapv(|z| z.conj());
            let (q, r) = math.qr_into()?;
            let rank = q.shape()[1];
            let qh = q.t().mapv(|z| z.conj());
            let rh = r.t().mapv(|z| z.conj());
            let mut qshape = vec![rank];
            qshape.extend(&rdims);
            let mut rshape = ldims;
            rshape.push(rank);
            Ok((
                qh.as_standard_layout()
                    .into_owned()
                    .into_shape(IxDyn(&qshape))
                    .expect("reshape Q"),
                rh.as_standard_layout()
                    .into_owned()
                    .into_shape(IxDyn(&rshape))
                    .expect("reshape R"),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn randt(shape: &[usize], seed: u64) -> Tensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ArrayD::from_shape_fn(IxDyn(shape), |_| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        })
    }

    #[test]
    fn contract_identity() {
        let eye: Tensor = Array2::<C64>::eye(2).into_dyn();
        let v = randt(&[2], 1);
        let out = contract(&eye, &v, &[(1, 0)]).unwrap();
        assert!(norm(&(&out - &v)) < 1e-15);
    }

    #[test]
    fn contract_matches_naive_loop() {
        let a = randt(&[2, 3], 7);
        let b = randt(&[3, 2], 8);
        let c = contract(&a, &b, &[(1, 0)]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..3 {
                    acc += a[[i, k]] * b[[k, j]];
                }
                assert_abs_diff_eq!(c[[i, j]].re, acc.re, epsilon = 1e-12);
                assert_abs_diff_eq!(c[[i, j]].im, acc.im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn contract_normalized_vector_self() {
        let mut v = randt(&[5], 3);
        let n = norm(&v);
        v.mapv_inplace(|z| z / n);
        let vc = v.mapv(|z| z.conj());
        let s = contract(&v, &vc, &[(0, 0)]).unwrap();
        assert_abs_diff_eq!(s[IxDyn(&[])].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn contract_associativity() {
        let a = randt(&[3, 4], 10);
        let b = randt(&[4, 5], 11);
        let c = randt(&[5, 3], 12);
        let ab_c = contract(&contract(&a, &b, &[(1, 0)]).unwrap(), &c, &[(1, 0)]).unwrap();
        let a_bc = contract(&a, &contract(&b, &c, &[(1, 0)]).unwrap(), &[(1, 0)]).unwrap();
        assert!(norm(&(&ab_c - &a_bc)) < 1e-10);
    }

    #[test]
    fn contract_extent_mismatch() {
        let a = randt(&[2, 3], 1);
        let b = randt(&[2, 2], 2);
        assert!(contract(&a, &b, &[(1, 0)]).is_err());
    }

    #[test]
    fn svd_rank_one_no_discard() {
        let u = randt(&[4], 20);
        let v = randt(&[4], 21);
        let mut t = ArrayD::zeros(IxDyn(&[4, 4]));
        for i in 0..4 {
            for j in 0..4 {
                t[[i, j]] = u[[i]] * v[[j]];
            }
        }
        let r = svd_truncate(&t, &[0], 1, 0.0).unwrap();
        assert!(r.discarded_weight < 1e-14);
    }

    #[test]
    fn svd_bell_state_half_weight() {
        let mut t = ArrayD::zeros(IxDyn(&[2, 2]));
        let x = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        t[[0, 0]] = x;
        t[[1, 1]] = x;
        let r = svd_truncate(&t, &[0], 1, 0.0).unwrap();
        assert_abs_diff_eq!(r.discarded_weight, 0.5, epsilon = 1e-13);
    }

    #[test]
    fn svd_full_rank_reconstructs() {
        let t = randt(&[8, 8], 30);
        let r = svd_truncate(&t, &[0], 8, 0.0).unwrap();
        let mut us = r.u.clone();
        for (j, &sv) in r.s.iter().enumerate() {
            us.slice_mut(s![.., j]).mapv_inplace(|z| z * sv);
        }
        let rec = contract(&us, &r.vt, &[(1, 0)]).unwrap();
        assert!(norm(&(&rec - &t)) < 1e-12);
    }

    #[test]
    fn svd_discard_monotone_in_rank() {
        let t = randt(&[6, 6], 31);
        let mut prev = f64::INFINITY;
        for r in 1..=6 {
            let out = svd_truncate(&t, &[0], r, 0.0).unwrap();
            assert!(out.discarded_weight <= prev + 1e-15);
            prev = out.discarded_weight;
        }
    }

    #[test]
    fn svd_zero_tensor_is_degenerate() {
        let t: Tensor = ArrayD::zeros(IxDyn(&[3, 3]));
        assert!(matches!(
            svd_truncate(&t, &[0], 3, 0.0),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn orthonormalize_left_isometry() {
        let t = randt(&[4, 4], 40);
        let (q, r) = orthonormalize(&t, &[0], Direction::Left).unwrap();
        let qh = q.mapv(|z| z.conj());
        let gram = contract(&qh, &q, &[(0, 0)]).unwrap();
        let eye: Tensor = Array2::<C64>::eye(gram.shape()[0]).into_dyn();
        assert!(norm(&(&gram - &eye)) < 1e-12);
        let rec = contract(&q, &r, &[(1, 0)]).unwrap();
        assert!(norm(&(&rec - &t)) < 1e-12);
    }

    #[test]
    fn orthonormalize_right_isometry() {
        let t = randt(&[3, 2, 4], 41);
        let (q, r) = orthonormalize(&t, &[0], Direction::Right).unwrap();
        // Q has axes (bond, 2, 4) and is right-isometric: Q Q^H = I
        let qh = q.mapv(|z| z.conj());
        let gram = contract(&q, &qh, &[(1, 1), (2, 2)]).unwrap();
        let eye: Tensor = Array2::<C64>::eye(gram.shape()[0]).into_dyn();
        assert!(norm(&(&gram - &eye)) < 1e-12);
        let rec = contract(&r, &q, &[(1, 0)]).unwrap();
        assert!(norm(&(&rec - &t)) < 1e-12);
    }

    #[test]
    fn orthonormalize_isometric_input_gives_unimodular_r() {
        let t = randt(&[4, 4], 42);
        let (q, _) = orthonormalize(&t, &[0], Direction::Left).unwrap();
        let (_, r2) = orthonormalize(&q, &[0], Direction::Left).unwrap();
        // R of an isometry is a unitary diagonal phase matrix
        let n = r2.shape()[0];
        let mut det = C64::new(1.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    assert!(r2[[i, j]].norm() < 1e-10);
                }
            }
            det *= r2[[i, i]];
        }
        assert_abs_diff_eq!(det.norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn orthonormalize_rank_deficient_reconstructs() {
        let a = randt(&[4, 2], 50);
        let b = randt(&[2, 4], 51);
        let t = contract(&a, &b, &[(1, 0)]).unwrap();
        let (q, r) = orthonormalize(&t, &[0], Direction::Left).unwrap();
        let rec = contract(&q, &r, &[(1, 0)]).unwrap();
        assert!(norm(&(&rec - &t)) < 1e-12);
    }
}
