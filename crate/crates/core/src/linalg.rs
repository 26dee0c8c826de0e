//! Iterative lowest-eigenpair solver for Hermitian linear maps.

use ndarray::prelude::*;
use ndarray_linalg::Eigh;
use num_complex::Complex64;

use crate::tensor::C64;

/// A Hermitian operator available only through its action on a vector.
pub trait LinearMap {
    fn dim(&self) -> usize;
    fn apply(&self, v: &Array1<C64>) -> Array1<C64>;
}

pub struct EigResult {
    pub value: f64,
    pub vector: Array1<C64>,
    pub converged: bool,
    pub matvecs: usize,
}

fn dotc(a: &Array1<C64>, b: &Array1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Lanczos iteration with full reorthogonalization, restarted on the best
/// Ritz vector. Converges to `||H v - lambda v|| <= tol * max(1, |lambda|)`.
/// On non-convergence the best iterate is returned with `converged = false`;
/// callers treat that as a warning, not an error.
pub fn lowest_eigpair(
    h: &dyn LinearMap,
    guess: &Array1<C64>,
    tol: f64,
    max_iter: usize,
) -> EigResult {
    let n = h.dim();
    assert_eq!(guess.len(), n, "guess length must match operator dimension");
    let block = 25.min(n);
    let mut v0 = guess.clone();
    let g = dotc(&v0, &v0).re.sqrt();
    assert!(g > 0.0, "guess must be nonzero");
    v0.mapv_inplace(|z| z / g);

    let mut best_val = f64::INFINITY;
    let mut best_vec = v0.clone();
    let mut matvecs = 0usize;

    while matvecs < max_iter {
        // one restarted Lanczos pass with a per-step convergence check
        let mut basis: Vec<Array1<C64>> = vec![v0.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut converged = false;
        let mut ritz = v0.clone();
        let mut lambda = f64::INFINITY;

        for j in 0..block {
            if matvecs >= max_iter {
                break;
            }
            let mut w = h.apply(&basis[j]);
            matvecs += 1;
            let alpha = dotc(&basis[j], &w).re;
            alphas.push(alpha);
            // full reorthogonalization, twice for stability
            for _ in 0..2 {
                for b in &basis {
                    let c = dotc(b, &w);
                    w.zip_mut_with(b, |x, y| *x -= c * y);
                }
            }
            let beta = dotc(&w, &w).re.sqrt();

            let k = alphas.len();
            let mut t = Array2::<f64>::zeros((k, k));
            for i in 0..k {
                t[[i, i]] = alphas[i];
                if i + 1 < k {
                    t[[i, i + 1]] = betas[i];
                    t[[i + 1, i]] = betas[i];
                }
            }
            let (evals, evecs) = t.eigh(ndarray_linalg::UPLO::Lower).expect("tridiagonal eigh");
            lambda = evals[0];
            let coeff = evecs.column(0);
            let resid = beta * coeff[k - 1].abs();
            let done = resid <= tol * lambda.abs().max(1.0) || beta < 1e-14;
            if done || j + 1 == block || matvecs >= max_iter {
                ritz = Array1::<C64>::zeros(n);
                for (jj, b) in basis.iter().enumerate() {
                    let c = C64::new(coeff[jj], 0.0);
                    ritz.zip_mut_with(b, |x, y| *x += c * y);
                }
                let nrm = dotc(&ritz, &ritz).re.sqrt();
                ritz.mapv_inplace(|z| z / nrm);
                converged = done;
                break;
            }
            betas.push(beta);
            w.mapv_inplace(|z| z / Complex64::new(beta, 0.0));
            basis.push(w);
        }

        if lambda < best_val {
            best_val = lambda;
            best_vec = ritz.clone();
        }
        if converged {
            return EigResult {
                value: best_val,
                vector: best_vec,
                converged: true,
                matvecs,
            };
        }
        v0 = ritz;
    }

    EigResult {
        value: best_val,
        vector: best_vec,
        converged: false,
        matvecs,
    }
}

/// Eigendecomposition of a dense complex Hermitian matrix.
///
/// Wraps `ndarray-linalg`'s `eigh`, which for a row-major complex input
/// hands back the conjugate of each eigenvector column (the backend works on
/// the transposed, i.e. conjugated, matrix). The columns of the matrix
/// returned here are true eigenvectors.
pub fn eigh_hermitian(m: &Array2<C64>) -> (Array1<f64>, Array2<C64>) {
    let (evals, evecs) = m.eigh(ndarray_linalg::UPLO::Lower).expect("eigh");
    (evals, evecs.mapv(|z| z.conj()))
}

/// Eigenvalues only, ascending.
pub fn eigvalsh_hermitian(m: &Array2<C64>) -> Array1<f64> {
    use ndarray_linalg::EigValshInto;
    m.clone()
        .eigvalsh_into(ndarray_linalg::UPLO::Lower)
        .expect("eigvalsh")
}

/// Dense Hermitian operator wrapper, used by tests and small oracles.
pub struct DenseMap(pub Array2<C64>);

impl LinearMap for DenseMap {
    fn dim(&self) -> usize {
        self.0.shape()[0]
    }
    fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        self.0.dot(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> Array2<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Array2::from_shape_fn((n, n), |_| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let ah = a.t().mapv(|z| z.conj());
        &a + &ah
    }

    #[test]
    fn diagonal_two_level() {
        let mut m = Array2::<C64>::zeros((2, 2));
        m[[0, 0]] = C64::new(1.0, 0.0);
        m[[1, 1]] = C64::new(-2.0, 0.0);
        let guess = Array1::from_vec(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        let r = lowest_eigpair(&DenseMap(m), &guess, 1e-10, 100);
        assert!(r.converged);
        assert_abs_diff_eq!(r.value, -2.0, epsilon = 1e-10);
        assert!(r.vector[1].norm() > 1.0 - 1e-8);
        assert!(r.vector[0].norm() < 1e-7);
    }

    #[test]
    fn matches_dense_eigensolver() {
        let m = random_hermitian(64, 5);
        let (evals, _) = eigh_hermitian(&m);
        let guess = Array1::from_elem(64, C64::new(1.0, 0.1));
        let r = lowest_eigpair(&DenseMap(m), &guess, 1e-10, 500);
        assert!(r.converged);
        assert_abs_diff_eq!(r.value, evals[0], epsilon = 1e-9);
    }

    #[test]
    fn exact_guess_is_fixed_point() {
        let m = random_hermitian(16, 9);
        let (evals, evecs) = eigh_hermitian(&m);
        let exact = evecs.column(0).to_owned();
        let r = lowest_eigpair(&DenseMap(m.clone()), &exact, 1e-9, 100);
        assert!(r.converged);
        assert!(r.matvecs <= 2);
        assert_abs_diff_eq!(r.value, evals[0], epsilon = 1e-9);
    }

    #[test]
    fn value_below_rayleigh_quotient() {
        let m = random_hermitian(32, 12);
        let guess = Array1::from_elem(32, C64::new(0.3, -0.2));
        let gn = dotc(&guess, &guess).re;
        let rq = dotc(&guess, &m.dot(&guess)).re / gn;
        let r = lowest_eigpair(&DenseMap(m), &guess, 1e-9, 300);
        assert!(r.value <= rq + 1e-12);
    }
}
