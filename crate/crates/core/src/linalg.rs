//! Lanczos iteration with full reorthogonalization for extreme eigenvalues.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Relative residual tolerance on the target Ritz pair.
    pub tol: f64,
    pub max_iter: usize,
    /// Seed of the start-vector perturbation.
    pub seed: u64,
}

impl LanczosOptions {
    pub fn for_scalar<T: Real>() -> Self {
        LanczosOptions {
            tol: T::SOLVER_TOL,
            max_iter: 600,
            seed: 0x5eed,
        }
    }
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self::for_scalar::<f64>()
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Target {
    Largest,
    LargestMagnitude,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

fn start_vector<T: Real>(dim: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<T> = (0..dim)
        .map(|_| T::lit(1.0 + 0.5 * (rng.random::<f64>() - 0.5)))
        .collect();
    let nrm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= nrm);
    v
}

fn lanczos<T: Real>(
    dim: usize,
    op: impl Fn(&[T]) -> Vec<T>,
    opts: &LanczosOptions,
    target: Target,
) -> Result<T> {
    if dim == 0 {
        return Ok(T::zero());
    }
    let tol = T::lit(opts.tol);
    let mut basis: Vec<Vec<T>> = vec![start_vector(dim, opts.seed)];
    let mut alpha: Vec<T> = Vec::new();
    let mut beta: Vec<T> = Vec::new();
    let mut scale = T::zero();
    let steps = opts.max_iter.min(dim);
    for j in 0..steps {
        let q = &basis[j];
        let mut w = op(q);
        let a = dot(q, &w);
        for (wi, qi) in w.iter_mut().zip(q) {
            *wi -= a * *qi;
        }
        if j > 0 {
            let b = beta[j - 1];
            for (wi, pi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= b * *pi;
            }
        }
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= c * *vi;
                }
            }
        }
        let b = dot(&w, &w).sqrt();
        alpha.push(a);
        scale = scale.max(a.abs()).max(b);

        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                T::zero()
            }
        });
        let eig = SymmetricEigen::new(t);
        let pick = (0..m)
            .max_by(|&x, &y| {
                let (vx, vy) = (eig.eigenvalues[x], eig.eigenvalues[y]);
                let (kx, ky) = match target {
                    Target::Largest => (vx, vy),
                    Target::LargestMagnitude => (vx.abs(), vy.abs()),
                };
                kx.partial_cmp(&ky).unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("nonempty tridiagonal");
        let theta = eig.eigenvalues[pick];
        let resid = b * eig.eigenvectors[(m - 1, pick)].abs();
        let breakdown = b <= T::lit(1e-14) * scale || b == T::zero();
        if breakdown || resid <= tol * theta.abs().max(T::lit(1e-300)) || m == dim {
            return Ok(theta);
        }
        beta.push(b);
        basis.push(w.into_iter().map(|x| x / b).collect());
    }
    Err(Error::NoConvergence { iterations: steps })
}

/// Largest eigenvalue of a symmetric operator given by its action.
pub fn largest_eigenvalue<T: Real>(
    dim: usize,
    op: impl Fn(&[T]) -> Vec<T>,
    opts: &LanczosOptions,
) -> Result<T> {
    lanczos(dim, op, opts, Target::Largest)
}

/// Eigenvalue of largest magnitude of a symmetric operator.
pub fn largest_magnitude_eigenvalue<T: Real>(
    dim: usize,
    op: impl Fn(&[T]) -> Vec<T>,
    opts: &LanczosOptions,
) -> Result<T> {
    lanczos(dim, op, opts, Target::LargestMagnitude).map(|x| x.abs())
}

/// Spectral norm of a dense matrix through the Gram operator `AᵀA`.
pub fn spectral_norm<T: Real>(a: &DMatrix<T>) -> Result<T> {
    let opts = LanczosOptions::for_scalar::<T>();
    let at = a.transpose();
    let lam = largest_eigenvalue(
        a.ncols(),
        |x| {
            let v = DVector::from_column_slice(x);
            (&at * (a * v)).as_slice().to_vec()
        },
        &opts,
    )?;
    Ok(lam.max(T::zero()).sqrt())
}

/// Largest eigenvalue of a dense symmetric positive semidefinite matrix.
pub fn psd_norm<T: Real>(a: &DMatrix<T>) -> Result<T> {
    let opts = LanczosOptions::for_scalar::<T>();
    largest_eigenvalue(
        a.ncols(),
        |x| (a * DVector::from_column_slice(x)).as_slice().to_vec(),
        &opts,
    )
}

/// Number of eigenvalues above `cutoff` of a symmetric matrix whose spectrum
/// should cluster at 0 and 1; fails when an eigenvalue sits between clusters.
pub fn projector_rank<T: Real>(p: &DMatrix<T>, cutoff: f64) -> Result<usize> {
    let eig = SymmetricEigen::new(p.clone());
    let mut rank = 0;
    for &e in eig.eigenvalues.iter() {
        let e = e.as_f64();
        if e > 1.0 - cutoff && e < 1.0 + cutoff {
            rank += 1;
        } else if e.abs() >= cutoff {
            return Err(Error::InvalidArgument(format!(
                "eigenvalue {e} outside the projector clusters"
            )));
        }
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_spectra() {
        let id = DMatrix::<f64>::identity(7, 7);
        assert!((spectral_norm(&id).unwrap() - 1.0).abs() < 1e-12);
        let ones = DMatrix::<f64>::from_element(24, 24, 1.0);
        assert!((psd_norm(&ones).unwrap() - 24.0).abs() < 1e-9);
        let zero = DMatrix::<f64>::zeros(5, 5);
        assert_eq!(psd_norm(&zero).unwrap(), 0.0);
    }

    #[test]
    fn random_symmetric_matches_dense_eigensolver() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = DMatrix::<f64>::from_fn(100, 100, |_, _| rng.random::<f64>() - 0.5);
        let a = &b + b.transpose();
        let eig = SymmetricEigen::new(a.clone());
        let max = eig.eigenvalues.max();
        let maxabs = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let opts = LanczosOptions::default();
        let got = largest_eigenvalue(100, |x| (&a * DVector::from_column_slice(x)).as_slice().to_vec(), &opts).unwrap();
        assert!((got - max).abs() <= 1e-9 * max.abs());
        let got = largest_magnitude_eigenvalue(100, |x| (&a * DVector::from_column_slice(x)).as_slice().to_vec(), &opts).unwrap();
        assert!((got - maxabs).abs() <= 1e-9 * maxabs);
        let svd = b.singular_values().max();
        assert!((spectral_norm(&b).unwrap() - svd).abs() <= 1e-9 * svd);
    }

    #[test]
    fn single_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = DMatrix::<f32>::from_fn(30, 30, |_, _| rng.random::<f32>() - 0.5);
        let svd = b.singular_values().max();
        assert!((spectral_norm(&b).unwrap() - svd).abs() <= 1e-4 * svd);
    }

    #[test]
    fn non_convergence_reports_iterations() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let b = DMatrix::<f64>::from_fn(50, 50, |_, _| rng.random::<f64>());
        let a = &b + b.transpose();
        let opts = LanczosOptions { tol: 1e-15, max_iter: 2, seed: 1 };
        let err = largest_eigenvalue(50, |x| (&a * DVector::from_column_slice(x)).as_slice().to_vec(), &opts);
        assert!(matches!(err, Err(Error::NoConvergence { iterations: 2 })));
    }

    #[test]
    fn ranks() {
        let mut p = DMatrix::<f64>::zeros(4, 4);
        p[(0, 0)] = 1.0;
        p[(2, 2)] = 1.0;
        assert_eq!(projector_rank(&p, 1e-6).unwrap(), 2);
        p[(3, 3)] = 0.5;
        assert!(projector_rank(&p, 1e-6).is_err());
    }
}
