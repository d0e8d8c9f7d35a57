//! Operators on `R^{D0}` that commute with every alphabet permutation.
//!
//! Such an operator satisfies `A[y', y] = a(y⁻¹∘y')` for a kernel `a` on
//! `S_N`, so it is stored as a vector of length `N!`. Index permutations,
//! isotypic projectors, transporters, masked products and everything built
//! from them stay in this algebra.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::group_action::InputSpace;
use crate::linalg::{self, LanczosOptions};
use crate::scalar::{Coefficient, Real};

#[derive(Clone)]
pub struct CommutantOperator<T> {
    space: Arc<InputSpace>,
    kernel: Vec<T>,
}

impl<T: Coefficient> CommutantOperator<T> {
    pub fn zero(space: &Arc<InputSpace>) -> Self {
        CommutantOperator {
            space: Arc::clone(space),
            kernel: vec![T::zero(); space.order()],
        }
    }

    pub fn identity(space: &Arc<InputSpace>) -> Self {
        let mut op = Self::zero(space);
        op.kernel[0] = T::one();
        op
    }

    pub fn from_kernel(space: &Arc<InputSpace>, kernel: Vec<T>) -> Result<Self> {
        if kernel.len() != space.order() {
            return Err(Error::SizeMismatch(format!(
                "kernel of length {} for N!={}",
                kernel.len(),
                space.order()
            )));
        }
        Ok(CommutantOperator {
            space: Arc::clone(space),
            kernel,
        })
    }

    /// `V_π` for the index permutation of rank `pi`.
    pub fn index_permutation(space: &Arc<InputSpace>, pi: usize) -> Self {
        let mut op = Self::zero(space);
        op.kernel[space.inverse(pi)] = T::one();
        op
    }

    pub fn space(&self) -> &Arc<InputSpace> {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    /// Matrix dimension `N!`.
    pub fn dim(&self) -> usize {
        self.kernel.len()
    }

    pub fn kernel(&self) -> &[T] {
        &self.kernel
    }

    pub fn into_kernel(self) -> Vec<T> {
        self.kernel
    }

    /// Matrix entry at (`row`, `col`) given as ranks.
    pub fn entry(&self, row: usize, col: usize) -> T {
        let w = self.space.compose(self.space.inverse(col), row);
        self.kernel[w].clone()
    }

    pub fn support_len(&self) -> usize {
        self.kernel.iter().filter(|x| !x.is_zero()).count()
    }

    pub fn is_zero(&self) -> bool {
        self.kernel.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map_kernel(|x| c.clone() * x.clone())
    }

    pub fn map_kernel(&self, f: impl Fn(&T) -> T) -> Self {
        CommutantOperator {
            space: Arc::clone(&self.space),
            kernel: self.kernel.iter().map(f).collect(),
        }
    }

    /// Converts entries to another scalar type.
    pub fn cast<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> CommutantOperator<U> {
        CommutantOperator {
            space: Arc::clone(&self.space),
            kernel: self.kernel.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let kernel = (0..self.dim())
            .map(|w| self.kernel[self.space.inverse(w)].clone())
            .collect();
        CommutantOperator {
            space: Arc::clone(&self.space),
            kernel,
        }
    }

    /// Entrywise product with a 0/1 mask kernel.
    pub fn mask(&self, mask: &[bool]) -> Self {
        let kernel = self
            .kernel
            .iter()
            .zip(mask)
            .map(|(x, &m)| if m { x.clone() } else { T::zero() })
            .collect();
        CommutantOperator {
            space: Arc::clone(&self.space),
            kernel,
        }
    }

    /// `V_π A V_{π⁻¹}` for the index permutation of rank `pi`.
    pub fn conjugate(&self, pi: usize) -> Self {
        let kernel = (0..self.dim())
            .map(|w| self.kernel[self.space.conjugate(w, pi)].clone())
            .collect();
        CommutantOperator {
            space: Arc::clone(&self.space),
            kernel,
        }
    }

    /// `Σ_{π ∈ reps} V_π A V_{π⁻¹}`.
    pub fn conjugation_sum(&self, reps: &[usize]) -> Self {
        let mut acc = Self::zero(&self.space);
        for &pi in reps {
            for w in 0..self.dim() {
                let v = self.kernel[self.space.conjugate(w, pi)].clone();
                if !v.is_zero() {
                    acc.kernel[w] = acc.kernel[w].clone() + v;
                }
            }
        }
        acc
    }

    pub fn trace(&self) -> T {
        T::from_ratio(self.dim() as i64, 1) * self.kernel[0].clone()
    }

    /// `Tr[Aᵀ B]`.
    pub fn inner(&self, other: &Self) -> T {
        let s = self
            .kernel
            .iter()
            .zip(&other.kernel)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
        T::from_ratio(self.dim() as i64, 1) * s
    }

    /// Frobenius norm as `f64`.
    pub fn frobenius(&self) -> f64 {
        let s: f64 = self.kernel.iter().map(|x| x.magnitude().powi(2)).sum();
        (s * self.dim() as f64).sqrt()
    }

    /// `‖self − other‖_F / ‖self‖_F`, or the absolute difference when `self` vanishes.
    pub fn residual(&self, other: &Self) -> f64 {
        let diff = (self - other).frobenius();
        let base = self.frobenius();
        if base < 1e-12 {
            diff
        } else {
            diff / base
        }
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.kernel
            .iter()
            .zip(&other.kernel)
            .map(|(a, b)| (a.clone() - b.clone()).magnitude())
            .fold(0.0, f64::max)
    }

    /// Commutator residual `‖AB − BA‖_F / max(‖AB‖_F, 1e-12)`.
    pub fn commutator_residual(&self, other: &Self) -> f64 {
        let ab = self * other;
        let ba = other * self;
        (&ab - &ba).frobenius() / ab.frobenius().max(1e-12)
    }

    fn gather_product(&self, rhs: &Self) -> Self {
        // c(w) = Σ_u b(u) a(u⁻¹ w), iterating over the support of b
        let space = &self.space;
        let mut c = vec![T::zero(); self.dim()];
        for (u, bu) in rhs.kernel.iter().enumerate() {
            if bu.is_zero() {
                continue;
            }
            let row = space.product_row(space.inverse(u));
            for (cw, &idx) in c.iter_mut().zip(row) {
                let a = &self.kernel[idx as usize];
                if !a.is_zero() {
                    *cw = cw.clone() + bu.clone() * a.clone();
                }
            }
        }
        CommutantOperator {
            space: Arc::clone(space),
            kernel: c,
        }
    }

    /// Operator product `self · rhs`.
    pub fn compose(&self, rhs: &Self) -> Self {
        assert!(
            Arc::ptr_eq(&self.space, &rhs.space),
            "operators live on different spaces"
        );
        if self.support_len() < rhs.support_len() {
            // (AB)ᵀ = BᵀAᵀ gathers over the smaller support
            rhs.transpose().gather_product(&self.transpose()).transpose()
        } else {
            self.gather_product(rhs)
        }
    }

    /// Product of a sequence of operators.
    pub fn product<'a>(factors: impl IntoIterator<Item = &'a Self>) -> Option<Self>
    where
        T: 'a,
    {
        let mut it = factors.into_iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, f| acc.compose(f)))
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        // (Ax)(y') = Σ_v a(v⁻¹) x(y'∘v)
        let space = &self.space;
        let at: Vec<(usize, T)> = (0..self.dim())
            .filter_map(|v| {
                let a = &self.kernel[space.inverse(v)];
                (!a.is_zero()).then(|| (v, a.clone()))
            })
            .collect();
        (0..self.dim())
            .map(|y| {
                let row = space.product_row(y);
                at.iter()
                    .fold(T::zero(), |acc, (v, a)| acc + a.clone() * x[row[*v] as usize].clone())
            })
            .collect()
    }
}

impl<T: Real> CommutantOperator<T> {
    pub fn to_dense(&self) -> DMatrix<T> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.entry(i, j))
    }

    /// Reads a dense matrix; fails when it does not commute with the alphabet action.
    pub fn from_dense(space: &Arc<InputSpace>, m: &DMatrix<T>, tol: f64) -> Result<Self> {
        let d = space.order();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::SizeMismatch(format!(
                "{}x{} matrix for N!={d}",
                m.nrows(),
                m.ncols()
            )));
        }
        let kernel: Vec<T> = (0..d).map(|w| m[(w, 0)]).collect();
        let op = CommutantOperator {
            space: Arc::clone(space),
            kernel,
        };
        let dense = op.to_dense();
        let res = (m - &dense).norm().as_f64() / m.norm().as_f64().max(1e-12);
        if res > tol {
            return Err(Error::Symmetry(format!(
                "matrix does not commute with alphabet permutations (residual {res:e})"
            )));
        }
        Ok(op)
    }

    /// Spectral norm.
    pub fn spectral_norm(&self) -> Result<T> {
        let g = self.transpose().compose(self);
        Ok(g.psd_norm()?.max(T::zero()).sqrt())
    }

    /// Largest eigenvalue of a symmetric positive semidefinite operator.
    pub fn psd_norm(&self) -> Result<T> {
        let opts = LanczosOptions::for_scalar::<T>();
        linalg::largest_eigenvalue(self.dim(), |x| self.apply(x), &opts)
    }

    /// `max |λ|` for a symmetric operator.
    pub fn symmetric_norm(&self) -> Result<T> {
        let opts = LanczosOptions::for_scalar::<T>();
        linalg::largest_magnitude_eigenvalue(self.dim(), |x| self.apply(x), &opts)
    }
}

impl<T> fmt::Debug for CommutantOperator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CommutantOperator(N={})", self.space.n())
    }
}

impl<T: Coefficient> PartialEq for CommutantOperator<T> {
    fn eq(&self, other: &Self) -> bool {
        self.space.n() == other.space.n() && self.kernel == other.kernel
    }
}

impl<T: Coefficient> Add for &CommutantOperator<T> {
    type Output = CommutantOperator<T>;
    fn add(self, rhs: Self) -> CommutantOperator<T> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<T: Coefficient> Sub for &CommutantOperator<T> {
    type Output = CommutantOperator<T>;
    fn sub(self, rhs: Self) -> CommutantOperator<T> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<T: Coefficient> Mul for &CommutantOperator<T> {
    type Output = CommutantOperator<T>;
    fn mul(self, rhs: Self) -> CommutantOperator<T> {
        self.compose(rhs)
    }
}

impl<T: Coefficient> Neg for &CommutantOperator<T> {
    type Output = CommutantOperator<T>;
    fn neg(self) -> CommutantOperator<T> {
        self.map_kernel(|x| -x.clone())
    }
}

impl<T: Coefficient> AddAssign<&CommutantOperator<T>> for CommutantOperator<T> {
    fn add_assign(&mut self, rhs: &CommutantOperator<T>) {
        for (a, b) in self.kernel.iter_mut().zip(&rhs.kernel) {
            *a = a.clone() + b.clone();
        }
    }
}

impl<T: Coefficient> SubAssign<&CommutantOperator<T>> for CommutantOperator<T> {
    fn sub_assign(&mut self, rhs: &CommutantOperator<T>) {
        for (a, b) in self.kernel.iter_mut().zip(&rhs.kernel) {
            *a = a.clone() - b.clone();
        }
    }
}

impl<T: Coefficient> CommutantOperator<T> {
    /// `self += c · rhs`.
    pub fn add_scaled(&mut self, c: &T, rhs: &Self) {
        if c.is_zero() {
            return;
        }
        for (a, b) in self.kernel.iter_mut().zip(&rhs.kernel) {
            if !b.is_zero() {
                *a = a.clone() + c.clone() * b.clone();
            }
        }
    }
}
