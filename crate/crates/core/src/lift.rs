//! Full positive-input space for small N: `D1` as pairs with a doubled
//! string, the `U` action, and the lift of a `D_{0,1}` block to all of `Γ`.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::dense::act_string;
use crate::error::{Error, Result};
use crate::group_action::InputSpace;
use crate::perm::{rank, Permutation};
use crate::scalar::Real;

pub const MAX_LIFT_N: usize = 5;

pub struct FullSpace {
    space: Arc<InputSpace>,
    pairs: Vec<(usize, usize)>,
}

impl FullSpace {
    pub fn new(n: usize) -> Result<Self> {
        if !(3..=MAX_LIFT_N).contains(&n) {
            return Err(Error::Capacity {
                what: "full-space lift",
                min: 3,
                max: MAX_LIFT_N,
                n,
            });
        }
        let pairs = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Ok(FullSpace {
            space: InputSpace::get(n)?,
            pairs,
        })
    }

    pub fn space(&self) -> &Arc<InputSpace> {
        &self.space
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// `|D1| = C(N,2) · N!`.
    pub fn rows(&self) -> usize {
        self.pairs.len() * self.space.order()
    }

    /// Positive input at row `idx`: block `(i, j)`, base `y`, with `x_j = y_i`.
    pub fn string_of(&self, idx: usize) -> Vec<usize> {
        let (p, y) = (idx / self.space.order(), idx % self.space.order());
        let (i, j) = self.pairs[p];
        let mut x: Vec<usize> = self.space.element(y).iter().map(|&v| v as usize).collect();
        x[j] = x[i];
        x
    }

    pub fn index_of(&self, x: &[usize]) -> Result<usize> {
        let n = self.space.n();
        let bad = || Error::InvalidArgument(format!("{x:?} is not a positive input"));
        if x.len() != n {
            return Err(bad());
        }
        let mut count = vec![0usize; n];
        for &v in x {
            *count.get_mut(v).ok_or_else(bad)? += 1;
        }
        let missing = count.iter().position(|&c| c == 0).ok_or_else(bad)?;
        let (i, j) = self
            .pairs
            .iter()
            .copied()
            .find(|&(i, j)| x[i] == x[j])
            .ok_or_else(bad)?;
        let mut y = x.to_vec();
        y[j] = missing;
        let p = self.pairs.iter().position(|&q| q == (i, j)).expect("pair listed");
        Ok(p * self.space.order() + rank(&y)?)
    }

    /// Permutation matrix on `D1` sending `x` to `τ∘x∘π⁻¹`.
    pub fn action_u<T: Real>(&self, pi: &Permutation, tau: &Permutation) -> Result<DMatrix<T>> {
        let rows = self.rows();
        let mut m = DMatrix::zeros(rows, rows);
        for idx in 0..rows {
            let x = self.string_of(idx);
            m[(self.index_of(&act_string(&x, pi, tau))?, idx)] = T::one();
        }
        Ok(m)
    }

    /// `Γ = Σ_{π∈R} U_π G V_{π⁻¹}` with `G` placed on the `{0,1}` block.
    pub fn lift_gamma<T: Real>(&self, g12: &DMatrix<T>) -> Result<DMatrix<T>> {
        let d = self.space.order();
        if g12.nrows() != d || g12.ncols() != d {
            return Err(Error::SizeMismatch(format!("block of shape {:?}", g12.shape())));
        }
        let reps = self.space.transversals_or_small()?;
        let id = Permutation::identity(self.space.n());
        let mut gamma = DMatrix::zeros(self.rows(), d);
        for &pi in &reps {
            let p = self.space.permutation(pi);
            for r in 0..d {
                let x = act_string(&self.string_of(r), &p, &id);
                let xr = self.index_of(&x)?;
                for c in 0..d {
                    let v = g12[(r, c)];
                    if v != T::zero() {
                        let y: Vec<usize> = self.space.element(c).iter().map(|&s| s as usize).collect();
                        let yc = rank(&act_string(&y, &p, &id))?;
                        gamma[(xr, yc)] += v;
                    }
                }
            }
        }
        Ok(gamma)
    }

    /// 0/1 matrix with entry `(x, y)` equal to `[x_i ≠ y_i]`.
    pub fn delta_mask<T: Real>(&self, i: usize) -> DMatrix<T> {
        let d = self.space.order();
        DMatrix::from_fn(self.rows(), d, |r, c| {
            if self.string_of(r)[i] != self.space.element(c)[i] as usize {
                T::one()
            } else {
                T::zero()
            }
        })
    }

    /// Rows whose colliding pair contains index 0.
    pub fn prime_rows(&self) -> Vec<usize> {
        let d = self.space.order();
        (0..self.rows())
            .filter(|r| self.pairs[r / d].0 == 0)
            .collect()
    }

    /// Rows whose colliding pair avoids index 0.
    pub fn double_prime_rows(&self) -> Vec<usize> {
        let d = self.space.order();
        (0..self.rows())
            .filter(|r| self.pairs[r / d].0 != 0)
            .collect()
    }
}

impl InputSpace {
    /// The pair-coset transversal, available from N = 3.
    fn transversals_or_small(&self) -> Result<Vec<usize>> {
        if self.n() >= 4 {
            return Ok(self.transversals()?.r.clone());
        }
        let mut seen = std::collections::HashSet::new();
        Ok((0..self.order())
            .filter(|&r| {
                let e = self.element(r);
                seen.insert((e[0].min(e[1]), e[0].max(e[1])))
            })
            .collect())
    }
}

/// Rows of `m` selected by `rows`.
pub fn select_rows<T: Real>(m: &DMatrix<T>, rows: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(rows.len(), m.ncols(), |r, c| m[(rows[r], c)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::action_v;
    use crate::perm::factorial;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sizes_and_indexing() {
        assert_eq!(FullSpace::new(4).unwrap().rows(), 144);
        assert_eq!(FullSpace::new(3).unwrap().rows(), 18);
        assert!(FullSpace::new(6).is_err());
        let fs = FullSpace::new(4).unwrap();
        for idx in 0..fs.rows() {
            assert_eq!(fs.index_of(&fs.string_of(idx)).unwrap(), idx);
        }
        for y in 0..24 {
            assert_eq!(fs.string_of(y), fs.space().f_map(y));
        }
    }

    #[test]
    fn lift_block_and_automorphisms() {
        let fs = FullSpace::new(4).unwrap();
        let space = fs.space().clone();
        // a block that satisfies both symmetries: average of V_h over the pair stabilizer
        let id = Permutation::identity(4);
        let mut g = DMatrix::<f64>::zeros(24, 24);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let seed = DMatrix::<f64>::from_fn(24, 24, |_, _| rng.random::<f64>());
        for h in 0..24 {
            let p = space.permutation(h);
            if p.apply(0) > 1 || p.apply(1) > 1 {
                continue;
            }
            for t in 0..24 {
                let tau = space.permutation(t);
                let v = action_v::<f64>(&space, &p, &tau).unwrap();
                g += &v * &seed * v.transpose();
            }
        }
        let v12 = action_v::<f64>(&space, &Permutation::transposition(4, 0, 1), &id).unwrap();
        let g = &g + &g * &v12;
        let gamma = fs.lift_gamma(&g).unwrap();
        let top = select_rows(&gamma, &(0..24).collect::<Vec<_>>());
        assert!((top - &g).norm() < 1e-9 * g.norm());
        for _ in 0..5 {
            let pi = Permutation::unrank(4, rng.random_range(0..factorial(4))).unwrap();
            let tau = Permutation::unrank(4, rng.random_range(0..factorial(4))).unwrap();
            let lhs = fs.action_u::<f64>(&pi, &tau).unwrap() * &gamma;
            let rhs = &gamma * action_v::<f64>(&space, &pi, &tau).unwrap();
            assert!((lhs - rhs).norm() < 1e-9 * gamma.norm());
        }
        assert_eq!(fs.lift_gamma(&DMatrix::<f64>::zeros(24, 24)).unwrap().norm(), 0.0);
    }
}
