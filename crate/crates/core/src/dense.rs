//! Dense reference constructions built from explicit permutation matrices.
//!
//! These are independent of the kernel representation and serve as oracles
//! at small N; they also provide the operators that do not commute with the
//! alphabet action, such as single-symbol selectors.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::group_action::InputSpace;
use crate::operators::Side;
use crate::partitions::{dim_irrep, mn_character, Partition};
use crate::perm::{factorial, rank, Permutation};
use crate::scalar::Real;

/// `τ∘y∘π⁻¹` as a string.
pub fn act_string(y: &[usize], pi: &Permutation, tau: &Permutation) -> Vec<usize> {
    let pinv = pi.inverse();
    (0..y.len()).map(|i| tau.apply(y[pinv.apply(i)])).collect()
}

fn check_degree(space: &InputSpace, p: &Permutation) -> Result<()> {
    if p.degree() != space.n() {
        return Err(Error::SizeMismatch(format!(
            "permutation of degree {} for N={}",
            p.degree(),
            space.n()
        )));
    }
    Ok(())
}

/// Permutation matrix sending `y` to `τ∘y∘π⁻¹`.
pub fn action_v<T: Real>(space: &InputSpace, pi: &Permutation, tau: &Permutation) -> Result<DMatrix<T>> {
    check_degree(space, pi)?;
    check_degree(space, tau)?;
    let d = space.order();
    let mut m = DMatrix::zeros(d, d);
    for y in 0..d {
        let s: Vec<usize> = space.element(y).iter().map(|&v| v as usize).collect();
        let r = rank(&act_string(&s, pi, tau))?;
        m[(r, y)] = T::one();
    }
    Ok(m)
}

/// Diagonal selector of the strings with `y_i = s`.
pub fn hat_projector<T: Real>(space: &InputSpace, i: usize, s: usize) -> Result<DMatrix<T>> {
    let n = space.n();
    if i >= n || s >= n {
        return Err(Error::InvalidArgument(format!("index {i}, symbol {s} for N={n}")));
    }
    let d = space.order();
    Ok(DMatrix::from_fn(d, d, |r, c| {
        if r == c && space.element(r)[i] as usize == s {
            T::one()
        } else {
            T::zero()
        }
    }))
}

/// 0/1 matrix with entry (`y'`, `y`) equal to `[f(y')_i ≠ y_i]`.
pub fn delta_mask<T: Real>(space: &InputSpace, i: usize) -> Result<DMatrix<T>> {
    let n = space.n();
    if i >= n {
        return Err(Error::InvalidArgument(format!("mask index {i} for N={n}")));
    }
    let d = space.order();
    let rows: Vec<Vec<usize>> = (0..d).map(|y| space.f_map(y)).collect();
    Ok(DMatrix::from_fn(d, d, |r, c| {
        if rows[r][i] != space.element(c)[i] as usize {
            T::one()
        } else {
            T::zero()
        }
    }))
}

/// Central idempotent of `diagram` for the permutations of `[N]` fixing
/// `fixed`, acting on indices or on the alphabet.
pub fn isotypic_projector<T: Real>(
    space: &InputSpace,
    side: Side,
    fixed: &[usize],
    diagram: &Partition,
) -> Result<DMatrix<T>> {
    let n = space.n();
    let free: Vec<usize> = (0..n).filter(|i| !fixed.contains(i)).collect();
    if diagram.size() != free.len() {
        return Err(Error::SizeMismatch(format!(
            "diagram {diagram} for a group of degree {}",
            free.len()
        )));
    }
    let order = factorial(free.len()) as i64;
    let dim = dim_irrep(diagram);
    let dim: i64 = dim.try_into().map_err(|_| Error::InvalidArgument("dimension overflow".into()))?;
    let d = space.order();
    let mut m = DMatrix::zeros(d, d);
    let id = Permutation::identity(n);
    for h in 0..d {
        if !space.fixes_all(h, fixed) {
            continue;
        }
        let p = space.permutation(h);
        let ct = restricted_cycle_type(&p, &free);
        let coeff = T::from_ratio(dim * mn_character(diagram, &ct)?, order);
        if coeff == T::zero() {
            continue;
        }
        let (pi, tau) = match side {
            Side::Index => (&p, &id),
            Side::Alphabet => (&id, &p),
        };
        for y in 0..d {
            let s: Vec<usize> = space.element(y).iter().map(|&v| v as usize).collect();
            let r = rank(&act_string(&s, pi, tau))?;
            m[(r, y)] += coeff;
        }
    }
    Ok(m)
}

/// Cycle type of `p` on the set `free`, which `p` must preserve.
pub fn restricted_cycle_type(p: &Permutation, free: &[usize]) -> Partition {
    let mut lens: Vec<usize> = p
        .cycles()
        .into_iter()
        .filter(|c| free.contains(&c[0]))
        .map(|c| c.len())
        .collect();
    lens.sort_unstable_by(|a, b| b.cmp(a));
    Partition::new(lens).expect("positive cycle lengths")
}

/// Relative Frobenius residual `‖a − b‖ / ‖a‖`, absolute when `a` vanishes.
pub fn residual<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    let diff = (a - b).norm().as_f64();
    let base = a.norm().as_f64();
    if base < 1e-12 {
        diff
    } else {
        diff / base
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Permutation {
        Permutation::unrank(n, rng.random_range(0..factorial(n))).unwrap()
    }

    #[test]
    fn v_is_a_homomorphism_and_actions_commute() {
        let space = InputSpace::get(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let id = Permutation::identity(4);
        assert_eq!(action_v::<f64>(&space, &id, &id).unwrap(), DMatrix::identity(24, 24));
        for _ in 0..10 {
            let (p1, t1, p2, t2) = (
                random_perm(4, &mut rng),
                random_perm(4, &mut rng),
                random_perm(4, &mut rng),
                random_perm(4, &mut rng),
            );
            let lhs = action_v::<f64>(&space, &p1, &t1).unwrap() * action_v::<f64>(&space, &p2, &t2).unwrap();
            let rhs = action_v::<f64>(&space, &p1.compose(&p2), &t1.compose(&t2)).unwrap();
            assert_eq!(lhs, rhs);
            let a = action_v::<f64>(&space, &p1, &id).unwrap();
            let b = action_v::<f64>(&space, &id, &t1).unwrap();
            assert_eq!(&a * &b, &b * &a);
        }
    }

    #[test]
    fn regular_representation_uniqueness() {
        let space = InputSpace::get(4).unwrap();
        let id = Permutation::identity(4);
        for y in 0..24 {
            let s: Vec<usize> = space.element(y).iter().map(|&v| v as usize).collect();
            for pi in 0..24 {
                let p = space.permutation(pi);
                let target = act_string(&s, &p, &id);
                let count = (0..24)
                    .filter(|&t| act_string(&s, &id, &space.permutation(t)) == target)
                    .count();
                assert_eq!(count, 1);
            }
        }
    }

    #[test]
    fn hat_projectors() {
        let s3 = InputSpace::get(3).unwrap();
        assert_eq!(hat_projector::<f64>(&s3, 0, 0).unwrap().trace(), 2.0);
        let space = InputSpace::get(4).unwrap();
        let sum = (0..4).fold(DMatrix::<f64>::zeros(24, 24), |acc, s| {
            acc + hat_projector::<f64>(&space, 0, s).unwrap()
        });
        assert_eq!(sum, DMatrix::identity(24, 24));
        // commutes with projectors of groups fixing the selected index
        let hat = hat_projector::<f64>(&space, 0, 2).unwrap();
        let p = isotypic_projector::<f64>(&space, Side::Index, &[0], &Partition::new(vec![2, 1]).unwrap()).unwrap();
        assert!((&hat * &p - &p * &hat).norm() < 1e-12);
    }

    #[test]
    fn mask_facts() {
        let space = InputSpace::get(4).unwrap();
        for i in [0, 2, 3] {
            let m = delta_mask::<f64>(&space, i).unwrap();
            assert!((0..24).all(|y| m[(y, y)] == 0.0));
        }
        let s3 = InputSpace::get(3).unwrap();
        let m = delta_mask::<f64>(&s3, 2).unwrap();
        assert!((0..6).all(|y| m[(y, y)] == 0.0));
        // the complement of the mask is Σ_s selectors on both sides
        let m0 = delta_mask::<f64>(&space, 0).unwrap();
        let ones = DMatrix::<f64>::from_element(24, 24, 1.0);
        let mut agree = DMatrix::<f64>::zeros(24, 24);
        for s in 0..4 {
            let h = hat_projector::<f64>(&space, 0, s).unwrap();
            agree += &h * &ones * &h;
        }
        assert_eq!(m0, &ones - &agree);
        let m1 = delta_mask::<f64>(&space, 1).unwrap();
        let mut agree = DMatrix::<f64>::zeros(24, 24);
        for s in 0..4 {
            agree += hat_projector::<f64>(&space, 0, s).unwrap() * &ones * hat_projector::<f64>(&space, 1, s).unwrap();
        }
        assert_eq!(m1, &ones - &agree);
    }

    #[test]
    fn trivial_isotypic_projector_is_uniform() {
        let space = InputSpace::get(4).unwrap();
        let p = isotypic_projector::<f64>(&space, Side::Index, &[], &Partition::single_row(4)).unwrap();
        assert!((p - DMatrix::from_element(24, 24, 1.0 / 24.0)).norm() < 1e-12);
        assert!(isotypic_projector::<f64>(&space, Side::Index, &[0], &Partition::single_row(4)).is_err());
    }
}
