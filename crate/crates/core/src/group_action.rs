//! The negative-input space `D0 ≅ S_N` with cached group tables, coset
//! transversals, the doubling map and difference masks.
//!
//! A string `y` is identified with the permutation `i ↦ y_i`; its row/column
//! index is the lexicographic rank. The index action is `y ↦ y∘π⁻¹` and the
//! alphabet action is `y ↦ τ∘y`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::perm::{factorial, Permutation};

/// Largest degree for which multiplication tables are built.
pub const MAX_TABLE_N: usize = 7;

pub struct InputSpace {
    n: usize,
    order: usize,
    images: Vec<u8>,
    inverse: Vec<u32>,
    // product[a * order + b] = rank(a ∘ b)
    product: Vec<u16>,
    transversals: OnceLock<Transversals>,
}

#[derive(Clone, Debug)]
pub struct Transversals {
    /// Left cosets of `S_{0,1} × S_{[2,N)}` in `S_N`.
    pub r: Vec<usize>,
    /// Left cosets of `S_{[2,N)}` in the stabilizer of index 0.
    pub r_prime: Vec<usize>,
    /// Left cosets of `S_{0,1} × S_{[3,N)}` in the stabilizer of index 2.
    pub r_double_prime: Vec<usize>,
}

fn rank_u8(s: &[u8]) -> usize {
    let n = s.len();
    let mut seen = 0u32;
    let mut r = 0usize;
    for (i, &v) in s.iter().enumerate() {
        let smaller = v as u32 - (seen & ((1u32 << v) - 1)).count_ones();
        r = r * (n - i) + smaller as usize;
        seen |= 1 << v;
    }
    r
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<InputSpace>>> {
    static SPACES: OnceLock<Mutex<HashMap<usize, Arc<InputSpace>>>> = OnceLock::new();
    SPACES.get_or_init(|| Mutex::new(HashMap::new()))
}

impl InputSpace {
    /// Shared space for degree `n`, built once per process.
    pub fn get(n: usize) -> Result<Arc<InputSpace>> {
        if !(1..=MAX_TABLE_N).contains(&n) {
            return Err(Error::Capacity {
                what: "input space",
                min: 1,
                max: MAX_TABLE_N,
                n,
            });
        }
        let mut guard = cache().lock().unwrap();
        if let Some(s) = guard.get(&n) {
            return Ok(Arc::clone(s));
        }
        let space = Arc::new(Self::build(n));
        guard.insert(n, Arc::clone(&space));
        Ok(space)
    }

    fn build(n: usize) -> InputSpace {
        let order = factorial(n);
        let mut images = Vec::with_capacity(order * n);
        for r in 0..order {
            let p = crate::perm::unrank(n, r).expect("rank in range");
            images.extend(p.iter().map(|&v| v as u8));
        }
        let mut inverse = vec![0u32; order];
        let mut product = vec![0u16; order * order];
        let mut buf = vec![0u8; n];
        for a in 0..order {
            let pa = &images[a * n..(a + 1) * n];
            for (i, &v) in pa.iter().enumerate() {
                buf[v as usize] = i as u8;
            }
            inverse[a] = rank_u8(&buf) as u32;
            let row = &mut product[a * order..(a + 1) * order];
            for (b, slot) in row.iter_mut().enumerate() {
                let pb = &images[b * n..(b + 1) * n];
                for i in 0..n {
                    buf[i] = pa[pb[i] as usize];
                }
                *slot = rank_u8(&buf) as u16;
            }
        }
        InputSpace {
            n,
            order,
            images,
            inverse,
            product,
            transversals: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `N!`, the dimension of the space.
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn element(&self, r: usize) -> &[u8] {
        &self.images[r * self.n..(r + 1) * self.n]
    }

    pub fn permutation(&self, r: usize) -> Permutation {
        Permutation::new(self.element(r).iter().map(|&v| v as usize).collect())
            .expect("table entry is a bijection")
    }

    pub fn rank_of(&self, p: &Permutation) -> Result<usize> {
        if p.degree() != self.n {
            return Err(Error::SizeMismatch(format!(
                "permutation of degree {} in space of degree {}",
                p.degree(),
                self.n
            )));
        }
        Ok(p.rank())
    }

    /// Rank of `a ∘ b`.
    #[inline]
    pub fn compose(&self, a: usize, b: usize) -> usize {
        self.product[a * self.order + b] as usize
    }

    /// Ranks of `a ∘ b` for every `b`.
    #[inline]
    pub fn product_row(&self, a: usize) -> &[u16] {
        &self.product[a * self.order..(a + 1) * self.order]
    }

    #[inline]
    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    /// Rank of `p⁻¹ w p`.
    #[inline]
    pub fn conjugate(&self, w: usize, p: usize) -> usize {
        self.compose(self.compose(self.inverse(p), w), p)
    }

    /// Whether element `r` fixes every index in `set`.
    pub fn fixes_all(&self, r: usize, set: &[usize]) -> bool {
        let e = self.element(r);
        set.iter().all(|&i| e[i] as usize == i)
    }

    /// Ranks of the elements fixing every index of `fixed`, ascending.
    pub fn stabilizer(&self, fixed: &[usize]) -> Vec<usize> {
        (0..self.order).filter(|&r| self.fixes_all(r, fixed)).collect()
    }

    /// The doubled string `(y0, y0, y2, …)`.
    pub fn f_map(&self, y: usize) -> Vec<usize> {
        let mut s: Vec<usize> = self.element(y).iter().map(|&v| v as usize).collect();
        if self.n >= 2 {
            s[1] = s[0];
        }
        s
    }

    pub fn transversals(&self) -> Result<&Transversals> {
        if self.n < 4 {
            return Err(Error::Capacity {
                what: "coset transversals",
                min: 4,
                max: MAX_TABLE_N,
                n: self.n,
            });
        }
        Ok(self.transversals.get_or_init(|| self.build_transversals()))
    }

    fn build_transversals(&self) -> Transversals {
        let pair_key = |e: &[u8]| {
            let (a, b) = (e[0].min(e[1]), e[0].max(e[1]));
            (a as usize, b as usize)
        };
        let mut seen = std::collections::HashSet::new();
        let mut r = Vec::new();
        let mut seen1 = std::collections::HashSet::new();
        let mut r_prime = Vec::new();
        let mut seen2 = std::collections::HashSet::new();
        let mut r_double_prime = Vec::new();
        for rank in 0..self.order {
            let e = self.element(rank);
            if seen.insert(pair_key(e)) {
                r.push(rank);
            }
            if e[0] == 0 && seen1.insert(e[1]) {
                r_prime.push(rank);
            }
            if e[2] == 2 && seen2.insert(pair_key(e)) {
                r_double_prime.push(rank);
            }
        }
        Transversals {
            r,
            r_prime,
            r_double_prime,
        }
    }

    /// Mask kernel of `Δ_i∘` on operators of the `D_{0,1}` block: entry
    /// `w` is 1 iff `f(y')_i ≠ y_i` whenever `y⁻¹∘y' = w`.
    pub fn delta_mask(&self, i: usize) -> Result<Vec<bool>> {
        if i >= self.n {
            return Err(Error::InvalidArgument(format!("mask index {i} for N={}", self.n)));
        }
        Ok((0..self.order)
            .map(|w| {
                let e = self.element(w);
                if i == 1 {
                    e[0] != 1
                } else {
                    e[i] as usize != i
                }
            })
            .collect())
    }
}

impl std::fmt::Debug for InputSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "InputSpace(N={})", self.n)
    }
}
