//! Young diagrams: enumeration, hooks, dimensions, removal relations and
//! Murnaghan–Nakayama characters.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Young diagram stored as weakly decreasing positive row lengths.
///
/// The derived order is ascending lexicographic on rows; canonical listings
/// use the reverse of it.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    rows: Vec<usize>,
}

impl Partition {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        if rows.contains(&0) || rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidDiagram(format!("{rows:?}")));
        }
        Ok(Partition { rows })
    }

    /// Builds from rows that may contain trailing zeros.
    pub fn from_rows_trimmed(mut rows: Vec<usize>) -> Result<Self> {
        while rows.last() == Some(&0) {
            rows.pop();
        }
        Self::new(rows)
    }

    pub fn empty() -> Self {
        Partition { rows: Vec::new() }
    }

    pub fn single_row(m: usize) -> Self {
        if m == 0 {
            Self::empty()
        } else {
            Partition { rows: vec![m] }
        }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn size(&self) -> usize {
        self.rows.iter().sum()
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Length of the first row, 0 for the empty diagram.
    pub fn first_row(&self) -> usize {
        self.rows.first().copied().unwrap_or(0)
    }

    /// Row `i` (0-based), 0 past the last row.
    pub fn row(&self, i: usize) -> usize {
        self.rows.get(i).copied().unwrap_or(0)
    }

    /// The diagram below the first row.
    pub fn below_first_row(&self) -> Partition {
        Partition {
            rows: self.rows.iter().skip(1).copied().collect(),
        }
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.first_row();
        let rows = (0..cols)
            .map(|j| self.rows.iter().filter(|&&r| r > j).count())
            .collect();
        Partition { rows }
    }

    pub fn contains(&self, other: &Partition) -> bool {
        other.len() <= self.len() && other.rows.iter().zip(&self.rows).all(|(a, b)| a <= b)
    }

    /// Hook length of box `(i, j)`, 0-based.
    pub fn hook(&self, i: usize, j: usize) -> usize {
        let arm = self.rows[i] - j - 1;
        let leg = self.rows[i + 1..].iter().filter(|&&r| r > j).count();
        arm + leg + 1
    }

    pub fn hook_product(&self) -> BigUint {
        let mut h = BigUint::one();
        for (i, &r) in self.rows.iter().enumerate() {
            for j in 0..r {
                h *= self.hook(i, j);
            }
        }
        h
    }

    /// Irrep dimension as `u64`; fails only if it does not fit.
    pub fn dim(&self) -> u64 {
        dim_irrep(self)
            .to_u64()
            .expect("irrep dimension exceeds u64")
    }

    /// Diagrams reachable by adding one box, descending lexicographic order.
    pub fn add_one(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        for i in 0..=self.len() {
            if i == 0 || self.row(i) < self.row(i - 1) {
                let mut rows = self.rows.clone();
                if i == rows.len() {
                    rows.push(1);
                } else {
                    rows[i] += 1;
                }
                out.push(Partition { rows });
            }
        }
        out.sort_by(|a, b| b.cmp(a));
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return write!(f, "()");
        }
        write!(f, "(")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `(3,1)`, `3,1`, `3 1`, `()` or the empty string.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let rows = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::InvalidDiagram(s.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(rows)
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(rows: Vec<usize>) -> Result<Self> {
        Partition::new(rows)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.rows
    }
}

/// All partitions of `m` in descending lexicographic order.
pub fn partitions_of(m: usize) -> Vec<Partition> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition { rows: cur.clone() });
            return;
        }
        for r in (1..=rest.min(max)).rev() {
            cur.push(r);
            rec(rest - r, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m, &mut Vec::new(), &mut out);
    out
}

/// Irrep dimension by the hook-length formula.
pub fn dim_irrep(p: &Partition) -> BigUint {
    let mut fact = BigUint::one();
    for k in 2..=p.size() {
        fact *= k;
    }
    fact / p.hook_product()
}

/// Diagrams obtained by removing one corner box, descending lexicographic order.
pub fn remove_one(p: &Partition) -> Result<Vec<Partition>> {
    if p.is_empty() {
        return Err(Error::EmptyDiagram);
    }
    let mut out = Vec::new();
    for i in 0..p.len() {
        if p.row(i) > p.row(i + 1) {
            let mut rows = p.rows.clone();
            rows[i] -= 1;
            out.push(Partition::from_rows_trimmed(rows)?);
        }
    }
    out.sort_by(|a, b| b.cmp(a));
    Ok(out)
}

/// How a smaller diagram sits inside a larger one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RemovalKind {
    OneBox,
    /// Two boxes in one row: different columns only.
    TwoSameRow,
    /// Two boxes in one column: different rows only.
    TwoSameColumn,
    TwoDifferent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RemovalRelation {
    pub kind: RemovalKind,
    /// Box distance, present iff the boxes differ in both row and column.
    pub distance: Option<usize>,
}

impl RemovalRelation {
    /// Two boxes in different columns.
    pub fn is_c(&self) -> bool {
        matches!(self.kind, RemovalKind::TwoSameRow | RemovalKind::TwoDifferent)
    }

    /// Two boxes in different rows.
    pub fn is_r(&self) -> bool {
        matches!(
            self.kind,
            RemovalKind::TwoSameColumn | RemovalKind::TwoDifferent
        )
    }

    pub fn is_rc(&self) -> bool {
        self.kind == RemovalKind::TwoDifferent
    }
}

/// Classifies `s` inside `p` when one or two boxes separate them.
pub fn relation(p: &Partition, s: &Partition) -> Result<RemovalRelation> {
    let not_related = || Error::NotRelated {
        outer: p.to_string(),
        inner: s.to_string(),
    };
    let diff = p.size().checked_sub(s.size()).ok_or_else(not_related)?;
    if !(1..=2).contains(&diff) || !p.contains(s) {
        return Err(not_related());
    }
    let boxes: Vec<(usize, usize)> = (0..p.len())
        .flat_map(|i| (s.row(i)..p.row(i)).map(move |j| (i, j)))
        .collect();
    let rel = match boxes[..] {
        [_] => RemovalRelation {
            kind: RemovalKind::OneBox,
            distance: None,
        },
        [(i, _), (i2, _)] if i == i2 => RemovalRelation {
            kind: RemovalKind::TwoSameRow,
            distance: None,
        },
        [(_, j), (_, j2)] if j == j2 => RemovalRelation {
            kind: RemovalKind::TwoSameColumn,
            distance: None,
        },
        [(i, j), (i2, j2)] => RemovalRelation {
            kind: RemovalKind::TwoDifferent,
            distance: Some(i.abs_diff(i2) + j.abs_diff(j2)),
        },
        _ => return Err(not_related()),
    };
    Ok(rel)
}

/// Box distance `d` for a pair separated by two boxes in different rows and columns.
pub fn distance(p: &Partition, s: &Partition) -> Result<usize> {
    relation(p, s)?.distance.ok_or_else(|| Error::NotRelated {
        outer: p.to_string(),
        inner: s.to_string(),
    })
}

/// Diagrams `m` with `s < m < p`, descending lexicographic order.
pub fn intermediates(p: &Partition, s: &Partition) -> Result<Vec<Partition>> {
    if p.size() != s.size() + 2 {
        return Err(Error::SizeMismatch(format!("{p} and {s} differ by {} boxes", p.size() as isize - s.size() as isize)));
    }
    let mids = remove_one(p)?
        .into_iter()
        .filter(|m| m.contains(s))
        .collect::<Vec<_>>();
    if mids.is_empty() {
        return Err(Error::NotRelated {
            outer: p.to_string(),
            inner: s.to_string(),
        });
    }
    Ok(mids)
}

/// `(n - ell - k, eta)` with `k = |eta|`; the validity gate of padded families.
pub fn pad(eta: &Partition, n: usize, ell: usize) -> Result<Partition> {
    let head = n as isize - ell as isize - eta.size() as isize;
    if head < eta.first_row() as isize {
        return Err(Error::InvalidDiagram(format!(
            "({head},{}) from n={n}, ell={ell}",
            eta.rows.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::with_capacity(eta.len() + 1);
    if head > 0 {
        rows.push(head as usize);
    }
    rows.extend_from_slice(&eta.rows);
    Partition::new(rows)
}

type CharKey = (Vec<usize>, Vec<usize>);

fn char_cache() -> &'static Mutex<HashMap<CharKey, i64>> {
    static CACHE: OnceLock<Mutex<HashMap<CharKey, i64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Irreducible character of `p` on the class with the given cycle type.
pub fn mn_character(p: &Partition, cycle_type: &Partition) -> Result<i64> {
    if p.size() != cycle_type.size() {
        return Err(Error::SizeMismatch(format!(
            "character of {p} on class {cycle_type}"
        )));
    }
    Ok(mn_rec(&p.rows, &cycle_type.rows))
}

fn mn_rec(rows: &[usize], cycles: &[usize]) -> i64 {
    let Some((&r, rest)) = cycles.split_first() else {
        return if rows.is_empty() { 1 } else { 0 };
    };
    let key = (rows.to_vec(), cycles.to_vec());
    if let Some(&v) = char_cache().lock().unwrap().get(&key) {
        return v;
    }
    // beta-set: rows[i] + (len - 1 - i), strictly decreasing
    let len = rows.len();
    let beta: Vec<usize> = rows.iter().enumerate().map(|(i, &x)| x + len - 1 - i).collect();
    let mut total: i64 = 0;
    for (idx, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let nb = b - r;
        let crossed = beta.iter().filter(|&&c| c > nb && c < b).count();
        let mut next = beta.clone();
        next[idx] = nb;
        next.sort_unstable_by(|x, y| y.cmp(x));
        let new_rows: Vec<usize> = next
            .iter()
            .enumerate()
            .map(|(i, &c)| c - (len - 1 - i))
            .filter(|&x| x > 0)
            .collect();
        let sign = if crossed % 2 == 0 { 1 } else { -1 };
        total = total
            .checked_add(sign * mn_rec(&new_rows, rest))
            .expect("character overflow");
    }
    char_cache().lock().unwrap().insert(key, total);
    total
}

/// `1 - dim(pad(delta, n, 1)) / dim(pad(delta, n, 0))`, exactly.
pub fn dim_fraction_gap_exact(delta: &Partition, n: usize) -> Result<BigRational> {
    let full = pad(delta, n, 0)?;
    let one = pad(delta, n, 1)?;
    let ratio = BigRational::new(
        BigInt::from(dim_irrep(&one)),
        BigInt::from(dim_irrep(&full)),
    );
    Ok(BigRational::one() - ratio)
}

pub fn dim_fraction_gap(delta: &Partition, n: usize) -> Result<f64> {
    Ok(dim_fraction_gap_exact(delta, n)?
        .to_f64()
        .unwrap_or(f64::NAN))
}

/// Order of the centralizer of a permutation with the given cycle type.
pub fn centralizer_order(cycle_type: &Partition) -> BigUint {
    let mut z = BigUint::one();
    let rows = cycle_type.rows();
    let mut i = 0;
    while i < rows.len() {
        let r = rows[i];
        let m = rows[i..].iter().take_while(|&&x| x == r).count();
        for k in 1..=m {
            z *= r * k;
        }
        i += m;
    }
    z
}
