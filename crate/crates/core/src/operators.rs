//! Isotypic projectors, projector chains and transporters.
//!
//! Index sets are 0-based; labels print them 1-based, so the projector on
//! `ν` for the permutations fixing indices `{0, 1}` prints as `(ν)_12`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::commutant::CommutantOperator;
use crate::error::{Error, Result};
use crate::group_action::InputSpace;
use crate::partitions::{dim_irrep, distance, intermediates, mn_character, pad, Partition};
use crate::perm::{factorial, Permutation};
use crate::scalar::{Coefficient, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Index,
    Alphabet,
}

/// Isotypic projector of `diagram` for the permutations fixing `removed`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjectorSpec {
    pub side: Side,
    pub removed: Vec<usize>,
    pub diagram: Partition,
}

impl ProjectorSpec {
    pub fn index(diagram: Partition, removed: &[usize]) -> Self {
        let mut removed = removed.to_vec();
        removed.sort_unstable();
        removed.dedup();
        ProjectorSpec {
            side: Side::Index,
            removed,
            diagram,
        }
    }

    /// Projector of the full alphabet group.
    pub fn alphabet(diagram: Partition) -> Self {
        ProjectorSpec {
            side: Side::Alphabet,
            removed: Vec::new(),
            diagram,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.removed.iter().any(|&i| i >= n) {
            return Err(Error::InvalidArgument(format!("{self} for N={n}")));
        }
        let degree = n - self.removed.len();
        if self.diagram.size() != degree {
            return Err(Error::SizeMismatch(format!(
                "diagram {} for a group of degree {degree}",
                self.diagram
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ProjectorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::Alphabet => write!(f, "^{}", self.diagram),
            Side::Index => {
                write!(f, "{}", self.diagram)?;
                if !self.removed.is_empty() {
                    write!(f, "_")?;
                    for i in &self.removed {
                        write!(f, "{}", i + 1)?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// One factor of a projector chain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Factor {
    /// `(I + V_(12)) / 2`.
    Id,
    /// `(I − V_(12)) / 2`.
    Sgn,
    Iso(ProjectorSpec),
}

impl Factor {
    pub fn index(diagram: Partition, removed: &[usize]) -> Self {
        Factor::Iso(ProjectorSpec::index(diagram, removed))
    }

    pub fn alphabet(diagram: Partition) -> Self {
        Factor::Iso(ProjectorSpec::alphabet(diagram))
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Id => write!(f, "id"),
            Factor::Sgn => write!(f, "sgn"),
            Factor::Iso(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for ProjectorSpec {
    type Err = Error;

    /// Accepts the display form: `^(4)`, `(3,1)` or `(2,1)_12`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(d) = s.strip_prefix('^') {
            return Ok(ProjectorSpec::alphabet(d.parse()?));
        }
        let (d, removed) = match s.rsplit_once('_') {
            Some((d, r)) => {
                let removed = r
                    .chars()
                    .map(|c| match c.to_digit(10) {
                        Some(k) if k >= 1 => Ok(k as usize - 1),
                        _ => Err(Error::InvalidArgument(format!("removed positions in {s:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                (d, removed)
            }
            None => (s, Vec::new()),
        };
        Ok(ProjectorSpec::index(d.parse()?, &removed))
    }
}

impl FromStr for Factor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "id" => Ok(Factor::Id),
            "sgn" => Ok(Factor::Sgn),
            t => Ok(Factor::Iso(t.parse()?)),
        }
    }
}

/// Parses a chain of factors joined by `*`, e.g. `(2,1)_12*(3)_1*^(3,1)`.
pub fn parse_chain(s: &str) -> Result<Vec<Factor>> {
    s.split('*').map(str::parse).collect()
}

fn chain_string(factors: &[Factor]) -> String {
    let parts: Vec<String> = factors.iter().map(ToString::to_string).collect();
    format!("Pi[{}]", parts.join(","))
}

/// Provenance of an operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum OperatorLabel {
    Projector(Vec<Factor>),
    Transporter {
        target: Vec<Factor>,
        source: Vec<Factor>,
    },
    Permutation(String),
    Mask {
        index: usize,
        inner: Box<OperatorLabel>,
    },
    Composite(String),
}

impl fmt::Display for OperatorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorLabel::Projector(c) => write!(f, "{}", chain_string(c)),
            OperatorLabel::Transporter { target, source } => {
                write!(f, "{}<-{}", chain_string(target), chain_string(source))
            }
            OperatorLabel::Permutation(p) => write!(f, "V{p}"),
            OperatorLabel::Mask { index, inner } => write!(f, "Delta{}o{}", index + 1, inner),
            OperatorLabel::Composite(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LabeledOperator<T> {
    pub label: OperatorLabel,
    pub op: CommutantOperator<T>,
}

impl<T: Coefficient> LabeledOperator<T> {
    /// `max(‖P² − P‖, ‖Pᵀ − P‖)` relative to `‖P‖`.
    pub fn projector_residual(&self) -> f64 {
        let sq = &self.op * &self.op;
        self.op.residual(&sq).max(self.op.residual(&self.op.transpose()))
    }

    /// `max(‖TᵀT − src‖, ‖TTᵀ − tgt‖)`, relative.
    pub fn transporter_residual(
        &self,
        source: &CommutantOperator<T>,
        target: &CommutantOperator<T>,
    ) -> f64 {
        let t = &self.op;
        let tt = t.transpose();
        source.residual(&(&tt * t)).max(target.residual(&(t * &tt)))
    }
}

/// Deliberate faults for negative-control runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Faults {
    /// Negate the sign transporter.
    pub transporter_phase: bool,
    /// Realize `Δ_i∘` with the mask of index `i + 1`.
    pub mask_index: bool,
    /// Use `dim λ / dim ν` instead of `dim ν / dim λ` in the normalization factor.
    pub gamma_factor: bool,
}

impl Faults {
    pub fn any(&self) -> bool {
        self.transporter_phase || self.mask_index || self.gamma_factor
    }
}

/// The two intermediates of a pair `ν ≪_rc λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RcPair {
    pub lambda: Partition,
    pub nu: Partition,
    /// Lexicographically larger intermediate.
    pub mu: Partition,
    pub mu_prime: Partition,
    pub d: usize,
}

impl RcPair {
    pub fn new(lambda: &Partition, nu: &Partition) -> Result<Self> {
        let d = distance(lambda, nu)?;
        let mids = intermediates(lambda, nu)?;
        if mids.len() != 2 {
            return Err(Error::NotRelated {
                outer: lambda.to_string(),
                inner: nu.to_string(),
            });
        }
        Ok(RcPair {
            lambda: lambda.clone(),
            nu: nu.clone(),
            mu: mids[0].clone(),
            mu_prime: mids[1].clone(),
            d,
        })
    }
}

/// Builds and caches projectors on `R^{D0}` for a fixed N.
pub struct OperatorFactory<T> {
    space: Arc<InputSpace>,
    faults: Faults,
    cache: Mutex<HashMap<Vec<Factor>, CommutantOperator<T>>>,
}

fn pair_commutes(a: &Factor, b: &Factor) -> bool {
    use Factor::*;
    match (a, b) {
        (Id | Sgn, Id | Sgn) => true,
        (Id | Sgn, Iso(s)) | (Iso(s), Id | Sgn) => {
            s.side == Side::Alphabet || {
                let hits = s.removed.iter().filter(|&&i| i < 2).count();
                hits != 1
            }
        }
        (Iso(s), Iso(t)) => {
            s.side == Side::Alphabet
                || t.side == Side::Alphabet
                || s.removed.iter().all(|i| t.removed.contains(i))
                || t.removed.iter().all(|i| s.removed.contains(i))
        }
    }
}

impl<T: Coefficient> OperatorFactory<T> {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_faults(n, Faults::default())
    }

    pub fn with_faults(n: usize, faults: Faults) -> Result<Self> {
        Ok(OperatorFactory {
            space: InputSpace::get(n)?,
            faults,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn space(&self) -> &Arc<InputSpace> {
        &self.space
    }

    pub fn faults(&self) -> Faults {
        self.faults
    }

    pub fn identity(&self) -> CommutantOperator<T> {
        CommutantOperator::identity(&self.space)
    }

    pub fn zero(&self) -> CommutantOperator<T> {
        CommutantOperator::zero(&self.space)
    }

    /// `V_π`.
    pub fn v(&self, pi: &Permutation) -> Result<CommutantOperator<T>> {
        let r = self.space.rank_of(pi)?;
        Ok(CommutantOperator::index_permutation(&self.space, r))
    }

    /// `V` of the transposition of indices `a` and `b`.
    pub fn v_swap(&self, a: usize, b: usize) -> CommutantOperator<T> {
        self.v(&Permutation::transposition(self.n(), a, b))
            .expect("transposition of matching degree")
    }

    pub fn pi_id_sgn(&self) -> (LabeledOperator<T>, LabeledOperator<T>) {
        let id = self.projector(&[Factor::Id]).expect("swap projector");
        let sgn = self.projector(&[Factor::Sgn]).expect("swap projector");
        (
            LabeledOperator {
                label: OperatorLabel::Projector(vec![Factor::Id]),
                op: id,
            },
            LabeledOperator {
                label: OperatorLabel::Projector(vec![Factor::Sgn]),
                op: sgn,
            },
        )
    }

    /// 0/1 kernel realizing `Δ_i∘`.
    pub fn delta_mask(&self, i: usize) -> Result<Vec<bool>> {
        let i = if self.faults.mask_index {
            (i + 1) % self.n()
        } else {
            i
        };
        self.space.delta_mask(i)
    }

    fn build_factor(&self, f: &Factor) -> Result<CommutantOperator<T>> {
        let space = &self.space;
        match f {
            Factor::Id | Factor::Sgn => {
                let half = T::from_ratio(1, 2);
                let sign = if *f == Factor::Id { half.clone() } else { -half.clone() };
                let mut op = CommutantOperator::zero(space);
                let swap = CommutantOperator::index_permutation(
                    space,
                    Permutation::transposition(self.n(), 0, 1).rank(),
                );
                op.add_scaled(&half, &CommutantOperator::identity(space));
                op.add_scaled(&sign, &swap);
                Ok(op)
            }
            Factor::Iso(spec) => {
                spec.validate(self.n())?;
                if spec.side == Side::Alphabet && !spec.removed.is_empty() {
                    return Err(Error::InvalidArgument(format!(
                        "alphabet projector {spec} on a proper subgroup does not commute with the alphabet action"
                    )));
                }
                // both sides share the kernel (dim/|H|)·χ(w) on the subgroup
                let free: Vec<usize> = (0..self.n()).filter(|i| !spec.removed.contains(i)).collect();
                let order = factorial(free.len()) as i64;
                let dim: i64 = dim_irrep(&spec.diagram)
                    .try_into()
                    .map_err(|_| Error::InvalidArgument("dimension overflow".into()))?;
                let mut kernel = vec![T::zero(); space.order()];
                let mut memo: HashMap<Partition, T> = HashMap::new();
                for w in 0..space.order() {
                    if !space.fixes_all(w, &spec.removed) {
                        continue;
                    }
                    let ct = crate::dense::restricted_cycle_type(&space.permutation(w), &free);
                    let v = match memo.get(&ct) {
                        Some(v) => v.clone(),
                        None => {
                            let v = T::from_ratio(dim * mn_character(&spec.diagram, &ct)?, order);
                            memo.insert(ct, v.clone());
                            v
                        }
                    };
                    kernel[w] = v;
                }
                CommutantOperator::from_kernel(space, kernel)
            }
        }
    }

    pub fn isotypic_projector(&self, spec: &ProjectorSpec) -> Result<LabeledOperator<T>> {
        let factors = vec![Factor::Iso(spec.clone())];
        Ok(LabeledOperator {
            op: self.projector(&factors)?,
            label: OperatorLabel::Projector(factors),
        })
    }

    pub fn chained_projector(&self, factors: &[Factor]) -> Result<LabeledOperator<T>> {
        Ok(LabeledOperator {
            op: self.projector(factors)?,
            label: OperatorLabel::Projector(factors.to_vec()),
        })
    }

    /// Product of pairwise commuting projector factors, cached by the sorted chain.
    pub fn projector(&self, factors: &[Factor]) -> Result<CommutantOperator<T>> {
        let mut key = factors.to_vec();
        key.sort();
        key.dedup();
        if key.contains(&Factor::Id) && key.contains(&Factor::Sgn) {
            return Ok(self.zero());
        }
        if let Some(op) = self.cache.lock().unwrap().get(&key) {
            return Ok(op.clone());
        }
        let built: Vec<CommutantOperator<T>> = key
            .iter()
            .map(|f| match f {
                Factor::Iso(_) if key.len() > 1 => self.projector(std::slice::from_ref(f)),
                _ => self.build_factor(f),
            })
            .collect::<Result<_>>()?;
        for a in 0..key.len() {
            for b in a + 1..key.len() {
                if !pair_commutes(&key[a], &key[b]) {
                    let res = built[a].commutator_residual(&built[b]);
                    if res > 1e-10 {
                        return Err(Error::NonCommuting(res));
                    }
                }
            }
        }
        let op = CommutantOperator::product(&built).expect("nonempty chain");
        self.cache.lock().unwrap().insert(key, op.clone());
        Ok(op)
    }

    /// Like [`projector`](Self::projector), with index factors given as
    /// optional diagrams; an absent diagram makes the product zero.
    pub fn projector_or_zero(&self, factors: &[Option<Factor>]) -> Result<CommutantOperator<T>> {
        match factors.iter().cloned().collect::<Option<Vec<_>>>() {
            Some(f) => self.projector(&f),
            None => Ok(self.zero()),
        }
    }

    /// `Π^λ_{ν12, μ1}`.
    pub fn p_nu_mu(&self, lambda: &Partition, nu: &Partition, mu: &Partition) -> Result<CommutantOperator<T>> {
        self.projector(&[
            Factor::index(nu.clone(), &[0, 1]),
            Factor::index(mu.clone(), &[0]),
            Factor::alphabet(lambda.clone()),
        ])
    }

    /// `Π^λ_{id, ν12}` or `Π^λ_{sgn, ν12}`.
    pub fn p_swap_nu(&self, swap: Factor, lambda: &Partition, nu: &Partition) -> Result<CommutantOperator<T>> {
        self.projector(&[
            swap,
            Factor::index(nu.clone(), &[0, 1]),
            Factor::alphabet(lambda.clone()),
        ])
    }

    pub fn cache_len(&self) -> usize {
        self.cache.lock().unwrap().len()
    }
}

impl<T: Real> OperatorFactory<T> {
    /// `T_{μ'←μ}` and `T_{μ←μ'}` extracted from `V_(12)` on the `ν12 × λ` block.
    pub fn transporter_from_v12(
        &self,
        lambda: &Partition,
        nu: &Partition,
    ) -> Result<(LabeledOperator<T>, LabeledOperator<T>)> {
        let pair = RcPair::new(lambda, nu)?;
        let p = self.p_nu_mu(lambda, nu, &pair.mu)?;
        let pp = self.p_nu_mu(lambda, nu, &pair.mu_prime)?;
        let d = T::from_usize(pair.d).expect("small integer");
        let c = d / (d * d - T::one()).sqrt();
        let t = (&(&pp * &self.v_swap(0, 1)) * &p).scale(&c);
        let chain = |m: &Partition| {
            vec![
                Factor::index(nu.clone(), &[0, 1]),
                Factor::index(m.clone(), &[0]),
                Factor::alphabet(lambda.clone()),
            ]
        };
        let fwd = LabeledOperator {
            label: OperatorLabel::Transporter {
                target: chain(&pair.mu_prime),
                source: chain(&pair.mu),
            },
            op: t.clone(),
        };
        let back = LabeledOperator {
            label: OperatorLabel::Transporter {
                target: chain(&pair.mu),
                source: chain(&pair.mu_prime),
            },
            op: t.transpose(),
        };
        Ok((fwd, back))
    }

    /// `T_{sgn,ν12 ← id,ν12}` with positive overlap through `Π^λ_{ν12,μ1}`.
    pub fn transporter_sgn_from_id(&self, lambda: &Partition, nu: &Partition) -> Result<LabeledOperator<T>> {
        let pair = RcPair::new(lambda, nu)?;
        let id = self.p_swap_nu(Factor::Id, lambda, nu)?;
        let sgn = self.p_swap_nu(Factor::Sgn, lambda, nu)?;
        let p = self.p_nu_mu(lambda, nu, &pair.mu)?;
        let d = T::from_usize(pair.d).expect("small integer");
        let mut c = T::lit(2.0) * d / (d * d - T::one()).sqrt();
        if self.faults.transporter_phase {
            c = -c;
        }
        let t = (&(&sgn * &p) * &id).scale(&c);
        let chain = |s: Factor| {
            vec![
                s,
                Factor::index(nu.clone(), &[0, 1]),
                Factor::alphabet(lambda.clone()),
            ]
        };
        Ok(LabeledOperator {
            label: OperatorLabel::Transporter {
                target: chain(Factor::Sgn),
                source: chain(Factor::Id),
            },
            op: t,
        })
    }

    /// Rescales `target · x · source` to a transporter with positive phase.
    pub fn normalize_intertwiner(
        &self,
        target: &CommutantOperator<T>,
        x: &CommutantOperator<T>,
        source: &CommutantOperator<T>,
    ) -> Result<CommutantOperator<T>> {
        let m = &(target * x) * source;
        let tr = source.trace();
        let norm2 = m.inner(&m);
        if tr <= T::zero() || norm2 <= T::lit(1e-24) * tr {
            return Err(Error::InvalidArgument(
                "intertwiner vanishes between the given instances".into(),
            ));
        }
        Ok(m.scale(&(tr / norm2).sqrt()))
    }

    /// The instance projectors, restrictions and transporters of the
    /// `θ̄123 × η̄` block.
    pub fn theta_block(&self, eta: &Partition, theta: &Partition) -> Result<ThetaBlock<T>> {
        let n = self.n();
        if theta.size() + 1 != eta.size() || !eta.contains(theta) {
            return Err(Error::NotRelated {
                outer: eta.to_string(),
                inner: theta.to_string(),
            });
        }
        let eb = pad(eta, n, 0)?;
        let eb1 = pad(eta, n, 1)?;
        let eb12 = pad(eta, n, 2)?;
        let tb1 = pad(theta, n, 1)?;
        let tb12 = pad(theta, n, 2)?;
        let tb123 = pad(theta, n, 3)?;
        let d = distance(&eb, &tb12)?;
        let d_inner = distance(&eb1, &tb123)?;
        let a = Factor::alphabet(eb.clone());
        let t123 = Factor::index(tb123.clone(), &[0, 1, 2]);
        let block = self.projector(&[a.clone(), t123.clone()])?;
        let chain12 = [
            self.projector(&[a.clone(), t123.clone(), Factor::index(eb12.clone(), &[0, 1])])?,
            self.projector(&[
                a.clone(),
                t123.clone(),
                Factor::index(tb12.clone(), &[0, 1]),
                Factor::index(eb1.clone(), &[0]),
            ])?,
            self.projector(&[a.clone(), t123.clone(), Factor::index(tb1.clone(), &[0])])?,
        ];
        // instances along the chain that removes index 2 first; the η̄ branch
        // at index 2 is (N−k−1, η) and the θ̄ branch is (N−k, θ)
        let eb3 = Factor::index(eb1.clone(), &[2]);
        let tb3 = Factor::index(tb1.clone(), &[2]);
        let chain3 = [
            self.projector(&[a.clone(), Factor::Id, t123.clone(), eb3.clone()])?,
            self.projector(&[a.clone(), Factor::Sgn, t123.clone(), eb3])?,
            self.projector(&[a, t123.clone(), tb3])?,
        ];
        // index-only chains through the removal of {0, 2}
        let e1 = Factor::index(eb1.clone(), &[0]);
        let chain13 = [
            self.projector(&[t123.clone(), Factor::index(eb12.clone(), &[0, 1]), e1.clone()])?,
            self.projector(&[t123.clone(), Factor::index(tb12.clone(), &[0, 2]), e1.clone()])?,
            self.projector(&[t123.clone(), Factor::index(eb12.clone(), &[0, 2]), e1])?,
        ];
        let v12 = self.v_swap(0, 1);
        let v23 = self.v_swap(1, 2);
        let (t12_full, _) = self.transporter_from_v12(&eb, &tb12)?;
        let t12 = &chain12[1] * &t12_full.op;
        let t23 = self.normalize_intertwiner(&chain12[0], &v23, &chain12[1])?;
        let t3 = self.normalize_intertwiner(&chain3[2], &v23, &chain3[0])?;
        let t13 = self.normalize_intertwiner(&chain13[1], &v23, &chain13[2])?;
        Ok(ThetaBlock {
            eta: eta.clone(),
            theta: theta.clone(),
            d,
            d_inner,
            block,
            chain12,
            chain3,
            t12,
            t23,
            t3,
            chain13,
            t13,
            v12,
            v23,
        })
    }
}

/// Operators of the `θ̄123 × η̄` isotypic block.
pub struct ThetaBlock<T> {
    pub eta: Partition,
    pub theta: Partition,
    /// `d_{η̄, θ̄12}`.
    pub d: usize,
    /// `d_{η̄1, θ̄123}`.
    pub d_inner: usize,
    /// `Π^η̄_{θ̄123}`.
    pub block: CommutantOperator<T>,
    /// `Π_{θ̄123,η̄12}`, `Π_{θ̄123,θ̄12,η̄1}`, `Π_{θ̄123,θ̄1}`.
    pub chain12: [CommutantOperator<T>; 3],
    /// `Π_{id,θ̄123,η̄3}`, `Π_{sgn,θ̄123,η̄3}`, `Π_{θ̄123,θ̄3}`.
    pub chain3: [CommutantOperator<T>; 3],
    /// `T_{θ̄12,η̄1 ← θ̄1}` from `V_(12)`.
    pub t12: CommutantOperator<T>,
    /// `T_{η̄12 ← θ̄12,η̄1}` from `V_(23)`.
    pub t23: CommutantOperator<T>,
    /// `T_{θ̄3 ← id,η̄3}` from `V_(23)`.
    pub t3: CommutantOperator<T>,
    /// Index-only `Π_{θ̄123,η̄12,η̄1}`, `Π_{θ̄123,θ̄13,η̄1}`, `Π_{θ̄123,η̄13,η̄1}`.
    pub chain13: [CommutantOperator<T>; 3],
    /// `T_{θ̄13,η̄1 ← η̄13,η̄1}` from `V_(23)`.
    pub t13: CommutantOperator<T>,
    pub v12: CommutantOperator<T>,
    pub v23: CommutantOperator<T>,
}

impl<T: Real> ThetaBlock<T> {
    fn lit(x: f64) -> T {
        T::lit(x)
    }

    /// Right-hand side of the `V_(12)` restriction to the block.
    pub fn v12_restriction(&self) -> CommutantOperator<T> {
        let d = Self::lit(self.d as f64);
        let mut out = self.chain12[0].clone();
        let inv = T::one() / d;
        out.add_scaled(&inv, &self.chain12[1]);
        out.add_scaled(&-inv, &self.chain12[2]);
        let c = (d * d - T::one()).sqrt() / d;
        out.add_scaled(&c, &self.t12);
        out.add_scaled(&c, &self.t12.transpose());
        out
    }

    /// Right-hand side of the `V_(23)` restriction to the block.
    pub fn v23_restriction(&self) -> CommutantOperator<T> {
        let e = Self::lit(self.d as f64 - 1.0);
        let mut out = self.chain12[2].clone();
        let inv = T::one() / e;
        out.add_scaled(&inv, &self.chain12[0]);
        out.add_scaled(&-inv, &self.chain12[1]);
        let c = (e * e - T::one()).sqrt() / e;
        out.add_scaled(&c, &self.t23);
        out.add_scaled(&c, &self.t23.transpose());
        out
    }

    /// `Tr[Π_{θ̄123,η̄12} Π_{id,θ̄123,η̄3}] / (dim θ̄123 · dim η̄)` and its closed form.
    pub fn overlap(&self) -> (f64, f64) {
        let tr = (&self.chain12[0] * &self.chain3[0]).trace().as_f64();
        let norm = self.chain3[0].trace().as_f64();
        let d = self.d as f64;
        (tr / norm, 2.0 / (d * (d - 1.0)))
    }

    /// Right-hand side of the expansion of `Π_{θ̄123,η̄12}` in the
    /// index-2-first chain.
    pub fn theta_dec1(&self) -> CommutantOperator<T> {
        let d = Self::lit(self.d as f64);
        let dd = d * d - d;
        let (pa, pb) = (&self.chain3[2], &self.chain3[0]);
        let mut out = pa.clone();
        let w = Self::lit(2.0) / dd;
        out.add_scaled(&w, pb);
        out.add_scaled(&-w, pa);
        let c = (Self::lit(2.0) * (dd - Self::lit(2.0))).sqrt() / dd;
        out.add_scaled(&c, &self.t3);
        out.add_scaled(&c, &self.t3.transpose());
        out
    }

    /// Right-hand side of the expansion of `Π_{θ̄123,η̄12,η̄1}` in the
    /// chain removing `{0, 2}`.
    pub fn theta_dec2(&self) -> CommutantOperator<T> {
        let d = Self::lit(self.d_inner as f64);
        let (a, b) = (&self.chain13[1], &self.chain13[2]);
        let mut out = a.clone();
        let w = T::one() / (d * d);
        out.add_scaled(&w, b);
        out.add_scaled(&-w, a);
        let c = (d * d - T::one()).sqrt() / (d * d);
        out.add_scaled(&c, &self.t13);
        out.add_scaled(&c, &self.t13.transpose());
        out
    }

    /// `V_(13)(I + V_(23)) Π_{θ̄123,η̄1} V_(13) / 2`.
    pub fn id_eta3_via_swaps(&self, v13: &CommutantOperator<T>) -> CommutantOperator<T> {
        let p = &self.chain12[0] + &self.chain12[1];
        let sym = &p + &(&self.v23 * &p);
        (&(v13 * &sym) * v13).scale(&Self::lit(0.5))
    }

    pub fn is_zero_block(&self) -> bool {
        self.block.kernel().iter().all(Zero::is_zero)
    }
}
