//! The `D_{0,1}` block `G = Γ_{1,2}` of the adversary matrix: coefficient
//! tables, the explicit construction, and the norms of `Γ` and `Δ₁∘Γ`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::commutant::CommutantOperator;
use crate::error::{Error, Result};
use crate::operators::{Factor, Faults, LabeledOperator, OperatorFactory, OperatorLabel};
use crate::partitions::{distance, pad, partitions_of, relation, Partition, RemovalKind};
use crate::perm::Permutation;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeyKind {
    Id,
    Sgn,
}

impl fmt::Display for KeyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeyKind::Id => "id",
            KeyKind::Sgn => "sgn",
        })
    }
}

/// `(λ, id|sgn, ν)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoefficientKey {
    pub lambda: Partition,
    pub kind: KeyKind,
    pub nu: Partition,
}

impl CoefficientKey {
    pub fn new(lambda: Partition, kind: KeyKind, nu: Partition) -> Self {
        CoefficientKey { lambda, kind, nu }
    }

    pub fn id(lambda: Partition, nu: Partition) -> Self {
        Self::new(lambda, KeyKind::Id, nu)
    }

    pub fn sgn(lambda: Partition, nu: Partition) -> Self {
        Self::new(lambda, KeyKind::Sgn, nu)
    }

    pub fn case(&self) -> BoxCase {
        BoxCase::of(&self.lambda, &self.nu)
    }
}

impl fmt::Display for CoefficientKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.lambda, self.kind, self.nu)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Coefficients of `G` on projectors and transporters of `D_{0,1}`.
    Alpha,
    /// Coefficients of the full `Γ`.
    Beta,
}

/// How many more boxes `λ` has below its first row than `ν`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoxCase {
    Same,
    OneMore,
    TwoMore,
}

impl BoxCase {
    pub fn of(lambda: &Partition, nu: &Partition) -> Self {
        match lambda.below_first_row().size() as isize - nu.below_first_row().size() as isize {
            i if i <= 0 => BoxCase::Same,
            1 => BoxCase::OneMore,
            _ => BoxCase::TwoMore,
        }
    }

    /// 1, 2 or 3.
    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn from_number(c: usize) -> Option<Self> {
        match c {
            1 => Some(BoxCase::Same),
            2 => Some(BoxCase::OneMore),
            3 => Some(BoxCase::TwoMore),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Availability {
    /// Only `id` (the two boxes share a row).
    Single,
    /// `id` and `sgn`.
    Double,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvailabilityEntry {
    pub lambda: Partition,
    pub nu: Partition,
    pub availability: Availability,
    pub case: BoxCase,
}

/// Every `(λ, ν)` with `ν` obtained from `λ` by removing two boxes in
/// different columns, in descending order of `λ` then `ν`.
pub fn availability_table(n: usize) -> Result<Vec<AvailabilityEntry>> {
    if n < 4 {
        return Err(Error::Capacity {
            what: "availability table",
            min: 4,
            max: usize::MAX,
            n,
        });
    }
    let nus = partitions_of(n - 2);
    let mut out = Vec::new();
    for lambda in partitions_of(n) {
        for nu in &nus {
            let Ok(rel) = relation(&lambda, nu) else { continue };
            if !rel.is_c() {
                continue;
            }
            out.push(AvailabilityEntry {
                lambda: lambda.clone(),
                nu: nu.clone(),
                availability: if rel.is_rc() {
                    Availability::Double
                } else {
                    Availability::Single
                },
                case: BoxCase::of(&lambda, nu),
            });
        }
    }
    Ok(out)
}

/// All admissible keys at `n`.
pub fn available_keys(n: usize) -> Result<Vec<CoefficientKey>> {
    let mut keys = Vec::new();
    for e in availability_table(n)? {
        keys.push(CoefficientKey::id(e.lambda.clone(), e.nu.clone()));
        if e.availability == Availability::Double {
            keys.push(CoefficientKey::sgn(e.lambda, e.nu));
        }
    }
    Ok(keys)
}

pub fn key_available(n: usize, key: &CoefficientKey) -> bool {
    if key.lambda.size() != n || key.nu.size() + 2 != n {
        return false;
    }
    match relation(&key.lambda, &key.nu) {
        Ok(rel) => match key.kind {
            KeyKind::Id => rel.is_c(),
            KeyKind::Sgn => rel.is_rc(),
        },
        Err(_) => false,
    }
}

fn binom2(n: usize) -> f64 {
    (n * (n - 1) / 2) as f64
}

/// `β / α = √(C(N,2) dim ν / dim λ)`; the fault inverts the dimension ratio.
pub fn gamma_factor(n: usize, lambda: &Partition, nu: &Partition, faults: Faults) -> f64 {
    let (dl, dn) = (lambda.dim() as f64, nu.dim() as f64);
    let ratio = if faults.gamma_factor { dl / dn } else { dn / dl };
    (binom2(n) * ratio).sqrt()
}

/// Finite parameterization of a symmetric adversary matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "TableRepr", try_from = "TableRepr")]
pub struct CoefficientTable {
    pub n: usize,
    pub basis: Basis,
    pub entries: BTreeMap<CoefficientKey, f64>,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    #[serde(rename = "N")]
    n: usize,
    basis: Basis,
    entries: Vec<EntryRepr>,
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    lambda: Partition,
    kind: KeyKind,
    nu: Partition,
    value: f64,
}

impl From<CoefficientTable> for TableRepr {
    fn from(t: CoefficientTable) -> Self {
        TableRepr {
            n: t.n,
            basis: t.basis,
            entries: t
                .entries
                .into_iter()
                .map(|(k, value)| EntryRepr {
                    lambda: k.lambda,
                    kind: k.kind,
                    nu: k.nu,
                    value,
                })
                .collect(),
        }
    }
}

impl TryFrom<TableRepr> for CoefficientTable {
    type Error = Error;

    fn try_from(r: TableRepr) -> Result<Self> {
        let mut t = CoefficientTable::new(r.n, r.basis);
        for e in r.entries {
            t.insert(CoefficientKey::new(e.lambda, e.kind, e.nu), e.value)?;
        }
        Ok(t)
    }
}

impl CoefficientTable {
    pub fn new(n: usize, basis: Basis) -> Self {
        CoefficientTable {
            n,
            basis,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, key: CoefficientKey, value: f64) -> Result<()> {
        if !key_available(self.n, &key) {
            return Err(Error::UnavailableKey(format!("{key} at N={}", self.n)));
        }
        self.entries.insert(key, value);
        Ok(())
    }

    pub fn add(&mut self, key: CoefficientKey, value: f64) -> Result<()> {
        let old = self.get(&key);
        self.insert(key, old + value)
    }

    pub fn get(&self, key: &CoefficientKey) -> f64 {
        self.entries.get(key).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut t = self.clone();
        t.entries.values_mut().for_each(|v| *v *= c);
        t
    }

    /// Drops entries with `|value| ≤ cutoff`.
    pub fn pruned(&self, cutoff: f64) -> Self {
        let mut t = self.clone();
        t.entries.retain(|_, v| v.abs() > cutoff);
        t
    }

    pub fn to_basis(&self, basis: Basis, faults: Faults) -> Self {
        if basis == self.basis {
            return self.clone();
        }
        let mut t = CoefficientTable::new(self.n, basis);
        for (k, &v) in &self.entries {
            let g = gamma_factor(self.n, &k.lambda, &k.nu, faults);
            let v = if basis == Basis::Beta { v * g } else { v / g };
            t.entries.insert(k.clone(), v);
        }
        t
    }

    pub fn to_beta(&self) -> Self {
        self.to_basis(Basis::Beta, Faults::default())
    }

    pub fn to_alpha(&self) -> Self {
        self.to_basis(Basis::Alpha, Faults::default())
    }

    /// Largest relative entrywise deviation from `other`, over the union of keys.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        let scale = self
            .entries
            .values()
            .chain(other.entries.values())
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1e-300);
        self.entries
            .keys()
            .chain(other.entries.keys())
            .map(|k| (self.get(k) - other.get(k)).abs() / scale)
            .fold(0.0, f64::max)
    }
}

/// `‖Γ‖ = max_λ ‖(β^λ_{·,ν})_ν‖₂`.
pub fn gamma_norm_closed(table: &CoefficientTable) -> f64 {
    let beta = table.to_beta();
    let mut per_lambda: BTreeMap<&Partition, f64> = BTreeMap::new();
    for (k, v) in &beta.entries {
        *per_lambda.entry(&k.lambda).or_default() += v * v;
    }
    per_lambda.values().fold(0.0f64, |m, &s| m.max(s)).sqrt()
}

/// `K = ⌈N^{2/3}⌉`.
pub fn construction_k(n: usize) -> usize {
    (0..).find(|&k: &usize| k * k * k >= n * n).expect("terminates")
}

/// Weight `(K − k)/N` of the `k`-th family.
pub fn construction_weight(n: usize, k: usize) -> f64 {
    (construction_k(n) as f64 - k as f64) / n as f64
}

/// One family member of the construction: `η ⊢ k` with valid `η̄12`, `η̄1`.
#[derive(Clone, Debug)]
pub struct Term {
    pub k: usize,
    pub eta: Partition,
    pub weight: f64,
    pub eta_bar: Partition,
    pub eta_bar1: Partition,
    pub eta_bar12: Partition,
}

/// Terms of the construction with nonzero weight, and the number of terms
/// dropped for invalid padding.
pub fn construction_terms(n: usize) -> (Vec<Term>, usize) {
    let kmax = construction_k(n);
    let mut terms = Vec::new();
    let mut dropped = 0;
    for k in 0..kmax {
        for eta in partitions_of(k) {
            match (pad(&eta, n, 0), pad(&eta, n, 1), pad(&eta, n, 2)) {
                (Ok(eta_bar), Ok(eta_bar1), Ok(eta_bar12)) => terms.push(Term {
                    k,
                    weight: construction_weight(n, k),
                    eta,
                    eta_bar,
                    eta_bar1,
                    eta_bar12,
                }),
                _ => dropped += 1,
            }
        }
    }
    (terms, dropped)
}

/// Closed-form α-table of the construction.
pub fn explicit_alpha_table(n: usize) -> Result<CoefficientTable> {
    let mut t = CoefficientTable::new(n, Basis::Alpha);
    for term in construction_terms(n).0 {
        t.add(CoefficientKey::id(term.eta_bar.clone(), term.eta_bar12.clone()), term.weight)?;
        for delta in term.eta.add_one() {
            let Ok(delta_bar) = pad(&delta, n, 0) else { continue };
            let rel = relation(&delta_bar, &term.eta_bar12)?;
            if rel.kind != RemovalKind::TwoDifferent {
                continue;
            }
            let d = distance(&delta_bar, &term.eta_bar12)? as f64;
            let w = term.weight;
            t.add(CoefficientKey::id(delta_bar.clone(), term.eta_bar12.clone()), w * (d - 1.0) / d)?;
            t.add(CoefficientKey::sgn(delta_bar, term.eta_bar12.clone()), w * (d * d - 1.0).sqrt() / d)?;
        }
    }
    Ok(t)
}

/// `G = Σ_k (K−k)/N Σ_η (2 Π_{η̄12,η̄1} Π_id − Π^η̄_{η̄12})` and its extracted α-table.
pub fn build_gamma12_explicit<T: Real>(
    factory: &OperatorFactory<T>,
) -> Result<(LabeledOperator<T>, CoefficientTable)> {
    let n = factory.n();
    if n < 4 {
        return Err(Error::Capacity {
            what: "construction",
            min: 4,
            max: usize::MAX,
            n,
        });
    }
    let (terms, dropped) = construction_terms(n);
    if dropped > 0 {
        log::debug!("N={n}: dropped {dropped} terms with invalid padding");
    }
    let id = factory.projector(&[Factor::Id])?;
    let mut g = factory.zero();
    for term in &terms {
        let chain = factory.projector(&[
            Factor::index(term.eta_bar12.clone(), &[0, 1]),
            Factor::index(term.eta_bar1.clone(), &[0]),
        ])?;
        let block = factory.projector(&[
            Factor::alphabet(term.eta_bar.clone()),
            Factor::index(term.eta_bar12.clone(), &[0, 1]),
        ])?;
        let w = T::lit(term.weight);
        g.add_scaled(&(w + w), &(&chain * &id));
        g.add_scaled(&-w, &block);
    }
    let (table, _) = extract_coeffs(factory, &g)?;
    Ok((
        LabeledOperator {
            label: OperatorLabel::Composite(format!("Gamma12[explicit,N={n},K={}]", construction_k(n))),
            op: g,
        },
        table,
    ))
}

/// The operator of one coefficient key: `Π^λ_{id,ν12}` or `T_{sgn←id}`.
pub fn key_operator<T: Real>(factory: &OperatorFactory<T>, key: &CoefficientKey) -> Result<CommutantOperator<T>> {
    if !key_available(factory.n(), key) {
        return Err(Error::UnavailableKey(format!("{key} at N={}", factory.n())));
    }
    match key.kind {
        KeyKind::Id => factory.p_swap_nu(Factor::Id, &key.lambda, &key.nu),
        KeyKind::Sgn => Ok(factory.transporter_sgn_from_id(&key.lambda, &key.nu)?.op),
    }
}

/// `Σ α^λ_{id,ν} Π^λ_{id,ν12} + Σ α^λ_{sgn,ν} T^λ_{sgn,ν12←id,ν12}`.
pub fn build_gamma12_from_coeffs<T: Real>(
    factory: &OperatorFactory<T>,
    table: &CoefficientTable,
) -> Result<LabeledOperator<T>> {
    if table.n != factory.n() {
        return Err(Error::SizeMismatch(format!("table for N={} with factory N={}", table.n, factory.n())));
    }
    let alpha = table.to_basis(Basis::Alpha, factory.faults());
    let mut g = factory.zero();
    for (key, &v) in &alpha.entries {
        if v != 0.0 {
            g.add_scaled(&T::lit(v), &key_operator(factory, key)?);
        }
    }
    Ok(LabeledOperator {
        label: OperatorLabel::Composite(format!("Gamma12[table,N={},{} keys]", table.n, table.len())),
        op: g,
    })
}

/// Largest residual of the symmetries of `G`: `G V_(01) = G` and commutation
/// with the generators of the permutations of indices `2..N`.
pub fn symmetry_residual<T: Real>(factory: &OperatorFactory<T>, g: &CommutantOperator<T>) -> f64 {
    let n = factory.n();
    let mut res = g.residual(&(g * &factory.v_swap(0, 1)));
    let mut gens = vec![factory.v_swap(2, 3)];
    if n > 4 {
        let cycle: Vec<usize> = (2..n).collect();
        gens.push(factory.v(&Permutation::cycle(n, &cycle)).expect("degree matches"));
    }
    for v in gens {
        res = res.max(g.commutator_residual(&v));
    }
    res
}

/// Trace projections onto the orthogonal basis, and the relative residual
/// of `G` minus the reconstruction.
pub fn extract_coeffs<T: Real>(
    factory: &OperatorFactory<T>,
    g: &CommutantOperator<T>,
) -> Result<(CoefficientTable, f64)> {
    let sym = symmetry_residual(factory, g);
    if sym > 1e-8 {
        return Err(Error::Symmetry(format!("residual {sym:e}")));
    }
    let n = factory.n();
    let mut table = CoefficientTable::new(n, Basis::Alpha);
    let mut recon = factory.zero();
    for key in available_keys(n)? {
        let op = key_operator(factory, &key)?;
        // Tr[XᵀX] = dim λ · dim ν for every basis element
        let norm = (key.lambda.dim() * key.nu.dim()) as f64;
        let a = g.inner(&op).as_f64() / norm;
        if a.abs() > 1e-14 {
            recon.add_scaled(&T::lit(a), &op);
            table.insert(key, a)?;
        }
    }
    Ok((table, g.residual(&recon)))
}

fn conj_gram<T: Real>(m: &CommutantOperator<T>, reps: &[usize]) -> CommutantOperator<T> {
    (&m.transpose() * m).conjugation_sum(reps)
}

/// `ΓᵀΓ = Σ_{π∈R} V_π GᵀG V_π⁻¹`.
pub fn gamma_gram<T: Real>(factory: &OperatorFactory<T>, g: &CommutantOperator<T>) -> Result<CommutantOperator<T>> {
    Ok(conj_gram(g, &factory.space().transversals()?.r))
}

/// `‖Γ‖` through the block sum over the pair transversal.
pub fn gamma_norm<T: Real>(factory: &OperatorFactory<T>, g: &CommutantOperator<T>) -> Result<T> {
    Ok(gamma_gram(factory, g)?.psd_norm()?.max(T::zero()).sqrt())
}

/// `Σ_{π∈R'} V_π (Δ₁∘G)ᵀ(Δ₁∘G) V_π⁻¹`.
pub fn delta_prime_gram<T: Real>(factory: &OperatorFactory<T>, g: &CommutantOperator<T>) -> Result<CommutantOperator<T>> {
    let m = g.mask(&factory.delta_mask(0)?);
    Ok(conj_gram(&m, &factory.space().transversals()?.r_prime))
}

/// `Σ_{π∈R''} V_π (Δ₃∘G)ᵀ(Δ₃∘G) V_π⁻¹`.
pub fn delta_doubleprime_gram<T: Real>(
    factory: &OperatorFactory<T>,
    g: &CommutantOperator<T>,
) -> Result<CommutantOperator<T>> {
    let m = g.mask(&factory.delta_mask(2)?);
    Ok(conj_gram(&m, &factory.space().transversals()?.r_double_prime))
}

pub fn norm_delta1_gamma_prime<T: Real>(factory: &OperatorFactory<T>, g: &CommutantOperator<T>) -> Result<T> {
    Ok(delta_prime_gram(factory, g)?.psd_norm()?.max(T::zero()).sqrt())
}

pub fn norm_delta1_gamma_doubleprime<T: Real>(factory: &OperatorFactory<T>, g: &CommutantOperator<T>) -> Result<T> {
    Ok(delta_doubleprime_gram(factory, g)?.psd_norm()?.max(T::zero()).sqrt())
}

/// `(Δ₁∘Γ)ᵀ(Δ₁∘Γ)`: the two halves occupy disjoint rows; the second is
/// conjugated back by `V_(02)`.
pub fn delta_total_gram<T: Real>(factory: &OperatorFactory<T>, g: &CommutantOperator<T>) -> Result<CommutantOperator<T>> {
    let p1 = delta_prime_gram(factory, g)?;
    let p2 = delta_doubleprime_gram(factory, g)?;
    let v13 = factory.v_swap(0, 2);
    Ok(&p1 + &(&(&v13 * &p2) * &v13))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub gamma_norm: f64,
    pub delta_prime: f64,
    pub delta_doubleprime: f64,
    pub delta_total: f64,
    pub ratio: f64,
}

/// Norms and ratio of the adversary matrix with block `g`; `‖Γ‖` is taken
/// from the closed form on `table` when given.
pub fn ratio_of<T: Real>(
    factory: &OperatorFactory<T>,
    g: &CommutantOperator<T>,
    table: Option<&CoefficientTable>,
) -> Result<RatioRecord> {
    let gamma = match table {
        Some(t) => gamma_norm_closed(t),
        None => gamma_norm(factory, g)?.as_f64(),
    };
    let p1 = delta_prime_gram(factory, g)?;
    let p2 = delta_doubleprime_gram(factory, g)?;
    let v13 = factory.v_swap(0, 2);
    let total = &p1 + &(&(&v13 * &p2) * &v13);
    let sq = |x: T| x.max(T::zero()).sqrt().as_f64();
    let delta_total = sq(total.psd_norm()?);
    if gamma == 0.0 || delta_total == 0.0 {
        return Err(Error::ZeroTable);
    }
    Ok(RatioRecord {
        n: factory.n(),
        gamma_norm: gamma,
        delta_prime: sq(p1.psd_norm()?),
        delta_doubleprime: sq(p2.psd_norm()?),
        delta_total,
        ratio: gamma / delta_total,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the linear fit.
    pub residual: f64,
}

/// Least-squares line through `(ln N, ln ratio)`; needs two distinct N.
pub fn fit_loglog(records: &[RatioRecord]) -> Option<LogLogFit> {
    let pts: Vec<(f64, f64)> = records.iter().map(|r| ((r.n as f64).ln(), r.ratio.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if pts.len() < 2 || sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Some(LogLogFit {
        slope,
        intercept,
        residual: (ss / m).sqrt(),
    })
}

/// Ratio record of the explicit construction.
pub fn bound_ratio(n: usize) -> Result<RatioRecord> {
    if !(4..=crate::group_action::MAX_TABLE_N).contains(&n) {
        return Err(Error::Capacity {
            what: "bound ratio",
            min: 4,
            max: crate::group_action::MAX_TABLE_N,
            n,
        });
    }
    let factory = OperatorFactory::<f64>::new(n)?;
    let (g, table) = build_gamma12_explicit(&factory)?;
    ratio_of(&factory, &g.op, Some(&table))
}

/// `Δ₁⋄G`: the construction with `Δ₁∘Π_id` replaced by `V_(01)/2` and
/// `Δ₁∘Π^η̄_{η̄12}` by `Π^η̄_{η̄12}`.
pub fn approximate_delta1_gamma12<T: Real>(factory: &OperatorFactory<T>) -> Result<CommutantOperator<T>> {
    let n = factory.n();
    let v12 = factory.v_swap(0, 1);
    let mut out = factory.zero();
    for term in construction_terms(n).0 {
        let chain = factory.projector(&[
            Factor::index(term.eta_bar12.clone(), &[0, 1]),
            Factor::index(term.eta_bar1.clone(), &[0]),
        ])?;
        let block = factory.projector(&[
            Factor::alphabet(term.eta_bar.clone()),
            Factor::index(term.eta_bar12.clone(), &[0, 1]),
        ])?;
        let w = T::lit(term.weight);
        out.add_scaled(&w, &(&chain * &v12));
        out.add_scaled(&-w, &block);
    }
    Ok(out)
}

/// Norm of the `R'` sum built from `Δ₁⋄G`.
pub fn approximate_delta_prime_norm<T: Real>(factory: &OperatorFactory<T>) -> Result<f64> {
    let m = approximate_delta1_gamma12(factory)?;
    Ok(conj_gram(&m, &factory.space().transversals()?.r_prime).psd_norm()?.as_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(rows: &[usize]) -> Partition {
        Partition::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn k_values() {
        assert_eq!(construction_k(4), 3);
        assert_eq!(construction_k(5), 3);
        assert_eq!(construction_k(8), 4);
        assert_eq!(construction_k(27), 9);
    }

    #[test]
    fn availability_examples() {
        let t = availability_table(6).unwrap();
        let find = |l: &[usize], n: &[usize]| t.iter().find(|e| e.lambda == p(l) && e.nu == p(n)).map(|e| e.availability);
        assert_eq!(find(&[6], &[4]), Some(Availability::Single));
        assert_eq!(find(&[5, 1], &[4]), Some(Availability::Double));
        assert_eq!(find(&[4, 1, 1], &[2, 2]), None);
        assert_eq!(find(&[4, 1, 1], &[4]), None);
        assert!(availability_table(3).is_err());
    }

    #[test]
    fn table_serde_round_trip() {
        let mut t = CoefficientTable::new(4, Basis::Alpha);
        t.insert(CoefficientKey::id(p(&[4]), p(&[2])), 0.75).unwrap();
        t.insert(CoefficientKey::sgn(p(&[3, 1]), p(&[2])), -0.5).unwrap();
        assert!(t.insert(CoefficientKey::sgn(p(&[4]), p(&[2])), 1.0).is_err());
        let s = serde_json::to_string(&t).unwrap();
        let back: CoefficientTable = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        assert!((t.to_beta().to_alpha().max_deviation(&t)) < 1e-15);
    }

    #[test]
    fn explicit_table_n4() {
        let f = OperatorFactory::<f64>::new(4).unwrap();
        let (g, table) = build_gamma12_explicit(&f).unwrap();
        assert!((table.get(&CoefficientKey::id(p(&[4]), p(&[2]))) - 0.75).abs() < 1e-12);
        assert!(table.max_deviation(&explicit_alpha_table(4).unwrap()) < 1e-10);
        let (_, sgn) = f.pi_id_sgn();
        assert!((&g.op * &sgn.op).is_zero() || (&g.op * &sgn.op).frobenius() < 1e-12);
        let (terms, _) = construction_terms(4);
        assert!(terms.iter().all(|t| t.k <= 1));
    }
}
