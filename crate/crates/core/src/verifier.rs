//! Numeric residuals for the identities and inequalities the construction
//! rests on.
//!
//! Each check enumerates every admissible label tuple at the given N and
//! reports the worst residual. Identity residuals are relative Frobenius
//! residuals; inequality residuals are `max(0, lhs − rhs)`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{
    self, available_keys, build_gamma12_from_coeffs, build_gamma12_explicit, construction_k, construction_weight, Basis,
    CoefficientKey, CoefficientTable, KeyKind,
};
use crate::commutant::CommutantOperator;
use crate::error::{Error, Result};
use crate::operators::{Factor, Faults, OperatorFactory, RcPair, ThetaBlock};
use crate::partitions::{intermediates, pad, partitions_of, relation, Partition};
use crate::scalar::Real;

pub const DEFAULT_TOL: f64 = 1e-9;
/// Slack on the comparison of inequality checks.
pub const INEQUALITY_SLACK: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CheckId {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
    L,
    M,
    N,
    O,
    P,
}

use CheckId::*;

impl CheckId {
    pub const ALL: [CheckId; 16] = [A, B, C, D, E, F, G, H, I, J, K, L, M, N, O, P];

    pub fn letter(self) -> char {
        (b'a' + self as u8) as char
    }

    pub fn name(self) -> &'static str {
        match self {
            A => "a_regular_decomposition",
            B => "b_gamma12_symmetry",
            C => "c_v12_restriction",
            D => "d_id_sgn_expansion",
            E => "e_block_overlap",
            F => "f_block_decompositions",
            G => "g_sum_rearrangement",
            H => "h_permutation_sums",
            I => "i_delta_on_projectors",
            J => "j_delta_on_transporters",
            K => "k_exact_mask_actions",
            L => "l_block_norm_bound",
            M => "m_trace_gap_bound",
            N => "n_coefficient_pair_bound",
            O => "o_coefficient_chain_bound",
            P => "p_gamma_relation",
        }
    }

    /// Plain statement of what is compared.
    pub fn reference(self) -> &'static str {
        match self {
            A => "sum of isotypic blocks is I; index and alphabet isotypic projectors agree; trace dim^2",
            B => "G V_(12) = G, G commutes with index permutations of 3..N, G Pi_sgn = 0",
            C => "V_(12) on the nu12 x lambda block: (P_mu' - P_mu + sqrt(d^2-1)(T + T^t))/d",
            D => "Pi_id and T_sgn<-id expanded in the mu1 / mu'1 basis",
            E => "V_(12), V_(23) on the theta123 block; overlap 2/(d(d-1)); id,eta3 via V_(13)(I+V_(23))",
            F => "Pi_{theta123,eta12} and Pi_{theta123,eta12,eta1} in the chains removing index 3 first",
            G => "telescoping of the weighted family sums over k",
            H => "transversal sums of projectors and transporters fixed by the pair stabilizer",
            I => "Delta_i o Pi_lambda = Pi_lambda - (dim lambda/N) sum_{mu<lambda} Pi_{mu_i} / dim mu, index-only Pi_{mu_i}, i != 2",
            J => "Delta_1 o T = T for transporters between mu1 and mu'1",
            K => "Delta_1 o Pi_id = V_(12)/2; Delta_3 o Pi_{theta123,theta3} = Delta_3 o Pi_{theta123,theta13} = 0",
            L => "||Pi_{nu12,mu1} (Delta_1 o G) Pi_{nu12,mu'1}|| <= sqrt(dim mu' / ((N-1) dim nu))",
            M => "|Tr[Pi^lambda_{nu12,mu1} G]/(dim lambda dim nu) - same for lambda'| <= 2 sqrt(dim mu/((N-1) dim nu))",
            N => "two linear forms of (alpha_id, alpha_sgn) bounded by sqrt(dim mu/((N-1) dim nu))",
            O => "alpha chain across eta > theta bounded by 2 sqrt(dim theta3 / (C(N-1,2) dim theta123))",
            P => "beta/alpha = sqrt(C(N,2) dim nu/dim lambda); ||Delta_1 o B|| <= 2 ||B||",
        }
    }

    pub fn is_inequality(self) -> bool {
        matches!(self, L | M | N | O)
    }

    pub fn parse(s: &str) -> Result<CheckId> {
        let s = s.trim().to_ascii_lowercase();
        CheckId::ALL
            .into_iter()
            .find(|c| s.len() == 1 && s.starts_with(c.letter()) || s == c.name())
            .ok_or(Error::UnknownCheck(s))
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a comma separated selection of letters, names, ranges `a-k`, or
/// the groups `all`, `identities`, `auxiliary`, `inequalities`.
pub fn parse_selection(spec: &str) -> Result<Vec<CheckId>> {
    let mut out = BTreeSet::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.to_ascii_lowercase().as_str() {
            "all" => out.extend(CheckId::ALL),
            "identities" => out.extend([A, B, C, D, E, F, G, H, I, J, K, P]),
            "auxiliary" => out.extend([I, J, L, M, N, O]),
            "inequalities" => out.extend([L, M, N, O]),
            p if p.len() == 3 && p.as_bytes()[1] == b'-' => {
                let (a, b) = (CheckId::parse(&p[..1])?, CheckId::parse(&p[2..])?);
                out.extend(CheckId::ALL.into_iter().filter(|c| *c >= a && *c <= b));
            }
            p => {
                out.insert(CheckId::parse(p)?);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::UnknownCheck(spec.to_string()));
    }
    Ok(out.into_iter().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    #[serde(rename = "ref")]
    pub reference: String,
    pub residual: f64,
    pub tol: f64,
    pub status: Status,
    /// Number of label tuples evaluated.
    pub cases: usize,
    /// Label tuple with the worst residual.
    pub worst: String,
    /// Smallest `rhs − lhs` of an inequality check.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub tol: f64,
    pub workers: usize,
    pub faults: Faults,
    pub checks: Vec<CheckRecord>,
    pub wall_time_s: f64,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn get(&self, id: CheckId) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check == id.name())
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .map(|c| c.check.as_str())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub tol: f64,
    pub workers: usize,
    pub faults: Faults,
    /// Seed of the random tables in check (p).
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            tol: DEFAULT_TOL,
            workers: 1,
            faults: Faults::default(),
            seed: 20,
        }
    }
}

/// Worst case over label tuples.
#[derive(Default)]
struct Acc {
    max: f64,
    cases: usize,
    worst: String,
    margin: Option<f64>,
}

impl Acc {
    fn push(&mut self, label: impl FnOnce() -> String, r: f64) {
        self.cases += 1;
        let r = if r.is_nan() { f64::INFINITY } else { r };
        if r > self.max || self.worst.is_empty() {
            if r > self.max {
                self.max = r;
            }
            self.worst = label();
        }
    }

    /// Records `lhs ≤ rhs`; the reported label is the tightest case.
    fn ineq(&mut self, label: impl FnOnce() -> String, lhs: f64, rhs: f64) {
        let m = rhs - lhs;
        let m = if m.is_nan() { f64::NEG_INFINITY } else { m };
        self.cases += 1;
        self.max = self.max.max(-m);
        if self.margin.is_none_or(|x| m < x) {
            self.margin = Some(m);
            self.worst = label();
        }
    }
}

/// Shared operators for one suite run.
pub struct Suite<T> {
    f: OperatorFactory<T>,
    explicit: OnceLock<std::result::Result<(CommutantOperator<T>, CoefficientTable), String>>,
    opts: SuiteOptions,
}

fn dimf(p: &Partition) -> f64 {
    p.dim() as f64
}

fn rc_pairs(n: usize) -> Vec<(Partition, Partition)> {
    let mut out = Vec::new();
    for lambda in partitions_of(n) {
        for nu in partitions_of(n - 2) {
            if relation(&lambda, &nu).map(|r| r.is_rc()).unwrap_or(false) {
                out.push((lambda.clone(), nu));
            }
        }
    }
    out
}

/// Every `(λ, ν)` with `ν ⊂ λ` and two boxes apart.
fn two_box_pairs(n: usize) -> Vec<(Partition, Partition)> {
    let mut out = Vec::new();
    for lambda in partitions_of(n) {
        for nu in partitions_of(n - 2) {
            if relation(&lambda, &nu).is_ok() {
                out.push((lambda.clone(), nu));
            }
        }
    }
    out
}

/// `(η, θ)` with `θ < η`, `|η| ≥ 1` and a valid `η̄12`.
fn theta_pairs(n: usize) -> Vec<(Partition, Partition)> {
    let mut out = Vec::new();
    for k in 1..n {
        for eta in partitions_of(k) {
            if pad(&eta, n, 2).is_err() {
                continue;
            }
            for theta in partitions_of(k - 1) {
                if eta.contains(&theta) {
                    out.push((eta.clone(), theta));
                }
            }
        }
    }
    out
}

impl<T: Real> Suite<T> {
    pub fn new(n: usize, opts: SuiteOptions) -> Result<Self> {
        if !(4..=crate::group_action::MAX_TABLE_N).contains(&n) {
            return Err(Error::Capacity {
                what: "verification suite",
                min: 4,
                max: crate::group_action::MAX_TABLE_N,
                n,
            });
        }
        Ok(Suite {
            f: OperatorFactory::with_faults(n, opts.faults)?,
            explicit: OnceLock::new(),
            opts,
        })
    }

    pub fn factory(&self) -> &OperatorFactory<T> {
        &self.f
    }

    fn n(&self) -> usize {
        self.f.n()
    }

    fn lit(x: f64) -> T {
        T::lit(x)
    }

    fn explicit(&self) -> Result<&(CommutantOperator<T>, CoefficientTable)> {
        self.explicit
            .get_or_init(|| {
                build_gamma12_explicit(&self.f)
                    .map(|(g, t)| (g.op, t))
                    .map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| Error::InvalidArgument(e.clone()))
    }

    fn swap_block(&self, swap: Factor, lambda: &Partition, nu: &Partition) -> Result<CommutantOperator<T>> {
        self.f.p_swap_nu(swap, lambda, nu)
    }

    fn full_block(&self, lambda: &Partition) -> Result<CommutantOperator<T>> {
        self.f.projector(&[Factor::alphabet(lambda.clone()), Factor::index(lambda.clone(), &[])])
    }

    pub fn run(&self, id: CheckId) -> Result<CheckRecord> {
        let mut acc = Acc::default();
        match id {
            A => self.check_a(&mut acc)?,
            B => self.check_b(&mut acc)?,
            C => self.check_c(&mut acc)?,
            D => self.check_d(&mut acc)?,
            E => self.check_e(&mut acc)?,
            F => self.check_f(&mut acc)?,
            G => self.check_g(&mut acc)?,
            H => self.check_h(&mut acc)?,
            I => self.check_i(&mut acc)?,
            J => self.check_j(&mut acc)?,
            K => self.check_k(&mut acc)?,
            L => self.check_l(&mut acc)?,
            M => self.check_m(&mut acc)?,
            N => self.check_n(&mut acc)?,
            O => self.check_o(&mut acc)?,
            P => self.check_p(&mut acc)?,
        }
        let tol = if matches!(id, L | M | N | O) {
            INEQUALITY_SLACK
        } else {
            self.opts.tol
        };
        Ok(CheckRecord {
            check: id.name().to_string(),
            reference: id.reference().to_string(),
            residual: acc.max,
            tol,
            status: if acc.max <= tol { Status::Pass } else { Status::Fail },
            cases: acc.cases,
            worst: acc.worst,
            margin: acc.margin,
        })
    }

    fn check_a(&self, acc: &mut Acc) -> Result<()> {
        let n = self.n();
        let mut sum = self.f.zero();
        for lambda in partitions_of(n) {
            let idx = self.f.projector(&[Factor::index(lambda.clone(), &[])])?;
            let alp = self.f.projector(&[Factor::alphabet(lambda.clone())])?;
            let dim = dimf(&lambda);
            acc.push(|| format!("{lambda} index=alphabet"), idx.residual(&alp));
            acc.push(|| format!("{lambda} trace"), (idx.trace().as_f64() / (dim * dim) - 1.0).abs());
            acc.push(|| format!("{lambda} idempotent"), idx.residual(&(&idx * &idx)));
            if n <= 5 {
                let dense = crate::dense::isotypic_projector::<T>(self.f.space(), crate::operators::Side::Index, &[], &lambda)?;
                acc.push(|| format!("{lambda} dense"), crate::dense::residual(&dense, &idx.to_dense()));
            }
            sum += &idx;
        }
        acc.push(|| "sum".into(), self.f.identity().residual(&sum));
        Ok(())
    }

    fn check_b(&self, acc: &mut Acc) -> Result<()> {
        let (g, _) = self.explicit()?;
        acc.push(|| "symmetries".into(), adversary::symmetry_residual(&self.f, g));
        let sgn = self.f.projector(&[Factor::Sgn])?;
        acc.push(|| "G Pi_sgn".into(), (g * &sgn).frobenius() / g.frobenius().max(1e-300));
        Ok(())
    }

    /// `P_μ`, `P_μ'`, `T_{μ'←μ}` of an rc pair.
    fn rc_ops(&self, pair: &RcPair) -> Result<[CommutantOperator<T>; 3]> {
        let p = self.f.p_nu_mu(&pair.lambda, &pair.nu, &pair.mu)?;
        let pp = self.f.p_nu_mu(&pair.lambda, &pair.nu, &pair.mu_prime)?;
        let (t, _) = self.f.transporter_from_v12(&pair.lambda, &pair.nu)?;
        Ok([p, pp, t.op])
    }

    fn check_c(&self, acc: &mut Acc) -> Result<()> {
        let v12 = self.f.v_swap(0, 1);
        for (lambda, nu) in rc_pairs(self.n()) {
            let pair = RcPair::new(&lambda, &nu)?;
            let [p, pp, t] = self.rc_ops(&pair)?;
            let block = self.f.projector(&[Factor::index(nu.clone(), &[0, 1]), Factor::alphabet(lambda.clone())])?;
            let d = Self::lit(pair.d as f64);
            let mut rhs = &pp - &p;
            rhs.add_scaled(&(d * d - T::one()).sqrt(), &(&t + &t.transpose()));
            let rhs = rhs.scale(&(T::one() / d));
            let label = || format!("{lambda} {nu}");
            acc.push(label, (&v12 * &block).residual(&rhs));
            acc.push(|| format!("{lambda} {nu} isometry"), {
                let tt = t.transpose();
                p.residual(&(&tt * &t)).max(pp.residual(&(&t * &tt)))
            });
        }
        Ok(())
    }

    fn check_d(&self, acc: &mut Acc) -> Result<()> {
        for (lambda, nu) in rc_pairs(self.n()) {
            let pair = RcPair::new(&lambda, &nu)?;
            let [p, pp, t] = self.rc_ops(&pair)?;
            let d = Self::lit(pair.d as f64);
            let two_d = d + d;
            let s = (d * d - T::one()).sqrt();
            let tt = t.transpose();
            let mut id = p.scale(&((d - T::one()) / two_d));
            id.add_scaled(&((d + T::one()) / two_d), &pp);
            id.add_scaled(&(s / two_d), &(&t + &tt));
            acc.push(|| format!("{lambda} {nu} id"), self.swap_block(Factor::Id, &lambda, &nu)?.residual(&id));
            let mut sgn = (&p - &pp).scale(&(s / two_d));
            sgn.add_scaled(&((d + T::one()) / two_d), &tt);
            sgn.add_scaled(&(-(d - T::one()) / two_d), &t);
            let got = self.f.transporter_sgn_from_id(&lambda, &nu)?.op;
            acc.push(|| format!("{lambda} {nu} sgn"), got.residual(&sgn));
        }
        Ok(())
    }

    fn blocks(&self) -> Result<Vec<ThetaBlock<T>>> {
        theta_pairs(self.n())
            .into_iter()
            .map(|(eta, theta)| self.f.theta_block(&eta, &theta))
            .collect()
    }

    fn check_e(&self, acc: &mut Acc) -> Result<()> {
        let v13 = self.f.v_swap(0, 2);
        for b in self.blocks()? {
            let l = format!("{} {}", b.eta, b.theta);
            acc.push(|| format!("{l} V12"), (&b.v12 * &b.block).residual(&b.v12_restriction()));
            acc.push(|| format!("{l} V23"), (&b.v23 * &b.block).residual(&b.v23_restriction()));
            let (got, want) = b.overlap();
            acc.push(|| format!("{l} overlap"), (got - want).abs() / want);
            acc.push(|| format!("{l} swaps"), b.chain3[0].residual(&b.id_eta3_via_swaps(&v13)));
        }
        Ok(())
    }

    fn check_f(&self, acc: &mut Acc) -> Result<()> {
        for b in self.blocks()? {
            let l = format!("{} {}", b.eta, b.theta);
            acc.push(|| format!("{l} first"), b.chain12[0].residual(&b.theta_dec1()));
            acc.push(|| format!("{l} second"), b.chain13[0].residual(&b.theta_dec2()));
        }
        Ok(())
    }

    fn padded(&self, p: &Partition, ell: usize, removed: &[usize]) -> Option<Factor> {
        pad(p, self.n(), ell).ok().map(|d| Factor::index(d, removed))
    }

    fn check_g(&self, acc: &mut Acc) -> Result<()> {
        let n = self.n();
        let kmax = construction_k(n);
        let (mut lhs, mut rhs) = (self.f.zero(), self.f.zero());
        let inv_n = Self::lit(1.0 / n as f64);
        for k in 0..kmax {
            let w = Self::lit(construction_weight(n, k));
            for eta in partitions_of(k) {
                let head = self.f.projector_or_zero(&[self.padded(&eta, 3, &[0, 1, 2]), self.padded(&eta, 1, &[0])])?;
                lhs.add_scaled(&w, &head);
                rhs.add_scaled(&inv_n, &head);
                if k == 0 {
                    continue;
                }
                for theta in partitions_of(k - 1).into_iter().filter(|t| eta.contains(t)) {
                    let op = self.f.projector_or_zero(&[
                        self.padded(&theta, 3, &[0, 1, 2]),
                        self.padded(&theta, 2, &[0, 2]),
                        self.padded(&eta, 1, &[0]),
                    ])?;
                    lhs.add_scaled(&w, &op);
                }
            }
            if k >= 1 {
                for theta in partitions_of(k - 1) {
                    let op = self
                        .f
                        .projector_or_zero(&[self.padded(&theta, 3, &[0, 1, 2]), self.padded(&theta, 2, &[0, 2])])?;
                    rhs.add_scaled(&w, &op);
                }
            }
        }
        acc.push(|| format!("K={kmax}"), lhs.residual(&rhs));
        Ok(())
    }

    fn check_h(&self, acc: &mut Acc) -> Result<()> {
        let n = self.n();
        let tr = self.f.space().transversals()?;
        let inv = Self::lit(1.0 / (n as f64 - 1.0));
        for (lambda, nu) in two_box_pairs(n) {
            let mids = intermediates(&lambda, &nu)?;
            for mu in &mids {
                let p = self.f.p_nu_mu(&lambda, &nu, mu)?;
                let lhs = p.conjugation_sum(&tr.r_prime).scale(&inv);
                let rhs = self
                    .f
                    .projector(&[Factor::index(mu.clone(), &[0]), Factor::alphabet(lambda.clone())])?
                    .scale(&Self::lit(dimf(&nu) / dimf(mu)));
                acc.push(|| format!("{lambda} {nu} {mu}"), rhs.residual(&lhs));
            }
            if mids.len() == 2 && relation(&lambda, &nu)?.is_rc() {
                let (t, _) = self.f.transporter_from_v12(&lambda, &nu)?;
                let s = t.op.conjugation_sum(&tr.r_prime);
                acc.push(|| format!("{lambda} {nu} transporter"), s.frobenius() / t.op.frobenius());
            }
        }
        let c = Self::lit(((n - 1) * (n - 2) / 2) as f64);
        for b in self.blocks()? {
            let tb3 = pad(&b.theta, n, 1)?;
            let tb123 = pad(&b.theta, n, 3)?;
            let lhs = b.chain3[2].conjugation_sum(&tr.r_double_prime);
            let rhs = self
                .f
                .projector(&[Factor::alphabet(pad(&b.eta, n, 0)?), Factor::index(tb3.clone(), &[2])])?
                .scale(&(c * Self::lit(dimf(&tb123) / dimf(&tb3))));
            acc.push(|| format!("{} {} index-3 sum", b.eta, b.theta), rhs.residual(&lhs));
        }
        Ok(())
    }

    fn check_i(&self, acc: &mut Acc) -> Result<()> {
        let n = self.n();
        for i in [0, 2] {
            let mask = self.f.delta_mask(i)?;
            for lambda in partitions_of(n) {
                let full = self.full_block(&lambda)?;
                let mut rhs = full.clone();
                let c = dimf(&lambda) / n as f64;
                for mu in crate::partitions::remove_one(&lambda)? {
                    let p = self.f.projector(&[Factor::index(mu.clone(), &[i])])?;
                    rhs.add_scaled(&Self::lit(-c / dimf(&mu)), &p);
                }
                acc.push(|| format!("i={} {lambda}", i + 1), rhs.residual(&full.mask(&mask)));
            }
        }
        Ok(())
    }

    fn check_j(&self, acc: &mut Acc) -> Result<()> {
        let mask = self.f.delta_mask(0)?;
        for (lambda, nu) in rc_pairs(self.n()) {
            let (t, tb) = self.f.transporter_from_v12(&lambda, &nu)?;
            acc.push(|| format!("{lambda} {nu} forward"), t.op.residual(&t.op.mask(&mask)));
            acc.push(|| format!("{lambda} {nu} back"), tb.op.residual(&tb.op.mask(&mask)));
        }
        Ok(())
    }

    fn check_k(&self, acc: &mut Acc) -> Result<()> {
        let n = self.n();
        let id = self.f.projector(&[Factor::Id])?;
        let half_v = self.f.v_swap(0, 1).scale(&Self::lit(0.5));
        acc.push(|| "Pi_id".into(), half_v.residual(&id.mask(&self.f.delta_mask(0)?)));
        let m3 = self.f.delta_mask(2)?;
        for k in 0..construction_k(n).max(1) {
            for theta in partitions_of(k) {
                let base = self.padded(&theta, 3, &[0, 1, 2]);
                for (what, other) in [("theta3", self.padded(&theta, 1, &[2])), ("theta13", self.padded(&theta, 2, &[0, 2]))] {
                    let op = self.f.projector_or_zero(&[base.clone(), other])?;
                    if op.is_zero() {
                        continue;
                    }
                    acc.push(|| format!("{theta} {what}"), op.mask(&m3).frobenius() / op.frobenius());
                }
            }
        }
        Ok(())
    }

    /// Explicit block rescaled so that `‖Δ₁∘Γ'‖ = 1` (`prime`) or `‖Δ₁∘Γ''‖ = 1`.
    fn rescaled(&self, prime: bool) -> Result<(CommutantOperator<T>, CoefficientTable)> {
        let (g, _) = self.explicit()?;
        let norm = if prime {
            adversary::norm_delta1_gamma_prime(&self.f, g)?
        } else {
            adversary::norm_delta1_gamma_doubleprime(&self.f, g)?
        };
        let g = g.scale(&(T::one() / norm));
        let (table, _) = adversary::extract_coeffs(&self.f, &g)?;
        Ok((g, table))
    }

    fn check_l(&self, acc: &mut Acc) -> Result<()> {
        let n = self.n();
        let (g, _) = self.rescaled(true)?;
        let dg = g.mask(&self.f.delta_mask(0)?);
        for (lambda, nu) in two_box_pairs(n) {
            let mids = intermediates(&lambda, &nu)?;
            for mu in &mids {
                for mu2 in &mids {
                    let a = self.f.p_nu_mu(&lambda, &nu, mu)?;
                    let b = self.f.p_nu_mu(&lambda, &nu, mu2)?;
                    let lhs = (&(&a * &dg) * &b).spectral_norm()?.as_f64();
                    let rhs = (dimf(mu2) / ((n as f64 - 1.0) * dimf(&nu))).sqrt();
                    acc.ineq(|| format!("{lambda} {nu} {mu} {mu2}"), lhs, rhs);
                }
            }
        }
        Ok(())
    }

    fn check_m(&self, acc: &mut Acc) -> Result<()> {
        let n = self.n();
        let (g, _) = self.rescaled(true)?;
        for nu in partitions_of(n - 2) {
            for mu in nu.add_one() {
                let lambdas = mu.add_one();
                let value = |lambda: &Partition| -> Result<f64> {
                    let p = self.f.p_nu_mu(lambda, &nu, &mu)?;
                    Ok(p.inner(&g).as_f64() / (dimf(lambda) * dimf(&nu)))
                };
                let rhs = 2.0 * (dimf(&mu) / ((n as f64 - 1.0) * dimf(&nu))).sqrt();
                for (i, l1) in lambdas.iter().enumerate() {
                    for l2 in &lambdas[i + 1..] {
                        let lhs = (value(l1)? - value(l2)?).abs();
                        acc.ineq(|| format!("{nu} {mu} {l1} {l2}"), lhs, rhs);
                    }
                }
            }
        }
        Ok(())
    }

    fn check_n(&self, acc: &mut Acc) -> Result<()> {
        let n = self.n();
        let (_, table) = self.rescaled(true)?;
        for (lambda, nu) in rc_pairs(n) {
            let pair = RcPair::new(&lambda, &nu)?;
            let a_id = table.get(&CoefficientKey::id(lambda.clone(), nu.clone()));
            let a_sgn = table.get(&CoefficientKey::sgn(lambda.clone(), nu.clone()));
            let d = pair.d as f64;
            let s = (d * d - 1.0).sqrt() / (2.0 * d);
            let base = (n as f64 - 1.0) * dimf(&nu);
            let lhs1 = (a_id * s - a_sgn * (d - 1.0) / (2.0 * d)).abs();
            acc.ineq(|| format!("{lambda} {nu} mu"), lhs1, (dimf(&pair.mu) / base).sqrt());
            let lhs2 = (a_id * s + a_sgn * (d + 1.0) / (2.0 * d)).abs();
            acc.ineq(|| format!("{lambda} {nu} mu'"), lhs2, (dimf(&pair.mu_prime) / base).sqrt());
        }
        Ok(())
    }

    fn check_o(&self, acc: &mut Acc) -> Result<()> {
        let n = self.n();
        let (_, table) = self.rescaled(false)?;
        let c = ((n - 1) * (n - 2) / 2) as f64;
        for (eta, theta) in theta_pairs(n) {
            if 2 * theta.size() + 4 > n {
                continue;
            }
            let eb = pad(&eta, n, 0)?;
            let eb12 = pad(&eta, n, 2)?;
            let tb = pad(&theta, n, 0)?;
            let tb12 = pad(&theta, n, 2)?;
            let d = crate::partitions::distance(&eb, &tb12)? as f64;
            let a1 = table.get(&CoefficientKey::id(eb.clone(), eb12));
            let a2 = table.get(&CoefficientKey::id(tb, tb12.clone()));
            let a3 = table.get(&CoefficientKey::id(eb, tb12));
            let lhs = (a1 - a2 + 2.0 * (a3 - a1) / (d * (d - 1.0))).abs();
            let rhs = 2.0 * (dimf(&pad(&theta, n, 1)?) / (c * dimf(&pad(&theta, n, 3)?))).sqrt();
            acc.ineq(|| format!("{eta} {theta}"), lhs, rhs);
        }
        Ok(())
    }

    fn check_p(&self, acc: &mut Acc) -> Result<()> {
        let n = self.n();
        let faults = self.f.faults();
        // single-key tables: ΓᵀΓ = β² Π^λ_λ
        for key in available_keys(n)? {
            let mut t = CoefficientTable::new(n, Basis::Alpha);
            t.insert(key.clone(), 1.0)?;
            let g = build_gamma12_from_coeffs(&self.f, &t)?;
            let gram = adversary::gamma_gram(&self.f, &g.op)?;
            let beta = t.to_basis(Basis::Beta, faults).get(&key);
            let want = self.full_block(&key.lambda)?.scale(&Self::lit(beta * beta));
            acc.push(|| format!("{key} gram"), want.residual(&gram));
        }
        // extracted β of the construction against the per-λ weight of ΓᵀΓ
        let (g, table) = self.explicit()?;
        let beta = table.to_basis(Basis::Beta, faults);
        let gram = adversary::gamma_gram(&self.f, g)?;
        let mut rows = Vec::new();
        for lambda in partitions_of(n) {
            let dim = dimf(&lambda);
            let weight = self.full_block(&lambda)?.inner(&gram).as_f64() / (dim * dim);
            let want: f64 = beta
                .entries
                .iter()
                .filter(|(k, _)| k.lambda == lambda)
                .map(|(_, v)| v * v)
                .sum();
            rows.push((lambda, weight, want));
        }
        let scale = rows.iter().fold(1e-300f64, |m, r| m.max(r.1.abs()).max(r.2.abs()));
        for (lambda, weight, want) in rows {
            acc.push(|| format!("{lambda} weight"), (weight - want).abs() / scale);
        }
        // ‖Δ₁∘B‖ ≤ 2‖B‖ for random Γ-shaped B
        let keys = available_keys(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed);
        for trial in 0..20 {
            let mut t = CoefficientTable::new(n, Basis::Alpha);
            for key in &keys {
                t.insert(key.clone(), rng.random::<f64>() * 2.0 - 1.0)?;
            }
            let g = build_gamma12_from_coeffs(&self.f, &t)?.op;
            let norm = adversary::gamma_norm(&self.f, &g)?.as_f64();
            let delta = adversary::delta_total_gram(&self.f, &g)?.psd_norm()?.as_f64().max(0.0).sqrt();
            acc.push(|| format!("random {trial}"), ((delta - 2.0 * norm) / norm).max(0.0));
        }
        Ok(())
    }
}

/// Runs the selected checks; with more than one worker, checks are spread
/// over threads and merged back in name order.
pub fn run_suite_with<T: Real>(n: usize, selection: &[CheckId], opts: SuiteOptions) -> Result<VerificationReport> {
    let start = Instant::now();
    let workers = opts.workers.max(1);
    let suite = Suite::<T>::new(n, opts.clone())?;
    let mut ids: Vec<CheckId> = selection.to_vec();
    ids.sort();
    ids.dedup();
    let mut results: Vec<Option<Result<CheckRecord>>> = (0..ids.len()).map(|_| None).collect();
    if workers == 1 {
        for (slot, &id) in results.iter_mut().zip(&ids) {
            *slot = Some(suite.run(id));
        }
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let out = std::sync::Mutex::new(&mut results);
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if i >= ids.len() {
                        break;
                    }
                    let r = suite.run(ids[i]);
                    out.lock().unwrap()[i] = Some(r);
                });
            }
        });
    }
    let mut checks = Vec::with_capacity(ids.len());
    for r in results {
        checks.push(r.expect("every check ran")?);
    }
    checks.sort_by(|a, b| a.check.cmp(&b.check));
    Ok(VerificationReport {
        n,
        tol: opts.tol,
        workers,
        faults: opts.faults,
        checks,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

pub fn run_suite(n: usize, tol: f64, selection: &[CheckId]) -> Result<VerificationReport> {
    run_suite_with::<f64>(
        n,
        selection,
        SuiteOptions {
            tol,
            ..SuiteOptions::default()
        },
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub lambda: Partition,
    pub kind: KeyKind,
    pub nu: Partition,
    pub case: usize,
    pub alpha: f64,
    pub beta: f64,
    /// `√(h(λ̂)/h(ν̂))` over the parts below the first row.
    pub hook_constant: f64,
    /// `√(N dim ν / dim λ)`.
    pub dim_constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientReport {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    /// `N^{-1/3}`.
    pub reference: f64,
    pub rows: Vec<CoefficientRow>,
}

impl CoefficientReport {
    pub fn case(&self, case: usize) -> impl Iterator<Item = &CoefficientRow> {
        self.rows.iter().filter(move |r| r.case == case)
    }
}

/// Extracted coefficients of the construction grouped by box case.
pub fn coefficient_report(n: usize) -> Result<CoefficientReport> {
    if !(4..=6).contains(&n) {
        return Err(Error::Capacity {
            what: "coefficient report",
            min: 4,
            max: 6,
            n,
        });
    }
    let f = OperatorFactory::<f64>::new(n)?;
    let (_, alpha) = build_gamma12_explicit(&f)?;
    coefficient_report_for(&alpha)
}

/// Every available key of the table's N, grouped by case, with zeros
/// for keys the table does not touch.
pub fn coefficient_report_for(table: &CoefficientTable) -> Result<CoefficientReport> {
    let n = table.n;
    let alpha = table.to_alpha();
    let beta = table.to_beta();
    let mut rows = Vec::new();
    for key in available_keys(n)? {
        let (lh, nh) = (key.lambda.below_first_row(), key.nu.below_first_row());
        let hook = |p: &Partition| -> f64 {
            use num_traits::ToPrimitive;
            p.hook_product().to_f64().unwrap_or(f64::NAN)
        };
        rows.push(CoefficientRow {
            case: key.case().number(),
            alpha: alpha.get(&key),
            beta: beta.get(&key),
            hook_constant: (hook(&lh) / hook(&nh)).sqrt(),
            dim_constant: (n as f64 * dimf(&key.nu) / dimf(&key.lambda)).sqrt(),
            lambda: key.lambda,
            kind: key.kind,
            nu: key.nu,
        });
    }
    rows.sort_by(|a, b| {
        (a.case, &b.lambda, a.kind, &b.nu).cmp(&(b.case, &a.lambda, b.kind, &a.nu))
    });
    Ok(CoefficientReport {
        n,
        k: construction_k(n),
        reference: (n as f64).powf(-1.0 / 3.0),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_parsing() {
        assert_eq!(parse_selection("all").unwrap().len(), 16);
        assert_eq!(parse_selection("a-h,k").unwrap(), vec![A, B, C, D, E, F, G, H, K]);
        assert_eq!(parse_selection("i, j").unwrap(), vec![I, J]);
        assert_eq!(parse_selection("p_gamma_relation").unwrap(), vec![P]);
        assert!(matches!(parse_selection("z"), Err(Error::UnknownCheck(_))));
        assert!(parse_selection("").is_err());
    }

    #[test]
    fn n4_identities() {
        let r = run_suite(4, 1e-9, &parse_selection("identities").unwrap()).unwrap();
        for c in &r.checks {
            assert_eq!(c.status, Status::Pass, "{c:?}");
            assert!(c.cases > 0, "{c:?}");
        }
    }
}
