//! Derivative-free search over β-tables for the largest ratio
//! `‖Γ‖ / ‖Δ₁∘Γ‖`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{
    self, available_keys, build_gamma12_explicit, gamma_factor, key_operator, Basis, CoefficientKey,
    CoefficientTable,
};
use crate::commutant::CommutantOperator;
use crate::error::{Error, Result};
use crate::operators::{Faults, OperatorFactory};
use crate::partitions::Partition;
use crate::scalar::Real;

pub const MIN_N: usize = 4;
pub const MAX_N: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    CoordinateSearch,
    NelderMead,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Init {
    Explicit,
    Random,
    Given(CoefficientTable),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub restarts: usize,
    /// Objective evaluations per restart.
    pub budget: usize,
    pub seed: u64,
    pub method: Method,
    pub init: Init,
    pub workers: usize,
}

impl OptimizerConfig {
    pub fn new(n: usize) -> Self {
        OptimizerConfig {
            n,
            restarts: 1,
            budget: 200,
            seed: 0,
            method: Method::CoordinateSearch,
            init: Init::Explicit,
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_N..=MAX_N).contains(&self.n) {
            return Err(Error::Capacity {
                what: "optimizer",
                min: MIN_N,
                max: MAX_N,
                n: self.n,
            });
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(Error::BudgetExhausted);
        }
        if let Init::Given(t) = &self.init {
            if t.n != self.n {
                return Err(Error::SizeMismatch(format!("table for N={} with N={}", t.n, self.n)));
            }
        }
        Ok(())
    }
}

/// The ratio as a function of the β vector over a fixed key order.
pub struct Objective<T> {
    factory: OperatorFactory<T>,
    keys: Vec<CoefficientKey>,
    /// Basis operator of each key divided by its γ factor.
    ops: Vec<CommutantOperator<T>>,
}

impl<T: Real> Objective<T> {
    pub fn new(n: usize) -> Result<Self> {
        let factory = OperatorFactory::new(n)?;
        let keys = available_keys(n)?;
        let ops = keys
            .iter()
            .map(|k| {
                let g = gamma_factor(n, &k.lambda, &k.nu, Faults::default());
                Ok(key_operator(&factory, k)?.scale(&T::lit(1.0 / g)))
            })
            .collect::<Result<_>>()?;
        Ok(Objective { factory, keys, ops })
    }

    pub fn n(&self) -> usize {
        self.factory.n()
    }

    pub fn factory(&self) -> &OperatorFactory<T> {
        &self.factory
    }

    pub fn keys(&self) -> &[CoefficientKey] {
        &self.keys
    }

    pub fn dim(&self) -> usize {
        self.keys.len()
    }

    pub fn to_vector(&self, table: &CoefficientTable) -> Vec<f64> {
        let beta = table.to_beta();
        self.keys.iter().map(|k| beta.get(k)).collect()
    }

    pub fn to_table(&self, x: &[f64]) -> CoefficientTable {
        let mut t = CoefficientTable::new(self.n(), Basis::Beta);
        for (k, &v) in self.keys.iter().zip(x) {
            if v != 0.0 {
                t.entries.insert(k.clone(), v);
            }
        }
        t
    }

    fn gamma_norm(&self, x: &[f64]) -> f64 {
        let mut per: std::collections::BTreeMap<&Partition, f64> = Default::default();
        for (k, v) in self.keys.iter().zip(x) {
            *per.entry(&k.lambda).or_default() += v * v;
        }
        per.values().fold(0.0f64, |m, &s| m.max(s)).sqrt()
    }

    /// `‖Δ₁∘Γ‖` of the β vector.
    pub fn delta_norm(&self, x: &[f64]) -> Result<f64> {
        let mut g = self.factory.zero();
        for (op, &v) in self.ops.iter().zip(x) {
            if v != 0.0 {
                g.add_scaled(&T::lit(v), op);
            }
        }
        let gram = adversary::delta_total_gram(&self.factory, &g)?;
        Ok(gram.psd_norm()?.as_f64().max(0.0).sqrt())
    }

    pub fn ratio(&self, x: &[f64]) -> Result<f64> {
        let gamma = self.gamma_norm(x);
        if gamma == 0.0 {
            return Err(Error::ZeroTable);
        }
        let delta = self.delta_norm(x)?;
        if delta == 0.0 {
            return Err(Error::ZeroTable);
        }
        Ok(gamma / delta)
    }
}

/// `gamma_norm_closed / delta_norm` of a table.
pub fn evaluate_objective(table: &CoefficientTable) -> Result<f64> {
    if table.is_zero() {
        return Err(Error::ZeroTable);
    }
    let obj = Objective::<f64>::new(table.n)?;
    obj.ratio(&obj.to_vector(table))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub restart: usize,
    /// Evaluation index within the restart, from 1.
    pub evaluation: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartResult {
    pub restart: usize,
    pub initial_ratio: f64,
    pub best_ratio: f64,
    pub evaluations: usize,
    pub best: Vec<f64>,
    pub improvements: Vec<TracePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub config: OptimizerConfig,
    pub best_ratio: f64,
    pub best_restart: usize,
    /// β-table rescaled so that `‖Δ₁∘Γ‖ = 1`; its `‖Γ‖` equals the ratio.
    pub best_table: CoefficientTable,
    pub initial_ratio: f64,
    /// Running best over restarts in index order; non-decreasing.
    pub trace: Vec<TracePoint>,
    pub restarts: Vec<RestartResult>,
}

struct Counter<'a, T> {
    obj: &'a Objective<T>,
    budget: usize,
    used: usize,
    restart: usize,
    best: f64,
    best_x: Vec<f64>,
    improvements: Vec<TracePoint>,
}

impl<T: Real> Counter<'_, T> {
    fn exhausted(&self) -> bool {
        self.used >= self.budget
    }

    /// Ratio of `x`, or `None` once the budget is spent.
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.exhausted() {
            return None;
        }
        self.used += 1;
        let r = match self.obj.ratio(x) {
            Ok(r) if r.is_finite() => r,
            Ok(_) | Err(_) => f64::NEG_INFINITY,
        };
        if r > self.best {
            self.best = r;
            self.best_x = x.to_vec();
            self.improvements.push(TracePoint {
                restart: self.restart,
                evaluation: self.used,
                ratio: r,
            });
        }
        Some(r)
    }
}

fn scale_of(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-3)
}

fn coordinate_search<T: Real>(c: &mut Counter<'_, T>, x0: Vec<f64>, fx0: f64) {
    let mut x = x0;
    let mut fx = fx0;
    let mut step = 0.25 * scale_of(&x);
    let floor = 1e-7 * scale_of(&x);
    while step > floor && !c.exhausted() {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] += dir * step;
                let Some(fy) = c.eval(&y) else { return };
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
}

fn nelder_mead<T: Real>(c: &mut Counter<'_, T>, x0: Vec<f64>, fx0: f64) {
    let dim = x0.len();
    let step = 0.25 * scale_of(&x0);
    // maximize f by minimizing -f
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.clone(), -fx0)];
    for i in 0..dim {
        let mut y = x0.clone();
        y[i] += step;
        let Some(fy) = c.eval(&y) else { return };
        simplex.push((y, -fy));
    }
    let sort = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    loop {
        sort(&mut simplex);
        let spread = simplex[dim].1 - simplex[0].1;
        if spread.abs() < 1e-12 * simplex[0].1.abs().max(1.0) {
            return;
        }
        let mut centroid = vec![0.0; dim];
        for (p, _) in &simplex[..dim] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let refl = lerp(&centroid, &worst.0, -1.0);
        let Some(fr) = c.eval(&refl).map(|v| -v) else { return };
        if fr < simplex[0].1 {
            let exp = lerp(&centroid, &worst.0, -2.0);
            let Some(fe) = c.eval(&exp).map(|v| -v) else { return };
            simplex[dim] = if fe < fr { (exp, fe) } else { (refl, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (refl, fr);
        } else {
            let (target, ft) = if fr < worst.1 { (&refl, fr) } else { (&worst.0, worst.1) };
            let con = lerp(&centroid, target, 0.5);
            let Some(fc) = c.eval(&con).map(|v| -v) else { return };
            if fc < ft {
                simplex[dim] = (con, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let y = lerp(&best, &entry.0, 0.5);
                    let Some(fy) = c.eval(&y).map(|v| -v) else { return };
                    *entry = (y, fy);
                }
            }
        }
    }
}

fn start_point<T: Real>(obj: &Objective<T>, config: &OptimizerConfig, base: &[f64], restart: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(restart as u64);
    let random = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..obj.dim()).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect() };
    match (&config.init, restart) {
        (Init::Random, _) => random(&mut rng),
        (_, 0) => base.to_vec(),
        _ => {
            let s = 0.5 * scale_of(base);
            base.iter().map(|v| v + s * (rng.random::<f64>() * 2.0 - 1.0)).collect()
        }
    }
}

fn run_restart<T: Real>(obj: &Objective<T>, config: &OptimizerConfig, base: &[f64], restart: usize) -> RestartResult {
    let x0 = start_point(obj, config, base, restart);
    let mut c = Counter {
        obj,
        budget: config.budget,
        used: 0,
        restart,
        best: f64::NEG_INFINITY,
        best_x: x0.clone(),
        improvements: Vec::new(),
    };
    let f0 = c.eval(&x0).expect("budget is at least 1");
    match config.method {
        Method::CoordinateSearch => coordinate_search(&mut c, x0, f0),
        Method::NelderMead => nelder_mead(&mut c, x0, f0),
    }
    RestartResult {
        restart,
        initial_ratio: f0,
        best_ratio: c.best,
        evaluations: c.used,
        best: c.best_x,
        improvements: c.improvements,
    }
}

/// Runs all restarts and keeps the best; ties go to the lowest restart index.
pub fn optimize(config: &OptimizerConfig) -> Result<OptimizeResult> {
    config.validate()?;
    let obj = Objective::<f64>::new(config.n)?;
    let base = match &config.init {
        Init::Explicit => {
            let (_, t) = build_gamma12_explicit(obj.factory())?;
            obj.to_vector(&t)
        }
        Init::Given(t) => obj.to_vector(t),
        Init::Random => vec![0.0; obj.dim()],
    };
    let workers = config.workers.max(1).min(config.restarts);
    let mut restarts: Vec<RestartResult> = if workers == 1 {
        (0..config.restarts).map(|r| run_restart(&obj, config, &base, r)).collect()
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let done = std::sync::Mutex::new(Vec::new());
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let r = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if r >= config.restarts {
                        break;
                    }
                    let res = run_restart(&obj, config, &base, r);
                    done.lock().unwrap().push(res);
                });
            }
        });
        done.into_inner().unwrap()
    };
    restarts.sort_by_key(|r| r.restart);
    let mut best_idx = 0;
    for (i, r) in restarts.iter().enumerate() {
        if r.best_ratio > restarts[best_idx].best_ratio {
            best_idx = i;
        }
    }
    let best = &restarts[best_idx];
    if !best.best_ratio.is_finite() {
        return Err(Error::ZeroTable);
    }
    let mut trace = Vec::new();
    let mut running = f64::NEG_INFINITY;
    for r in &restarts {
        for p in &r.improvements {
            if p.ratio > running {
                running = p.ratio;
                trace.push(p.clone());
            }
        }
    }
    let delta = obj.delta_norm(&best.best)?;
    let best_table = obj.to_table(&best.best).scaled(1.0 / delta);
    Ok(OptimizeResult {
        config: config.clone(),
        best_ratio: best.best_ratio,
        best_restart: best.restart,
        best_table,
        initial_ratio: restarts[0].initial_ratio,
        trace,
        restarts,
    })
}
