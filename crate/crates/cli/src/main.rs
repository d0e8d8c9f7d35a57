//! `advlab`: build, verify, optimise and export adversary matrices.
//!
//! Machine-readable output goes to stdout or `--out`; summaries go to
//! stderr. Exit codes: 0 success, 1 check failure or runtime error,
//! 2 usage error, 3 capacity error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use advlab_core::adversary::{self, build_gamma12_explicit, fit_loglog, CoefficientTable, LogLogFit, RatioRecord};
use advlab_core::export;
use advlab_core::operators::{parse_chain, Faults, OperatorFactory};
use advlab_core::optimizer::{self, Init, Method, OptimizerConfig};
use advlab_core::partitions::{dim_irrep, partitions_of};
use advlab_core::verifier::{self, parse_selection, SuiteOptions};
use advlab_core::Error;

const ENV_MAX_N: &str = "ADVLAB_MAX_N";
const DEFAULT_MAX_N: usize = 6;
const RATIO_MAX_N: usize = 7;
const PARTITIONS_MAX: usize = 20;

#[derive(Parser, Debug)]
#[command(name = "advlab", version, about = "Adversary matrices for element distinctness over permutation inputs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the partitions of M with their dimensions.
    Partitions {
        #[arg(long = "n")]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Build the explicit Γ₁,₂ block and print its coefficient table.
    Build {
        #[arg(long = "n")]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Norms and ratio of the explicit construction over a range of N.
    Ratio {
        #[arg(long = "n-min", default_value_t = 4)]
        n_min: usize,
        #[arg(long = "n-max", default_value_t = 6)]
        n_max: usize,
        /// Least-squares slope of log ratio against log N.
        #[arg(long)]
        fit: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Run the identity and inequality suite.
    Verify {
        #[arg(long = "n")]
        n: usize,
        /// Checks: letters, names, ranges like a-h, or all, identities, auxiliary, inequalities.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = verifier::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 20)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Deliberately corrupt the construction (negative control).
        #[arg(long, value_enum)]
        fault: Vec<FaultKind>,
        #[command(flatten)]
        out: Output,
    },
    /// Search coefficient tables for a larger ratio.
    Optimize {
        #[arg(long = "n")]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        /// Objective evaluations per restart.
        #[arg(long, default_value_t = 200)]
        budget: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::CoordinateSearch)]
        method: MethodArg,
        /// `explicit`, `random`, or a path to a coefficient table in JSON.
        #[arg(long, default_value = "explicit")]
        init: String,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Extracted coefficients of the construction grouped by box case.
    Report {
        #[arg(long = "n")]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Write an operator as an ADVM matrix file with a JSON sidecar.
    Export {
        #[arg(long = "n")]
        n: usize,
        /// `gamma12`, `mask1`, `mask3`, or a projector chain like `(2,1)_12*^(3,1)`.
        target: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FaultKind {
    Phase,
    Mask,
    Gamma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    CoordinateSearch,
    NelderMead,
}

enum Failure {
    Check(String),
    Usage(String),
    Capacity(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity { .. } => Failure::Capacity(e.to_string()),
            Error::InvalidArgument(_)
            | Error::InvalidDiagram(_)
            | Error::UnknownCheck(_)
            | Error::UnavailableKey(_)
            | Error::SizeMismatch(_)
            | Error::NotRelated { .. }
            | Error::BudgetExhausted => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

/// Ceiling from the environment; it can lower but never raise `default`.
fn ceiling(default: usize) -> CliResult<usize> {
    match std::env::var(ENV_MAX_N) {
        Ok(v) => {
            let m: usize = v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("{ENV_MAX_N}={v:?} is not a number")))?;
            Ok(m.min(default))
        }
        Err(_) => Ok(default),
    }
}

fn check_n(what: &str, n: usize, min: usize, default_max: usize) -> CliResult<()> {
    let max = ceiling(default_max)?;
    if n < min || n > max {
        return Err(Failure::Capacity(format!("{what} supports N in [{min}, {max}], got {n}")));
    }
    Ok(())
}

fn emit(out: &Output, json: &impl Serialize, csv_rows: Option<Vec<Vec<String>>>) -> CliResult<()> {
    let bytes = match out.format {
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(json).map_err(|e| Failure::Runtime(e.to_string()))?;
            s.push(b'\n');
            s
        }
        Format::Csv => {
            let rows = csv_rows.ok_or_else(|| Failure::Usage("csv is not available for this command".into()))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.write_record(&r).map_err(|e| Failure::Runtime(e.to_string()))?;
            }
            w.into_inner().map_err(|e| Failure::Runtime(e.to_string()))?
        }
    };
    match &out.out {
        Some(p) => fs::write(p, bytes)?,
        None => io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn table_rows(t: &CoefficientTable) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["lambda".into(), "kind".into(), "nu".into(), "value".into()]];
    for (k, v) in &t.entries {
        rows.push(vec![k.lambda.to_string(), k.kind.to_string(), k.nu.to_string(), v.to_string()]);
    }
    rows
}

#[derive(Serialize)]
struct PartitionEntry {
    partition: advlab_core::Partition,
    dim: String,
}

fn cmd_partitions(m: usize, out: &Output) -> CliResult<()> {
    if m > PARTITIONS_MAX {
        return Err(Failure::Capacity(format!("partitions supports M in [0, {PARTITIONS_MAX}], got {m}")));
    }
    let list: Vec<PartitionEntry> = partitions_of(m)
        .into_iter()
        .map(|p| PartitionEntry {
            dim: dim_irrep(&p).to_string(),
            partition: p,
        })
        .collect();
    eprintln!("{} partitions of {m}", list.len());
    let mut rows = vec![vec!["partition".to_string(), "dim".to_string()]];
    rows.extend(list.iter().map(|e| vec![e.partition.to_string(), e.dim.clone()]));
    emit(out, &list, Some(rows))
}

#[derive(Serialize)]
struct BuildOutput {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    label: String,
    record: RatioRecord,
    alpha: CoefficientTable,
    beta: CoefficientTable,
}

fn cmd_build(n: usize, out: &Output) -> CliResult<()> {
    check_n("build", n, 4, DEFAULT_MAX_N)?;
    let f = OperatorFactory::<f64>::new(n)?;
    let (g, alpha) = build_gamma12_explicit(&f)?;
    let record = adversary::ratio_of(&f, &g.op, Some(&alpha))?;
    eprintln!(
        "N={n}: {} coefficients, ratio {:.6}",
        alpha.len(),
        record.ratio
    );
    let rows = table_rows(&alpha);
    let beta = alpha.to_beta();
    emit(
        out,
        &BuildOutput {
            n,
            k: adversary::construction_k(n),
            label: g.label.to_string(),
            record,
            alpha,
            beta,
        },
        Some(rows),
    )
}

#[derive(Serialize)]
struct RatioOutput {
    records: Vec<RatioRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<LogLogFit>,
}

fn cmd_ratio(n_min: usize, n_max: usize, fit: bool, out: &Output) -> CliResult<()> {
    if n_min > n_max {
        return Err(Failure::Usage(format!("--n-min {n_min} exceeds --n-max {n_max}")));
    }
    check_n("ratio", n_min, 4, RATIO_MAX_N)?;
    check_n("ratio", n_max, 4, RATIO_MAX_N)?;
    let mut records = Vec::new();
    for n in n_min..=n_max {
        let r = adversary::bound_ratio(n)?;
        eprintln!(
            "N={n}: |G|={:.6} |D'|={:.6} |D''|={:.6} |D|={:.6} ratio={:.6}",
            r.gamma_norm, r.delta_prime, r.delta_doubleprime, r.delta_total, r.ratio
        );
        records.push(r);
    }
    let fit = if fit { fit_loglog(&records) } else { None };
    if let Some(f) = &fit {
        eprintln!("log-log slope {:.4} (rms residual {:.2e})", f.slope, f.residual);
    }
    let mut rows = vec![["N", "gamma_norm", "delta_prime", "delta_doubleprime", "delta_total", "ratio"]
        .map(String::from)
        .to_vec()];
    for r in &records {
        rows.push(vec![
            r.n.to_string(),
            r.gamma_norm.to_string(),
            r.delta_prime.to_string(),
            r.delta_doubleprime.to_string(),
            r.delta_total.to_string(),
            r.ratio.to_string(),
        ]);
    }
    emit(out, &RatioOutput { records, fit }, Some(rows))
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    n: usize,
    suite: &str,
    tol: f64,
    seed: u64,
    workers: usize,
    fault: &[FaultKind],
    out: &Output,
) -> CliResult<()> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
    }
    check_n("verify", n, 4, DEFAULT_MAX_N)?;
    let selection = parse_selection(suite)?;
    let faults = Faults {
        transporter_phase: fault.contains(&FaultKind::Phase),
        mask_index: fault.contains(&FaultKind::Mask),
        gamma_factor: fault.contains(&FaultKind::Gamma),
    };
    let report = verifier::run_suite_with::<f64>(
        n,
        &selection,
        SuiteOptions {
            tol,
            workers,
            faults,
            seed,
        },
    )?;
    for c in &report.checks {
        eprintln!(
            "{:<26} {:?} residual {:.2e} over {} cases",
            c.check, c.status, c.residual, c.cases
        );
    }
    let mut rows = vec![["check", "ref", "residual", "tol", "status", "cases", "worst", "margin"]
        .map(String::from)
        .to_vec()];
    for c in &report.checks {
        rows.push(vec![
            c.check.clone(),
            c.reference.clone(),
            c.residual.to_string(),
            c.tol.to_string(),
            format!("{:?}", c.status).to_lowercase(),
            c.cases.to_string(),
            c.worst.clone(),
            c.margin.map(|m| m.to_string()).unwrap_or_default(),
        ]);
    }
    emit(out, &report, Some(rows))?;
    if report.all_pass() {
        Ok(())
    } else {
        Err(Failure::Check(format!("failed: {}", report.failed().join(", "))))
    }
}

#[derive(Serialize)]
struct OptimizeOutput {
    #[serde(flatten)]
    result: optimizer::OptimizeResult,
    explicit_ratio: f64,
    report: verifier::CoefficientReport,
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    n: usize,
    seed: u64,
    restarts: usize,
    budget: usize,
    method: MethodArg,
    init: &str,
    workers: usize,
    out: &Output,
) -> CliResult<()> {
    check_n("optimize", n, optimizer::MIN_N, optimizer::MAX_N.min(DEFAULT_MAX_N))?;
    let init = match init {
        "explicit" => Init::Explicit,
        "random" => Init::Random,
        path => {
            let text = fs::read_to_string(path)?;
            Init::Given(serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{path}: {e}")))?)
        }
    };
    let config = OptimizerConfig {
        n,
        restarts,
        budget,
        seed,
        method: match method {
            MethodArg::CoordinateSearch => Method::CoordinateSearch,
            MethodArg::NelderMead => Method::NelderMead,
        },
        init,
        workers,
    };
    let result = optimizer::optimize(&config)?;
    let explicit_ratio = adversary::bound_ratio(n)?.ratio;
    eprintln!(
        "N={n}: best ratio {:.6} (restart {}), explicit construction {:.6}",
        result.best_ratio, result.best_restart, explicit_ratio
    );
    let rows = table_rows(&result.best_table);
    let report = verifier::coefficient_report_for(&result.best_table)?;
    emit(
        out,
        &OptimizeOutput {
            result,
            explicit_ratio,
            report,
        },
        Some(rows),
    )
}

fn cmd_report(n: usize, out: &Output) -> CliResult<()> {
    check_n("report", n, 4, DEFAULT_MAX_N)?;
    let report = verifier::coefficient_report(n)?;
    for case in 1..=3 {
        eprintln!("case {case}: {} keys", report.case(case).count());
    }
    let mut rows = vec![["case", "lambda", "kind", "nu", "alpha", "beta", "hook_constant", "dim_constant"]
        .map(String::from)
        .to_vec()];
    for r in &report.rows {
        rows.push(vec![
            r.case.to_string(),
            r.lambda.to_string(),
            r.kind.to_string(),
            r.nu.to_string(),
            r.alpha.to_string(),
            r.beta.to_string(),
            r.hook_constant.to_string(),
            r.dim_constant.to_string(),
        ]);
    }
    emit(out, &report, Some(rows))
}

#[derive(Serialize)]
struct Sidecar {
    format: &'static str,
    #[serde(rename = "N")]
    n: usize,
    target: String,
    label: String,
    shape: [usize; 2],
    bytes: usize,
    sha256: String,
    version: &'static str,
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn cmd_export(n: usize, target: &str, out: &Path) -> CliResult<()> {
    check_n("export", n, 4, DEFAULT_MAX_N)?;
    let f = OperatorFactory::<f64>::new(n)?;
    let (label, op) = match target {
        "gamma12" => {
            let (g, _) = build_gamma12_explicit(&f)?;
            (g.label.to_string(), g.op)
        }
        "mask1" | "mask3" => {
            let i = if target == "mask1" { 0 } else { 2 };
            let mask = f.delta_mask(i)?;
            let kernel = mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
            let op = advlab_core::Operator::from_kernel(f.space(), kernel)?;
            (format!("Delta{}", i + 1), op)
        }
        spec => {
            let chain = parse_chain(spec)
                .map_err(|e| Failure::Usage(format!("unknown operator {spec:?}: {e}")))?;
            let p = f.chained_projector(&chain)?;
            (p.label.to_string(), p.op)
        }
    };
    let m = op.to_dense();
    let mut bytes = Vec::with_capacity(export::file_len(m.nrows(), m.ncols()));
    export::write_matrix(&mut bytes, &m)?;
    fs::write(out, &bytes)?;
    let sidecar = Sidecar {
        format: "ADVM",
        n,
        target: target.to_string(),
        label,
        shape: [m.nrows(), m.ncols()],
        bytes: bytes.len(),
        sha256: hex::encode(Sha256::digest(&bytes)),
        version: env!("CARGO_PKG_VERSION"),
    };
    let json = serde_json::to_string_pretty(&sidecar).map_err(|e| Failure::Runtime(e.to_string()))?;
    fs::write(sidecar_path(out), format!("{json}\n"))?;
    println!("{json}");
    eprintln!("wrote {} ({} bytes)", out.display(), bytes.len());
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Partitions { n, out } => cmd_partitions(n, &out),
        Command::Build { n, out } => cmd_build(n, &out),
        Command::Ratio { n_min, n_max, fit, out } => cmd_ratio(n_min, n_max, fit, &out),
        Command::Verify {
            n,
            suite,
            tol,
            seed,
            workers,
            fault,
            out,
        } => cmd_verify(n, &suite, tol, seed, workers, &fault, &out),
        Command::Optimize {
            n,
            seed,
            restarts,
            budget,
            method,
            init,
            workers,
            out,
        } => cmd_optimize(n, seed, restarts, budget, method, &init, workers, &out),
        Command::Report { n, out } => cmd_report(n, &out),
        Command::Export { n, target, out } => cmd_export(n, &target, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Capacity(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
