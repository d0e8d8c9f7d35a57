//! One line per acceptance criterion; exits nonzero if any fails.

use advlab_core::adversary::*;
use advlab_core::lift::{select_rows, FullSpace};
use advlab_core::linalg::{projector_rank, spectral_norm};
use advlab_core::operators::{Factor, Faults, OperatorFactory};
use advlab_core::optimizer::{optimize, OptimizerConfig};
use advlab_core::partitions::{dim_fraction_gap_exact, dim_irrep, pad, partitions_of};
use advlab_core::perm::factorial;
use advlab_core::verifier::{parse_selection, run_suite, run_suite_with, SuiteOptions};
use advlab_core::Partition;
use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Deserialize;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn failed_checks(n: usize, sel: &str, faults: Faults) -> Vec<String> {
    let opts = SuiteOptions {
        faults,
        ..SuiteOptions::default()
    };
    let r = run_suite_with::<f64>(n, &parse_selection(sel).unwrap(), opts).unwrap();
    r.failed().into_iter().map(String::from).collect()
}

fn criterion_1() -> Outcome {
    let five = run_suite(5, 1e-9, &parse_selection("a-k,p").unwrap()).map_err(|e| e.to_string())?;
    let six = run_suite(6, 1e-9, &parse_selection("a-h,k").unwrap()).map_err(|e| e.to_string())?;
    let mut failed: Vec<String> = five.failed().iter().map(|c| format!("N=5 {c}")).collect();
    failed.extend(six.failed().iter().map(|c| format!("N=6 {c}")));
    ensure(
        failed.is_empty(),
        format!("{} checks at N=5, {} at N=6, failed {failed:?}", five.checks.len(), six.checks.len()),
    )
}

fn criterion_2() -> Outcome {
    let mut failed = Vec::new();
    let mut margins = Vec::new();
    for n in [4, 5] {
        failed.extend(failed_checks(n, "i,j", Faults::default()).into_iter().map(|c| format!("N={n} {c}")));
    }
    for n in [5, 6] {
        let r = run_suite(n, 1e-9, &parse_selection("l-o").unwrap()).map_err(|e| e.to_string())?;
        failed.extend(r.failed().into_iter().map(|c| format!("N={n} {c}")));
        margins.extend(r.checks.iter().filter_map(|c| c.margin));
    }
    let min = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure(failed.is_empty(), format!("smallest inequality margin {min:.3e}, failed {failed:?}"))
}

fn criterion_3() -> Outcome {
    let f = OperatorFactory::<f64>::new(4).unwrap();
    let (g, table) = build_gamma12_explicit(&f).unwrap();
    let full = FullSpace::new(4).unwrap();
    let gamma = full.lift_gamma(&g.op.to_dense()).unwrap();
    let masked = gamma.component_mul(&full.delta_mask::<f64>(0));
    let pairs = [
        (gamma_norm_closed(&table), spectral_norm(&gamma).unwrap()),
        (
            norm_delta1_gamma_prime(&f, &g.op).unwrap(),
            spectral_norm(&select_rows(&masked, &full.prime_rows())).unwrap(),
        ),
        (
            norm_delta1_gamma_doubleprime(&f, &g.op).unwrap(),
            spectral_norm(&select_rows(&masked, &full.double_prime_rows())).unwrap(),
        ),
    ];
    let worst = pairs.iter().map(|(a, b)| (a - b).abs() / b).fold(0.0, f64::max);
    ensure(worst <= 1e-8, format!("worst relative difference {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    for m in 0..=10 {
        let total: BigUint = partitions_of(m).iter().map(|q| dim_irrep(q).pow(2)).sum();
        if total != BigUint::from(factorial(m)) {
            return Err(format!("sum of squared dimensions wrong at M={m}"));
        }
    }
    for n in [4, 5] {
        let f = OperatorFactory::<f64>::new(n).unwrap();
        for lam in partitions_of(n) {
            let p = f
                .projector(&[Factor::index(lam.clone(), &[]), Factor::alphabet(lam.clone())])
                .unwrap();
            let d = lam.dim() as usize;
            if projector_rank(&p.to_dense(), 1e-6).unwrap() != d * d {
                return Err(format!("rank of the {lam} block at N={n}"));
            }
        }
    }
    // the eleven rows and four columns of the table, as (N - a, rest)
    let rows: [(usize, &[usize]); 11] = [
        (0, &[]),
        (1, &[1]),
        (2, &[2]),
        (2, &[1, 1]),
        (3, &[3]),
        (3, &[2, 1]),
        (3, &[1, 1, 1]),
        (4, &[4]),
        (4, &[3, 1]),
        (4, &[2, 2]),
        (4, &[2, 1, 1]),
    ];
    let cols: [(usize, &[usize]); 4] = [(2, &[]), (3, &[1]), (4, &[2]), (4, &[1, 1])];
    let marks = [
        "s...", "ds..", "sds.", ".d.s", ".sd.", ".ddd", "...d", "..s.", "..ds", "..s.", "...d",
    ];
    let diagram = |n: usize, a: usize, rest: &[usize]| {
        let mut v = vec![n - a];
        v.extend_from_slice(rest);
        Partition::new(v).unwrap()
    };
    for n in 8..=12 {
        let table = availability_table(n).unwrap();
        for ((a, rest), mark) in rows.iter().zip(marks) {
            for ((b, nrest), want) in cols.iter().zip(mark.chars()) {
                let (lambda, nu) = (diagram(n, *a, rest), diagram(n, *b, nrest));
                let got = match table.iter().find(|e| e.lambda == lambda && e.nu == nu) {
                    None => '.',
                    Some(e) if e.availability == Availability::Single => 's',
                    Some(_) => 'd',
                };
                if got != want {
                    return Err(format!("N={n} {lambda}/{nu}: got {got}, want {want}"));
                }
            }
        }
    }
    Ok("dimension sums to M=10, ranks at N=4,5, availability pattern at N=8..12".into())
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    let mut skipped = 0;
    for n in 2..=30usize {
        for k in 0..=n / 2 {
            let bound = BigRational::new((2 * k).into(), n.into());
            for delta in partitions_of(k) {
                if pad(&delta, n, 1).is_err() {
                    skipped += 1;
                    continue;
                }
                let gap = dim_fraction_gap_exact(&delta, n).unwrap();
                if gap > bound {
                    return Err(format!("delta={delta} N={n}: {gap} > {bound}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} exact cases, {skipped} without a valid padding"))
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    for n in [4, 5] {
        let f = OperatorFactory::<f64>::new(n).unwrap();
        let (_, alpha) = build_gamma12_explicit(&f).unwrap();
        let beta = alpha.to_beta();
        let pairs = (n * (n - 1) / 2) as f64;
        for (key, &a) in &alpha.entries {
            let want = (pairs * key.nu.dim() as f64 / key.lambda.dim() as f64).sqrt();
            worst = worst.max((beta.get(key) / a - want).abs() / want);
        }
    }
    ensure(worst <= 1e-9, format!("worst relative deviation {worst:.2e}"))
}

#[derive(Deserialize)]
struct Baseline {
    records: Vec<RatioRecord>,
}

fn criterion_7() -> Outcome {
    let baseline: Baseline =
        serde_json::from_str(include_str!("fixtures/ratio_baseline.json")).map_err(|e| e.to_string())?;
    let records: Vec<RatioRecord> = (4..=7).map(|n| bound_ratio(n).unwrap()).collect();
    let mut problems = Vec::new();
    for (r, b) in records.iter().zip(&baseline.records) {
        if (r.ratio - b.ratio).abs() > 1e-9 * b.ratio || (r.delta_total - b.delta_total).abs() > 1e-9 * b.delta_total {
            problems.push(format!("N={} drifted from the baseline", r.n));
        }
    }
    if !records.windows(2).all(|w| w[1].ratio > w[0].ratio) {
        problems.push("ratio not strictly increasing".into());
    }
    // non-increasing for N > 5, within the multiplicative slack
    let beyond: Vec<&RatioRecord> = records.iter().filter(|r| r.n > 5).collect();
    for w in beyond.windows(2) {
        if w[1].delta_total > 1.15 * w[0].delta_total {
            problems.push(format!("delta grows from N={} to N={}", w[0].n, w[1].n));
        }
    }
    let fit = fit_loglog(&records).unwrap();
    if !(0.4..=0.9).contains(&fit.slope) {
        problems.push(format!("slope {:.3} outside [0.4, 0.9]", fit.slope));
    }
    let jump = records[2].delta_total / records[1].delta_total;
    ensure(
        problems.is_empty(),
        format!(
            "ratios {:?}, slope {:.3}; delta N=5->6 factor {jump:.3} (outside the N>5 window) {problems:?}",
            records.iter().map(|r| (r.ratio * 1e4).round() / 1e4).collect::<Vec<_>>(),
            fit.slope
        ),
    )
}

fn criterion_8() -> Outcome {
    let explicit = bound_ratio(4).unwrap().ratio;
    let config = OptimizerConfig {
        budget: 2000,
        restarts: 4,
        seed: 1,
        ..OptimizerConfig::new(4)
    };
    let a = optimize(&config).map_err(|e| e.to_string())?;
    let b = optimize(&config).map_err(|e| e.to_string())?;
    ensure(
        a.best_ratio >= explicit && a.best_ratio == b.best_ratio && a.best_table == b.best_table,
        format!("best {:.6} vs explicit {explicit:.6}, repeat run identical: {}", a.best_ratio, a.best_table == b.best_table),
    )
}

fn criterion_9() -> Outcome {
    let controls = [
        (
            "transporter phase",
            Faults {
                transporter_phase: true,
                ..Faults::default()
            },
        ),
        (
            "mask index",
            Faults {
                mask_index: true,
                ..Faults::default()
            },
        ),
        (
            "gamma factor",
            Faults {
                gamma_factor: true,
                ..Faults::default()
            },
        ),
    ];
    let mut details = Vec::new();
    let mut ok = true;
    for (name, faults) in controls {
        let failed = failed_checks(5, "all", faults);
        ok &= !failed.is_empty();
        details.push(format!("{name} -> {failed:?}"));
    }
    ensure(ok, details.join("; "))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("identity suite", criterion_1),
        ("auxiliary suite", criterion_2),
        ("oracle equivalence", criterion_3),
        ("structural counts", criterion_4),
        ("dimension gap sweep", criterion_5),
        ("gamma relation", criterion_6),
        ("trend", criterion_7),
        ("optimizer", criterion_8),
        ("negative controls", criterion_9),
    ];
    let mut failures = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(d) => println!("criterion {} ({name}): PASS: {d}", i + 1),
            Err(d) => {
                println!("criterion {} ({name}): FAIL: {d}", i + 1);
                failures.push(i + 1);
            }
        }
    }
    if !failures.is_empty() {
        println!("failing criteria {failures:?}");
        std::process::exit(1);
    }
}
