use advlab_core::adversary::{construction_k, KeyKind};
use advlab_core::verifier::coefficient_report;
use advlab_core::{Error, Partition};

#[test]
fn case_three_is_untouched() {
    for n in 4..=6 {
        let r = coefficient_report(n).unwrap();
        for row in r.case(3) {
            assert_eq!(row.alpha, 0.0, "N={n} {}/{}", row.lambda, row.nu);
        }
    }
}

#[test]
fn case_one_carries_the_weights() {
    // (N-k, η) over (N-2-k, η) for η ⊢ k has weight (K - k)/N
    for n in 4..=6 {
        let r = coefficient_report(n).unwrap();
        let big_k = construction_k(n) as f64;
        for row in r.case(1) {
            assert_eq!(row.kind, KeyKind::Id);
            let k = (row.lambda.size() - row.lambda.first_row()) as f64;
            let want = ((big_k - k) / n as f64).max(0.0);
            assert!((row.alpha - want).abs() < 1e-12, "N={n} {}: {} vs {want}", row.lambda, row.alpha);
        }
    }
    let r5 = coefficient_report(5).unwrap();
    let alphas: Vec<f64> = r5.case(1).map(|r| r.alpha).collect();
    assert!(alphas.iter().any(|a| (a - 0.6).abs() < 1e-12));
    assert!(alphas.iter().any(|a| (a - 0.4).abs() < 1e-12));
}

#[test]
fn hook_constant_of_one_box_is_one() {
    let r = coefficient_report(5).unwrap();
    let row = r
        .rows
        .iter()
        .find(|x| x.lambda == "(4,1)".parse::<Partition>().unwrap() && x.nu == Partition::single_row(3))
        .unwrap();
    assert_eq!(row.hook_constant, 1.0);
    assert!((r.reference - 5f64.powf(-1.0 / 3.0)).abs() < 1e-15);
}

#[test]
fn report_capacity() {
    assert!(matches!(coefficient_report(7), Err(Error::Capacity { .. })));
}
