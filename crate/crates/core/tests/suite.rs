use advlab_core::operators::Faults;
use advlab_core::verifier::*;

fn sel(s: &str) -> Vec<CheckId> {
    parse_selection(s).unwrap()
}

fn assert_pass(report: &VerificationReport) {
    for c in &report.checks {
        assert_eq!(c.status, Status::Pass, "N={} {} residual {:e} at {}", report.n, c.check, c.residual, c.worst);
    }
}

#[test]
fn identities_at_five() {
    let r = run_suite(5, 1e-9, &sel("identities")).unwrap();
    assert_eq!(r.checks.len(), 12);
    assert_pass(&r);
}

#[test]
fn structural_identities_at_six() {
    let r = run_suite(6, 1e-9, &sel("a-h,k")).unwrap();
    assert_eq!(r.checks.len(), 9);
    assert_pass(&r);
}

#[test]
fn auxiliary_identities_at_four_and_five() {
    for n in [4, 5] {
        assert_pass(&run_suite(n, 1e-9, &sel("i,j")).unwrap());
    }
}

#[test]
fn inequalities_at_five_and_six() {
    for n in [5, 6] {
        let r = run_suite(n, 1e-9, &sel("inequalities")).unwrap();
        assert_pass(&r);
        for c in &r.checks {
            assert!(c.margin.unwrap() >= -INEQUALITY_SLACK, "{}", c.check);
            assert!(c.cases > 0, "{} evaluated nothing", c.check);
        }
    }
}

#[test]
fn reports_are_reproducible() {
    let a = run_suite(4, 1e-9, &sel("all")).unwrap();
    let b = run_suite(4, 1e-9, &sel("all")).unwrap();
    let threaded = run_suite_with::<f64>(
        4,
        &sel("all"),
        SuiteOptions {
            workers: 3,
            ..SuiteOptions::default()
        },
    )
    .unwrap();
    assert_pass(&a);
    for ((x, y), z) in a.checks.iter().zip(&b.checks).zip(&threaded.checks) {
        assert_eq!(x.check, y.check);
        assert_eq!(x.check, z.check);
        assert_eq!(x.residual, y.residual);
        assert_eq!(x.status, z.status);
    }
}

#[test]
fn single_precision_passes_at_loose_tolerance() {
    let r = run_suite_with::<f32>(
        4,
        &sel("a-c"),
        SuiteOptions {
            tol: 1e-4,
            ..SuiteOptions::default()
        },
    )
    .unwrap();
    assert_pass(&r);
}

#[test]
fn report_json_has_expected_fields() {
    let r = run_suite(4, 1e-9, &sel("b")).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    let c = &v["checks"][0];
    for field in ["check", "ref", "residual", "tol", "status"] {
        assert!(!c[field].is_null(), "{field}");
    }
    assert_eq!(c["status"], "pass");
    assert_eq!(v["N"], 4);
}

fn failing(n: usize, faults: Faults, checks: &str) -> Vec<String> {
    let r = run_suite_with::<f64>(
        n,
        &sel(checks),
        SuiteOptions {
            faults,
            ..SuiteOptions::default()
        },
    )
    .unwrap();
    r.failed().into_iter().map(String::from).collect()
}

#[test]
fn transporter_phase_fault_is_caught() {
    let f = Faults {
        transporter_phase: true,
        ..Faults::default()
    };
    let failed = failing(5, f, "all");
    assert!(failed.contains(&"d_id_sgn_expansion".to_string()), "{failed:?}");
    assert!(failed.contains(&"n_coefficient_pair_bound".to_string()), "{failed:?}");
}

#[test]
fn mask_index_fault_is_caught() {
    let f = Faults {
        mask_index: true,
        ..Faults::default()
    };
    let failed = failing(5, f, "all");
    for name in ["i_delta_on_projectors", "j_delta_on_transporters", "k_exact_mask_actions"] {
        assert!(failed.contains(&name.to_string()), "{failed:?}");
    }
}

#[test]
fn gamma_factor_fault_is_caught() {
    let f = Faults {
        gamma_factor: true,
        ..Faults::default()
    };
    let failed = failing(4, f, "all");
    assert!(failed.contains(&"p_gamma_relation".to_string()), "{failed:?}");
}
