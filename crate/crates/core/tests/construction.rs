use advlab_core::adversary::*;
use advlab_core::lift::{select_rows, FullSpace};
use advlab_core::linalg::{projector_rank, spectral_norm};
use advlab_core::operators::{Factor, Faults, OperatorFactory};
use advlab_core::partitions::partitions_of;
use advlab_core::{Error, Partition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(s: &str) -> Partition {
    s.parse().unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn isotypic_ranks_are_squared_dimensions() {
    for n in [4, 5] {
        let f = OperatorFactory::<f64>::new(n).unwrap();
        for lam in partitions_of(n) {
            let pr = f
                .chained_projector(&[Factor::index(lam.clone(), &[]), Factor::alphabet(lam.clone())])
                .unwrap();
            let d = lam.dim() as usize;
            assert_eq!(projector_rank(&pr.op.to_dense(), 1e-6).unwrap(), d * d, "N={n} {lam}");
        }
    }
}

#[test]
fn closed_forms_match_the_full_lift() {
    for n in [4, 5] {
        let f = OperatorFactory::<f64>::new(n).unwrap();
        let (g, table) = build_gamma12_explicit(&f).unwrap();
        let full = FullSpace::new(n).unwrap();
        let gamma = full.lift_gamma(&g.op.to_dense()).unwrap();
        let masked = gamma.component_mul(&full.delta_mask::<f64>(0));
        let dense_gamma = spectral_norm(&gamma).unwrap();
        let dense_prime = spectral_norm(&select_rows(&masked, &full.prime_rows())).unwrap();
        let dense_dprime = spectral_norm(&select_rows(&masked, &full.double_prime_rows())).unwrap();
        let dense_total = spectral_norm(&masked).unwrap();

        assert!(rel(gamma_norm_closed(&table), dense_gamma) < 1e-8, "N={n}");
        assert!(rel(gamma_norm(&f, &g.op).unwrap(), dense_gamma) < 1e-8);
        assert!(rel(norm_delta1_gamma_prime(&f, &g.op).unwrap(), dense_prime) < 1e-8);
        assert!(rel(norm_delta1_gamma_doubleprime(&f, &g.op).unwrap(), dense_dprime) < 1e-8);
        let r = ratio_of(&f, &g.op, Some(&table)).unwrap();
        assert!(rel(r.delta_total, dense_total) < 1e-8);
        assert!(rel(r.ratio, dense_gamma / dense_total) < 1e-8);

        // every index gives the same masked norm
        for i in 1..n {
            let other = spectral_norm(&gamma.component_mul(&full.delta_mask::<f64>(i))).unwrap();
            assert!(rel(other, dense_total) < 1e-9, "N={n} i={i}");
        }
    }
}

#[test]
fn gamma_relation_on_extracted_coefficients() {
    for n in [4, 5] {
        let f = OperatorFactory::<f64>::new(n).unwrap();
        let (g, _) = build_gamma12_explicit(&f).unwrap();
        let (alpha, residual) = extract_coeffs(&f, &g.op).unwrap();
        assert!(residual < 1e-10);
        let beta = alpha.to_beta();
        let pairs = (n * (n - 1) / 2) as f64;
        for (key, &a) in &alpha.entries {
            let want = (pairs * key.nu.dim() as f64 / key.lambda.dim() as f64).sqrt();
            assert!(rel(beta.get(key) / a, want) < 1e-9, "N={n} {key}");
        }
    }
}

#[test]
fn explicit_construction_examples() {
    let f = OperatorFactory::<f64>::new(4).unwrap();
    let (g, table) = build_gamma12_explicit(&f).unwrap();
    assert!((table.get(&CoefficientKey::id(p("(4)"), p("(2)"))) - 0.75).abs() < 1e-12);
    let (_, sgn) = f.pi_id_sgn();
    assert!((&g.op * &sgn.op).frobenius() < 1e-12);
    assert!(gamma_norm_closed(&table) >= 6f64.sqrt() * 0.75 - 1e-12);
    // only k = 0 and k = 1 survive the padding at N = 4
    assert!(construction_terms(4).0.iter().all(|t| t.k <= 1));

    let f5 = OperatorFactory::<f64>::new(5).unwrap();
    let (_, t5) = build_gamma12_explicit(&f5).unwrap();
    assert!((t5.get(&CoefficientKey::id(p("(5)"), p("(3)"))) - 0.6).abs() < 1e-12);
}

#[test]
fn table_round_trip_and_errors() {
    let f = OperatorFactory::<f64>::new(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut t = CoefficientTable::new(4, Basis::Alpha);
    for key in available_keys(4).unwrap() {
        t.insert(key, rng.random::<f64>() - 0.5).unwrap();
    }
    let g = build_gamma12_from_coeffs(&f, &t).unwrap();
    let (back, residual) = extract_coeffs(&f, &g.op).unwrap();
    assert!(back.max_deviation(&t) < 1e-9 && residual < 1e-9);

    let empty = build_gamma12_from_coeffs(&f, &CoefficientTable::new(4, Basis::Alpha)).unwrap();
    assert!(empty.op.is_zero());
    assert!(matches!(ratio_of(&f, &empty.op, None), Err(Error::ZeroTable)));

    let mut bad = CoefficientTable::new(4, Basis::Alpha);
    assert!(bad.insert(CoefficientKey::sgn(p("(4)"), p("(2)")), 1.0).is_err());
    assert!(bad.insert(CoefficientKey::id(p("(2,1,1)"), p("(2)")), 1.0).is_err());

    let single = {
        let mut s = CoefficientTable::new(4, Basis::Beta);
        s.insert(CoefficientKey::id(p("(3,1)"), p("(2)")), -2.5).unwrap();
        s
    };
    assert_eq!(gamma_norm_closed(&single), 2.5);

    let json = serde_json_round_trip(&t);
    assert_eq!(json, t);
}

fn serde_json_round_trip(t: &CoefficientTable) -> CoefficientTable {
    serde_json::from_str(&serde_json::to_string(t).unwrap()).unwrap()
}

#[test]
fn uniform_block_has_rank_one() {
    let f = OperatorFactory::<f64>::new(4).unwrap();
    let mut t = CoefficientTable::new(4, Basis::Alpha);
    t.insert(CoefficientKey::id(p("(4)"), p("(2)")), 1.0).unwrap();
    let g = build_gamma12_from_coeffs(&f, &t).unwrap();
    assert_eq!(projector_rank(&g.op.to_dense(), 1e-9).unwrap(), 1);
}

#[test]
fn gamma_factor_fault_changes_conversion() {
    let (l, nu) = (p("(3,1)"), p("(2)"));
    let good = gamma_factor(4, &l, &nu, Faults::default());
    let bad = gamma_factor(
        4,
        &l,
        &nu,
        Faults {
            gamma_factor: true,
            ..Faults::default()
        },
    );
    assert!((good - 2f64.sqrt()).abs() < 1e-12 && (bad - 18f64.sqrt()).abs() < 1e-12);
}

#[test]
fn bounded_capacity() {
    assert!(matches!(bound_ratio(3), Err(Error::Capacity { .. })));
    assert!(matches!(bound_ratio(8), Err(Error::Capacity { .. })));
}

#[test]
fn approximate_action_proxy_stays_below_one() {
    for n in 5..=7 {
        let f = OperatorFactory::<f64>::new(n).unwrap();
        let v = approximate_delta_prime_norm(&f).unwrap();
        assert!(v <= 1.0, "N={n}: {v}");
    }
}
