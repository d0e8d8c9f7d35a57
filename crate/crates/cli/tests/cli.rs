use std::fs;
use std::process::{Command, Output};

fn advlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_advlab"))
        .args(args)
        .env_remove("ADVLAB_MAX_N")
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn partitions_lists_dimensions() {
    let out = advlab(&["partitions", "--n", "4"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v.as_array().unwrap().len(), 5);
    assert_eq!(v[1]["partition"], serde_json::json!([3, 1]));
    assert_eq!(v[1]["dim"], "3");
}

#[test]
fn single_ratio_record() {
    let out = advlab(&["ratio", "--n-min", "4", "--n-max", "4"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["records"].as_array().unwrap().len(), 1);
    assert!(v["records"][0]["ratio"].as_f64().unwrap() > 1.0);
    assert!(v.get("fit").is_none());
}

#[test]
fn ratio_csv_and_fit() {
    let out = advlab(&["ratio", "--n-min", "4", "--n-max", "6", "--fit", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "N,gamma_norm,delta_prime,delta_doubleprime,delta_total,ratio");
    assert_eq!(lines.count(), 3);
    assert!(String::from_utf8(out.stderr).unwrap().contains("slope"));

    let out = advlab(&["ratio", "--n-min", "4", "--n-max", "5", "--fit"]);
    let v = json(&out);
    assert!(v["fit"]["slope"].as_f64().unwrap() > 0.0);
    assert!(v["fit"]["residual"].as_f64().is_some());
}

#[test]
fn exit_codes() {
    assert_eq!(advlab(&["ratio", "--n-min", "5", "--n-max", "4"]).status.code(), Some(2));
    assert_eq!(advlab(&["ratio", "--n-min", "4", "--n-max", "8"]).status.code(), Some(3));
    assert_eq!(advlab(&["verify", "--n", "7"]).status.code(), Some(3));
    assert_eq!(advlab(&["verify", "--n", "4", "--tol", "0"]).status.code(), Some(2));
    assert_eq!(advlab(&["verify", "--n", "4", "--suite", "z"]).status.code(), Some(2));
    assert_eq!(advlab(&["bogus"]).status.code(), Some(2));
    assert_eq!(advlab(&["verify", "--n", "4", "--fault", "gamma"]).status.code(), Some(1));
}

#[test]
fn environment_only_lowers_ceilings() {
    let run = |max: &str, args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_advlab"))
            .args(args)
            .env("ADVLAB_MAX_N", max)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(run("4", &["build", "--n", "5"]), Some(3));
    assert_eq!(run("4", &["build", "--n", "4"]), Some(0));
    assert_eq!(run("9", &["build", "--n", "7"]), Some(3));
    assert_eq!(run("nine", &["build", "--n", "4"]), Some(2));
}

#[test]
fn verify_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = advlab(&["verify", "--n", "4", "--suite", "a-c", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
    assert_eq!(v["checks"][0]["check"], "a_regular_decomposition");
}

#[test]
fn export_size_round_trip_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.advm");
    let b = dir.path().join("b.advm");
    for p in [&a, &b] {
        let out = advlab(&["export", "--n", "4", "gamma12", "--out", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes.len(), 8 + 16 + 24 * 24 * 8);
    assert_eq!(bytes, fs::read(&b).unwrap());

    let m = advlab_core::export::load(&a).unwrap();
    let f = advlab_core::operators::OperatorFactory::<f64>::new(4).unwrap();
    let (g, _) = advlab_core::adversary::build_gamma12_explicit(&f).unwrap();
    assert_eq!(m, g.op.to_dense());

    let side: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("a.advm.json")).unwrap()).unwrap();
    assert_eq!(side["shape"], serde_json::json!([24, 24]));
    assert_eq!(side["N"], 4);
    assert_eq!(side["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn export_masks_and_projectors() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.advm");
    assert!(advlab(&["export", "--n", "4", "mask3", "--out", p.to_str().unwrap()]).status.success());
    let m = advlab_core::export::load(&p).unwrap();
    assert!(m.iter().all(|&x| x == 0.0 || x == 1.0));
    assert_eq!(m.sum(), (24 * 18) as f64);

    assert!(advlab(&["export", "--n", "4", "(2,1)_1*^(3,1)", "--out", p.to_str().unwrap()]).status.success());
    assert_eq!(advlab(&["export", "--n", "4", "nonsense", "--out", p.to_str().unwrap()]).status.code(), Some(2));
    let unwritable = dir.path().join("missing").join("x.advm");
    assert_eq!(advlab(&["export", "--n", "4", "mask1", "--out", unwritable.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn optimize_is_seed_deterministic() {
    let args = ["optimize", "--n", "4", "--budget", "300", "--restarts", "2", "--seed", "5", "--workers", "2"];
    let (a, b) = (advlab(&args), advlab(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert!(v["best_ratio"].as_f64().unwrap() >= v["explicit_ratio"].as_f64().unwrap());
    assert_eq!(v["report"]["N"], 4);
}

#[test]
fn report_and_build() {
    let v = json(&advlab(&["report", "--n", "5"]));
    assert_eq!(v["K"], 3);
    let v = json(&advlab(&["build", "--n", "4"]));
    assert!(v["alpha"]["entries"].as_array().is_some());
    assert!(v["record"]["ratio"].as_f64().unwrap() > 1.0);
}
