use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lhvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lhvlab"))
        .args(args)
        .env_remove("LHVLAB_SEED")
        .output()
        .expect("run lhvlab")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

const PROJ_UP: &str = "[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]]";
const PROJ_DOWN: &str = "[[[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]";

fn write_model(dir: &Path, weights: [f64; 2]) -> String {
    let text = format!(
        r#"{{"atoms":["+","-"],"weights":[{},{}],"site1_states":[{PROJ_UP},{PROJ_DOWN}],"site2_states":[{PROJ_UP},{PROJ_DOWN}]}}"#,
        weights[0], weights[1]
    );
    let path = dir.join("model.json");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn reproduce_eq5_sweeps_101_alphas() {
    let out = lhvlab(&["reproduce-eq5", "--alpha-steps", "101"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 101);
    assert!(rows.iter().all(|r| r["integral"] == 4.0));
    assert_eq!(v["pass"], true);
}

#[test]
fn reproduce_eq5_with_two_steps_covers_endpoints() {
    let out = lhvlab(&["reproduce-eq5", "--alpha-steps", "2", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "alpha,beta,integral,abs_error\n0.0,1.0,4.0,0.0\n1.0,0.0,4.0,0.0\n"
    );
}

#[test]
fn degenerate_config_is_rejected() {
    for args in [
        &["reproduce-eq5", "--tol", "0"][..],
        &["reproduce-eq5", "--alpha-steps", "1"],
        &["verify", "--trials", "0"],
        &["witness", "--alpha", "1.5"],
        &["chsh", "--state", "bell"],
        &["chsh", "--grid-steps", "2"],
        &["witness", "--site1", "x"],
        &["reproduce-eq5", "--format", "xml"],
    ] {
        let out = lhvlab(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn verify_random_models_seed_7() {
    let out = lhvlab(&["verify", "--decomposition", "random", "--trials", "100", "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["models_checked"], 100);
    assert_eq!(v["pairs_checked"], 10_000);
    assert!(v["violations"].as_array().unwrap().is_empty());
    assert!(v["max_abs_error"].as_f64().unwrap() < 1e-9);
}

#[test]
fn verify_reports_unnormalized_weights() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_model(dir.path(), [0.5, 0.6]);
    let out = lhvlab(&["verify", "--decomposition", &path]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    let violations = v["violations"].as_array().unwrap();
    assert_eq!(violations[0]["kind"], "measure");
    assert_eq!(violations[0]["detail"]["kind"], "normalization");
    assert_eq!(v["pass"], false);
}

#[test]
fn verify_accepts_a_valid_model_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_model(dir.path(), [0.25, 0.75]);
    let out = lhvlab(&["verify", "--decomposition", &path, "--trials", "2", "--probes", "10"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["pairs_checked"], 20);
}

#[test]
fn verify_rejects_unreadable_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(&path, "{\"atoms\": [").unwrap();
    assert_eq!(code(&lhvlab(&["verify", "--decomposition", path.to_str().unwrap()])), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(
        code(&lhvlab(&["verify", "--decomposition", missing.to_str().unwrap()])),
        2
    );
}

#[test]
fn verify_flags_an_invalid_conditional_state() {
    let dir = tempfile::tempdir().unwrap();
    let bad = "[[[2.0,0.0],[0.0,0.0]],[[0.0,0.0],[-1.0,0.0]]]";
    let text = format!(r#"{{"atoms":["a"],"weights":[1.0],"site1_states":[{bad}],"site2_states":[{PROJ_UP}]}}"#);
    let path = dir.path().join("bad.json");
    fs::write(&path, text).unwrap();
    let out = lhvlab(&["verify", "--decomposition", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["violations"][0]["kind"], "model");
}

#[test]
fn witness_event_covers_both_atoms() {
    for alpha in ["0.5", "1"] {
        let out = lhvlab(&["witness", "--alpha", alpha]);
        assert_eq!(code(&out), 0);
        let v = json(&out);
        assert_eq!(v["event"], serde_json::json!(["+", "-"]));
        assert_eq!(v["measure"], 1.0);
        assert_eq!(v["commutator_norms"], serde_json::json!([2.0, 2.0]));
        assert_eq!(v["commutators_nonnull"], true);
    }
}

#[test]
fn witness_responses_are_minus_two_and_two() {
    let out = lhvlab(&["witness", "--alpha", "0.5", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "atom,weight,f1,f2,in_event\n+,0.5,-2.0,-2.0,true\n-,0.5,2.0,2.0,true\n"
    );
}

#[test]
fn witness_with_commuting_operators_is_the_null_case() {
    let out = lhvlab(&["witness", "--site1", "z,z", "--site2", "z,z"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["event"], serde_json::json!([]));
    assert_eq!(v["measure"].as_f64().unwrap().to_bits(), 0.0f64.to_bits());
    assert_eq!(v["null_commutator_case"], true);
}

#[test]
fn witness_with_vanishing_responses_fails_with_model_dump() {
    // i[σx, σz] = 2σy has zero expectation in both diagonal product states
    let out = lhvlab(&["witness", "--site1", "x,z", "--site2", "x,z"]);
    assert_eq!(code(&out), 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("site1_states"), "{stderr}");
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn chsh_separable_state_respects_classical_bound() {
    let out = lhvlab(&["chsh", "--state", "u:0.3", "--grid-steps", "24"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["value"].as_f64().unwrap() <= 2.0 + 1e-9);
    assert_eq!(v["lhv_check"]["pass"], true);
    assert!(v["lhv_check"]["abs_diff"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn chsh_singlet_violates_classical_bound() {
    let out = lhvlab(&["chsh", "--state", "singlet", "--grid-steps", "24"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["value"].as_f64().unwrap() >= 2.82);
    assert_eq!(v["exceeds_classical_bound"], true);
    assert_eq!(v["lhv_check"], Value::Null);
}

#[test]
fn chsh_maximally_mixed_is_zero() {
    let out = lhvlab(&["chsh", "--state", "mixed"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["value"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn chsh_writes_scan_csv() {
    let dir = tempfile::tempdir().unwrap();
    let scan = dir.path().join("scan.csv");
    let out = lhvlab(&["chsh", "--grid-steps", "8", "--scan", scan.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&scan).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("theta_a,theta_a_prime,theta_b,theta_b_prime,chsh_value")
    );
    assert_eq!(lines.count(), 64);
    let csv = lhvlab(&["chsh", "--grid-steps", "8", "--format", "csv"]);
    assert_eq!(csv.stdout, text.as_bytes());
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = lhvlab(&[
            "verify",
            "--trials",
            "5",
            "--seed",
            "11",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        assert!(out.stdout.is_empty());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let other = lhvlab(&["verify", "--trials", "5", "--seed", "12"]);
    assert_ne!(other.stdout, fs::read(&a).unwrap());
}

#[test]
fn seed_environment_variable_overrides_flag() {
    let run = |env: Option<&str>, seed: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_lhvlab"));
        cmd.args([
            "verify", "--trials", "3", "--probes", "4", "--seed", seed, "--format", "csv",
        ]);
        match env {
            Some(v) => cmd.env("LHVLAB_SEED", v),
            None => cmd.env_remove("LHVLAB_SEED"),
        };
        cmd.output().unwrap()
    };
    let by_flag = run(None, "99");
    let by_env = run(Some("99"), "1");
    assert_eq!(code(&by_env), 0);
    assert_eq!(by_flag.stdout, by_env.stdout);
    assert_ne!(run(None, "1").stdout, by_env.stdout);
    assert_eq!(code(&run(Some("not-a-seed"), "1")), 2);
}
