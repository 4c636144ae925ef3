//! End-to-end checks of the command-line surface: exit codes, JSON report
//! shape, oracle agreement, deterministic fuzzing and the mismatch path.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symcirc"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

#[test]
fn gcd_command_reports_and_agrees() {
    let out = run(&[
        "gcd", "--field", "10007", "--f", "-1,0,1", "--g", "-1,1", "--check",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json_of(&out);
    assert_eq!(report["command"], "gcd");
    assert_eq!(report["oracle_agreement"], true);
    // gcd(y^2 - 1, y - 1) = y - 1, i.e. coefficients [p - 1, 1]
    assert_eq!(report["result"]["coeffs"][0], 10006);
    assert_eq!(report["result"]["coeffs"][1], 1);
    assert_eq!(report["advice"]["r"], 1);
}

#[test]
fn malformed_coefficients_exit_one() {
    let out = run(&["gcd", "--field", "10007", "--f", "1,,2", "--g", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["gcd", "--field", "nope", "--f", "1", "--g", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn resultant_over_extension_field() {
    let out = run(&[
        "resultant", "--field", "2^4", "--f", "1,1,1", "--g", "3,1,0,1", "--check",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json_of(&out);
    assert_eq!(report["oracle_agreement"], true);
    assert!(report["circuit_stats"]["depth"].as_u64().unwrap() > 0);
}

#[test]
fn lcm_command() {
    let out = run(&["lcm", "--field", "7", "--f", "6,1", "--g", "5,1", "--check"]);
    assert!(out.status.success());
    let report = json_of(&out);
    assert_eq!(report["oracle_agreement"], true);
}

#[test]
fn filter_command() {
    // f = (y-1)(y-2)^2, g = y-1 over F_10007: keep (y-2)^2
    let out = run(&[
        "filter", "--field", "10007", "--f", "-4,8,-5,1", "--g", "-1,1", "--cond", "nonzero",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json_of(&out);
    assert_eq!(report["advice"]["r"], 2);
    // (y - 2)^2 = y^2 - 4y + 4
    assert_eq!(report["result"]["coeffs"][0], 4);
    assert_eq!(report["result"]["coeffs"][1], 10003);
    assert_eq!(report["result"]["coeffs"][2], 1);
}

#[test]
fn symdec_example_matches_oracle() {
    let out = run(&[
        "symdec", "--field", "10007", "--example", "powersum3", "--check",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json_of(&out);
    assert_eq!(report["oracle_agreement"], true);
    // z1^3 - 3 z1 z2 + 3 z3
    let terms = report["result"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 3);
}

#[test]
fn rootlift_catalan_prefix() {
    let out = run(&["rootlift", "--field", "10007", "--example", "catalan", "--d", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json_of(&out);
    assert_eq!(report["oracle_agreement"], true);
    let coeffs: Vec<u64> = report["result"]["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(coeffs, vec![0, 1, 1, 2, 5]);
}

#[test]
fn factorpow_instance_roundtrip() {
    // P = (y - t)^2 (y - 1) over F_2, target the squared factor
    let instance = serde_json::json!({
        "p": 2,
        "factors": [
            {"poly": {"vars": 2, "cap": null,
                      "terms": [{"exps": [0, 1], "coeff": 1}, {"exps": [1, 0], "coeff": 1}]},
             "mult": 2},
            {"poly": {"vars": 2, "cap": null,
                      "terms": [{"exps": [0, 1], "coeff": 1}, {"exps": [0, 0], "coeff": 1}]},
             "mult": 1}
        ],
        "target_index": 0,
        "d": 4
    });
    let dir = std::env::temp_dir().join("symcirc-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("instance.json");
    std::fs::write(&path, instance.to_string()).unwrap();
    let arg = format!("@{}", path.display());
    let out = run(&["factorpow", "--instance", &arg, "--check"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json_of(&out);
    assert_eq!(report["oracle_agreement"], true);
    // (y - t)^2 = y^2 + t^2 over F_2
    let terms = report["result"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
}

#[test]
fn fuzz_deterministic_replay() {
    let args = [
        "fuzz", "--suite", "resultant", "--trials", "8", "--seed", "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "seeded fuzzing must be reproducible");
}

#[test]
fn fuzz_detects_injected_bug() {
    let dir = std::env::temp_dir().join("symcirc-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let dump = dir.join("failures.json");
    let _ = std::fs::remove_file(&dump);
    let out = bin()
        .args([
            "fuzz", "--suite", "gcd", "--trials", "3", "--seed", "1",
            "--dump", dump.to_str().unwrap(),
        ])
        .env("SYMCIRC_INJECT_BUG", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "mismatch must exit 2");
    let dumped = std::fs::read_to_string(&dump).expect("failure dump written");
    let failures: serde_json::Value = serde_json::from_str(&dumped).unwrap();
    assert!(!failures.as_array().unwrap().is_empty());
    // the replay file names the suite, seed and trial
    assert_eq!(failures[0]["suite"], "gcd");
    assert_eq!(failures[0]["seed"], 1);
}
