use std::process::Command;

use wreathcount::cli::dispatch;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["wreathcount"];
    argv.extend_from_slice(args);
    let code = dispatch(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> serde_json::Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn exponents_and_invariants_json() {
    let e = json(&["exponents", "--shape", "2,2"]);
    assert_eq!(e["thmA_exponent"], "3/8");
    assert_eq!(e["delta"], "3/8");
    let i = json(&["invariants", "--shape", "2,2"]);
    assert_eq!(i["order"], 8);
    assert_eq!(i["a"], "1");
    assert_eq!(i["class_count"], 5);
}

#[test]
fn compose_and_certify_json() {
    let c = json(&["compose", "--shape", "2,2", "--alpha", "0,0,0,-2"]);
    assert_eq!(c["lower"][1], "x^4 - 2");
    assert_eq!(c["upper"][1], "x^2 - 2");
    assert_eq!(c["psi_prime"]["constants"][0], "0");
    let r = json(&["certify", "--shape", "2,2", "--alpha", "0,0,0,-2", "--mode", "exact"]);
    assert_eq!(r["verdict"], "CertifiedEqual");
    let r = json(&["certify", "--shape", "2,2", "--alpha", "0,0,0,-2", "--mode", "stat", "--seed", "3"]);
    assert_eq!(r["verdict"], "ConsistentWithW");
}

#[test]
fn csv_commands_stream_to_stdout() {
    let (code, out, _) = run(&["frobenius", "--shape", "2,2", "--alpha", "0,0,0,-2", "--primes-up-to", "20", "--out", "-"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("p,leaf_type,level_type_1"));
    assert_eq!(lines.next(), Some("3,\"2,2\",2"));
    let (code, out, _) = run(&["density", "--shape", "2", "--ygrid", "1,2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("Y,box_size,n_certified,fraction"));
    assert_eq!(out.lines().count(), 3);
    let (code, out, _) = run(&["boxstats", "--shape", "2,2", "--Y", "2,3", "--samples", "50"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("Y,count,measured_C1,measured_C2\n2,13365,"));
}

#[test]
fn count_then_report_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("counts.csv");
    let p = path.to_str().unwrap();
    let (code, out, err) = run(&["count", "--shape", "2,2", "--ymax", "2", "--xgrid", "1e2,1e3,3e3,1e4,3e4,1e5", "--out", p]);
    assert_eq!(code, 0, "{err}");
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("X,n_fields,min_disc,max_disc"));
    let (code, out, _) = run(&["report", "--in", p, "--shape", "2,2"]);
    assert!(code == 0 || code == 1);
    let r: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["thmA_exponent"], "3/8");
    assert_eq!(r["verdict"].as_bool().unwrap(), code == 0);
}

#[test]
fn config_file_is_read_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "shape = 2,3\nseed = 4\n").unwrap();
    let c = cfg.to_str().unwrap();
    let i = json(&["--config", c, "invariants"]);
    assert_eq!(i["order"], 48);
    let i = json(&["--config", c, "invariants", "--shape", "2,2"]);
    assert_eq!(i["order"], 8);
    std::fs::write(&cfg, "tau = 2\n").unwrap();
    assert_eq!(run(&["--config", c, "exponents", "--shape", "2"]).0, 2);
}

#[test]
fn usage_errors_exit_two_without_stdout() {
    for args in [
        &["--bogus"][..],
        &["frobnicate"],
        &["exponents"],
        &["invariants", "--shape", "1,2"],
        &["compose", "--shape", "2,2", "--alpha", "1,2"],
    ] {
        let (code, out, err) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty());
        assert!(!err.is_empty());
    }
}

#[test]
fn selftest_passes_and_detects_an_injected_fault() {
    let (code, out, _) = run(&["selftest", "--quick"]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = run(&["selftest", "--quick", "--inject-fault"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL Chebotarev consistency"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_wreathcount");
    let ok = Command::new(bin).args(["exponents", "--shape", "2,2"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("\"thmA_exponent\": \"3/8\""));
    let bad = Command::new(bin).arg("--nope").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["density", "--shape", "2,2", "--ygrid", "1,3", "--seed", "11"];
    let (_, a, _) = run(&args);
    let (_, b, _) = run(&[&args[..], &["--workers", "2"]].concat());
    assert_eq!(a, b);
}
