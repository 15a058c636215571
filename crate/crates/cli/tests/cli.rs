use assert_cmd::Command;
use predicates::prelude::*;

fn thetacert() -> Command {
    let mut c = Command::cargo_bin("thetacert").unwrap();
    c.env_remove("THETACERT_PRECISION");
    c
}

fn json_of(path: &std::path::Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn eval_theta4_at_one() {
    thetacert()
        .args(["eval", "theta4", "--y", "1"])
        .assert()
        .success()
        .stdout(predicate::str::contains("9.1357913815611682140724259340122"));
}

#[test]
fn eval_f_at_ten_is_small_and_positive() {
    let out = thetacert().args(["eval", "f", "--y", "10", "--format", "json"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let enc = &v["results"][0]["enclosure"];
    let lo: f64 = enc["lo"].as_str().unwrap().parse().unwrap();
    let hi: f64 = enc["hi"].as_str().unwrap().parse().unwrap();
    assert!(lo > 0.0 && hi < 1e-10, "{lo} {hi}");
}

#[test]
fn eval_rejects_nonpositive_y() {
    thetacert().args(["eval", "theta4", "--y", "-1"]).assert().code(2);
    thetacert().args(["eval", "theta4", "--y", "0"]).assert().code(2);
    thetacert().args(["eval", "theta4", "--y", "abc"]).assert().code(2);
    thetacert().args(["eval", "theta4", "--y", "1", "--order", "4"]).assert().code(2);
}

#[test]
fn precision_from_environment() {
    let out = thetacert().env("THETACERT_PRECISION", "256").args(["eval", "theta4", "--y", "1"]).output().unwrap();
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("9.135791381561168214072425934012220897"), "{s}");
    thetacert().env("THETACERT_PRECISION", "8").args(["eval", "theta4", "--y", "1"]).assert().code(2);
}

#[test]
fn verify_unknown_suite_is_usage_error() {
    thetacert().args(["verify", "nope"]).assert().code(2);
}

#[test]
fn verify_wrong_sign_fails() {
    thetacert()
        .args(["verify", "convexity", "--interval", "0.5", "1.0", "--target-sign", "negative"])
        .assert()
        .code(1)
        .stdout(predicate::str::contains("failed"));
}

#[test]
fn verify_greek_writes_six_constants() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    thetacert().args(["verify", "greek", "--json"]).arg(&path).assert().success();
    let v = json_of(&path);
    assert_eq!(v["schema_version"], "1.0");
    assert_eq!(v["decimal_digits"], 40);
    let names: Vec<&str> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["kind"] == "value")
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["alpha", "beta", "gamma", "delta", "epsilon", "zeta"]);
    let alpha = &v["results"][1]["enclosure"]["lo"];
    assert!(alpha.as_str().unwrap().starts_with("1.98432310662780"));
}

#[test]
fn json_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    thetacert().args(["verify", "g-chain", "--json"]).arg(&path).assert().success();
    let text = std::fs::read_to_string(&path).unwrap();
    let doc = thetacert::report::ReportDocument::from_json(&text).unwrap();
    assert_eq!(doc.to_json(), text);
    assert!(doc.summary.passed);
}

#[test]
fn verify_all_certifies_eight_suites() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("all.json");
    thetacert()
        .args(["verify", "all", "--json"])
        .arg(&path)
        .assert()
        .success()
        .stdout(predicate::str::contains("8 certified, 0 failed, 0 inconclusive of 8"));
    let v = json_of(&path);
    let ids: Vec<&str> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["kind"] == "certification")
        .map(|r| r["id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["lemma1", "modular", "g-chain", "large-y", "small-y", "greek", "f-second", "decreasing"]);
}

#[test]
fn scan_finds_witness_for_2_1_only() {
    thetacert()
        .args(["scan", "--a", "2.1", "--resolution", "64"])
        .assert()
        .success()
        .stdout(predicate::str::contains("# witness: y in [5.0000"));
    thetacert()
        .args(["scan", "--a", "2.0", "--resolution", "64"])
        .assert()
        .success()
        .stdout(predicate::str::contains("# witness").not());
}

#[test]
fn scan_csv_file_is_parseable_and_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plot.csv");
    thetacert().args(["scan", "--a", "2.1", "--resolution", "50", "--csv"]).arg(&path).assert().success();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("y,f_a_second_lo,f_a_second_hi"));
    let ys: Vec<f64> = lines
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            assert_eq!(cols.len(), 3);
            let lo: f64 = cols[1].parse().unwrap();
            let hi: f64 = cols[2].parse().unwrap();
            assert!(lo <= hi);
            cols[0].parse().unwrap()
        })
        .collect();
    assert_eq!(ys.len(), 50);
    assert!(ys.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn scan_bad_arguments() {
    thetacert().args(["scan", "--a", "x"]).assert().code(2);
    thetacert().args(["scan", "--a", "2.1", "--interval", "1", "0.5"]).assert().code(2);
    thetacert().args(["scan"]).assert().code(2);
}
