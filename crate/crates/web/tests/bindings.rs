use serde_json::Value;
use thetacert_web::{certify_json, evaluate_json, scan_json};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn evaluate_theta4_at_one() {
    let v = parse(&evaluate_json("theta4", "1", 0, 128).unwrap());
    let enc = &v["results"][0]["enclosure"];
    assert!(enc["lo"].as_str().unwrap().starts_with("9.135791381561168214"));
    assert_eq!(v["decimal_digits"], 30);
}

#[test]
fn evaluate_rejects_bad_input() {
    assert!(evaluate_json("theta4", "-1", 0, 128).is_err());
    assert!(evaluate_json("theta4", "x", 0, 128).is_err());
    assert!(evaluate_json("theta3", "1", 0, 128).is_err());
    assert!(evaluate_json("theta4", "1", 4, 128).is_err());
    assert!(evaluate_json("theta4", "1", 0, 16).is_err());
}

#[test]
fn scan_reports_witness() {
    let v = parse(&scan_json("2.1", 0.05, 5.0, 24).unwrap());
    assert_eq!(v["rows"].as_array().unwrap().len(), 24);
    assert!(v["witness"]["value"]["hi"].as_str().unwrap().starts_with('-'));
    let v = parse(&scan_json("2", 0.05, 5.0, 24).unwrap());
    assert!(v["witness"].is_null());
    assert!(scan_json("2.1", 1.0, 0.5, 24).is_err());
}

#[test]
fn certify_both_signs() {
    let ok = parse(&certify_json("f''", 0.5, 2.0, "positive").unwrap());
    assert_eq!(ok["results"][0]["status"], "certified");
    let bad = parse(&certify_json("f'", 0.5, 2.0, "positive").unwrap());
    assert_eq!(bad["results"][0]["status"], "failed");
    assert!(certify_json("f", 0.5, 2.0, "positive").is_err());
    assert!(certify_json("f''", 0.0, 2.0, "positive").is_err());
}
