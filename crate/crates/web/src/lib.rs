//! Browser bindings: three operations, each taking plain arguments and
//! returning a JSON string.

use serde::Serialize;
use thetacert::report::{DecimalInterval, ReportDocument, WitnessRecord};
use thetacert::scanner::{scan as run_scan, ExponentQuery};
use thetacert::theta::{self, DerivativeOrder};
use thetacert::verifier::{certify_sign, Quantity, TargetSign};
use thetacert::{Enclosure, EvalConfig};
use wasm_bindgen::prelude::*;

const DIGITS: usize = 30;

fn config(precision: usize) -> Result<EvalConfig, String> {
    let cfg = EvalConfig::with_precision(precision);
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

/// Enclosure of `function` ∈ {theta2, theta4, f, f', f''} at a decimal y.
pub fn evaluate_json(function: &str, y: &str, order: u8, precision: usize) -> Result<String, String> {
    let cfg = config(precision)?;
    let yv = Enclosure::from_decimal(y.trim(), cfg.precision_bits).map_err(|e| e.to_string())?;
    let nu = DerivativeOrder::new(order).map_err(|e| e.to_string())?;
    let (value, order) = match function {
        "theta2" => (theta::theta2(&yv, nu, &cfg), Some(order)),
        "theta4" => (theta::theta4(&yv, nu, &cfg), Some(order)),
        "f" => (theta::f_derivative(&yv, 0, &cfg), None),
        "f'" => (theta::f_derivative(&yv, 1, &cfg), None),
        "f''" => (theta::f_derivative(&yv, 2, &cfg), None),
        other => return Err(format!("unknown function {other:?}")),
    };
    let value = value.map_err(|e| e.to_string())?;
    let mut doc = ReportDocument::new(&format!("eval {function}"), &cfg);
    doc.decimal_digits = DIGITS;
    doc.push_value(function, Some(y.trim()), order, &value, None);
    Ok(doc.to_json())
}

#[derive(Serialize)]
struct ScanRowOut {
    y: f64,
    #[serde(flatten)]
    value: Option<DecimalInterval>,
    approx: Option<f64>,
}

#[derive(Serialize)]
struct ScanOut {
    a: String,
    rows: Vec<ScanRowOut>,
    witness: Option<WitnessRecord>,
}

/// Grid scan of `(y^a θ₄′/θ₄)″` on `[lo, hi]`.
pub fn scan_json(a: &str, lo: f64, hi: f64, resolution: usize) -> Result<String, String> {
    let cfg = config(128)?;
    let q = ExponentQuery::new(a.trim(), lo, hi, resolution, cfg.precision_bits).map_err(|e| e.to_string())?;
    let r = run_scan(&q, &cfg).map_err(|e| e.to_string())?;
    let out = ScanOut {
        a: q.a_text.clone(),
        rows: r
            .rows
            .iter()
            .map(|row| ScanRowOut {
                y: row.y,
                value: row.value.as_ref().ok().map(|v| DecimalInterval::from_enclosure(v, DIGITS)),
                approx: row.value.as_ref().ok().map(|v| v.to_f64()),
            })
            .collect(),
        witness: r.witness.as_ref().map(|w| WitnessRecord::new(w, DIGITS)),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

/// Certifies the sign of f″ or f′ on `[lo, hi]` by bisection.
pub fn certify_json(quantity: &str, lo: f64, hi: f64, sign: &str) -> Result<String, String> {
    let cfg = config(128)?;
    let q = match quantity {
        "f''" => Quantity::FSecond,
        "f'" => Quantity::FPrime,
        other => return Err(format!("unknown quantity {other:?}")),
    };
    let sign = match sign {
        "positive" => TargetSign::Positive,
        "negative" => TargetSign::Negative,
        other => return Err(format!("unknown sign {other:?}")),
    };
    if !(lo > 0.0 && hi > lo && hi <= 100.0) {
        return Err("interval must satisfy 0 < lo < hi <= 100".into());
    }
    let iv = Enclosure::from_f64_bounds(lo, hi, cfg.precision_bits).map_err(|e| e.to_string())?;
    let report = certify_sign(q, &iv, sign, &cfg);
    let mut doc = ReportDocument::new(&format!("certify {quantity} {}", sign.label()), &cfg);
    doc.decimal_digits = DIGITS;
    doc.push_report(&report);
    Ok(doc.to_json())
}

#[wasm_bindgen]
pub fn evaluate(function: &str, y: &str, order: u8, precision: usize) -> Result<String, JsError> {
    evaluate_json(function, y, order, precision).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn scan(a: &str, lo: f64, hi: f64, resolution: usize) -> Result<String, JsError> {
    scan_json(a, lo, hi, resolution).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn certify(quantity: &str, lo: f64, hi: f64, sign: &str) -> Result<String, JsError> {
    certify_json(quantity, lo, hi, sign).map_err(|e| JsError::new(&e))
}
