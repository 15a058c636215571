//! Serializable reports. Enclosures are written as decimal `[lo, hi]`
//! strings rounded outward, so a printed interval still contains the value.

use serde::{Deserialize, Serialize};

use crate::enclosure::{Enclosure, EvalConfig};
use crate::scanner::ScanResult;
use crate::verifier::{CertificationReport, Status, Witness};
use crate::Error;

pub const SCHEMA_VERSION: &str = "1.0";
pub const DEFAULT_DECIMAL_DIGITS: usize = 40;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecimalInterval {
    pub lo: String,
    pub hi: String,
}

impl DecimalInterval {
    pub fn from_enclosure(e: &Enclosure, digits: usize) -> Self {
        let (lo, hi) = e.to_decimal_strings(digits);
        DecimalInterval { lo, hi }
    }

    /// Parses back into an enclosure containing both endpoints.
    pub fn to_enclosure(&self, prec: usize) -> Result<Enclosure, Error> {
        let lo = Enclosure::from_decimal(&self.lo, prec)?;
        let hi = Enclosure::from_decimal(&self.hi, prec)?;
        Ok(lo.hull(&hi))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub y: DecimalInterval,
    pub value: DecimalInterval,
    pub context: String,
}

impl WitnessRecord {
    pub fn new(w: &Witness, digits: usize) -> Self {
        WitnessRecord {
            y: DecimalInterval::from_enclosure(&w.y, digits),
            value: DecimalInterval::from_enclosure(&w.value, digits),
            context: w.context.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationRecord {
    pub id: String,
    pub description: String,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<DecimalInterval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deepest_box: Option<DecimalInterval>,
    pub boxes_examined: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_margin: Option<DecimalInterval>,
    pub precision_bits: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub depends_on: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CertificationRecord>,
}

impl CertificationRecord {
    pub fn new(r: &CertificationReport, digits: usize) -> Self {
        let d = |e: &Enclosure| DecimalInterval::from_enclosure(e, digits);
        let (reason, witness, deepest_box) = match &r.status {
            Status::Certified => (None, None, None),
            Status::Failed { reason, witness } => {
                (Some(reason.clone()), witness.as_ref().map(|w| WitnessRecord::new(w, digits)), None)
            }
            Status::Inconclusive { reason, deepest_box } => (Some(reason.clone()), None, deepest_box.as_ref().map(d)),
        };
        CertificationRecord {
            id: r.id.clone(),
            description: r.description.clone(),
            status: r.status.label().to_string(),
            reason,
            interval: r.interval.as_ref().map(d),
            witness,
            deepest_box,
            boxes_examined: r.boxes_examined,
            min_margin: r.min_margin.as_ref().map(d),
            precision_bits: r.precision_bits,
            depends_on: r.depends_on.clone(),
            notes: r.notes.clone(),
            checks: r.checks.iter().map(|c| CertificationRecord::new(c, digits)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueRecord {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u8>,
    pub enclosure: DecimalInterval,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResultRecord {
    Certification(CertificationRecord),
    Value(ValueRecord),
    Witness(WitnessRecord),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub certified: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub command: String,
    pub config: EvalConfig,
    pub decimal_digits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub started_at: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finished_at: Option<String>,
    pub results: Vec<ResultRecord>,
    pub summary: Summary,
}

impl ReportDocument {
    pub fn new(command: &str, config: &EvalConfig) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            config: config.clone(),
            decimal_digits: DEFAULT_DECIMAL_DIGITS,
            started_at: None,
            finished_at: None,
            results: Vec::new(),
            summary: Summary { passed: true, ..Summary::default() },
        }
    }

    pub fn push_report(&mut self, r: &CertificationReport) {
        self.results.push(ResultRecord::Certification(CertificationRecord::new(r, self.decimal_digits)));
        self.refresh_summary();
    }

    pub fn push_value(&mut self, name: &str, y: Option<&str>, order: Option<u8>, value: &Enclosure, note: Option<String>) {
        self.results.push(ResultRecord::Value(ValueRecord {
            name: name.to_string(),
            y: y.map(str::to_string),
            order,
            enclosure: DecimalInterval::from_enclosure(value, self.decimal_digits),
            note,
        }));
    }

    pub fn push_witness(&mut self, w: &Witness) {
        self.results.push(ResultRecord::Witness(WitnessRecord::new(w, self.decimal_digits)));
    }

    fn refresh_summary(&mut self) {
        let mut s = Summary::default();
        for r in &self.results {
            if let ResultRecord::Certification(c) = r {
                s.total += 1;
                match c.status.as_str() {
                    "certified" => s.certified += 1,
                    "failed" => s.failed += 1,
                    _ => s.inconclusive += 1,
                }
            }
        }
        s.passed = s.failed == 0 && s.inconclusive == 0;
        self.summary = s;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report documents always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `y,lo,hi` rows with a header; unevaluable points get empty bounds.
pub fn scan_csv(scan: &ScanResult, digits: usize) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["y", "f_a_second_lo", "f_a_second_hi"]).expect("in-memory write");
    for row in &scan.rows {
        let (lo, hi) = match &row.value {
            Ok(v) => v.to_decimal_strings(digits),
            Err(_) => (String::new(), String::new()),
        };
        w.write_record([row.y.to_string(), lo, hi]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// One-line description of a witness, for appending after CSV output.
pub fn witness_line(w: &Witness, digits: usize) -> String {
    let y = DecimalInterval::from_enclosure(&w.y, digits);
    let v = DecimalInterval::from_enclosure(&w.value, digits);
    format!("# witness: y in [{}, {}], f_a'' in [{}, {}] ({})", y.lo, y.hi, v.lo, v.hi, w.context)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_interval_contains_value() {
        let third = Enclosure::from_i64(1, 128).div(&Enclosure::from_i64(3, 128)).unwrap();
        let d = DecimalInterval::from_enclosure(&third, 40);
        let back = d.to_enclosure(256).unwrap();
        assert!(back.contains(&third.with_precision(256)));
    }

    #[test]
    fn json_round_trip_is_stable() {
        let mut doc = ReportDocument::new("verify greek", &EvalConfig::default());
        let mut r = CertificationReport::new("x", "demo", 128);
        r.interval = Some(Enclosure::from_f64_bounds(0.5, 1.0, 128).unwrap());
        r.assert_that("inner", "inner fact", false);
        doc.push_report(&r);
        doc.push_value("pi", None, None, &Enclosure::pi(128), None);
        assert!(!doc.summary.passed);
        let s = doc.to_json();
        let parsed = ReportDocument::from_json(&s).unwrap();
        assert_eq!(parsed, doc);
        assert_eq!(parsed.to_json(), s);
    }
}
