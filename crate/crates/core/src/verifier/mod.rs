//! Sign certification by adaptive bisection, and the inequality chains that
//! together establish convexity and monotonicity of `f(y) = y²θ₄′/θ₄`.

mod certify;
mod decreasing;
mod exppoly;
mod greek;
mod large_y;
mod small_y;
mod suites;

pub use certify::{certify_sign, certify_sign_fn, Quantity, TargetSign, LAMBERT_ROUTE_MIN, MODULAR_ROUTE_MAX};
pub use decreasing::{
    decreasing_bracket_even, decreasing_bracket_odd, verify_decreasing_argument, verify_decreasing_argument_with,
};
pub use exppoly::ExpPoly;
pub use greek::{
    compute_greek_constants, compute_greek_constants_with, greek_exppoly, rounds_to_printed, truncates_to_printed,
    verify_greek, GreekConstants, REFERENCE_GREEK,
};
pub use large_y::{
    even_bracket, g_eval, g_prime, g_second, g_second_collected, odd_bracket, odd_bracket_weakened,
    verify_even_terms_large_y, verify_g_chain, verify_g_chain_with, verify_odd_terms_large_y, GForm,
};
pub use small_y::{
    h_direct, h_reciprocal, small_y_bracket, verify_small_y_chain, verify_small_y_chain_with,
};
pub use suites::{run_suite, Suite, SuiteOptions};

use crate::enclosure::Enclosure;

/// A point (or small box) together with a strictly signed enclosure.
#[derive(Clone, Debug)]
pub struct Witness {
    pub y: Enclosure,
    pub value: Enclosure,
    pub context: String,
}

impl Witness {
    /// `value.hi < 0` or `value.lo > 0`.
    pub fn is_strict(&self) -> bool {
        self.value.is_negative() || self.value.is_positive()
    }
}

#[derive(Clone, Debug)]
pub enum Status {
    Certified,
    Failed { reason: String, witness: Option<Witness> },
    Inconclusive { reason: String, deepest_box: Option<Enclosure> },
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::Failed { .. } => "failed",
            Status::Inconclusive { .. } => "inconclusive",
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Status::Certified => 0,
            Status::Inconclusive { .. } => 1,
            Status::Failed { .. } => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertificationReport {
    pub id: String,
    pub description: String,
    pub interval: Option<Enclosure>,
    pub status: Status,
    pub boxes_examined: u64,
    /// Smallest certified distance from zero over all accepted boxes.
    pub min_margin: Option<Enclosure>,
    pub precision_bits: usize,
    pub depends_on: Vec<String>,
    pub notes: Vec<String>,
    pub checks: Vec<CertificationReport>,
}

impl CertificationReport {
    pub fn new(id: &str, description: &str, precision_bits: usize) -> Self {
        CertificationReport {
            id: id.to_string(),
            description: description.to_string(),
            interval: None,
            status: Status::Certified,
            boxes_examined: 0,
            min_margin: None,
            precision_bits,
            depends_on: Vec::new(),
            notes: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self.status, Status::Certified)
    }

    pub fn is_failed(&self) -> bool {
        matches!(self.status, Status::Failed { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self.status, Status::Inconclusive { .. })
    }

    pub fn fail(&mut self, reason: impl Into<String>, witness: Option<Witness>) {
        self.status = Status::Failed { reason: reason.into(), witness };
    }

    pub fn inconclusive(&mut self, reason: impl Into<String>, deepest_box: Option<Enclosure>) {
        if !self.is_failed() {
            self.status = Status::Inconclusive { reason: reason.into(), deepest_box };
        }
    }

    /// Records a scalar fact: certified iff `holds`.
    pub fn assert_that(&mut self, id: &str, description: &str, holds: bool) -> bool {
        let mut c = CertificationReport::new(id, description, self.precision_bits);
        c.boxes_examined = 1;
        if !holds {
            c.fail(format!("{description} does not hold"), None);
        }
        self.push(c);
        holds
    }

    /// Records that `value` has the strict sign `sign`, attaching a witness
    /// of the opposite sign on failure.
    pub fn assert_sign(&mut self, id: &str, description: &str, y: Option<&Enclosure>, value: &Enclosure, sign: TargetSign) -> bool {
        let mut c = CertificationReport::new(id, description, self.precision_bits);
        c.boxes_examined = 1;
        c.interval = y.cloned();
        if sign.holds(value) {
            c.min_margin = Some(sign.margin(value));
        } else if sign.opposite().holds(value) {
            let w = y.map(|y| Witness { y: y.clone(), value: value.clone(), context: id.to_string() });
            c.fail(format!("{description}: enclosure {value} has the wrong sign"), w);
        } else {
            c.inconclusive(format!("{description}: enclosure {value} contains zero"), y.cloned());
        }
        let ok = c.is_certified();
        self.push(c);
        ok
    }

    /// Attaches a sub-report; the worst status propagates upwards.
    pub fn push(&mut self, child: CertificationReport) {
        self.boxes_examined += child.boxes_examined;
        if child.status.rank() > self.status.rank() {
            self.status = match &child.status {
                Status::Failed { reason, witness } => Status::Failed {
                    reason: format!("{}: {}", child.id, reason),
                    witness: witness.clone(),
                },
                Status::Inconclusive { reason, deepest_box } => Status::Inconclusive {
                    reason: format!("{}: {}", child.id, reason),
                    deepest_box: deepest_box.clone(),
                },
                Status::Certified => Status::Certified,
            };
        }
        self.checks.push(child);
    }

    /// Depth-first search for a check by id.
    pub fn find(&self, id: &str) -> Option<&CertificationReport> {
        if self.id == id {
            return Some(self);
        }
        self.checks.iter().find_map(|c| c.find(id))
    }
}
