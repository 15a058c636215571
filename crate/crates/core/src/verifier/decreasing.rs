//! f′ < 0 on `(0, ∞)`: termwise negativity for large y plus convexity.

use super::certify::{certify_sign, Quantity, TargetSign};
use super::CertificationReport;
use crate::enclosure::{Enclosure, EvalConfig};

fn meet(a: Enclosure, b: Enclosure) -> Enclosure {
    a.intersection(&b).unwrap_or(b)
}

/// `e^{2u} − 1 − u·e^{2u}` with `u = nπy`, also as `e^{2u}(1 − u) − 1`.
pub fn decreasing_bracket_even(n: u32, y: &Enclosure, p: usize) -> Enclosure {
    let u = Enclosure::pi(p).mul(&y.with_precision(p)).mul(&Enclosure::from_i64(n as i64, p));
    let e = u.mul_pow2(1).exp();
    let one = Enclosure::from_i64(1, p);
    let literal = e.sub(&one).sub(&u.mul(&e));
    let factored = e.mul(&one.sub(&u)).sub(&one);
    meet(literal, factored)
}

/// `2(e^v − 1) − v·e^v` with `v = (2n−1)πy`, also as `e^v(2 − v) − 2`.
pub fn decreasing_bracket_odd(n: u32, y: &Enclosure, p: usize) -> Enclosure {
    let v = Enclosure::pi(p).mul(&y.with_precision(p)).mul(&Enclosure::from_i64(2 * n as i64 - 1, p));
    let e = v.exp();
    let one = Enclosure::from_i64(1, p);
    let two = Enclosure::from_i64(2, p);
    let literal = e.sub(&one).mul_pow2(1).sub(&v.mul(&e));
    let factored = e.mul(&two.sub(&v)).sub(&two);
    meet(literal, factored)
}

/// Runs the termwise checks and composes them with `convexity`, a report
/// certifying f″ > 0.
pub fn verify_decreasing_argument_with(
    convexity: &CertificationReport,
    n_max: u32,
    y_cap: f64,
    f_prime_interval: Option<&Enclosure>,
    cfg: &EvalConfig,
) -> CertificationReport {
    let p = cfg.precision_bits;
    let mut report = CertificationReport::new("decreasing", "f' < 0 on (0, inf)", p);
    report.depends_on.push(convexity.id.clone());
    for d in &convexity.depends_on {
        report.depends_on.push(d.clone());
    }
    let pi = Enclosure::pi(p);
    let two_over_pi = Enclosure::from_i64(2, p).div(&pi).expect("pi > 0");
    let one = Enclosure::from_i64(1, p);

    // boundary values from the uniform argument
    let b1 = decreasing_bracket_even(1, &one, p);
    report.assert_sign("even-at-1", "e^(2 pi)(1 - pi) - 1 < 0", Some(&one), &b1, TargetSign::Negative);
    let b2 = decreasing_bracket_odd(1, &two_over_pi, p);
    report.assert_sign("odd-at-2/pi", "2(e^2 - 1) - 2 e^2 = -2 < 0", Some(&two_over_pi), &b2, TargetSign::Negative);
    report.assert_that("odd-at-2/pi-value", "bracket at n = 1, y = 2/pi contains -2", b2.contains(&Enclosure::from_i64(-2, p)));
    // for y ≥ 2/π: u = nπy ≥ 2 ≥ 1 and v = (2n−1)πy ≥ 2
    let u_min = pi.mul(&two_over_pi);
    report.assert_that("uniform-range", "n pi y >= 1 and (2n-1) pi y >= 2 for y >= 2/pi", !u_min.lt(&Enclosure::from_i64(2, p)));
    report.notes.push("u >= 1: e^(2u)(1-u) - 1 <= -1; v >= 2: e^v(2-v) - 2 <= -2; both uniformly in n".into());

    let iv = two_over_pi.lo_enc().hull(&Enclosure::from_f64(y_cap, p));
    for n in 1..=n_max {
        report.push(certify_sign(Quantity::DecreasingEven(n), &iv, TargetSign::Negative, cfg));
        report.push(certify_sign(Quantity::DecreasingOdd(n), &iv, TargetSign::Negative, cfg));
    }

    if let Some(fi) = f_prime_interval {
        report.push(certify_sign(Quantity::FPrime, fi, TargetSign::Negative, cfg));
    }

    let mut premise = CertificationReport::new("convexity-premise", "f'' > 0 (referenced report)", p);
    premise.depends_on.push(convexity.id.clone());
    if !convexity.is_certified() {
        premise.fail(format!("report {} is not certified", convexity.id), None);
    }
    report.push(premise);
    report.notes.push(format!(
        "f'' > 0 ({}) makes f' increasing; f' < 0 on [2/pi, inf) termwise, so f' < 0 everywhere",
        convexity.id
    ));
    report
}

/// Self-contained version: certifies f″ > 0 on `[0.05, 20]` first.
pub fn verify_decreasing_argument(cfg: &EvalConfig) -> CertificationReport {
    let p = cfg.precision_bits;
    let iv = Enclosure::from_f64_bounds(0.05, 20.0, p).expect("ordered");
    let convexity = certify_sign(Quantity::FSecond, &iv, TargetSign::Positive, cfg);
    verify_decreasing_argument_with(&convexity, 50, 30.0, Some(&iv), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_examples() {
        let p = 128;
        let one = Enclosure::from_i64(1, p);
        assert!(decreasing_bracket_even(1, &one, p).is_negative());
        let two_over_pi = Enclosure::from_i64(2, p).div(&Enclosure::pi(p)).unwrap();
        assert!(decreasing_bracket_odd(1, &two_over_pi, p).contains_f64(-2.0));
        // small y: the even bracket is positive, so the large-y condition matters
        assert!(decreasing_bracket_even(1, &Enclosure::from_f64(0.05, p), p).is_positive());
    }

    #[test]
    fn composes_with_premise() {
        let cfg = EvalConfig::default();
        let mut fake = CertificationReport::new("f-second", "premise", 128);
        let r = verify_decreasing_argument_with(&fake, 3, 30.0, None, &cfg);
        assert!(r.is_certified(), "{:?}", r.status);
        assert!(r.depends_on.contains(&"f-second".to_string()));
        fake.fail("not proven", None);
        assert!(verify_decreasing_argument_with(&fake, 3, 30.0, None, &cfg).is_failed());
    }
}
