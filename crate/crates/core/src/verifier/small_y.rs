//! Convexity on `(0, 1]` through h(1/y) and the envelope lower bound.

use super::certify::{certify_sign, Quantity, TargetSign};
use super::greek::{compute_greek_constants, greek_exppoly, GreekConstants};
use super::CertificationReport;
use crate::enclosure::{Enclosure, EvalConfig};
use crate::envelopes::EnvelopeConstants;
use crate::theta::{self, DerivativeOrder};
use crate::Error;

fn nu(k: u8) -> DerivativeOrder {
    DerivativeOrder::new(k).expect("k <= 3")
}

/// `h(y) = θ₄³(y)·f″(y)` from θ₄ and its first three derivatives at y.
pub fn h_direct(y: &Enclosure, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    let p = cfg.precision_bits;
    let y = y.with_precision(p);
    let t: Vec<Enclosure> = (0..4).map(|k| theta::theta4(&y, nu(k), cfg)).collect::<Result<_, _>>()?;
    let (t0, t1, t2, t3) = (&t[0], &t[1], &t[2], &t[3]);
    let y2 = y.sqr();
    let t00 = t0.sqr();
    let c = |n: i64| Enclosure::from_i64(n, p);
    Ok(t1.mul(&t00).mul_pow2(1)
        + y.mul(t2).mul(&t00).mul_pow2(2)
        + y2.mul(t3).mul(&t00)
        - y.mul(&t1.sqr()).mul(t0).mul_pow2(2)
        - y2.mul(t2).mul(t1).mul(t0).mul(&c(3))
        + y2.mul(&t1.powi(3)).mul_pow2(1))
}

/// `h(1/y)` from θ₂ and its first three derivatives at y.
pub fn h_reciprocal(y: &Enclosure, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    let p = cfg.precision_bits;
    let y = y.with_precision(p);
    let s: Vec<Enclosure> = (0..4).map(|k| theta::theta2(&y, nu(k), cfg)).collect::<Result<_, _>>()?;
    let (s0, s1, s2, s3) = (&s[0], &s[1], &s[2], &s[3]);
    let y92 = y.pow_rational(9, 2)?;
    let y112 = y92.mul(&y);
    let s00 = s0.sqr();
    Ok(y92.mul(&s1.sqr()).mul(s0).mul_pow2(1)
        - y92.mul(s2).mul(&s00).mul_pow2(1)
        - y112.mul(&s1.powi(3)).mul_pow2(1)
        + y112.mul(s2).mul(s1).mul(s0).mul(&Enclosure::from_i64(3, p))
        - y112.mul(s3).mul(&s00))
}

/// `e^{2πy}(533·1984·y − 534·632) − 2y − 0.08`
pub fn small_y_bracket(y: &Enclosure, p: usize) -> Enclosure {
    let y = y.with_precision(p);
    let e = Enclosure::pi(p).mul(&y).mul_pow2(1).exp();
    let lin = Enclosure::from_i64(533 * 1984, p).mul(&y).sub(&Enclosure::from_i64(534 * 632, p));
    let c = Enclosure::from_decimal("0.08", p).expect("literal");
    e.mul(&lin) - y.mul_pow2(1) - c
}

pub fn verify_small_y_chain(cfg: &EvalConfig) -> CertificationReport {
    match compute_greek_constants(cfg) {
        Ok(g) => verify_small_y_chain_with(&g, 30.0, cfg),
        Err(e) => {
            let mut r = CertificationReport::new("small-y", "h(1/y) > 0 for y >= 1", cfg.precision_bits);
            r.fail(e.to_string(), None);
            r
        }
    }
}

/// The chain from the α…ζ bound down to `e^{2πy}(533·1984y − 534·632) − 2y − 0.08 > 0`.
pub fn verify_small_y_chain_with(g: &GreekConstants, y_cap: f64, cfg: &EvalConfig) -> CertificationReport {
    let p = cfg.precision_bits;
    let mut report = CertificationReport::new("small-y", "h(1/y) > 0 for y >= 1, hence f'' > 0 on (0, 1]", p);
    report.depends_on.push("greek".into());
    report.depends_on.push("lemma1".into());
    let int = |n: i64| Enclosure::from_i64(n, p);
    let dec = |s: &str| Enclosure::from_decimal(s, p).expect("literal");

    // (i) replacing α…ζ by 1984, 632, 1986, 632, 2, 0.08 only lowers the bound
    let dirs = [
        ("alpha-ge-1984", "alpha > 1984", g.alpha.sub(&int(1984))),
        ("beta-le-632", "beta < 632", int(632).sub(&g.beta)),
        ("gamma-le-1986", "gamma < 1986", int(1986).sub(&g.gamma)),
        ("delta-le-632", "delta < 632", int(632).sub(&g.delta)),
        ("epsilon-le-2", "epsilon < 2", int(2).sub(&g.epsilon)),
        ("zeta-le-0.08", "zeta < 0.08", dec("0.08").sub(&g.zeta)),
    ];
    for (id, d, v) in dirs {
        report.assert_sign(id, d, None, &v, TargetSign::Positive);
    }

    // (ii) e^{4πy} ≥ 535·e^{2πy} for y ≥ 1, applied to 1984y − 632 > 0
    let e2pi = Enclosure::pi(p).mul_pow2(1).exp();
    report.assert_sign("e-2pi", "e^(2 pi) > 535", None, &e2pi.sub(&int(535)), TargetSign::Positive);
    report.assert_that("linear-positive", "1984 y - 632 > 0 for y >= 1", 1984 - 632 > 0);
    report.assert_that("integer-533", "533 * 1984 = 1057472", 533i64.checked_mul(1984) == Some(1_057_472));
    report.assert_that("integer-534", "534 * 632 = 337488", 534i64.checked_mul(632) == Some(337_488));
    // (535·1984 − 1986)y − 536·632 − (533·1984y − 534·632) = 1982y − 1264
    let slope = 535 * 1984 - 1986 - 533 * 1984;
    let offset = 536 * 632 - 534 * 632;
    report.assert_that(
        "absorption",
        "(535*1984 - 1986) y - 536*632 > 533*1984 y - 534*632 for y >= 1",
        slope == 1982 && offset == 1264 && slope > offset,
    );
    report.notes.push(format!(
        "the constant terms alone do not absorb: 535*632 + 632 = {} > 534*632 = {}; the slack comes from 1982 y > 1264",
        535 * 632 + 632,
        534 * 632
    ));

    // (iii) positivity of the final bracket
    let one = int(1);
    let at_one = small_y_bracket(&one, p);
    report.assert_sign("bracket-at-1", "final bracket > 0 at y = 1", Some(&one), &at_one, TargetSign::Positive);
    let cap = Enclosure::from_f64(y_cap, p);
    report.push(certify_sign(Quantity::SmallYBracket, &one.hull(&cap), TargetSign::Positive, cfg));
    // beyond the cap: e^{2πy}/y increases for y > 1/(2π), so e^{2πy} > 3.08y ≥ 2y + 1.08
    let ratio = Enclosure::pi(p).mul(&cap).mul_pow2(1).exp().div(&cap).expect("cap > 0");
    report.assert_sign("tail-corner", "e^(2 pi Y)/Y > 3.08", Some(&cap), &ratio.sub(&dec("3.08")), TargetSign::Positive);
    let growth = Enclosure::pi(p).mul(&cap).mul_pow2(1).sub(&one);
    report.assert_sign("tail-monotone", "2 pi y - 1 > 0 for y >= Y", Some(&cap), &growth, TargetSign::Positive);
    report.assert_that("tail-linear", "1057472 y - 337488 >= 1 and 3.08 y >= 2 y + 1.08 for y >= 1", 1_057_472 - 337_488 >= 1);
    report.notes.push("for y > Y the bracket exceeds e^(2 pi y) - 2 y - 0.08 > 1".into());

    // the envelope bound is really below h(1/y) at sample points
    let env_ok = (|| -> Result<bool, Error> {
        let poly = greek_exppoly(&EnvelopeConstants::new(p), p)?;
        let mut ok = true;
        for s in ["1", "1.25", "1.5", "2", "3", "5", "7.5", "10"] {
            let y = dec(s);
            let scale = y.pow_rational(9, 2)?.mul(&Enclosure::pi(p).mul(&y).mul(&dec("-6.75")).exp());
            let bound = scale.mul(&poly.eval(&y));
            ok &= bound.lt(&h_reciprocal(&y, cfg)?);
        }
        Ok(ok)
    })();
    match env_ok {
        Ok(ok) => {
            report.assert_that("bound-below-h", "the envelope bound lies below h(1/y) at sample points", ok);
        }
        Err(e) => report.inconclusive(e.to_string(), None),
    }
    report.notes.push("h(1/y) > 0 on [1, inf) and theta4 > 0 give f'' = h/theta4^3 > 0 on (0, 1]".into());
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: &str) -> Enclosure {
        Enclosure::from_decimal(s, 128).unwrap()
    }

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    #[test]
    fn both_h_routes_agree() {
        let d = h_direct(&pt("1"), &cfg()).unwrap();
        let r = h_reciprocal(&pt("1"), &cfg()).unwrap();
        assert!(d.intersects(&r));
        let want = pt("0.2385965910918037786").inflate(&pt("1e-18"));
        assert!(r.intersects(&want));
        for (y, inv) in [("2", "0.5"), ("0.5", "2")] {
            let r = h_reciprocal(&pt(y), &cfg()).unwrap();
            let d = h_direct(&pt(inv), &cfg()).unwrap();
            assert!(r.intersects(&d), "y={y}");
        }
        assert!(h_reciprocal(&pt("2"), &cfg()).unwrap().is_positive());
    }

    #[test]
    fn h_reconstructs_f_second() {
        for s in ["0.5", "1", "2"] {
            let y = pt(s);
            let t0 = theta::theta4(&y, nu(0), &cfg()).unwrap();
            let via_h = h_direct(&y, &cfg()).unwrap().div(&t0.powi(3)).unwrap();
            let lam = theta::f_second_lambert(&y, &cfg()).unwrap();
            assert!(via_h.intersects(&lam), "y={s}");
        }
    }

    #[test]
    fn bracket_at_one() {
        let v = small_y_bracket(&pt("1"), 128);
        assert!(v.intersects(&pt("385545422.031342214046411468514840545909").inflate(&pt("1e-20"))));
    }

    #[test]
    fn chain_certifies() {
        let r = verify_small_y_chain(&cfg());
        assert!(r.is_certified(), "{:?}", r.status);
    }

    #[test]
    fn wrong_rounding_direction_is_caught() {
        let mut g = compute_greek_constants(&cfg()).unwrap();
        g.gamma = pt("1986.5");
        let r = verify_small_y_chain_with(&g, 30.0, &cfg());
        assert!(r.find("gamma-le-1986").unwrap().is_failed());
    }
}
