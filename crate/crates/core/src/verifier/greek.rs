//! The constants α…ζ of the lower bound for h(1/y) on `[1, ∞)`.

use super::exppoly::ExpPoly;
use super::CertificationReport;
use crate::enclosure::{Enclosure, EvalConfig};
use crate::envelopes::{EnvelopeConstants, EnvelopePair};
use crate::theta::DerivativeOrder;
use crate::Error;

/// Reference decimals for the constants, to the digits usually quoted.
pub const REFERENCE_GREEK: [(&str, &str); 6] = [
    ("alpha", "1984.32"),
    ("beta", "631.718"),
    ("gamma", "1985.41"),
    ("delta", "631.798"),
    ("epsilon", "1.01719"),
    ("zeta", "0.0799451"),
];

/// `h(1/y) > y^{9/2} e^{−27πy/4} (e^{4πy}(αy − β) − e^{2πy}(γy + δ) − εy − ζ)`.
#[derive(Clone, Debug)]
pub struct GreekConstants {
    pub alpha: Enclosure,
    pub beta: Enclosure,
    pub gamma: Enclosure,
    pub delta: Enclosure,
    pub epsilon: Enclosure,
    pub zeta: Enclosure,
    /// `(a, b)` of the `e^{6πy}` coefficient, which must vanish.
    pub leading: (Enclosure, Enclosure),
}

impl GreekConstants {
    pub fn named(&self) -> [(&'static str, &Enclosure); 6] {
        [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("delta", &self.delta),
            ("epsilon", &self.epsilon),
            ("zeta", &self.zeta),
        ]
    }

    /// The bracket `e^{4πy}(αy − β) − e^{2πy}(γy + δ) − εy − ζ` at y.
    pub fn bracket(&self, y: &Enclosure) -> Enclosure {
        let p = y.precision();
        let pi = Enclosure::pi(p);
        let e2 = pi.mul(y).mul_pow2(1).exp();
        let e4 = e2.sqr();
        e4.mul(&self.alpha.mul(y).sub(&self.beta))
            - e2.mul(&self.gamma.mul(y).add(&self.delta))
            - self.epsilon.mul(y)
            - self.zeta.clone()
    }
}

/// The five envelope products, multiplied by `e^{27πy/4}` and divided by `y^{9/2}`.
pub fn greek_exppoly(constants: &EnvelopeConstants, prec: usize) -> Result<ExpPoly, Error> {
    let pair = |k: u8| EnvelopePair::new(DerivativeOrder::new(k).expect("k <= 3"), constants);
    let lo: Vec<ExpPoly> = (0..4).map(|k| pair(k).lower_exppoly(prec)).collect();
    let up: Vec<ExpPoly> = (0..4).map(|k| pair(k).upper_exppoly(prec)).collect();
    let y = ExpPoly::y(prec);
    let c = |n: i64| Enclosure::from_i64(n, prec);

    let t1 = lo[1].mul(&lo[1])?.mul(&lo[0])?.scale(&c(2));
    let t2 = up[2].mul(&up[0])?.mul(&up[0])?.scale(&c(-2));
    let t3 = lo[1].mul(&lo[1])?.mul(&lo[1])?.mul(&y)?.scale(&c(2));
    let t4 = up[2].mul(&up[1])?.mul(&up[0])?.mul(&y)?.scale(&c(-3));
    let t5 = lo[3].mul(&lo[0])?.mul(&lo[0])?.mul(&y)?;
    Ok(t1.add(&t2).add(&t3).add(&t4).add(&t5).shift(27))
}

/// Collects α…ζ and checks that the `e^{6πy}` coefficient cancels.
pub fn compute_greek_constants(cfg: &EvalConfig) -> Result<GreekConstants, Error> {
    compute_greek_constants_with(&EnvelopeConstants::new(cfg.precision_bits), cfg)
}

pub fn compute_greek_constants_with(constants: &EnvelopeConstants, cfg: &EvalConfig) -> Result<GreekConstants, Error> {
    cfg.validate()?;
    let p = cfg.precision_bits;
    let poly = greek_exppoly(constants, p)?;
    if let Some(k) = poly.exponents().find(|k| ![0, 8, 16, 24].contains(k)) {
        return Err(Error::Cancellation(format!("unexpected exponent {k}")));
    }
    let leading = poly.coefficient(24);
    let bound = Enclosure::from_f64(2f64.powi(-80), p);
    for c in [&leading.0, &leading.1] {
        if !c.contains_zero() || !c.abs().hi_enc().lt(&bound) {
            return Err(Error::Cancellation(format!("{c}")));
        }
    }
    let (a16, b16) = poly.coefficient(16);
    let (a8, b8) = poly.coefficient(8);
    let (a0, b0) = poly.coefficient(0);
    Ok(GreekConstants {
        alpha: a16,
        beta: b16.neg(),
        gamma: a8.neg(),
        delta: b8.neg(),
        epsilon: a0.neg(),
        zeta: b0.neg(),
        leading,
    })
}

fn decimal_places(printed: &str) -> i32 {
    printed.split_once('.').map(|(_, f)| f.len() as i32).unwrap_or(0)
}

/// Every value in `x` rounds to `printed` at the printed number of decimals.
pub fn rounds_to_printed(x: &Enclosure, printed: &str) -> bool {
    let p = x.precision().max(64);
    let Ok(v) = Enclosure::from_decimal(printed, p) else { return false };
    let half = Enclosure::from_decimal(&format!("5e-{}", decimal_places(printed) + 1), p).expect("literal");
    let (lo, hi) = (v.sub(&half).lo_enc(), v.add(&half).hi_enc());
    lo.lt(&x.lo_enc()) && x.hi_enc().lt(&hi)
}

/// Every value in `x` truncates to `printed` (x ≥ 0).
pub fn truncates_to_printed(x: &Enclosure, printed: &str) -> bool {
    let p = x.precision().max(64);
    let Ok(v) = Enclosure::from_decimal(printed, p) else { return false };
    let unit = Enclosure::from_decimal(&format!("1e-{}", decimal_places(printed)), p).expect("literal");
    !x.lo_enc().lt(&v) && x.hi_enc().lt(&v.add(&unit).lo_enc())
}

/// Computes α…ζ and checks everything that must hold of them.
///
/// Certification covers the computed constants themselves; agreement with
/// the printed digits is recorded in separate checks and notes.
pub fn verify_greek(cfg: &EvalConfig) -> (CertificationReport, Option<GreekConstants>) {
    let p = cfg.precision_bits;
    let mut report = CertificationReport::new("greek", "constants of the lower bound for h(1/y)", p);
    let g = match compute_greek_constants(cfg) {
        Ok(g) => g,
        Err(e) => {
            report.fail(e.to_string(), None);
            return (report, None);
        }
    };
    report.assert_that("leading-cancellation", "the e^(6 pi y) coefficient vanishes", true);
    let narrow = g.named().iter().all(|(_, v)| v.width_lt(1e-8));
    report.assert_that("widths", "all six enclosures are narrower than 1e-8", narrow);
    let positive = g.named().iter().all(|(_, v)| v.is_positive());
    report.assert_that("positive", "all six constants are positive", positive);
    report.assert_that("alpha-below-gamma", "alpha < gamma", g.alpha.lt(&g.gamma));
    report.assert_that("beta-below-delta", "beta < delta", g.beta.lt(&g.delta));

    let mut digits = CertificationReport::new("greek/printed", "agreement with the printed digits", p);
    for ((name, v), (_, printed)) in g.named().iter().zip(REFERENCE_GREEK.iter()) {
        let rounded = rounds_to_printed(v, printed);
        let truncated = truncates_to_printed(v, printed);
        let (lo, hi) = v.to_decimal_strings(12);
        digits.notes.push(format!(
            "{name} in [{lo}, {hi}]: printed {printed}, rounds: {}, truncates: {}",
            if rounded { "yes" } else { "no" },
            if truncated { "yes" } else { "no" },
        ));
    }
    report.notes.extend(digits.notes);
    (report, Some(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn near(e: &Enclosure, s: &str) -> bool {
        e.intersects(&Enclosure::from_decimal(s, 128).unwrap().inflate(&Enclosure::from_decimal("1e-18", 128).unwrap()))
    }

    #[test]
    fn constants_match_independent_collection() {
        let g = compute_greek_constants(&EvalConfig::default()).unwrap();
        assert!(near(&g.alpha, "1984.323106627803931186"));
        assert!(near(&g.beta, "631.718834098326032436"));
        assert!(near(&g.gamma, "1985.423075421102075722"));
        assert!(near(&g.delta, "631.798779174062547063"));
        assert!(near(&g.epsilon, "1.017190573893773951528"));
        assert!(near(&g.zeta, "0.079945154699745338469"));
        assert!(g.leading.0.contains_zero() && g.leading.1.contains_zero());
        for (_, v) in g.named() {
            assert!(v.width_lt(1e-8));
        }
    }

    #[test]
    fn zero_inflation_changes_the_constants() {
        let g = compute_greek_constants_with(&EnvelopeConstants::zero(128), &EvalConfig::default()).unwrap();
        assert!(!near(&g.beta, "631.718834098326032436"));
    }

    #[test]
    fn printed_digit_comparisons() {
        let x = Enclosure::from_decimal("1984.3231", 128).unwrap();
        assert!(rounds_to_printed(&x, "1984.32"));
        assert!(!rounds_to_printed(&x, "1984.33"));
        let z = Enclosure::from_decimal("0.07994515", 128).unwrap();
        assert!(truncates_to_printed(&z, "0.0799451"));
        assert!(!rounds_to_printed(&z, "0.0799451"));
        assert!(rounds_to_printed(&Enclosure::from_decimal("55.50873", 128).unwrap(), "55.5"));
    }

    #[test]
    fn bracket_matches_exppoly() {
        let cfg = EvalConfig::default();
        let g = compute_greek_constants(&cfg).unwrap();
        let poly = greek_exppoly(&EnvelopeConstants::new(128), 128).unwrap();
        for s in ["1", "1.5", "3"] {
            let y = Enclosure::from_decimal(s, 128).unwrap();
            assert!(g.bracket(&y).intersects(&poly.eval(&y)));
        }
    }
}
