//! Termwise positivity of the Lambert series for f″ on `[1, ∞)`.

use super::certify::{certify_sign, certify_sign_fn, Quantity, TargetSign};
use super::greek::rounds_to_printed;
use super::CertificationReport;
use crate::enclosure::{Enclosure, EvalConfig};
use crate::Error;

fn int(n: i64, p: usize) -> Enclosure {
    Enclosure::from_i64(n, p)
}

/// `g(y) = 2(E−1)² + s·4πy·E(E−1) + π²y²·E(E+1)` with `E = e^{πy}`.
///
/// `cross_sign = −1` is the function of interest; other values exist so that
/// a transcription slip in the middle term can be shown to be caught.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GForm {
    pub cross_sign: i64,
}

impl Default for GForm {
    fn default() -> Self {
        GForm { cross_sign: -1 }
    }
}

impl GForm {
    pub fn value(&self, y: &Enclosure, p: usize) -> Enclosure {
        let (pi, e) = pi_e(y, p);
        let s = int(self.cross_sign, p);
        let one = int(1, p);
        e.sub(&one).sqr().mul_pow2(1)
            + s.mul(&pi).mul(y).mul(&e).mul(&e.sub(&one)).mul_pow2(2)
            + pi.sqr().mul(&y.sqr()).mul(&e).mul(&e.add(&one))
    }

    /// Hand-differentiated g′.
    pub fn prime(&self, y: &Enclosure, p: usize) -> Enclosure {
        let (pi, e) = pi_e(y, p);
        let s = int(self.cross_sign, p);
        let e2 = e.sqr();
        let one = int(1, p);
        pi.mul(&e).mul(&e.sub(&one)).mul_pow2(2)
            + s.mul(
                &(pi.mul(&e2.sub(&e)).mul_pow2(2) + pi.sqr().mul(y).mul(&e2.mul_pow2(1).sub(&e)).mul_pow2(2)),
            )
            + pi.sqr().mul(y).mul(&e2.add(&e)).mul_pow2(1)
            + pi.powi(3).mul(&y.sqr()).mul(&e2.mul_pow2(1).add(&e))
    }

    /// g″ collected by powers of E:
    /// `E(π⁴y² + 4π³y − 2π² − s(4π³y + 8π²)) + E²(4π⁴y² + 8π³y + 10π² + s(16π³y + 16π²))`.
    pub fn second(&self, y: &Enclosure, p: usize) -> Enclosure {
        let (pi, e) = pi_e(y, p);
        let s = int(self.cross_sign, p);
        let (pi2, pi3, pi4) = (pi.sqr(), pi.powi(3), pi.powi(4));
        let y2 = y.sqr();
        let c1 = pi4.mul(&y2) + pi3.mul(y).mul_pow2(2) - pi2.mul_pow2(1)
            - s.mul(&(pi3.mul(y).mul_pow2(2) + pi2.mul_pow2(3)));
        let c2 = pi4.mul(&y2).mul_pow2(2) + pi3.mul(y).mul_pow2(3) + pi2.mul(&int(10, p))
            + s.mul(&(pi3.mul(y).mul_pow2(4) + pi2.mul_pow2(4)));
        e.mul(&c1) + e.sqr().mul(&c2)
    }
}

fn pi_e(y: &Enclosure, p: usize) -> (Enclosure, Enclosure) {
    let y = y.with_precision(p);
    let pi = Enclosure::pi(p);
    let e = pi.mul(&y).exp();
    (pi, e)
}

pub fn g_eval(y: &Enclosure, p: usize) -> Enclosure {
    GForm::default().value(&y.with_precision(p), p)
}

pub fn g_prime(y: &Enclosure, p: usize) -> Enclosure {
    GForm::default().prime(&y.with_precision(p), p)
}

/// The six-term display of g″, transcribed literally.
pub fn g_second(y: &Enclosure, p: usize) -> Enclosure {
    let y = y.with_precision(p);
    let (pi, e) = pi_e(&y, p);
    let e2 = e.sqr();
    let pi2 = pi.sqr();
    let t1 = e.mul(&pi2).mul_pow2(1);
    let t2 = e2.mul(&pi2).mul_pow2(1);
    let t3 = e2.mul(&pi).mul(&(pi2.mul(&y).mul_pow2(1) - pi.mul_pow2(2))).mul_pow2(2);
    let t4 = e.mul(&pi).mul(&(pi.mul_pow2(2) + pi2.mul(&y).mul_pow2(1))).mul_pow2(1);
    let t5 = e2.mul(&pi2).mul(&(int(2, p) - pi.mul(&y).mul_pow2(2) + pi2.mul(&y.sqr()))).mul_pow2(2);
    let t6 = e.mul(&pi2).mul(&(int(-4, p) + pi.mul(&y).mul_pow2(2) + pi2.mul(&y.sqr())));
    t1 + t2 + t3 + t4 + t5 + t6
}

/// Same as [`g_second`] but with the default sign on the collected form.
pub fn g_second_collected(y: &Enclosure, p: usize) -> Enclosure {
    GForm::default().second(&y.with_precision(p), p)
}

/// Both enclosures contain the same real; keep what they agree on.
fn meet(a: Enclosure, b: Enclosure) -> Enclosure {
    a.intersection(&b).unwrap_or(b)
}

/// `nπy(e^{2nπy}+1) − 2(e^{2nπy}−1)`, also evaluated as `E(u−2) + u + 2`.
pub fn even_bracket(n: u32, y: &Enclosure, p: usize) -> Enclosure {
    let u = Enclosure::pi(p).mul(&y.with_precision(p)).mul(&int(n as i64, p));
    let e = u.mul_pow2(1).exp();
    let one = int(1, p);
    let literal = u.mul(&e.add(&one)) - e.sub(&one).mul_pow2(1);
    let factored = e.mul(&u.sub(&int(2, p))) + u.add(&int(2, p));
    meet(literal, factored)
}

/// `vE + v − 4E + 4` with `v = (2n−1)πy`, `E = e^v`.
pub fn odd_bracket(n: u32, y: &Enclosure, p: usize) -> Enclosure {
    let v = Enclosure::pi(p).mul(&y.with_precision(p)).mul(&int(2 * n as i64 - 1, p));
    let e = v.exp();
    let one = int(1, p);
    let literal = v.mul(&e.add(&one)) - e.sub(&one).mul_pow2(2);
    let factored = e.mul(&v.sub(&int(4, p))) + v.add(&int(4, p));
    meet(literal, factored)
}

/// `vE − 4E`, the bracket after dropping `v + 4`.
pub fn odd_bracket_weakened(n: u32, y: &Enclosure, p: usize) -> Enclosure {
    let v = Enclosure::pi(p).mul(&y.with_precision(p)).mul(&int(2 * n as i64 - 1, p));
    let e = v.exp();
    meet(v.mul(&e) - e.mul_pow2(2), e.mul(&v.sub(&int(4, p))))
}

/// Even-index terms: for `y ≥ 2/π` the bracket is positive for every n.
pub fn verify_even_terms_large_y(n_max: u32, interval: &Enclosure, cfg: &EvalConfig) -> CertificationReport {
    let p = cfg.precision_bits;
    let mut report = CertificationReport::new(
        "large-y/even",
        "n pi y (e^(2n pi y)+1) - 2(e^(2n pi y)-1) > 0 for y >= 2/pi",
        p,
    );
    report.interval = Some(interval.clone());
    let pi = Enclosure::pi(p);
    let two_over_pi = int(2, p).div(&pi).expect("pi > 0");
    if interval.lo_enc().lt(&two_over_pi) {
        report.fail(format!("interval {interval} extends below 2/pi"), None);
        return report;
    }
    // u = nπy ≥ 2 gives E(u−2) ≥ 0, so the bracket is at least u + 2 ≥ 4
    let at_boundary = even_bracket(1, &two_over_pi, p);
    report.assert_sign("boundary", "bracket at n = 1, y = 2/pi equals 4", Some(&two_over_pi), &at_boundary, TargetSign::Positive);
    report.assert_that("boundary-value", "bracket at n = 1, y = 2/pi contains 4", at_boundary.contains(&int(4, p)));
    report.notes.push("for u = n pi y >= 2: bracket = e^(2u)(u-2) + u + 2 >= 4, uniformly in n".into());
    for n in 1..=n_max {
        report.push(certify_sign(Quantity::EvenBracket(n), interval, TargetSign::Positive, cfg));
    }
    report
}

/// Odd-index terms with n ≥ 2, after dropping the positive summand.
pub fn verify_odd_terms_large_y(n_max: u32, interval: &Enclosure, cfg: &EvalConfig) -> CertificationReport {
    let p = cfg.precision_bits;
    let mut report = CertificationReport::new(
        "large-y/odd",
        "(2n-1) pi y e^((2n-1) pi y) - 4 e^((2n-1) pi y) > 0 for n >= 2, y >= 1",
        p,
    );
    report.interval = Some(interval.clone());
    let one = int(1, p);
    if interval.lo_enc().lt(&one) {
        report.fail(format!("interval {interval} extends below 1"), None);
        return report;
    }
    let corner = Enclosure::pi(p).mul(&int(3, p)).sub(&int(4, p));
    report.assert_sign("corner", "3 pi - 4 > 0, so (2n-1) pi y > 4 for n >= 2, y >= 1", Some(&one), &corner, TargetSign::Positive);
    for n in 2..=n_max.max(2) {
        let v = Enclosure::pi(p).mul(interval).mul(&int(2 * n as i64 - 1, p));
        let dropped = v.add(&int(4, p));
        report.assert_sign(&format!("dropped/n{n}"), "the dropped summand (2n-1) pi y + 4 is positive", Some(interval), &dropped, TargetSign::Positive);
        report.push(certify_sign(Quantity::OddBracketWeakened(n), interval, TargetSign::Positive, cfg));
        report.push(certify_sign(Quantity::OddBracket(n), interval, TargetSign::Positive, cfg));
    }
    report
}

pub fn verify_g_chain(cfg: &EvalConfig) -> CertificationReport {
    verify_g_chain_with(GForm::default(), 30.0, cfg)
}

/// Positivity of g on `[1, ∞)`: g″ > 0 beyond (1+√3)/π, g′(1) > 0, g(1) > 0.
pub fn verify_g_chain_with(form: GForm, y_cap: f64, cfg: &EvalConfig) -> CertificationReport {
    let p = cfg.precision_bits;
    let mut report = CertificationReport::new("g-chain", "g(y) > 0 for y >= 1", p);
    let pi = Enclosure::pi(p);
    let (pi2, pi3) = (pi.sqr(), pi.powi(3));
    let one = int(1, p);
    let quad = |y: &Enclosure| pi3.mul(&y.sqr()) - pi2.mul(y).mul_pow2(1) - pi.mul_pow2(1);

    // (i) positive root of π³y² − 2π²y − 2π
    let root = one.add(&int(3, p).sqrt().expect("3 > 0")).div(&pi).expect("pi > 0");
    report.assert_that("root", "(1 + sqrt 3)/pi is a root of pi^3 y^2 - 2 pi^2 y - 2 pi", quad(&root).contains_zero());
    let below = Enclosure::from_decimal("0.86963", p).expect("literal");
    let above = Enclosure::from_decimal("0.86964", p).expect("literal");
    report.assert_sign("quadratic-below-root", "quadratic < 0 at 0.86963", Some(&below), &quad(&below), TargetSign::Negative);
    report.assert_sign("quadratic-above-root", "quadratic > 0 at 0.86964", Some(&above), &quad(&above), TargetSign::Positive);
    let slope = pi3.mul(&below).mul_pow2(1).sub(&pi2.mul_pow2(1));
    report.assert_sign("quadratic-increasing", "2 pi^3 y - 2 pi^2 > 0 for y >= 0.86963", Some(&below), &slope, TargetSign::Positive);

    // (ii) the last g″ term at y = 1/π is −4 + 4 + 1, and it increases in y
    let inv_pi = one.div(&pi).expect("pi > 0");
    let last = int(-4, p) + pi.mul(&inv_pi).mul_pow2(2) + pi2.mul(&inv_pi.sqr());
    report.assert_sign("last-term", "-4 + 4 pi y + pi^2 y^2 > 0 at y = 1/pi", Some(&inv_pi), &last, TargetSign::Positive);

    // grouping of the two e^{2πy} terms and agreement of the display with
    // the derivative of g
    let mut grouping_ok = true;
    let mut display_ok = true;
    for s in ["0.9", "1", "1.7", "4", "11"] {
        let y = Enclosure::from_decimal(s, p).expect("literal");
        let e2 = pi.mul(&y).mul_pow2(1).exp();
        let lhs = e2.mul(&pi).mul(&(pi2.mul(&y).mul_pow2(1) - pi.mul_pow2(2))).mul_pow2(2)
            + e2.mul(&pi2).mul(&(int(2, p) - pi.mul(&y).mul_pow2(2) + pi2.mul(&y.sqr()))).mul_pow2(2);
        let rhs = e2.mul(&pi).mul(&quad(&y)).mul_pow2(2);
        grouping_ok &= lhs.intersects(&rhs);
        display_ok &= g_second(&y, p).intersects(&form.second(&y, p));
    }
    report.assert_that("grouping", "e^(2 pi y) terms of g'' regroup to 4 e^(2 pi y) pi (pi^3 y^2 - 2 pi^2 y - 2 pi)", grouping_ok);
    report.assert_that("display-consistency", "the displayed g'' equals the second derivative of g", display_ok);

    // finite differences: g′ against g, g″ against g′
    let h = Enclosure::from_f64(2f64.powi(-20), p);
    let y1 = one.clone();
    let fd = |f: &dyn Fn(&Enclosure) -> Enclosure| {
        f(&y1.add(&h)).sub(&f(&y1.sub(&h))).div(&h.mul_pow2(1)).expect("h > 0")
    };
    let fd1 = fd(&|y| form.value(y, p));
    let fd2 = fd(&|y| form.prime(y, p));
    // |error| ≤ h²/6·max|g‴| (resp. g⁗) near 1, both well below 1e6·h²
    let tol = Enclosure::from_f64(1e6 * 2f64.powi(-40), p);
    report.assert_that("g-prime-fd", "g' agrees with central differences of g at y = 1", fd1.sub(&form.prime(&y1, p)).abs().lt(&tol));
    report.assert_that("g-second-fd", "g'' agrees with central differences of g' at y = 1", fd2.sub(&form.second(&y1, p)).abs().lt(&tol));

    // (iii) g″ > 0 on [(1+√3)/π, 1] ∪ [1, y_cap]
    let g2 = |y: &Enclosure, c: &EvalConfig| -> Result<Enclosure, Error> { Ok(form.second(&y.with_precision(c.precision_bits), c.precision_bits)) };
    let left = root.hi_enc().hull(&one);
    let right = one.hull(&Enclosure::from_f64(y_cap, p));
    report.push(certify_sign_fn("g-second/left", "g'' > 0 on [(1+sqrt 3)/pi, 1]", &g2, &left, TargetSign::Positive, cfg));
    report.push(certify_sign_fn("g-second/right", "g'' > 0 on [1, Y]", &g2, &right, TargetSign::Positive, cfg));
    report.notes.push(
        "beyond Y: the e^(2 pi y) group is positive past the root, the last term past 1/pi, and the rest termwise".into(),
    );

    // (iv) g′(1) > 0, g(1) > 0, and the printed checkpoints
    let g1 = form.value(&one, p);
    let gp1 = form.prime(&one, p);
    report.assert_sign("g-prime-at-1", "g'(1) > 0", Some(&one), &gp1, TargetSign::Positive);
    report.assert_sign("g-at-1", "g(1) > 0", Some(&one), &g1, TargetSign::Positive);
    report.assert_that("g-at-1-printed", "g(1) rounds to 55.5", rounds_to_printed(&g1, "55.5"));
    report.assert_that("g-prime-at-1-printed", "g'(1) rounds to 3584.5", rounds_to_printed(&gp1, "3584.5"));
    report.notes.push("g'' > 0 on [1, inf) and g'(1) > 0 give g' > 0, hence g(y) >= g(1) > 0 for y >= 1".into());
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: &str) -> Enclosure {
        Enclosure::from_decimal(s, 128).unwrap()
    }

    fn near(e: &Enclosure, s: &str) -> bool {
        e.intersects(&pt(s).inflate(&pt("1e-30")))
    }

    #[test]
    fn g_values_at_one() {
        assert!(near(&g_eval(&pt("1"), 128), "55.5087381605183265479394200943778317900389"));
        assert!(near(&g_prime(&pt("1"), 128), "3584.50367116438153452548690958105600076"));
        assert!(g_second(&pt("1"), 128).intersects(&pt("53472.16190675611214814675065").inflate(&pt("1e-22"))));
        assert!(g_eval(&pt("0"), 128).contains_f64(0.0));
    }

    #[test]
    fn collected_and_displayed_second_derivative_agree() {
        for s in ["0.3", "1", "2.5"] {
            assert!(g_second(&pt(s), 128).intersects(&g_second_collected(&pt(s), 128)));
        }
    }

    #[test]
    fn even_bracket_examples() {
        let two_over_pi = pt("2").div(&Enclosure::pi(128)).unwrap();
        assert!(even_bracket(1, &two_over_pi, 128).contains_f64(4.0));
        assert!(even_bracket(3, &pt("1"), 128).is_positive());
        // below 2/π the condition matters
        let v = even_bracket(1, &pt("0.1"), 128);
        assert!(v.is_negative());
        let e = (0.2 * std::f64::consts::PI).exp();
        assert!((v.to_f64() - (0.1 * std::f64::consts::PI * (e + 1.0) - 2.0 * (e - 1.0))).abs() < 1e-12);
    }

    #[test]
    fn odd_bracket_examples() {
        assert!(odd_bracket_weakened(2, &pt("1"), 128).is_positive());
        assert!(odd_bracket_weakened(5, &pt("1"), 128).is_positive());
        assert!(odd_bracket_weakened(2, &pt("0.4"), 128).is_negative());
    }

    #[test]
    fn g_chain_certifies() {
        let r = verify_g_chain(&EvalConfig::default());
        assert!(r.is_certified(), "{:?}", r.status);
    }

    #[test]
    fn flipped_cross_term_is_caught() {
        let r = verify_g_chain_with(GForm { cross_sign: 1 }, 30.0, &EvalConfig::default());
        assert!(r.is_failed());
        assert!(r.find("g-at-1-printed").unwrap().is_failed());
        assert!(r.find("display-consistency").unwrap().is_failed());
    }

    #[test]
    fn termwise_chains_small_n() {
        let cfg = EvalConfig::default();
        let two_over_pi = pt("2").div(&Enclosure::pi(128)).unwrap();
        let iv = two_over_pi.lo_enc().hull(&pt("30"));
        assert!(verify_even_terms_large_y(5, &iv, &cfg).is_certified());
        assert!(verify_even_terms_large_y(5, &pt("0.5").hull(&pt("1")), &cfg).is_failed());
        assert!(verify_odd_terms_large_y(5, &pt("1").hull(&pt("30")), &cfg).is_certified());
    }
}
