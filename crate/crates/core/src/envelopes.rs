//! Two-term envelopes for `(−1)^ν θ₂^(ν)` on `[1, ∞)`.
//!
//! With `L = 2(π/4)^ν e^{−πy/4}` and `S = 2·9^ν(π/4)^ν e^{−9πy/4}`, the
//! lower envelope is `L + S` and the upper one `L + (1 + c_ν)·S`.

use crate::enclosure::{Enclosure, EvalConfig};
use crate::theta::{self, geometric_tail, DerivativeOrder};
use crate::verifier::{certify_sign_fn, CertificationReport, ExpPoly, TargetSign, Witness};
use crate::Error;

/// The inflation constants c₀..c₃.
#[derive(Clone, Debug)]
pub struct EnvelopeConstants {
    pub c: [Enclosure; 4],
}

pub const DEFAULT_CONSTANTS: [&str; 4] = ["0.00001", "0.00003", "0.00008", "0.0003"];

impl EnvelopeConstants {
    pub fn new(prec: usize) -> Self {
        Self::from_decimals(DEFAULT_CONSTANTS, prec).expect("literal constants parse")
    }

    pub fn from_decimals(c: [&str; 4], prec: usize) -> Result<Self, Error> {
        Ok(EnvelopeConstants {
            c: [
                Enclosure::from_decimal(c[0], prec)?,
                Enclosure::from_decimal(c[1], prec)?,
                Enclosure::from_decimal(c[2], prec)?,
                Enclosure::from_decimal(c[3], prec)?,
            ],
        })
    }

    pub fn zero(prec: usize) -> Self {
        let z = Enclosure::from_i64(0, prec);
        EnvelopeConstants { c: [z.clone(), z.clone(), z.clone(), z] }
    }

    pub fn get(&self, nu: DerivativeOrder) -> &Enclosure {
        &self.c[nu.index()]
    }
}

/// Lower and upper envelope of `(−1)^ν θ₂^(ν)` for one ν.
#[derive(Clone, Debug)]
pub struct EnvelopePair {
    pub nu: DerivativeOrder,
    pub c: Enclosure,
}

impl EnvelopePair {
    pub fn new(nu: DerivativeOrder, constants: &EnvelopeConstants) -> Self {
        EnvelopePair { nu, c: constants.get(nu).clone() }
    }

    pub fn lower(&self, y: &Enclosure) -> Result<Enclosure, Error> {
        lower_envelope(y, self.nu)
    }

    pub fn upper(&self, y: &Enclosure) -> Result<Enclosure, Error> {
        upper_envelope_with(y, self.nu, &self.c)
    }

    /// The lower envelope as `Σ b_k e^{kπy/4}`.
    pub fn lower_exppoly(&self, prec: usize) -> ExpPoly {
        let (l, s) = coefficients(self.nu, prec);
        ExpPoly::term(-1, l).add(&ExpPoly::term(-9, s))
    }

    pub fn upper_exppoly(&self, prec: usize) -> ExpPoly {
        let (l, s) = coefficients(self.nu, prec);
        let one = Enclosure::from_i64(1, prec);
        ExpPoly::term(-1, l).add(&ExpPoly::term(-9, s.mul(&one.add(&self.c.with_precision(prec)))))
    }
}

/// `(2(π/4)^ν, 2·9^ν(π/4)^ν)`
fn coefficients(nu: DerivativeOrder, prec: usize) -> (Enclosure, Enclosure) {
    let n = nu.get() as i32;
    let base = Enclosure::pi(prec).mul_pow2(-2).powi(n).mul_pow2(1);
    let nine = Enclosure::from_i64(9, prec).powi(n);
    (base.clone(), base.mul(&nine))
}

fn check_domain(y: &Enclosure) -> Result<(), Error> {
    if !y.is_finite() || y.lo_enc().lt(&Enclosure::from_i64(1, y.precision())) {
        return Err(Error::Domain(format!("envelopes are defined for y >= 1, got {y}")));
    }
    Ok(())
}

/// `(L, S)` at y.
fn parts(y: &Enclosure, nu: DerivativeOrder) -> (Enclosure, Enclosure) {
    let p = y.precision();
    let (l, s) = coefficients(nu, p);
    let e = Enclosure::pi(p).mul_pow2(-2).mul(y).neg();
    (l.mul(&e.exp()), s.mul(&e.mul(&Enclosure::from_i64(9, p)).exp()))
}

pub fn lower_envelope(y: &Enclosure, nu: DerivativeOrder) -> Result<Enclosure, Error> {
    check_domain(y)?;
    let (l, s) = parts(y, nu);
    Ok(l.add(&s))
}

pub fn upper_envelope(y: &Enclosure, nu: DerivativeOrder) -> Result<Enclosure, Error> {
    let consts = EnvelopeConstants::new(y.precision());
    upper_envelope_with(y, nu, consts.get(nu))
}

pub fn upper_envelope_with(y: &Enclosure, nu: DerivativeOrder, c: &Enclosure) -> Result<Enclosure, Error> {
    check_domain(y)?;
    let (l, s) = parts(y, nu);
    let one = Enclosure::from_i64(1, y.precision());
    Ok(l.add(&s.mul(&one.add(c))))
}

/// `d/dy` of the lower (`c = 0`) or upper envelope; negative for y > 0.
pub fn envelope_derivative(y: &Enclosure, nu: DerivativeOrder, c: &Enclosure) -> Result<Enclosure, Error> {
    check_domain(y)?;
    let p = y.precision();
    let (l, s) = parts(y, nu);
    let q = Enclosure::pi(p).mul_pow2(-2);
    let one = Enclosure::from_i64(1, p);
    Ok(l.mul(&q).add(&s.mul(&one.add(c)).mul(&q).mul(&Enclosure::from_i64(9, p))).neg())
}

/// `(−1)^ν θ₂^(ν)(y)` minus its lower envelope, summed directly from the
/// terms with |n+½| ≥ 5/2 so that no cancellation occurs.
pub fn envelope_residual(y: &Enclosure, nu: DerivativeOrder, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    check_domain(y)?;
    theta::theta2_signed_tail(y, nu, 2, cfg)
}

/// `log`-spaced points on `[a, b]`.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| match i {
            0 => a,
            i if i == n - 1 => b,
            i => (la + (lb - la) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Certifies `0 < lower(y) < (−1)^ν θ₂^(ν)(y) < upper(y)` at each grid point.
///
/// The two strict inequalities are decided on the residual
/// `R = (−1)^ν θ₂^(ν) − lower`, which is summed directly: `R > 0` and
/// `c_ν·S − R > 0`. The full series value is checked against `lower + R`.
pub fn verify_sandwich(grid: &[f64], nu: DerivativeOrder, constants: &EnvelopeConstants, cfg: &EvalConfig) -> CertificationReport {
    let p = cfg.precision_bits;
    let id = format!("lemma1/sandwich/nu{}", nu.get());
    let desc = format!("0 < lower < (-1)^{0} theta2^({0}) < upper on the grid", nu.get());
    let mut report = CertificationReport::new(&id, &desc, p);
    if let (Some(a), Some(b)) = (grid.iter().cloned().reduce(f64::min), grid.iter().cloned().reduce(f64::max)) {
        report.interval = Enclosure::from_f64_bounds(a, b, p).ok();
    }
    let c = constants.get(nu).with_precision(p);
    let mut margin: Option<Enclosure> = None;
    for &yv in grid {
        let y = Enclosure::from_f64(yv, p);
        report.boxes_examined += 1;
        let evaluated = (|| -> Result<_, Error> {
            let (l, s) = { check_domain(&y)?; parts(&y, nu) };
            let r = envelope_residual(&y, nu, cfg)?;
            let full = theta::theta2_series(&y, nu, cfg)?;
            let signed = if nu.get() % 2 == 1 { full.neg() } else { full };
            Ok((l.add(&s), s, r, signed))
        })();
        let (lower, s, r, value) = match evaluated {
            Ok(v) => v,
            Err(Error::Domain(m)) => {
                report.fail(m, None);
                return report;
            }
            Err(e) => {
                report.inconclusive(e.to_string(), Some(y));
                return report;
            }
        };
        if !lower.is_positive() {
            report.inconclusive(format!("lower envelope not certified positive at y = {yv}"), Some(y));
            return report;
        }
        if !lower.add(&r).intersects(&value) {
            report.fail(format!("lower + residual disagrees with the series at y = {yv}"), None);
            return report;
        }
        let gap_hi = c.mul(&s).sub(&r);
        for (what, v) in [("lower < value", &r), ("value < upper", &gap_hi)] {
            if v.is_positive() {
                let m = v.lo_enc();
                margin = Some(match margin {
                    Some(old) if old.lt(&m) => old,
                    _ => m,
                });
            } else if v.is_negative() {
                let w = Witness { y: y.clone(), value: v.clone(), context: format!("{id}: {what}") };
                report.fail(format!("{what} fails at y = {yv}"), Some(w));
                return report;
            } else {
                report.inconclusive(format!("cannot decide {what} at y = {yv}"), Some(y));
                return report;
            }
        }
    }
    report.min_margin = margin;
    report
}

/// `∫_T^∞ t^k e^{−λt} dt = e^{−λT} Σ_{j≤k} k!/(k−j)!·T^{k−j}/λ^{j+1}`, λ = πy/4, T = 24.
fn tail_integral_k(k: u32, y: &Enclosure) -> Enclosure {
    let p = y.precision();
    let lambda = Enclosure::pi(p).mul_pow2(-2).mul(y);
    let t = Enclosure::from_i64(24, p);
    let mut sum = Enclosure::from_i64(0, p);
    let mut falling = 1i64; // k!/(k−j)!
    for j in 0..=k {
        let term = Enclosure::from_i64(falling, p)
            .mul(&t.powi((k - j) as i32))
            .mul(&lambda.powi(-(j as i32) - 1));
        sum = sum.add(&term);
        falling *= (k - j) as i64;
    }
    sum.mul(&lambda.mul(&t).neg().exp())
}

/// `∫_{24}^∞ t^ν e^{−πty/4} dt` in closed form.
pub fn tail_integral(nu: DerivativeOrder, y: &Enclosure) -> Result<Enclosure, Error> {
    check_domain(y)?;
    Ok(tail_integral_k(nu.get() as u32, y))
}

/// `e^{9πy/4}·9^{−ν}·∫_{24}^∞ t^ν e^{−πty/4} dt`, the relative size of the
/// omitted terms against the second envelope term.
pub fn admissibility_factor(nu: DerivativeOrder, y: &Enclosure) -> Result<Enclosure, Error> {
    let p = y.precision();
    let i = tail_integral(nu, y)?;
    let e = Enclosure::pi(p).mul_pow2(-2).mul(y).mul(&Enclosure::from_i64(9, p)).exp();
    Ok(e.mul(&i).mul(&Enclosure::from_i64(9, p).powi(-(nu.get() as i32))))
}

/// `Σ_{n≥25} n^ν e^{−πny/4}` with a certified tail.
fn linear_exponent_sum(nu: DerivativeOrder, y: &Enclosure, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    let p = cfg.precision_bits;
    let k = nu.get() as i32;
    let w = Enclosure::pi(p).mul_pow2(-2).mul(y).neg().exp();
    let w_up = w.hi_enc();
    let mut pw = w.powi(25);
    let mut pw_up = w_up.powi(25);
    let lead = Enclosure::from_i64(25, p).powi(k).mul(&pw);
    let tol = theta::effective_tolerance(cfg, &lead);
    let mut sum = Enclosure::from_i64(0, p);
    let mut n: i64 = 25;
    loop {
        sum = sum.add(&Enclosure::from_i64(n, p).powi(k).mul(&pw));
        pw = pw.mul(&w);
        pw_up = pw_up.mul(&w_up);
        let first = Enclosure::from_i64(n + 1, p).powi(k).mul(&pw_up);
        let ratio = Enclosure::from_ratio(n + 2, n + 1, p).powi(k).mul(&w_up);
        if let Some(t) = geometric_tail(&first, &ratio) {
            if t.lt(&tol) {
                return Ok(sum.inflate(&t));
            }
        }
        if (n - 25) as usize >= cfg.max_terms {
            return Err(Error::Convergence { max_terms: cfg.max_terms });
        }
        n += 1;
    }
}

/// Certifies that `c_ν` absorbs every omitted term of θ₂^(ν) on `[1, ∞)`.
pub fn check_cnu_admissible(nu: DerivativeOrder, cfg: &EvalConfig) -> CertificationReport {
    let c = EnvelopeConstants::new(cfg.precision_bits);
    check_admissible_with(nu, c.get(nu), cfg)
}

pub fn check_admissible_with(nu: DerivativeOrder, c: &Enclosure, cfg: &EvalConfig) -> CertificationReport {
    let p = cfg.precision_bits;
    let k = nu.get();
    let id = format!("lemma1/admissible/nu{k}");
    let mut report = CertificationReport::new(&id, &format!("c_{k} bounds the omitted terms for all y >= 1"), p);
    report.interval = Some(Enclosure::from_i64(1, p).hull(&Enclosure::from_i64(100, p)));
    let one = Enclosure::from_i64(1, p);
    let c = c.with_precision(p);

    // the integrand t^ν e^{−πty/4} decreases on [24, ∞) once 4ν/(πy) < 24
    let turn = Enclosure::from_i64(4 * k as i64, p).div(&Enclosure::pi(p)).expect("pi > 0");
    report.assert_that(
        "integrand-decreasing",
        "t^nu e^(-pi t y/4) is decreasing for t >= 24, y >= 1 (4 nu / pi < 24)",
        turn.lt(&Enclosure::from_i64(24, p)),
    );

    // the odd squares n² ≥ 25 are a subsequence of the integers ≥ 25
    match (envelope_residual(&one, nu, cfg), linear_exponent_sum(nu, &one, cfg)) {
        (Ok(r), Ok(lin)) => {
            let odd = r.div(&coefficients(nu, p).0).expect("positive coefficient");
            let i = tail_integral_k(k as u32, &one);
            report.assert_sign("middle-step", "sum over odd n >= 5 < sum over n >= 25 at y = 1", Some(&one), &lin.sub(&odd), TargetSign::Positive);
            report.assert_sign("integral-step", "sum over n >= 25 < integral from 24 at y = 1", Some(&one), &i.sub(&lin), TargetSign::Positive);
        }
        (Err(e), _) | (_, Err(e)) => report.inconclusive(e.to_string(), Some(one.clone())),
    }

    let factor = admissibility_factor(nu, &one).expect("y = 1 is in the domain");
    report.assert_sign("factor-at-1", "e^(9 pi/4) 9^(-nu) integral < c_nu at y = 1", Some(&one), &c.sub(&factor), TargetSign::Positive);

    // d/dy factor = −(π/4)·e^{9πy/4}·9^{−ν}·(J_{ν+1} − 9·J_ν)
    let deriv = |y: &Enclosure, c: &EvalConfig| -> Result<Enclosure, Error> {
        let y = y.with_precision(c.precision_bits);
        let j0 = tail_integral_k(k as u32, &y);
        let j1 = tail_integral_k(k as u32 + 1, &y);
        Ok(j1.sub(&j0.mul(&Enclosure::from_i64(9, c.precision_bits))))
    };
    let iv = one.hull(&Enclosure::from_i64(100, p));
    let mut mono = certify_sign_fn(
        "factor-decreasing",
        "J_(nu+1) - 9 J_nu > 0, so the factor decreases in y",
        &deriv,
        &iv,
        TargetSign::Positive,
        cfg,
    );
    mono.notes.push("beyond y = 100: t >= 24 gives J_(nu+1) >= 24 J_nu > 9 J_nu".into());
    report.push(mono);
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    fn pt(s: &str) -> Enclosure {
        Enclosure::from_decimal(s, 128).unwrap()
    }

    fn near(e: &Enclosure, s: &str, tol: &str) -> bool {
        e.intersects(&pt(s).inflate(&pt(tol)))
    }

    fn nu(n: u8) -> DerivativeOrder {
        DerivativeOrder::new(n).unwrap()
    }

    #[test]
    fn lower_envelope_values() {
        let want = [
            "0.913579132217602789603547496047259",
            "0.728222862332905238912299445073334",
            "0.647575135158950774866858558589193",
            "1.04320296168865638403421641510196",
        ];
        for (k, w) in want.iter().enumerate() {
            let v = lower_envelope(&pt("1"), nu(k as u8)).unwrap();
            assert!(near(&v, w, "1e-30"), "nu={k}: {v}");
        }
        assert!(lower_envelope(&pt("50"), nu(0)).unwrap().lt(&pt("1e-16")));
    }

    #[test]
    fn upper_minus_lower_is_the_inflation() {
        let y = pt("2");
        let d = upper_envelope(&y, nu(2)).unwrap().sub(&lower_envelope(&y, nu(2)).unwrap());
        let pi = Enclosure::pi(128);
        let expect = pt("0.00008").mul(&pt("2")).mul(&pt("81")).mul(&pi.sqr()).mul(&pi.mul(&pt("-4.5")).exp()).mul(&pt("0.0625"));
        assert!(d.intersects(&expect));
    }

    #[test]
    fn below_one_is_a_domain_error() {
        assert!(matches!(lower_envelope(&pt("0.99"), nu(0)), Err(Error::Domain(_))));
        assert!(matches!(tail_integral(nu(1), &pt("0.5")), Err(Error::Domain(_))));
    }

    #[test]
    fn tail_integral_values() {
        let want = [
            "8.29186066327012115e-9",
            "2.09562180814392360761e-7",
            "5.30975745343123933005e-6",
            "1.34908461297028938635e-4",
        ];
        for (k, w) in want.iter().enumerate() {
            let v = tail_integral(nu(k as u8), &pt("1")).unwrap();
            assert!(near(&v, w, "1e-24"), "nu={k}: {v}");
        }
        let pi = Enclosure::pi(128);
        let closed = pt("4").div(&pi).unwrap().mul(&pi.mul(&pt("-6")).exp());
        assert!(tail_integral(nu(0), &pt("1")).unwrap().intersects(&closed));
        let t3 = tail_integral(nu(3), &pt("2")).unwrap();
        assert!(t3.is_positive() && t3.lt(&tail_integral(nu(3), &pt("1")).unwrap()));
    }

    #[test]
    fn admissibility_factors() {
        let want = ["9.73865075884610354e-6", "2.73474726078704938e-5", "7.69903795235505940e-5", "2.17349405573747465e-4"];
        for (k, w) in want.iter().enumerate() {
            let v = admissibility_factor(nu(k as u8), &pt("1")).unwrap();
            assert!(near(&v, w, "1e-21"), "nu={k}: {v}");
        }
    }

    #[test]
    fn admissible_constants_certify() {
        for k in 0..4 {
            let r = check_cnu_admissible(nu(k), &cfg());
            assert!(r.is_certified(), "nu={k}: {:?}", r.status);
        }
    }

    #[test]
    fn too_small_constants_fail() {
        assert!(check_admissible_with(nu(0), &pt("1e-7"), &cfg()).is_failed());
        let c = EnvelopeConstants::new(128);
        for k in 0..4 {
            let third = c.get(nu(k)).div(&pt("3")).unwrap();
            assert!(check_admissible_with(nu(k), &third, &cfg()).is_failed(), "nu={k}");
        }
    }

    #[test]
    fn sandwich_on_small_grids() {
        let c = EnvelopeConstants::new(128);
        assert!(verify_sandwich(&[1.0, 2.0, 5.0, 10.0], nu(0), &c, &cfg()).is_certified());
        assert!(verify_sandwich(&[1.0], nu(3), &c, &cfg()).is_certified());
    }

    #[test]
    fn sandwich_without_inflation_fails() {
        let z = EnvelopeConstants::zero(128);
        for k in 0..4 {
            let r = verify_sandwich(&[1.0], nu(k), &z, &cfg());
            assert!(r.is_failed(), "nu={k}");
        }
    }

    #[test]
    fn sandwich_far_out() {
        let c = EnvelopeConstants::new(128);
        let grid = log_grid(1.0, 100.0, 40);
        assert_eq!(grid.len(), 40);
        for k in 0..4 {
            assert!(verify_sandwich(&grid, nu(k), &c, &cfg()).is_certified(), "nu={k}");
        }
    }

    #[test]
    fn envelopes_decrease() {
        let c = EnvelopeConstants::new(128);
        for &y in &log_grid(1.0, 100.0, 12) {
            for k in 0..4 {
                let y = Enclosure::from_f64(y, 128);
                assert!(envelope_derivative(&y, nu(k), &Enclosure::from_i64(0, 128)).unwrap().is_negative());
                assert!(envelope_derivative(&y, nu(k), c.get(nu(k))).unwrap().is_negative());
            }
        }
    }
}
