//! Convexity scans for `f_a(y) = y^a·θ₄′(y)/θ₄(y)`.
//!
//! The scanner is one-sided: a returned [`Witness`] is a proof that `f_a` is
//! not convex, but finding none proves nothing.

use crate::enclosure::{Enclosure, EvalConfig};
use crate::envelopes::log_grid;
use crate::theta::{self, DerivativeOrder};
use crate::verifier::Witness;
use crate::{modular, Error};

#[derive(Clone, Debug)]
pub struct ExponentQuery {
    pub a: Enclosure,
    /// Decimal form of `a`, as given.
    pub a_text: String,
    pub lo: f64,
    pub hi: f64,
    pub resolution: usize,
}

impl ExponentQuery {
    pub fn new(a: &str, lo: f64, hi: f64, resolution: usize, prec: usize) -> Result<Self, Error> {
        let q = ExponentQuery { a: Enclosure::from_decimal(a, prec)?, a_text: a.to_string(), lo, hi, resolution };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.hi.is_finite()) {
            return Err(Error::Config(format!("scan interval [{}, {}] must satisfy 0 < lo < hi", self.lo, self.hi)));
        }
        if self.resolution < 8 {
            return Err(Error::Config(format!("resolution {} is below 8", self.resolution)));
        }
        Ok(())
    }
}

/// `f_a″ = y^{a−4}[(a−2)(a−3)f + 2(a−2)y·f′ + y²f″]`, using `f_a = y^{a−2}f`.
fn via_f(a: &Enclosure, y: &Enclosure, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    let p = cfg.precision_bits;
    let (f0, f1, f2) = if y.lo_enc().lt(&Enclosure::from_i64(1, p)) {
        let m = modular::f_modular(y, cfg)?;
        (m.f, m.f_prime, m.f_second)
    } else {
        let l = theta::lambert_values(y, cfg)?;
        (l.f, l.f_prime, l.f_second)
    };
    let am2 = a.sub(&Enclosure::from_i64(2, p));
    let am3 = a.sub(&Enclosure::from_i64(3, p));
    let inner = am2.mul(&am3).mul(&f0) + am2.mul(y).mul(&f1).mul_pow2(1) + y.sqr().mul(&f2);
    Ok(y.pow_enc(&a.sub(&Enclosure::from_i64(4, p)))?.mul(&inner))
}

/// `f_a″ = a(a−1)y^{a−2}ℓ + 2a·y^{a−1}ℓ′ + y^a·ℓ″` with `ℓ = θ₄′/θ₄`.
pub fn f_a_second_quotient(a: &Enclosure, y: &Enclosure, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    let p = cfg.precision_bits;
    let y = y.with_precision(p);
    let t: Vec<Enclosure> = (0..4u8)
        .map(|k| theta::theta4(&y, DerivativeOrder::new(k).expect("k <= 3"), cfg))
        .collect::<Result<_, _>>()?;
    let l = t[1].div(&t[0])?;
    let r2 = t[2].div(&t[0])?;
    let r3 = t[3].div(&t[0])?;
    let l1 = r2.sub(&l.sqr());
    let l2 = r3.sub(&r2.mul(&l).mul(&Enclosure::from_i64(3, p))).add(&l.powi(3).mul_pow2(1));
    let one = Enclosure::from_i64(1, p);
    let ya2 = y.pow_enc(&a.sub(&Enclosure::from_i64(2, p)))?;
    Ok(a.mul(&a.sub(&one)).mul(&ya2).mul(&l)
        + a.mul(&ya2).mul(&y).mul(&l1).mul_pow2(1)
        + ya2.mul(&y.sqr()).mul(&l2))
}

/// Second derivative of `y^a θ₄′/θ₄`, as the intersection of two independent
/// formulas.
pub fn f_a_second(a: &Enclosure, y: &Enclosure, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    theta::check_positive(y)?;
    let y = y.with_precision(cfg.precision_bits);
    let a = a.with_precision(cfg.precision_bits);
    let u = via_f(&a, &y, cfg)?;
    match f_a_second_quotient(&a, &y, cfg) {
        Ok(v) => u
            .intersection(&v)
            .ok_or_else(|| Error::Domain(format!("inconsistent enclosures {u} and {v} at y = {y}"))),
        Err(_) => Ok(u),
    }
}

#[derive(Clone, Debug)]
pub struct ScanRow {
    pub y: f64,
    pub value: Result<Enclosure, Error>,
}

#[derive(Clone, Debug)]
pub struct ScanResult {
    pub query: ExponentQuery,
    pub rows: Vec<ScanRow>,
    pub witness: Option<Witness>,
}

const REFINEMENTS: usize = 40;

fn score(v: &Result<Enclosure, Error>) -> f64 {
    match v {
        Ok(e) => e.to_f64(),
        Err(_) => f64::INFINITY,
    }
}

/// Grid scan followed by a golden-section search around the smallest value.
pub fn scan(q: &ExponentQuery, cfg: &EvalConfig) -> Result<ScanResult, Error> {
    q.validate()?;
    let p = cfg.precision_bits;
    let eval = |y: f64| f_a_second(&q.a, &Enclosure::from_f64(y, p), cfg);
    let grid = log_grid(q.lo, q.hi, q.resolution);
    let rows: Vec<ScanRow> = grid.iter().map(|&y| ScanRow { y, value: eval(y) }).collect();

    let mut best: Option<(f64, Enclosure)> = None;
    let mut consider = |y: f64, v: &Result<Enclosure, Error>| {
        if let Ok(e) = v {
            if e.is_negative() && best.as_ref().is_none_or(|(_, b)| e.to_f64() < b.to_f64()) {
                best = Some((y, e.clone()));
            }
        }
    };
    for r in &rows {
        consider(r.y, &r.value);
    }

    let i = (0..rows.len())
        .min_by(|&i, &j| score(&rows[i].value).total_cmp(&score(&rows[j].value)))
        .unwrap_or(0);
    let (mut a, mut b) = (grid[i.saturating_sub(1)], grid[(i + 1).min(grid.len() - 1)]);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut vc, mut vd) = (eval(c), eval(d));
    for _ in 0..REFINEMENTS {
        consider(c, &vc);
        consider(d, &vd);
        if score(&vc) < score(&vd) {
            b = d;
            d = c;
            vd = vc;
            c = b - phi * (b - a);
            vc = eval(c);
        } else {
            a = c;
            c = d;
            vc = vd;
            d = a + phi * (b - a);
            vd = eval(d);
        }
    }
    consider(c, &vc);
    consider(d, &vd);

    let context = format!("f_a'' < 0 at a = {}", q.a_text);
    let witness = best.map(|(y, value)| Witness { y: Enclosure::from_f64(y, p), value, context });
    Ok(ScanResult { query: q.clone(), rows, witness })
}

pub fn find_nonconvex_witness(q: &ExponentQuery, cfg: &EvalConfig) -> Option<Witness> {
    scan(q, cfg).ok().and_then(|r| r.witness)
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

    #[test]
    fn exponent_two_is_f() {
        for s in ["0.3", "1", "2.5"] {
            let v = f_a_second(&pt("2"), &pt(s), &cfg()).unwrap();
            assert!(v.intersects(&theta::f_second_lambert(&pt(s), &cfg()).unwrap()), "y={s}");
        }
    }

    #[test]
    fn formulas_agree() {
        for (a, y) in [("2.1", "0.3"), ("3", "1"), ("0", "1"), ("2.1", "2")] {
            let u = via_f(&pt(a), &pt(y), &cfg()).unwrap();
            let v = f_a_second_quotient(&pt(a), &pt(y), &cfg()).unwrap();
            assert!(u.intersects(&v), "a={a} y={y}");
        }
    }

    #[test]
    fn log_theta_second_derivative_by_differences() {
        // a = 0: (θ₄′/θ₄)″ against central differences of (log θ₄)′
        let h = 2f64.powi(-20);
        let l = |y: f64| {
            let y = Enclosure::from_f64(y, 128);
            let t0 = theta::theta4(&y, DerivativeOrder::new(0).unwrap(), &cfg()).unwrap();
            let t1 = theta::theta4(&y, DerivativeOrder::new(1).unwrap(), &cfg()).unwrap();
            t1.div(&t0).unwrap().to_f64()
        };
        let fd2 = (l(1.0 + h) - 2.0 * l(1.0) + l(1.0 - h)) / (h * h);
        let v = f_a_second(&pt("0"), &pt("1"), &cfg()).unwrap().to_f64();
        assert!((fd2 - v).abs() < 1e-3, "{fd2} vs {v}");
    }

    #[test]
    fn query_validation() {
        assert!(ExponentQuery::new("2.1", 0.0, 5.0, 16, 128).is_err());
        assert!(ExponentQuery::new("2.1", 1.0, 0.5, 16, 128).is_err());
        assert!(ExponentQuery::new("2.1", 0.05, 5.0, 4, 128).is_err());
        assert!(ExponentQuery::new("x", 0.05, 5.0, 16, 128).is_err());
    }

    #[test]
    fn witness_for_2_1_and_none_for_2() {
        let q = ExponentQuery::new("2.1", 0.05, 5.0, 64, 128).unwrap();
        let w = find_nonconvex_witness(&q, &cfg()).expect("witness");
        assert!(w.value.is_negative());
        let y = w.y.to_f64();
        assert!((y - 0.05).abs() <= 0.005, "witness at {y}");
        // soundness at doubled precision
        let again = f_a_second(&pt("2.1").with_precision(256), &w.y.with_precision(256), &cfg().escalated()).unwrap();
        assert!(again.is_negative());

        let q2 = ExponentQuery::new("2", 0.05, 5.0, 64, 128).unwrap();
        assert!(find_nonconvex_witness(&q2, &cfg()).is_none());
    }

    #[test]
    fn exponent_three_fails_too() {
        let q = ExponentQuery::new("3", 0.05, 5.0, 32, 128).unwrap();
        assert!(find_nonconvex_witness(&q, &cfg()).is_some());
    }
}
