//! The modular relation θ₄(y) = y^{−1/2}·θ₂(1/y) and its first three
//! derivatives, plus the logarithmic form of f used for small arguments.

use crate::enclosure::{Enclosure, EvalConfig};
use crate::theta::{self, check_positive, effective_tolerance, geometric_tail, DerivativeOrder};
use crate::verifier::{CertificationReport, Status, Witness};
use crate::Error;

/// Rational coefficient `num/den`.
pub type Ratio = (i64, i64);

/// `θ₄^(ν)(y) = Σ_j c[ν][j] · y^{−1/2−ν−j} · θ₂^(j)(1/y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularCoefficients(pub [Vec<Ratio>; 4]);

impl Default for ModularCoefficients {
    fn default() -> Self {
        ModularCoefficients([
            vec![(1, 1)],
            vec![(-1, 2), (-1, 1)],
            vec![(3, 4), (3, 1), (1, 1)],
            vec![(-15, 8), (-45, 4), (-15, 2), (-1, 1)],
        ])
    }
}

pub fn theta4_via_modular(y: &Enclosure, nu: DerivativeOrder, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    theta4_via_modular_with(y, nu, cfg, &ModularCoefficients::default())
}

pub fn theta4_via_modular_with(
    y: &Enclosure,
    nu: DerivativeOrder,
    cfg: &EvalConfig,
    coeffs: &ModularCoefficients,
) -> Result<Enclosure, Error> {
    check_positive(y)?;
    let p = cfg.precision_bits;
    let y = y.with_precision(p);
    let x = y.recip()?;
    let nu_i = nu.get() as i32;
    let mut sum = Enclosure::from_i64(0, p);
    for (j, &(num, den)) in coeffs.0[nu.index()].iter().enumerate() {
        let order = DerivativeOrder::new(j as u8)?;
        let t2 = theta::theta2_series(&x, order, cfg)?;
        // y^{−(1 + 2ν + 2j)/2}
        let pw = y.pow_rational(-(1 + 2 * nu_i + 2 * j as i32), 2)?;
        let c = Enclosure::from_ratio(num, den, p);
        sum = sum.add(&c.mul(&pw).mul(&t2));
    }
    Ok(sum)
}

/// Checks the modular route against the direct series at `samples` evenly
/// spaced points of `[a, b]`: the enclosures must intersect and their hull
/// must be narrower than `width_tol`.
pub fn verify_modular_identity(
    a: f64,
    b: f64,
    nu: DerivativeOrder,
    cfg: &EvalConfig,
) -> CertificationReport {
    verify_modular_identity_with(a, b, nu, cfg, &ModularCoefficients::default(), 9, 2f64.powi(-80))
}

pub fn verify_modular_identity_with(
    a: f64,
    b: f64,
    nu: DerivativeOrder,
    cfg: &EvalConfig,
    coeffs: &ModularCoefficients,
    samples: usize,
    width_tol: f64,
) -> CertificationReport {
    let p = cfg.precision_bits;
    let id = format!("modular/nu{}", nu.get());
    let desc = format!("theta4^({}) via y^(-1/2) theta2(1/y) agrees with the direct series", nu.get());
    let mut report = CertificationReport::new(&id, &desc, p);
    report.interval = Enclosure::from_f64_bounds(a.min(b), a.max(b), p).ok();
    if !(a > 0.0) {
        report.status = Status::Failed { reason: "interval must lie in (0, inf)".into(), witness: None };
        return report;
    }
    let n = samples.max(1);
    for i in 0..n {
        let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        let yv = a + (b - a) * t;
        let y = Enclosure::from_f64(yv, p);
        report.boxes_examined += 1;
        let (m, s) = match (
            theta4_via_modular_with(&y, nu, cfg, coeffs),
            theta::theta4_series(&y, nu, cfg),
        ) {
            (Ok(m), Ok(s)) => (m, s),
            (Err(e), _) | (_, Err(e)) => {
                report.status = Status::Inconclusive { reason: e.to_string(), deepest_box: Some(y) };
                return report;
            }
        };
        if !m.intersects(&s) {
            let gap = if m.lt(&s) { s.sub(&m) } else { m.sub(&s) };
            report.status = Status::Failed {
                reason: format!("routes disagree at y = {yv}"),
                witness: Some(Witness { y, value: gap, context: id.clone() }),
            };
            return report;
        }
        if !m.hull(&s).width_lt(width_tol) {
            report.status = Status::Inconclusive {
                reason: format!("combined width {:e} at y = {yv}", m.hull(&s).width_f64()),
                deepest_box: Some(y),
            };
            return report;
        }
    }
    report
}

/// P^(k)(x) for k = 0..=3, where θ₂(x) = 2e^{−πx/4}·P(x) and
/// P(x) = Σ_{n≥0} e^{−πn(n+1)x}.
fn p_series(x: &Enclosure, cfg: &EvalConfig) -> Result<[Enclosure; 4], Error> {
    let p = cfg.precision_bits;
    let pi = Enclosure::pi(p);
    // v = e^{−2πx}; the n-th term is (−πn(n+1))^k v^{n(n+1)/2}
    let v = pi.mul(x).mul_pow2(1).neg().exp();
    let v_up = pi.mul(&x.lo_enc()).mul_pow2(1).neg().exp().hi_enc();
    let tol = effective_tolerance(cfg, &v.lo_enc());
    let mut sums = [
        Enclosure::from_i64(1, p),
        Enclosure::from_i64(0, p),
        Enclosure::from_i64(0, p),
        Enclosure::from_i64(0, p),
    ];
    let mut pow = v.clone(); // v^(n(n+1)/2)
    let mut pow_up = v_up.clone();
    let mut n: i64 = 1;
    loop {
        let w = Enclosure::from_i64(n * (n + 1), p).mul(&pi).neg();
        let mut wk = Enclosure::from_i64(1, p);
        for s in sums.iter_mut() {
            *s = s.add(&wk.mul(&pow));
            wk = wk.mul(&w);
        }
        pow = pow.mul(&v.powi((n + 1) as i32));
        pow_up = pow_up.mul(&v_up.powi((n + 1) as i32));
        // omitted n+1: bound (π(n+1)(n+2))³ v^((n+1)(n+2)/2) with ratio ((n+3)/(n+1))³ v^(n+2)
        let m = n + 1;
        let wmax = Enclosure::from_i64(m * (m + 1), p).mul(&pi);
        let scale = Enclosure::from_i64(1, p).add(&wmax).powi(3);
        let first = scale.mul(&pow_up);
        let ratio = Enclosure::from_ratio(m + 2, m, p).powi(3).mul(&v_up.powi((m + 1) as i32));
        if let Some(t) = geometric_tail(&first, &ratio) {
            if t.lt(&tol) {
                return Ok(sums.map(|s| s.inflate(&t)));
            }
        }
        if n as usize >= cfg.max_terms {
            return Err(Error::Convergence { max_terms: cfg.max_terms });
        }
        n += 1;
    }
}

/// f, f′, f″ through the modular relation in logarithmic form.
///
/// With x = 1/y and M = −(log P)′, one has f(y) = π/4 − y/2 + M(x),
/// f′(y) = −1/2 − x²M′(x) and f″(y) = 2x³M′(x) + x⁴M″(x). No term cancels
/// at leading order, so the enclosures stay tight for small y.
pub fn f_modular(y: &Enclosure, cfg: &EvalConfig) -> Result<theta::LambertValues, Error> {
    check_positive(y)?;
    cfg.validate()?;
    let p = cfg.precision_bits;
    let y = y.with_precision(p);
    let x = y.recip()?;
    let [p0, p1, p2, p3] = p_series(&x, cfg)?;
    let l1 = p1.div(&p0)?;
    let l2 = p2.div(&p0)? - l1.sqr();
    let l3 = p3.div(&p0)? - p2.mul(&p1).div(&p0.sqr())?.mul(&Enclosure::from_i64(3, p))
        + l1.powi(3).mul_pow2(1);
    let (m0, m1, m2) = (l1.neg(), l2.neg(), l3.neg());
    let pi = Enclosure::pi(p);
    let f = pi.mul_pow2(-2) - y.mul_pow2(-1) + m0;
    let f_prime = Enclosure::from_ratio(-1, 2, p) - x.sqr().mul(&m1);
    let f_second = x.powi(3).mul(&m1).mul_pow2(1) + x.powi(4).mul(&m2);
    Ok(theta::LambertValues { f, f_prime, f_second })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::{theta2_series, theta4_product, theta4_series};

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    fn pt(s: &str) -> Enclosure {
        Enclosure::from_decimal(s, 128).unwrap()
    }

    fn nu(n: u8) -> DerivativeOrder {
        DerivativeOrder::new(n).unwrap()
    }

    /// Coefficients re-derived from d/dy[y^a g(1/y)] = a y^(a−1) g(1/y) − y^(a−2) g′(1/y).
    fn derived_table() -> Vec<Vec<(i64, i64)>> {
        let mut rows: Vec<Vec<(i64, i64)>> = vec![vec![(1, 1)]];
        for v in 0..3i64 {
            let prev = rows.last().unwrap().clone();
            let mut next = vec![(0i64, 1i64); prev.len() + 1];
            for (j, &(n, d)) in prev.iter().enumerate() {
                // exponent a = −1/2 − v − j = −(1 + 2v + 2j)/2
                let (an, ad) = (-(1 + 2 * v + 2 * j as i64), 2);
                next[j] = add(next[j], (an * n, ad * d));
                next[j + 1] = add(next[j + 1], (-n, d));
            }
            rows.push(next);
        }
        rows
    }

    fn add(a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
        let n = a.0 * b.1 + b.0 * a.1;
        let d = a.1 * b.1;
        let g = gcd(n.abs(), d.abs()).max(1);
        (n / g, d / g)
    }

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn coefficient_table_matches_rederivation() {
        let table = ModularCoefficients::default();
        for (row, derived) in table.0.iter().zip(derived_table()) {
            assert_eq!(row, &derived);
        }
    }

    #[test]
    fn fixed_point_at_one() {
        let a = theta4_via_modular(&pt("1"), nu(0), &cfg()).unwrap();
        let b = theta2_series(&pt("1"), nu(0), &cfg()).unwrap();
        assert!(a.intersects(&b));
    }

    #[test]
    fn small_argument_matches_product() {
        let a = theta4_via_modular(&pt("0.1"), nu(0), &cfg()).unwrap();
        let b = theta4_product(&pt("0.1"), &cfg()).unwrap();
        assert!(a.intersects(&b));
        assert!(a.hull(&b).width_lt(1e-30));
    }

    #[test]
    fn third_derivative_matches_series_at_one() {
        let a = theta4_via_modular(&pt("1"), nu(3), &cfg()).unwrap();
        let b = theta4_series(&pt("1"), nu(3), &cfg()).unwrap();
        assert!(a.intersects(&b));
    }

    #[test]
    fn identity_on_half_to_two() {
        for n in 0..4 {
            let r = verify_modular_identity(0.5, 2.0, nu(n), &cfg());
            assert!(r.is_certified(), "{r:?}");
        }
        assert!(verify_modular_identity(1.0, 1.0, nu(2), &cfg()).is_certified());
    }

    #[test]
    fn corrupted_coefficient_is_detected() {
        let mut bad = ModularCoefficients::default();
        bad.0[1][0] = (1, 2);
        let r = verify_modular_identity_with(0.5, 2.0, nu(1), &cfg(), &bad, 9, 2f64.powi(-80));
        assert!(matches!(r.status, Status::Failed { .. }), "{r:?}");
    }

    #[test]
    fn double_flip_returns_to_start() {
        // θ₂(x) = x^{−1/2} θ₄(1/x), so θ₄(y) = y^{−1/2} (1/y)^{−1/2} θ₄(y)
        let y = pt("0.7");
        let x = y.recip().unwrap();
        let t2 = theta2_series(&x, nu(0), &cfg()).unwrap();
        let back = theta4_via_modular(&x, nu(0), &cfg()).unwrap();
        // θ₄(x) = x^{−1/2} θ₂(1/x) = x^{−1/2} θ₂(y); and θ₂(x) = x^{-1/2} θ₄(y)
        let t4y = theta4_series(&y, nu(0), &cfg()).unwrap();
        assert!(t2.intersects(&x.pow_rational(-1, 2).unwrap().mul(&t4y)));
        let t4x = theta4_series(&x, nu(0), &cfg()).unwrap();
        assert!(back.intersects(&t4x));
    }

    #[test]
    fn log_form_matches_lambert_near_one() {
        for y in ["0.8", "1", "1.25", "2"] {
            let m = f_modular(&pt(y), &cfg()).unwrap();
            let l = crate::theta::lambert_values(&pt(y), &cfg()).unwrap();
            assert!(m.f.intersects(&l.f), "f at {y}");
            assert!(m.f_prime.intersects(&l.f_prime), "f' at {y}");
            assert!(m.f_second.intersects(&l.f_second), "f'' at {y}");
        }
    }

    #[test]
    fn f_near_zero_approaches_quarter_pi() {
        let m = f_modular(&pt("0.01"), &cfg()).unwrap();
        // f(y) = π/4 − y/2 + M(1/y) with M(100) below 1e−270
        let pi4 = Enclosure::pi(128).mul_pow2(-2);
        assert!(m.f.sub(&pi4).abs().lt(&pt("0.01")));
        assert!(m.f.sub(&pi4.sub(&pt("0.005"))).abs().lt(&pt("1e-3")));
    }
}
