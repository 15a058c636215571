//! θ₄ and θ₂ on the positive real axis, their derivatives up to order three,
//! the product form of θ₄, and the Lambert-type series for
//! `f(y) = y²·θ₄′(y)/θ₄(y)` and its first two derivatives.
//!
//! Each series is summed until a certified tail bound drops below
//! `tail_tolerance · min(1, |first term|)`; the bound is then added to the
//! partial sum as a symmetric inflation.

use serde::{Deserialize, Serialize};

use crate::enclosure::{Enclosure, EvalConfig};
use crate::{modular, Error};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThetaKind {
    Theta2,
    Theta4,
}

/// Derivative order ν ∈ {0, 1, 2, 3}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DerivativeOrder(u8);

impl DerivativeOrder {
    pub const ALL: [DerivativeOrder; 4] =
        [DerivativeOrder(0), DerivativeOrder(1), DerivativeOrder(2), DerivativeOrder(3)];

    pub fn new(nu: u8) -> Result<Self, Error> {
        if nu <= 3 {
            Ok(DerivativeOrder(nu))
        } else {
            Err(Error::Domain(format!("derivative order {nu} exceeds 3")))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// `(-1)^ν`
    pub fn sign(self) -> i64 {
        if self.0.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl TryFrom<u8> for DerivativeOrder {
    type Error = Error;
    fn try_from(nu: u8) -> Result<Self, Error> {
        DerivativeOrder::new(nu)
    }
}

pub(crate) fn check_positive(y: &Enclosure) -> Result<(), Error> {
    if !y.is_positive() || !y.is_finite() {
        return Err(Error::Domain(format!("argument must satisfy y > 0, got {y:?}")));
    }
    Ok(())
}

fn one(p: usize) -> Enclosure {
    Enclosure::from_i64(1, p)
}

fn int(n: i64, p: usize) -> Enclosure {
    Enclosure::from_i64(n, p)
}

/// Upper bound on `first / (1 - ratio)` for a series whose term ratios are
/// bounded by `ratio` from the first omitted term onward.
pub(crate) fn geometric_tail(first: &Enclosure, ratio: &Enclosure) -> Option<Enclosure> {
    let one = one(first.precision());
    if !ratio.hi_enc().lt(&one) {
        return None;
    }
    let denom = one.sub(&ratio.hi_enc());
    first.hi_enc().div(&denom.lo_enc()).ok().map(|t| t.hi_enc())
}

/// The tolerance a tail must beat: `tol · min(1, lead)`.
pub(crate) fn effective_tolerance(cfg: &EvalConfig, lead: &Enclosure) -> Enclosure {
    let p = cfg.precision_bits;
    let tol = cfg.tail_tolerance_enc().with_precision(p);
    let lead = lead.abs().lo_enc();
    if lead.lt(&one(p)) {
        tol.mul(&lead).lo_enc()
    } else {
        tol
    }
}

/// θ₄^(ν)(y) = Σₖ (−1)ᵏ (−πk²)^ν e^{−πk²y}, summed directly.
pub fn theta4_series(y: &Enclosure, nu: DerivativeOrder, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    check_positive(y)?;
    cfg.validate()?;
    let p = cfg.precision_bits;
    let y = y.with_precision(p);
    let nu_i = nu.get() as i32;
    let pi = Enclosure::pi(p);
    let q = pi.mul(&y).neg().exp();
    let q_up = pi.mul(&y.lo_enc()).neg().exp().hi_enc();
    let q2 = q.sqr();
    let q2_up = q_up.sqr();
    // 2·π^ν, sign of the k-th term is (−1)^(k+ν)
    let coef = pi.powi(nu_i).mul_pow2(1);
    let tol = effective_tolerance(cfg, &coef.mul(&q));

    let mut sum = if nu_i == 0 { one(p) } else { int(0, p) };
    let mut qk2 = q.clone(); // q^(k²)
    let mut q_odd = q.clone(); // q^(2k−1)
    let mut qk2_up = q_up.clone();
    let mut q_odd_up = q_up.clone();
    let mut k: i64 = 1;
    loop {
        let kk = int(k * k, p).powi(nu_i);
        let term = coef.mul(&kk).mul(&qk2);
        sum = if (k + nu_i as i64) % 2 == 0 { sum.add(&term) } else { sum.sub(&term) };

        q_odd = q_odd.mul(&q2);
        qk2 = qk2.mul(&q_odd);
        q_odd_up = q_odd_up.mul(&q2_up);
        qk2_up = qk2_up.mul(&q_odd_up);
        // first omitted term k+1 and ratio bound ((k+2)/(k+1))^(2ν) q^(2k+3)
        let first = coef.mul(&int((k + 1) * (k + 1), p).powi(nu_i)).mul(&qk2_up);
        let ratio = Enclosure::from_ratio(k + 2, k + 1, p)
            .powi(2 * nu_i)
            .mul(&q_odd_up.mul(&q2_up));
        if let Some(t) = geometric_tail(&first, &ratio) {
            if t.lt(&tol) {
                return Ok(sum.inflate(&t));
            }
        }
        if k as usize >= cfg.max_terms {
            return Err(Error::Convergence { max_terms: cfg.max_terms });
        }
        k += 1;
    }
}

/// θ₄(y) = Π_{n≥1} (1 − e^{−2nπy})(1 − e^{−(2n−1)πy})².
pub fn theta4_product(y: &Enclosure, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    check_positive(y)?;
    cfg.validate()?;
    let p = cfg.precision_bits;
    let y = y.with_precision(p);
    let pi = Enclosure::pi(p);
    let q = pi.mul(&y).neg().exp();
    let q_up = pi.mul(&y.lo_enc()).neg().exp().hi_enc();
    let one = one(p);
    let tol = effective_tolerance(cfg, &one);
    let gap = one.sub(&q_up).lo_enc();
    if !gap.is_positive() {
        return Err(Error::Convergence { max_terms: cfg.max_terms });
    }

    let mut prod = one.clone();
    let mut q_odd = q.clone(); // q^(2n−1)
    let mut q_up_pow = q_up.clone(); // q_up^(2n−1)
    let mut n: usize = 1;
    loop {
        let q_even = q_odd.mul(&q);
        let f_odd = one.sub(&q_odd);
        prod = prod.mul(&one.sub(&q_even)).mul(&f_odd.sqr());
        // omitted factors: Π_{m>n} ≥ 1 − Σ_{j≥2n+1} 2q^j ≥ 1 − 2q^(2n+1)/(1−q)
        q_up_pow = q_up_pow.mul(&q_up).mul(&q_up);
        let delta = q_up_pow.mul_pow2(1).div(&gap)?.hi_enc();
        if delta.lt(&tol) {
            let lower = one.sub(&delta);
            let factor = lower.hull(&one);
            return Ok(prod.mul(&factor));
        }
        if n >= cfg.max_terms {
            return Err(Error::Convergence { max_terms: cfg.max_terms });
        }
        q_odd = q_even.mul(&q);
        n += 1;
    }
}

/// θ₂^(ν)(y) = Σₙ (−π(n+½)²)^ν e^{−π(n+½)²y}.
pub fn theta2_series(y: &Enclosure, nu: DerivativeOrder, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    let s = theta2_signed_tail(y, nu, 0, cfg)?;
    Ok(if nu.get() % 2 == 1 { s.neg() } else { s })
}

/// `(−1)^ν θ₂^(ν)(y)` restricted to the terms with |n+½| ≥ n0+½, i.e.
/// `2·(π/4)^ν Σ_{m ≥ 2n0+1, m odd} m^{2ν} e^{−πm²y/4}`. Every term is positive.
pub fn theta2_signed_tail(y: &Enclosure, nu: DerivativeOrder, n0: i64, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    check_positive(y)?;
    cfg.validate()?;
    let p = cfg.precision_bits;
    let y = y.with_precision(p);
    let nu_i = nu.get() as i32;
    let pi = Enclosure::pi(p);
    let quarter_pi = pi.mul_pow2(-2);
    // u = e^{−πy/4}; term m = 2n+1 is 2·(π/4)^ν m^(2ν) u^(m²)
    let u = quarter_pi.mul(&y).neg().exp();
    let u_up = quarter_pi.mul(&y.lo_enc()).neg().exp().hi_enc();
    let u8 = u.powi(8);
    let u8_up = u_up.powi(8);
    let coef = quarter_pi.powi(nu_i).mul_pow2(1);
    let m0 = 2 * n0 + 1;
    let mut pow = u.powi((m0 * m0) as i32); // u^((2n+1)²)
    let mut step = u8.powi((n0 + 1) as i32); // u^(8(n+1))
    let mut pow_up = u_up.powi((m0 * m0) as i32);
    let mut step_up = u8_up.powi((n0 + 1) as i32);
    let tol = effective_tolerance(cfg, &coef.mul(&int(m0 * m0, p).powi(nu_i)).mul(&pow));

    let mut sum = int(0, p);
    let mut n: i64 = n0;
    loop {
        let m = 2 * n + 1;
        let term = coef.mul(&int(m * m, p).powi(nu_i)).mul(&pow);
        sum = sum.add(&term);

        pow = pow.mul(&step);
        step = step.mul(&u8);
        pow_up = pow_up.mul(&step_up);
        step_up = step_up.mul(&u8_up);
        let m1 = m + 2;
        let first = coef.mul(&int(m1 * m1, p).powi(nu_i)).mul(&pow_up);
        let ratio = Enclosure::from_ratio(m1 + 2, m1, p).powi(2 * nu_i).mul(&step_up);
        if let Some(t) = geometric_tail(&first, &ratio) {
            if t.lt(&tol) {
                return Ok(sum.inflate(&t));
            }
        }
        if (n - n0) as usize >= cfg.max_terms {
            return Err(Error::Convergence { max_terms: cfg.max_terms });
        }
        n += 1;
    }
}

/// θ₄^(ν)(y), routed through the modular relation below the configured threshold.
pub fn theta4(y: &Enclosure, nu: DerivativeOrder, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    check_positive(y)?;
    if y.lo_enc().lt(&Enclosure::from_f64(cfg.modular_threshold, cfg.precision_bits)) {
        modular::theta4_via_modular(y, nu, cfg)
    } else {
        theta4_series(y, nu, cfg)
    }
}

/// θ₂^(ν)(y).
pub fn theta2(y: &Enclosure, nu: DerivativeOrder, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    theta2_series(y, nu, cfg)
}

/// Enclosures of f, f′ and f″ from the Lambert-type series.
#[derive(Clone, Debug)]
pub struct LambertValues {
    pub f: Enclosure,
    pub f_prime: Enclosure,
    pub f_second: Enclosure,
}

/// Sums, over j ≥ 1 with weight ½ for even j and 1 for odd j,
///
/// * `jπ/(e^{jπy}−1)`
/// * `j²π² e^{jπy}/(e^{jπy}−1)²`
/// * `4jπ/(e^{jπy}−1) − 8y j²π² e^{jπy}/(e^{jπy}−1)² + 2y² j³π³ e^{jπy}(e^{jπy}+1)/(e^{jπy}−1)³`
///
/// The even indices j = 2n carry the `nπ/(e^{2nπy}−1)` family, the odd
/// indices j = 2n−1 the `(2n−1)π/(e^{(2n−1)πy}−1)` family.
pub fn lambert_values(y: &Enclosure, cfg: &EvalConfig) -> Result<LambertValues, Error> {
    check_positive(y)?;
    cfg.validate()?;
    let p = cfg.precision_bits;
    let y = y.with_precision(p);
    let pi = Enclosure::pi(p);
    let one = one(p);
    let x = pi.mul(&y).neg().exp(); // e^{−πy}
    let x_up = pi.mul(&y.lo_enc()).neg().exp().hi_enc();
    let gap = one.sub(&x_up).lo_enc();
    if !gap.is_positive() {
        return Err(Error::Convergence { max_terms: cfg.max_terms });
    }
    let y_hi = y.hi_enc();
    // term bounds for j ≥ 1: C₁ j z^j, C₂ j² z^j, C₃ j³ z^j with z = x_up
    let c1 = pi.div(&gap)?;
    let c2 = pi.sqr().div(&gap.sqr())?;
    let c3 = pi.mul_pow2(2).div(&gap)?
        + y_hi.mul(&pi.sqr()).mul_pow2(3).div(&gap.sqr())?
        + y_hi.sqr().mul(&pi.powi(3)).mul_pow2(2).div(&gap.powi(3))?;
    let pref1 = y_hi.sqr().mul_pow2(1) + y_hi.mul_pow2(2);
    let pref2 = y_hi.sqr().mul_pow2(1);
    let tol = effective_tolerance(cfg, &x.lo_enc());

    let (mut s1, mut s2, mut s3) = (int(0, p), int(0, p), int(0, p));
    let mut xj = x.clone();
    let mut xj_up = x_up.clone();
    let mut j: i64 = 1;
    loop {
        let jj = int(j, p);
        let om = one.sub(&xj);
        let r1 = xj.div(&om)?; // 1/(E−1)
        let r2 = xj.div(&om.sqr())?; // E/(E−1)²
        let r3 = xj.mul(&one.add(&xj)).div(&om.powi(3))?; // E(E+1)/(E−1)³
        let jpi = jj.mul(&pi);
        let mut t1 = jpi.mul(&r1);
        let mut t2 = jpi.sqr().mul(&r2);
        let mut t3 = t1.mul_pow2(2) - y.mul(&t2).mul_pow2(3) + y.sqr().mul(&jpi.powi(3)).mul(&r3).mul_pow2(1);
        if j % 2 == 0 {
            t1 = t1.mul_pow2(-1);
            t2 = t2.mul_pow2(-1);
            t3 = t3.mul_pow2(-1);
        }
        s1 = s1.add(&t1);
        s2 = s2.add(&t2);
        s3 = s3.add(&t3);

        xj = xj.mul(&x);
        xj_up = xj_up.mul(&x_up);
        let next = int(j + 1, p);
        let growth = Enclosure::from_ratio(j + 2, j + 1, p);
        let tails = [
            geometric_tail(&c1.mul(&next).mul(&xj_up), &growth.mul(&x_up)),
            geometric_tail(&c2.mul(&next.sqr()).mul(&xj_up), &growth.sqr().mul(&x_up)),
            geometric_tail(&c3.mul(&next.powi(3)).mul(&xj_up), &growth.powi(3).mul(&x_up)),
        ];
        if let [Some(a), Some(b), Some(c)] = &tails {
            let ok = a.mul(&pref1).lt(&tol) && b.mul(&pref2).lt(&tol) && c.lt(&tol);
            if ok {
                let s1 = s1.inflate(a);
                let s2 = s2.inflate(b);
                let s3 = s3.inflate(c);
                let f = y.sqr().mul(&s1).mul_pow2(1);
                let f_prime = y.mul(&s1).mul_pow2(2) - y.sqr().mul(&s2).mul_pow2(1);
                return Ok(LambertValues { f, f_prime, f_second: s3 });
            }
        }
        if j as usize >= cfg.max_terms {
            return Err(Error::Convergence { max_terms: cfg.max_terms });
        }
        j += 1;
    }
}

/// f(y) = 2y² Σ (nπ/(e^{2nπy}−1) + (2n−1)π/(e^{(2n−1)πy}−1)).
pub fn f_lambert(y: &Enclosure, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    Ok(lambert_values(y, cfg)?.f)
}

pub fn f_prime_lambert(y: &Enclosure, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    Ok(lambert_values(y, cfg)?.f_prime)
}

pub fn f_second_lambert(y: &Enclosure, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    Ok(lambert_values(y, cfg)?.f_second)
}

/// `y²·θ₄′/θ₄` from two independently evaluated theta enclosures.
pub fn f_from_theta(y: &Enclosure, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    let t0 = theta4(y, DerivativeOrder(0), cfg)?;
    let t1 = theta4(y, DerivativeOrder(1), cfg)?;
    y.with_precision(cfg.precision_bits).sqr().mul(&t1).div(&t0)
}

/// f^(order)(y) for order 0..=2, choosing the Lambert series for y ≥ 1 and
/// the modular logarithmic form below.
pub fn f_derivative(y: &Enclosure, order: u8, cfg: &EvalConfig) -> Result<Enclosure, Error> {
    check_positive(y)?;
    if order > 2 {
        return Err(Error::Domain(format!("f derivative order {order} exceeds 2")));
    }
    let v = if y.lo_enc().lt(&Enclosure::from_i64(1, cfg.precision_bits)) {
        let m = modular::f_modular(y, cfg)?;
        [m.f, m.f_prime, m.f_second]
    } else {
        let l = lambert_values(y, cfg)?;
        [l.f, l.f_prime, l.f_second]
    };
    Ok(v[order as usize].clone())
}
