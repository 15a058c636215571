use serde::{Deserialize, Serialize};

use super::{decreasing, large_y, small_y, CertificationReport, Witness};
use crate::enclosure::{Enclosure, EvalConfig};
use crate::{modular, theta, Error};

/// Upper end of the range handed to the modular route when certifying f′, f″.
pub const MODULAR_ROUTE_MAX: f64 = 1.25;
/// Lower end of the range handed to the Lambert route.
pub const LAMBERT_ROUTE_MIN: f64 = 0.8;

/// Hard cap on boxes per certification, on top of the depth limit.
const BOX_BUDGET: u64 = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetSign {
    Positive,
    Negative,
}

impl TargetSign {
    pub fn holds(self, v: &Enclosure) -> bool {
        match self {
            TargetSign::Positive => v.is_positive(),
            TargetSign::Negative => v.is_negative(),
        }
    }

    pub fn opposite(self) -> TargetSign {
        match self {
            TargetSign::Positive => TargetSign::Negative,
            TargetSign::Negative => TargetSign::Positive,
        }
    }

    /// Guaranteed distance of `v` from zero on the target side.
    pub fn margin(self, v: &Enclosure) -> Enclosure {
        match self {
            TargetSign::Positive => v.lo_enc(),
            TargetSign::Negative => v.hi_enc().neg(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TargetSign::Positive => "positive",
            TargetSign::Negative => "negative",
        }
    }
}

/// The quantities whose sign the verifier knows how to certify.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// f″, split between the modular route (small y) and the Lambert route
    /// with an overlap on [0.8, 1.25].
    FSecond,
    FSecondLambert,
    FSecondModular,
    /// f′, routed like [`Quantity::FSecond`].
    FPrime,
    FPrimeLambert,
    FPrimeModular,
    /// h(1/y) from θ₂ and its derivatives at y.
    HReciprocal,
    G,
    GPrime,
    GSecond,
    /// nπy(e^{2nπy}+1) − 2(e^{2nπy}−1)
    EvenBracket(u32),
    /// (2n−1)πy(e^{(2n−1)πy}+1) − 4(e^{(2n−1)πy}−1)
    OddBracket(u32),
    /// (2n−1)πy·e^{(2n−1)πy} − 4e^{(2n−1)πy}
    OddBracketWeakened(u32),
    /// e^{2nπy} − 1 − nπy·e^{2nπy}
    DecreasingEven(u32),
    /// 2(e^{(2n−1)πy} − 1) − (2n−1)πy·e^{(2n−1)πy}
    DecreasingOdd(u32),
    /// e^{2πy}(533·1984·y − 534·632) − 2y − 0.08
    SmallYBracket,
}

impl Quantity {
    pub fn id(&self) -> String {
        match self {
            Quantity::FSecond => "f-second".into(),
            Quantity::FSecondLambert => "f-second/lambert".into(),
            Quantity::FSecondModular => "f-second/modular".into(),
            Quantity::FPrime => "f-prime".into(),
            Quantity::FPrimeLambert => "f-prime/lambert".into(),
            Quantity::FPrimeModular => "f-prime/modular".into(),
            Quantity::HReciprocal => "h-reciprocal".into(),
            Quantity::G => "g".into(),
            Quantity::GPrime => "g-prime".into(),
            Quantity::GSecond => "g-second".into(),
            Quantity::EvenBracket(n) => format!("even-bracket/n{n}"),
            Quantity::OddBracket(n) => format!("odd-bracket/n{n}"),
            Quantity::OddBracketWeakened(n) => format!("odd-bracket-weakened/n{n}"),
            Quantity::DecreasingEven(n) => format!("decreasing-even/n{n}"),
            Quantity::DecreasingOdd(n) => format!("decreasing-odd/n{n}"),
            Quantity::SmallYBracket => "small-y-bracket".into(),
        }
    }

    pub fn eval(&self, y: &Enclosure, cfg: &EvalConfig) -> Result<Enclosure, Error> {
        let p = cfg.precision_bits;
        match *self {
            Quantity::FSecond => theta::f_derivative(y, 2, cfg),
            Quantity::FPrime => theta::f_derivative(y, 1, cfg),
            Quantity::FSecondLambert => theta::f_second_lambert(y, cfg),
            Quantity::FPrimeLambert => theta::f_prime_lambert(y, cfg),
            Quantity::FSecondModular => Ok(modular::f_modular(y, cfg)?.f_second),
            Quantity::FPrimeModular => Ok(modular::f_modular(y, cfg)?.f_prime),
            Quantity::HReciprocal => small_y::h_reciprocal(y, cfg),
            Quantity::G => Ok(large_y::g_eval(y, p)),
            Quantity::GPrime => Ok(large_y::g_prime(y, p)),
            Quantity::GSecond => Ok(large_y::g_second(y, p)),
            Quantity::EvenBracket(n) => Ok(large_y::even_bracket(n, y, p)),
            Quantity::OddBracket(n) => Ok(large_y::odd_bracket(n, y, p)),
            Quantity::OddBracketWeakened(n) => Ok(large_y::odd_bracket_weakened(n, y, p)),
            Quantity::DecreasingEven(n) => Ok(decreasing::decreasing_bracket_even(n, y, p)),
            Quantity::DecreasingOdd(n) => Ok(decreasing::decreasing_bracket_odd(n, y, p)),
            Quantity::SmallYBracket => Ok(small_y::small_y_bracket(y, p)),
        }
    }
}

/// Certifies that `q` has the strict sign `sign` on every point of `interval`.
///
/// f′ and f″ are certified route by route: the modular route on
/// `[a, min(b, 1.25)]` and the Lambert route on `[max(a, 0.8), b]`, so that
/// around y = 1 both proofs cover the same ground.
pub fn certify_sign(q: Quantity, interval: &Enclosure, sign: TargetSign, cfg: &EvalConfig) -> CertificationReport {
    let routes = match q {
        Quantity::FSecond => Some((Quantity::FSecondModular, Quantity::FSecondLambert, "f''")),
        Quantity::FPrime => Some((Quantity::FPrimeModular, Quantity::FPrimeLambert, "f'")),
        _ => None,
    };
    let Some((small, large, name)) = routes else {
        let desc = format!("{} is {} on the interval", q.id(), sign.label());
        return certify_sign_fn(&q.id(), &desc, &|y, c| q.eval(y, c), interval, sign, cfg);
    };

    let p = cfg.precision_bits;
    let desc = format!("{name} is {} on the interval (modular and Lambert routes)", sign.label());
    let mut report = CertificationReport::new(&q.id(), &desc, p);
    report.interval = Some(interval.clone());
    if !interval.is_positive() {
        report.fail("interval must lie in (0, inf)", None);
        return report;
    }
    let cut_hi = Enclosure::from_f64(MODULAR_ROUTE_MAX, p);
    let cut_lo = Enclosure::from_f64(LAMBERT_ROUTE_MIN, p);
    let (a, b) = (interval.lo_enc(), interval.hi_enc());
    if a.lt(&cut_hi) {
        let hi = if b.lt(&cut_hi) { b.clone() } else { cut_hi.clone() };
        let part = a.hull(&hi);
        let d = format!("{name} via the modular logarithmic form");
        report.push(certify_sign_fn(&small.id(), &d, &|y, c| small.eval(y, c), &part, sign, cfg));
    }
    if cut_lo.lt(&b) {
        let lo = if cut_lo.lt(&a) { a.clone() } else { cut_lo.clone() };
        let part = lo.hull(&b);
        let d = format!("{name} via the Lambert series");
        report.push(certify_sign_fn(&large.id(), &d, &|y, c| large.eval(y, c), &part, sign, cfg));
    }
    report.min_margin = report
        .checks
        .iter()
        .filter_map(|c| c.min_margin.clone())
        .reduce(|m, x| if x.lo_enc().lt(&m.lo_enc()) { x } else { m });
    report
}

type EvalFn<'a> = dyn Fn(&Enclosure, &EvalConfig) -> Result<Enclosure, Error> + 'a;

/// Adaptive bisection engine behind [`certify_sign`], for an arbitrary
/// enclosure-valued function.
pub fn certify_sign_fn(
    id: &str,
    description: &str,
    f: &EvalFn<'_>,
    interval: &Enclosure,
    sign: TargetSign,
    cfg: &EvalConfig,
) -> CertificationReport {
    let mut report = CertificationReport::new(id, description, cfg.precision_bits);
    report.interval = Some(interval.clone());
    if let Err(e) = cfg.validate() {
        report.fail(e.to_string(), None);
        return report;
    }
    if !interval.is_positive() {
        report.fail("interval must lie in (0, inf)", None);
        return report;
    }

    let mut margin: Option<Enclosure> = None;
    let mut stack = vec![(interval.clone(), 0usize)];
    let escalated = cfg.escalated();
    while let Some((bx, depth)) = stack.pop() {
        report.boxes_examined += 1;
        if report.boxes_examined > BOX_BUDGET {
            report.inconclusive(format!("box budget of {BOX_BUDGET} exhausted"), Some(bx));
            break;
        }
        let v = f(&bx, cfg);
        if let Ok(v) = &v {
            if sign.holds(v) {
                let m = sign.margin(v);
                margin = Some(match margin {
                    Some(old) if old.lt(&m) || old.lo() == m.lo() => old,
                    _ => m,
                });
                continue;
            }
            if sign.opposite().holds(v) {
                let w = point_witness(f, &bx, v, sign, cfg, id);
                report.fail(format!("{id} is not {} on the interval", sign.label()), Some(w));
                break;
            }
        }
        let splittable = depth < cfg.max_depth as usize && !is_atomic(&bx);
        if splittable {
            let (l, r) = bx.bisect();
            stack.push((r, depth + 1));
            stack.push((l, depth + 1));
            continue;
        }
        // undecided leaf: one retry at escalated precision
        if cfg.escalate_precision {
            report.boxes_examined += 1;
            if let Ok(v2) = f(&bx.with_precision(escalated.precision_bits), &escalated) {
                if sign.holds(&v2) {
                    let m = sign.margin(&v2).with_precision(cfg.precision_bits);
                    margin = Some(match margin {
                        Some(old) if old.lt(&m) => old,
                        _ => m,
                    });
                    continue;
                }
                if sign.opposite().holds(&v2) {
                    let w = Witness { y: bx.clone(), value: v2, context: id.to_string() };
                    report.fail(format!("{id} is not {} on the interval", sign.label()), Some(w));
                    break;
                }
            }
        }
        let reason = match v {
            Ok(v) => format!("enclosure {v} contains zero at maximal depth"),
            Err(e) => e.to_string(),
        };
        report.inconclusive(reason, Some(bx));
        break;
    }
    if report.is_certified() {
        report.min_margin = margin;
    }
    report
}

fn is_atomic(bx: &Enclosure) -> bool {
    let (l, r) = bx.bisect();
    l.lo() == r.lo() || l.hi() == r.hi()
}

/// Prefers a point witness at the box midpoint; falls back to the whole box,
/// which is itself a valid witness since its enclosure already has the
/// opposite sign everywhere.
fn point_witness(
    f: &EvalFn<'_>,
    bx: &Enclosure,
    v: &Enclosure,
    sign: TargetSign,
    cfg: &EvalConfig,
    id: &str,
) -> Witness {
    let mid = bx.mid_enc();
    match f(&mid, cfg) {
        Ok(mv) if sign.opposite().holds(&mv) => Witness { y: mid, value: mv, context: id.to_string() },
        _ => Witness { y: bx.clone(), value: v.clone(), context: id.to_string() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: f64, b: f64) -> Enclosure {
        Enclosure::from_f64_bounds(a, b, 128).unwrap()
    }

    #[test]
    fn polynomial_sign_is_certified() {
        let cfg = EvalConfig::default();
        // y² − y + 0.251, written so that naive interval evaluation needs subdivision
        let f = |y: &Enclosure, _: &EvalConfig| Ok(y.sqr().sub(y).add(&Enclosure::from_decimal("0.251", 128).unwrap()));
        let r = certify_sign_fn("poly", "poly", &f, &iv(0.1, 2.0), TargetSign::Positive, &cfg);
        assert!(r.is_certified(), "{:?}", r.status);
        assert!(r.boxes_examined > 1);
        let m = r.min_margin.unwrap();
        assert!(m.is_positive() && m.to_f64() <= 1e-3 + 1e-12);
    }

    #[test]
    fn sign_change_fails_with_point_witness() {
        let cfg = EvalConfig::default();
        let f = |y: &Enclosure, _: &EvalConfig| Ok(y.sub(&Enclosure::from_f64(1.5, 128)));
        let r = certify_sign_fn("lin", "lin", &f, &iv(1.0, 2.0), TargetSign::Positive, &cfg);
        match r.status {
            crate::Status::Failed { witness: Some(w), .. } => {
                assert!(w.value.is_negative());
                assert!(w.y.width_lt(1e-30));
            }
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn touching_zero_is_inconclusive() {
        let cfg = EvalConfig { max_depth: 12, escalate_precision: false, ..EvalConfig::default() };
        let f = |y: &Enclosure, _: &EvalConfig| Ok(y.sub(&Enclosure::from_i64(1, 128)).sqr());
        let r = certify_sign_fn("sq", "sq", &f, &iv(0.5, 1.5), TargetSign::Positive, &cfg);
        assert!(r.is_inconclusive(), "{:?}", r.status);
    }

    #[test]
    fn nonpositive_interval_rejected() {
        let r = certify_sign(Quantity::G, &iv(-1.0, 1.0), TargetSign::Positive, &EvalConfig::default());
        assert!(r.is_failed());
    }

    #[test]
    fn routes_overlap_around_one() {
        let r = certify_sign(Quantity::FSecond, &iv(0.7, 1.5), TargetSign::Positive, &EvalConfig::default());
        assert!(r.is_certified(), "{:?}", r.status);
        let m = r.find("f-second/modular").unwrap().interval.clone().unwrap();
        let l = r.find("f-second/lambert").unwrap().interval.clone().unwrap();
        assert!(m.contains_f64(1.25) && l.contains_f64(0.8));
        assert!(m.intersection(&l).unwrap().contains(&iv(0.8, 1.25)));
    }

    #[test]
    fn wrong_sign_target_on_f_second_fails() {
        let r = certify_sign(Quantity::FSecond, &iv(0.5, 1.0), TargetSign::Negative, &EvalConfig::default());
        match &r.status {
            crate::Status::Failed { witness: Some(w), .. } => assert!(w.value.is_positive()),
            s => panic!("{s:?}"),
        }
    }
}
