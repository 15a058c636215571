use std::collections::BTreeMap;
use std::fmt;

use crate::enclosure::Enclosure;
use crate::Error;

/// `Σ_k (a_k·y + b_k)·e^{kπy/4}` with enclosure coefficients.
///
/// Coefficients are at most linear in y; a product that would need a y²
/// coefficient is rejected with [`Error::DegreeOverflow`].
#[derive(Clone)]
pub struct ExpPoly {
    prec: usize,
    terms: BTreeMap<i32, (Enclosure, Enclosure)>,
}

impl ExpPoly {
    pub fn zero(prec: usize) -> Self {
        ExpPoly { prec, terms: BTreeMap::new() }
    }

    /// `c·e^{kπy/4}`
    pub fn term(k: i32, c: Enclosure) -> Self {
        let prec = c.precision();
        let mut p = ExpPoly::zero(prec);
        p.terms.insert(k, (Enclosure::from_i64(0, prec), c));
        p
    }

    /// The monomial `y`.
    pub fn y(prec: usize) -> Self {
        let mut p = ExpPoly::zero(prec);
        p.terms.insert(0, (Enclosure::from_i64(1, prec), Enclosure::from_i64(0, prec)));
        p
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn exponents(&self) -> impl Iterator<Item = i32> + '_ {
        self.terms.keys().copied()
    }

    /// `(a_k, b_k)`, zero if absent.
    pub fn coefficient(&self, k: i32) -> (Enclosure, Enclosure) {
        self.terms.get(&k).cloned().unwrap_or_else(|| {
            (Enclosure::from_i64(0, self.prec), Enclosure::from_i64(0, self.prec))
        })
    }

    fn is_linear(&self) -> bool {
        self.terms.values().any(|(a, _)| !is_exact_zero(a))
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (&k, (a, b)) in &other.terms {
            let e = out
                .terms
                .entry(k)
                .or_insert_with(|| (Enclosure::from_i64(0, self.prec), Enclosure::from_i64(0, self.prec)));
            e.0 = e.0.add(a);
            e.1 = e.1.add(b);
        }
        out
    }

    pub fn scale(&self, c: &Enclosure) -> ExpPoly {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            v.0 = v.0.mul(c);
            v.1 = v.1.mul(c);
        }
        out
    }

    pub fn sub(&self, other: &ExpPoly) -> ExpPoly {
        self.add(&other.scale(&Enclosure::from_i64(-1, self.prec)))
    }

    /// Multiplies by `e^{kπy/4}`.
    pub fn shift(&self, k: i32) -> ExpPoly {
        ExpPoly {
            prec: self.prec,
            terms: self.terms.iter().map(|(&j, v)| (j + k, v.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &ExpPoly) -> Result<ExpPoly, Error> {
        if self.is_linear() && other.is_linear() {
            return Err(Error::DegreeOverflow);
        }
        let mut out = ExpPoly::zero(self.prec);
        for (&k1, (a1, b1)) in &self.terms {
            for (&k2, (a2, b2)) in &other.terms {
                // (a1 y + b1)(a2 y + b2) with a1·a2 = 0
                let a = a1.mul(b2).add(&b1.mul(a2));
                let b = b1.mul(b2);
                let mut t = ExpPoly::zero(self.prec);
                t.terms.insert(k1 + k2, (a, b));
                out = out.add(&t);
            }
        }
        Ok(out)
    }

    pub fn eval(&self, y: &Enclosure) -> Enclosure {
        let quarter_pi_y = Enclosure::pi(self.prec).mul_pow2(-2).mul(y);
        let mut s = Enclosure::from_i64(0, self.prec);
        for (&k, (a, b)) in &self.terms {
            let e = quarter_pi_y.mul(&Enclosure::from_i64(k as i64, self.prec)).exp();
            s = s.add(&a.mul(y).add(b).mul(&e));
        }
        s
    }
}

fn is_exact_zero(x: &Enclosure) -> bool {
    x.is_point() && x.contains_f64(0.0)
}

impl fmt::Debug for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_map();
        for (k, (a, b)) in &self.terms {
            l.entry(k, &format_args!("({} y + {})", a, b));
        }
        l.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: i64) -> Enclosure {
        Enclosure::from_i64(x, 128)
    }

    #[test]
    fn exponents_add_under_multiplication() {
        let p = ExpPoly::term(-1, c(2)).add(&ExpPoly::term(-9, c(3)));
        let q = p.mul(&p).unwrap();
        assert_eq!(q.exponents().collect::<Vec<_>>(), vec![-18, -10, -2]);
        assert!(q.coefficient(-10).1.contains_f64(12.0));
        assert!(q.coefficient(-2).1.contains_f64(4.0));
    }

    #[test]
    fn linear_times_linear_overflows() {
        let y = ExpPoly::y(128);
        assert!(matches!(y.mul(&y), Err(Error::DegreeOverflow)));
        let ok = y.mul(&ExpPoly::term(4, c(5))).unwrap();
        assert!(ok.coefficient(4).0.contains_f64(5.0));
    }

    #[test]
    fn evaluation_matches_closed_form() {
        // (2y + 1) e^{πy}
        let p = ExpPoly::y(128).scale(&c(2)).add(&ExpPoly::term(0, c(1))).shift(4);
        let y = Enclosure::from_f64(0.5, 128);
        let expect = Enclosure::pi(128).mul_pow2(-1).exp().mul(&c(2));
        assert!(p.eval(&y).intersects(&expect));
    }
}
