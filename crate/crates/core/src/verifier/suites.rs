//! Named verification suites, as run by the command-line tool.

use std::fmt;
use std::str::FromStr;

use super::certify::{certify_sign, Quantity, TargetSign};
use super::decreasing::verify_decreasing_argument_with;
use super::greek::verify_greek;
use super::large_y::{verify_even_terms_large_y, verify_g_chain_with, verify_odd_terms_large_y, GForm};
use super::small_y::verify_small_y_chain;
use super::CertificationReport;
use crate::enclosure::{Enclosure, EvalConfig};
use crate::envelopes::{check_cnu_admissible, log_grid, verify_sandwich, EnvelopeConstants};
use crate::modular::{verify_modular_identity_with, ModularCoefficients};
use crate::theta::DerivativeOrder;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lemma1,
    Modular,
    GChain,
    LargeY,
    SmallY,
    Greek,
    Convexity,
    Decreasing,
    All,
}

impl Suite {
    /// Declaration order; `all` runs them in this order.
    pub const EACH: [Suite; 8] = [
        Suite::Lemma1,
        Suite::Modular,
        Suite::GChain,
        Suite::LargeY,
        Suite::SmallY,
        Suite::Greek,
        Suite::Convexity,
        Suite::Decreasing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Modular => "modular",
            Suite::GChain => "g-chain",
            Suite::LargeY => "large-y",
            Suite::SmallY => "small-y",
            Suite::Greek => "greek",
            Suite::Convexity => "convexity",
            Suite::Decreasing => "decreasing",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Suite::EACH
            .iter()
            .chain([Suite::All].iter())
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

/// Overrides for the default suite parameters.
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    /// Interval for the convexity (f″) and f′ certifications.
    pub interval: (f64, f64),
    pub target_sign: TargetSign,
    pub n_max: u32,
    pub y_cap: f64,
    pub grid_points: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { interval: (0.05, 20.0), target_sign: TargetSign::Positive, n_max: 50, y_cap: 30.0, grid_points: 40 }
    }
}

fn nu(k: u8) -> DerivativeOrder {
    DerivativeOrder::new(k).expect("k <= 3")
}

fn lemma1(opts: &SuiteOptions, cfg: &EvalConfig) -> CertificationReport {
    let mut r = CertificationReport::new("lemma1", "two-term envelopes of (-1)^nu theta2^(nu) on [1, inf)", cfg.precision_bits);
    let consts = EnvelopeConstants::new(cfg.precision_bits);
    let grid = log_grid(1.0, 100.0, opts.grid_points);
    for k in 0..4 {
        r.push(verify_sandwich(&grid, nu(k), &consts, cfg));
        r.push(check_cnu_admissible(nu(k), cfg));
    }
    r
}

fn modular(cfg: &EvalConfig) -> CertificationReport {
    let mut r = CertificationReport::new("modular", "theta4 via theta2(1/y) agrees with the direct series", cfg.precision_bits);
    let coeffs = ModularCoefficients::default();
    for k in 0..4 {
        let mut c = verify_modular_identity_with(0.2, 5.0, nu(k), cfg, &coeffs, 10, 2f64.powi(-80));
        c.id = format!("modular/nu{k}/[0.2,5]");
        r.push(c);
        let mut c = verify_modular_identity_with(0.5, 2.0, nu(k), cfg, &coeffs, 9, 2f64.powi(-80));
        c.id = format!("modular/nu{k}/[0.5,2]");
        r.push(c);
    }
    r
}

fn large_y(opts: &SuiteOptions, cfg: &EvalConfig) -> CertificationReport {
    let p = cfg.precision_bits;
    let mut r = CertificationReport::new("large-y", "every Lambert term of f'' is positive for y >= 1", p);
    r.depends_on.push("g-chain".into());
    let two_over_pi = Enclosure::from_i64(2, p).div(&Enclosure::pi(p)).expect("pi > 0");
    let cap = Enclosure::from_f64(opts.y_cap, p);
    r.push(verify_even_terms_large_y(opts.n_max, &two_over_pi.lo_enc().hull(&cap), cfg));
    r.push(verify_odd_terms_large_y(opts.n_max, &Enclosure::from_i64(1, p).hull(&cap), cfg));
    r.notes.push("the n = 1 odd term is 2 pi g(y)/(e^(pi y)-1)^3, positive by g-chain".into());
    r
}

fn convexity(opts: &SuiteOptions, cfg: &EvalConfig) -> CertificationReport {
    let p = cfg.precision_bits;
    let (a, b) = opts.interval;
    let mut r = match Enclosure::from_f64_bounds(a.min(b), a.max(b), p) {
        Ok(iv) => certify_sign(Quantity::FSecond, &iv, opts.target_sign, cfg),
        Err(e) => {
            let mut r = CertificationReport::new("f-second", "f'' sign", p);
            r.fail(e.to_string(), None);
            r
        }
    };
    r.depends_on.extend(["small-y".to_string(), "large-y".to_string(), "g-chain".to_string()]);
    r
}

/// Runs `suite`; `all` expands to the eight suites in declaration order.
pub fn run_suite(suite: Suite, opts: &SuiteOptions, cfg: &EvalConfig) -> Vec<CertificationReport> {
    if suite == Suite::All {
        let mut out = Vec::new();
        for s in Suite::EACH {
            if s == Suite::Decreasing {
                let conv = out.iter().find(|r: &&CertificationReport| r.id == "f-second").cloned();
                out.push(decreasing(conv, opts, cfg));
            } else {
                out.extend(run_suite(s, opts, cfg));
            }
        }
        return out;
    }
    vec![match suite {
        Suite::Lemma1 => lemma1(opts, cfg),
        Suite::Modular => modular(cfg),
        Suite::GChain => verify_g_chain_with(GForm::default(), opts.y_cap, cfg),
        Suite::LargeY => large_y(opts, cfg),
        Suite::SmallY => verify_small_y_chain(cfg),
        Suite::Greek => verify_greek(cfg).0,
        Suite::Convexity => convexity(opts, cfg),
        Suite::Decreasing => decreasing(None, opts, cfg),
        Suite::All => unreachable!(),
    }]
}

fn decreasing(conv: Option<CertificationReport>, opts: &SuiteOptions, cfg: &EvalConfig) -> CertificationReport {
    let positive = SuiteOptions { target_sign: TargetSign::Positive, ..opts.clone() };
    let conv = conv.unwrap_or_else(|| convexity(&positive, cfg));
    let p = cfg.precision_bits;
    let (a, b) = opts.interval;
    let iv = Enclosure::from_f64_bounds(a.min(b), a.max(b), p).ok();
    verify_decreasing_argument_with(&conv, opts.n_max, opts.y_cap, iv.as_ref(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn modular_suite_certifies() {
        let r = run_suite(Suite::Modular, &SuiteOptions::default(), &EvalConfig::default());
        assert_eq!(r.len(), 1);
        assert!(r[0].is_certified(), "{:?}", r[0].status);
    }
}
