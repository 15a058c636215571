//! Certified evaluation of the Jacobi theta functions θ₂, θ₄ on the positive
//! real axis, and a mechanical verification that `f(y) = y²·θ₄′(y)/θ₄(y)` is
//! strictly convex and strictly decreasing on `(0, ∞)`.
//!
//! Every real quantity is carried as an [`Enclosure`], a closed interval that
//! provably contains the exact value. Series truncations add a certified tail
//! bound, so a strict sign of an enclosure is a proof of that sign.

pub mod enclosure;
pub mod envelopes;
pub mod modular;
pub mod report;
pub mod scanner;
pub mod theta;
pub mod verifier;

pub use enclosure::{Enclosure, EvalConfig};
pub use theta::{DerivativeOrder, ThetaKind};
pub use verifier::{CertificationReport, Status, Witness};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("division by an enclosure containing zero")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series tail did not reach the tolerance within {max_terms} terms")]
    Convergence { max_terms: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("exponential polynomial coefficient would exceed degree one in y")]
    DegreeOverflow,
    #[error("leading e^(6 pi y) coefficient did not cancel: {0}")]
    Cancellation(String),
    #[error("cannot parse decimal {0:?}")]
    Parse(String),
}
