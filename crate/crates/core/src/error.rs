use thiserror::Error;

/// Errors raised by the dynamics, metrics and oracle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid time {0}: must be finite and non-negative")]
    InvalidTime(f64),

    #[error("invalid field block index ({0}, {1}); expected indices in {{1, 2}}")]
    InvalidBlock(usize, usize),

    #[error("degenerate field basis: |alpha| = {0:e} is below the degeneracy threshold")]
    DegenerateBasis(f64),

    #[error("Fock truncation N = {n_max} too small: tail mass {tail:e} exceeds {bound:e}")]
    TruncationTooSmall { n_max: usize, tail: f64, bound: f64 },

    #[error("integrator failure at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },

    #[error("projection leakage {leakage:e} exceeds bound {bound:e}")]
    ExcessLeakage { leakage: f64, bound: f64 },

    #[error("non-physical state: {0}")]
    NonPhysicalState(String),

    #[error("no Bell-CHSH violation for these parameters")]
    NoViolation,

    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
