use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not invertible: {0}")]
    NotInvertible(&'static str),
    #[error("bad exponent: {0}")]
    BadExponent(String),
    #[error("region mismatch: {0}")]
    RegionError(String),
    #[error("outside exact window: {0}")]
    OutsideWindow(String),
    #[error("identity `{identity}` violated at {locus}")]
    IdentityViolation { identity: String, locus: String },
    #[error("no admissible normalization found: {0}")]
    CalibrationNotFound(String),
    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    pub fn violation(identity: impl Into<String>, locus: impl Into<String>) -> Self {
        Error::IdentityViolation { identity: identity.into(), locus: locus.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Deliberate corruptions used as negative controls by the verification
/// suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fault {
    /// The ½ in the B-recursion becomes ⅓ at the first step.
    RecursionConstant,
    /// A_{0,0} of the affine table is shifted by one.
    AEntry,
    /// The regularizing kernel −2/(ξ−ν) has its sign flipped.
    KernelSign,
    /// The diagonal correction in the derivation identity is dropped.
    DropDiagonal,
}

impl Fault {
    pub fn parse(s: &str) -> Option<Fault> {
        match s {
            "recursion-constant" => Some(Fault::RecursionConstant),
            "a-entry" => Some(Fault::AEntry),
            "kernel-sign" => Some(Fault::KernelSign),
            "drop-diagonal" => Some(Fault::DropDiagonal),
            _ => None,
        }
    }
}
