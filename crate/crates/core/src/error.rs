use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular locus: gradient norm {norm:e} below floor {floor:e}")]
    SingularLocus { norm: f64, floor: f64 },
    #[error("principal stratum violation: {0}")]
    PrincipalStratum(String),
    #[error("maximum number of steps ({0}) exceeded")]
    MaxSteps(usize),
    #[error("step size underflow at t = {t} (Re det = {det:e})")]
    StepUnderflow { t: f64, det: f64 },
    #[error("infeasible triangle ({a}, {b}, {c}) at position {index}")]
    Infeasible { index: usize, a: f64, b: f64, c: f64 },
    #[error("undefined bending axis: diagonal length {0:e}")]
    UndefinedAxis(f64),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("malformed chain: {0}")]
    MalformedChain(String),
    #[error("tree is not trivalent: {0}")]
    NonTrivalent(String),
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable identifier printed by the command-line tool.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::Domain(_) => "DomainError",
            Error::SingularLocus { .. } => "SingularLocus",
            Error::PrincipalStratum(_) => "PrincipalStratumViolation",
            Error::MaxSteps(_) => "MaxStepsExceeded",
            Error::StepUnderflow { .. } => "StepUnderflow",
            Error::Infeasible { .. } => "Infeasible",
            Error::UndefinedAxis(_) => "UndefinedAxis",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::MalformedChain(_) => "MalformedChain",
            Error::NonTrivalent(_) => "NonTrivalentTree",
            Error::MalformedTree(_) => "MalformedTree",
            Error::Parse(_) => "ParseError",
            Error::Io(_) => "IoError",
        }
    }

    /// Input problems (unreadable or malformed files) as opposed to domain
    /// failures.
    pub fn is_input(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Io(_))
    }
}
