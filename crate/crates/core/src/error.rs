use thiserror::Error;

/// Broad classes used by the command line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Domain,
    TheoremViolation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("not a CM field: {0}")]
    NotCmField(String),
    #[error("group generated by the given permutations is not transitive on the labels")]
    NotTransitive,
    #[error("conjugation is not a fixed-point-free involution")]
    BadConjugation,
    #[error("conjugation does not commute with generator {0}")]
    ConjugationNotCentral(usize),
    #[error("odd weight required")]
    OddWeightRequired,
    #[error("invalid orientation: {0}")]
    InvalidOrientation(String),
    #[error("group enumeration exceeded {0} elements")]
    GroupTooLarge(usize),
    #[error("element is not nilpotent")]
    NotNilpotent,
    #[error("element is not rational")]
    NotRational,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Usage(_)
            | Error::ConductorMismatch(..)
            | Error::NotNilpotent
            | Error::NotRational => ErrorClass::Usage,
            Error::TheoremViolation(_) => ErrorClass::TheoremViolation,
            _ => ErrorClass::Domain,
        }
    }

    /// Stable machine-readable tag, emitted as the `reason` field of CLI errors.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::Usage(_) => "usage",
            Error::ConductorMismatch(..) => "conductor mismatch",
            Error::DivisionByZero => "division by zero",
            Error::NotCmField(_) => "not a CM field",
            Error::NotTransitive => "not transitive",
            Error::BadConjugation => "conjugation not a fixed-point-free involution",
            Error::ConjugationNotCentral(_) => "conjugation not central",
            Error::OddWeightRequired => "odd weight required",
            Error::InvalidOrientation(_) => "invalid orientation",
            Error::GroupTooLarge(_) => "group too large",
            Error::NotNilpotent => "not nilpotent",
            Error::NotRational => "not rational",
            Error::Precondition(_) => "precondition failed",
            Error::Unsupported(_) => "unsupported",
            Error::TheoremViolation(_) => "theorem violation",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
