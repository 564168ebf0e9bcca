use thiserror::Error;

/// Errors raised by the engine. Every variant maps to one CLI exit code.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("negative valuation: element is not integral")]
    NegativeValuation,
    #[error("residue element does not belong to the residue field of this field")]
    ResidueMismatch,
    #[error("unsupported extension: {0}")]
    UnsupportedExtension(String),
    #[error("unsupported residue field: {0}")]
    UnsupportedResidue(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("shift {0} is not in the value group")]
    ShiftNotInValueGroup(String),
    #[error("form is not primitive")]
    NotPrimitive,
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("line divides the form")]
    LineDividesForm,
    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),
    #[error("system too large: {0}")]
    SystemTooLarge(String),
    #[error("generic fiber is not stable: stability function is unbounded below")]
    GenericFiberNotStable,
    #[error("point is not a vertex for the current value group")]
    NotAVertex,
    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_)
            | Error::ResidueMismatch
            | Error::SingularMatrix
            | Error::NotPrimitive
            | Error::PointNotOnCurve
            | Error::LineDividesForm
            | Error::NotAVertex
            | Error::NegativeValuation => 2,
            Error::PrecisionExhausted(_) | Error::ShiftNotInValueGroup(_) => 3,
            Error::GenericFiberNotStable => 4,
            Error::UnsupportedExtension(_)
            | Error::UnsupportedResidue(_)
            | Error::SearchSpaceTooLarge(_)
            | Error::SystemTooLarge(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
