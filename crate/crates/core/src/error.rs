use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid braid: {0}")]
    InvalidBraid(String),
    #[error("not a knot: closure has {0} components")]
    NotAKnot(usize),
    #[error("not a positive braid: letter {0} is negative")]
    NotPositive(i32),
    #[error("inconsistent coloring: {0}")]
    InconsistentColoring(String),
    #[error("validity-unbounded: {0}")]
    ValidityUnbounded(String),
    #[error("no stabilization after {strata} strata: {detail}")]
    NoStabilization { strata: usize, detail: String },
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("divergent direction: {0}")]
    DivergentDirection(String),
    #[error("empty window")]
    EmptyWindow,
    #[error("singular linking matrix")]
    SingularMatrix,
    #[error("inconsistent family: {0}")]
    InconsistentFamily(String),
    #[error("insufficient r range: {0}")]
    InsufficientRange(String),
    #[error("coefficient overflow in exact integer state sum")]
    Overflow,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Short stable identifier, used in machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::InvalidBraid(_) => "invalid-braid",
            Error::NotAKnot(_) => "not-a-knot",
            Error::NotPositive(_) => "not-positive",
            Error::InconsistentColoring(_) => "inconsistent-coloring",
            Error::ValidityUnbounded(_) => "validity-unbounded",
            Error::NoStabilization { .. } => "no-stabilization",
            Error::WindowTooSmall(_) => "window-too-small",
            Error::DivergentDirection(_) => "divergent-direction",
            Error::EmptyWindow => "empty-window",
            Error::SingularMatrix => "singular-matrix",
            Error::InconsistentFamily(_) => "inconsistent-family",
            Error::InsufficientRange(_) => "insufficient-range",
            Error::Overflow => "overflow",
            Error::InvalidArgument(_) => "invalid-argument",
        }
    }
}
