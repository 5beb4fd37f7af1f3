use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which invariant of a short exact sequence failed validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SesDefect {
    IncompatibleEnds,
    INotMono,
    PNotEpi,
    CompositeNonzero,
    ImageNotKernel,
}

impl fmt::Display for SesDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            SesDefect::IncompatibleEnds => "maps are not composable (i.tgt != p.src)",
            SesDefect::INotMono => "i not mono",
            SesDefect::PNotEpi => "p not epi",
            SesDefect::CompositeNonzero => "p·i != 0",
            SesDefect::ImageNotKernel => "im i != ker p",
        };
        f.write_str(msg)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a supported prime modulus")]
    NotPrime(u32),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },
    #[error("modulus mismatch: {0} vs {1}")]
    Modulus(u32, u32),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("invalid short exact sequence: {0}")]
    InvalidSequence(SesDefect),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("enumeration refused: {count} candidates exceed the guard of {limit}")]
    Guard { count: u128, limit: u128 },
}

impl Error {
    pub(crate) fn dim(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Dimension {
            op,
            detail: detail.into(),
        }
    }
}
