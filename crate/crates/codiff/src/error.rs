use std::fmt;

use crate::scalar::Domain;

/// Error type shared across the library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Matrix shapes do not compose / do not match the declared dimensions.
    DimMismatch { context: &'static str, detail: String },
    /// Two values from different scalar domains were combined.
    DomainMismatch { left: Domain, right: Domain },
    /// Syntax error with source location (1-based line and column).
    Parse { line: usize, col: usize, msg: String },
    /// Term does not typecheck; names the offending subterm and signatures.
    Type { subterm: String, detail: String },
    /// A trace node was evaluated in a model without traced structure.
    UntracedModel { model: String },
    /// A modality generator was requested from a model without one.
    NoModality { model: String },
    /// The requested object or matrix exceeds the exact-evaluation budget.
    TooLarge { what: String },
    /// A nested element did not have the shape its object requires.
    MalformedElement { detail: String },
    /// An unbound free morphism generator was evaluated.
    UnboundFree { name: String },
    UnknownModel { name: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimMismatch { context, detail } => {
                write!(f, "dimension mismatch in {context}: {detail}")
            }
            Error::DomainMismatch { left, right } => {
                write!(f, "scalar domain mismatch: {left} vs {right}")
            }
            Error::Parse { line, col, msg } => {
                write!(f, "syntax error at {line}:{col}: {msg}")
            }
            Error::Type { subterm, detail } => {
                write!(f, "type error in `{subterm}`: {detail}")
            }
            Error::UntracedModel { model } => {
                write!(f, "model `{model}` has no traced structure")
            }
            Error::NoModality { model } => {
                write!(f, "model `{model}` has no algebra modality")
            }
            Error::TooLarge { what } => {
                write!(f, "exceeds exact-evaluation budget: {what}")
            }
            Error::MalformedElement { detail } => {
                write!(f, "malformed element: {detail}")
            }
            Error::UnboundFree { name } => {
                write!(f, "free morphism `{name}` has no binding")
            }
            Error::UnknownModel { name } => write!(f, "unknown model `{name}`"),
        }
    }
}

impl std::error::Error for Error {}
