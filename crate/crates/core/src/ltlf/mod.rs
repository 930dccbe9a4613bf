//! LTLf formulas over a declared fluent set: syntax, parsing, printing,
//! desugaring and the direct finite-trace semantics.

mod fluents;
mod formula;
mod parser;
mod semantics;

pub use fluents::{Assignment, FiniteTrace, Fluent, FluentSet, MAX_FLUENTS};
pub use formula::Formula;
pub use parser::parse;
pub use semantics::evaluate;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LtlfError {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("undeclared atom '{name}' at offset {position}")]
    UndeclaredAtom { name: String, position: usize },
    #[error("invalid fluent name '{0}'")]
    InvalidFluentName(String),
    #[error("duplicate fluent '{0}'")]
    DuplicateFluent(String),
    #[error("{0} fluents declared, at most {MAX_FLUENTS} are supported")]
    TooManyFluents(usize),
    #[error("traces must be nonempty")]
    EmptyTrace,
    #[error("assignment mentions fluents outside the declared set")]
    AssignmentOutOfRange,
    #[error("instant {instant} out of range for a trace of length {len}")]
    InstantOutOfRange { instant: usize, len: usize },
}
