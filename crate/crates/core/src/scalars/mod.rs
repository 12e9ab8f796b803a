//! Exact coefficient arithmetic: arbitrary-precision rationals and
//! multivariate rational functions over Q in symbolic generators.
//!
//! All values are immutable after construction and all operations are
//! pure, so they are safe to share across threads.

mod linalg;
mod mpoly;
mod rat;
mod ratfunc;

pub use linalg::{dependency_over_subfield, solve_over_subfield};
pub use mpoly::{MPoly, Monomial};
pub use rat::Rat;
pub use ratfunc::{field_ops, ratfunc_equal, FieldOp, RatFunc};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
}
