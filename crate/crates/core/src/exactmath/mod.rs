//! Exact rational linear algebra and cyclotomic coefficient arithmetic.

mod coeff;
mod cyclotomic;
mod matrix;
mod rat;
mod snf;

use thiserror::Error;

pub use coeff::{Coeff, ComplexValue, GroupRingElt};
pub use cyclotomic::{cyc_to_rational, cyclotomic_polynomial, root_of_unity, CycNum, CyclotomicField};
pub use matrix::{invert_rational_matrix, IntMat, RatMat};
pub use rat::*;
pub use snf::{smith_normal_form, smith_normal_form_big, BigMat, SnfResult};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("not rational: conductor {conductor}, irrational components {residual:?}")]
    NotRational { conductor: u32, residual: Vec<String> },
    #[error("cannot parse rational number {0:?}")]
    ParseRational(String),
}
