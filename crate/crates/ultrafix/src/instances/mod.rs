//! Concrete ultrametric spaces: finite tables over finite radius posets,
//! p-adic integers at fixed precision, truncated power series over exact
//! rationals, and a series space measured by exponent pairs.

mod finite;
mod lex_series;
mod padic;
mod series;

pub use finite::{all_contracting_selfmaps, finite_space_enumerate, FiniteSpace, TableMap};
pub use lex_series::{LexAffineMap, LexSeriesQ, LexSeriesSpace};
pub use padic::{PadicInt, PadicSpace};
pub use series::{poly_eval, Poly2, SeriesQ, SeriesSpace};

use std::fmt;

use crate::report::Report;

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceError {
    /// A distance table or order failed its load-time axiom checks.
    InvalidSpace { report: Report },
    /// Arithmetic attempted between values of different (p, N) settings.
    MixedPrecision { left: String, right: String },
    /// Inversion of a residue sharing a factor with the modulus.
    NonUnit { residue: String, modulus: String },
    /// Arithmetic attempted between series of different caps.
    CapMismatch { left: usize, right: usize },
    /// A constructor argument out of range: composite p, zero cap, an
    /// overflowing modulus, and the like.
    BadParameter { detail: String },
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::InvalidSpace { report } => {
                write!(f, "space fails its axioms: {report}")
            }
            InstanceError::MixedPrecision { left, right } => {
                write!(f, "mixed precision: {left} vs {right}")
            }
            InstanceError::NonUnit { residue, modulus } => {
                write!(f, "{residue} is not a unit mod {modulus}")
            }
            InstanceError::CapMismatch { left, right } => {
                write!(f, "series caps differ: {left} vs {right}")
            }
            InstanceError::BadParameter { detail } => write!(f, "bad parameter: {detail}"),
        }
    }
}

impl std::error::Error for InstanceError {}
