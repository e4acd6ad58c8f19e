//! End-to-end demonstrations: root lifting over the p-adic integers via the
//! Newton map, and power-series solutions of polynomial differential
//! equations via the integral operator. Both are driven by the staged
//! approximation engine and re-checked by the diagnostics layer.

mod hensel;
mod picard;

pub use hensel::{hensel_solve, HenselOutcome, HenselProblem, IntPoly, NewtonMap};
pub use picard::{
    picard_as_extension_demo, picard_solve, residual, OdeProblem, PicardOp, PicardOutcome,
};

use std::fmt;

use crate::analysis::AnalysisError;
use crate::driver::DriverError;
use crate::instances::InstanceError;

#[derive(Debug)]
pub enum AppError {
    /// The seed does not meet the lifting hypothesis: its derivative value
    /// is not a unit, or its polynomial value is not divisible by p.
    HenselConditionFailed { detail: String },
    /// A problem statement out of range, e.g. a resolution finer than the
    /// series cap.
    BadProblem { detail: String },
    Driver(DriverError),
    Instance(InstanceError),
    Analysis(AnalysisError),
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::HenselConditionFailed { detail } => {
                write!(f, "lifting condition failed: {detail}")
            }
            AppError::BadProblem { detail } => write!(f, "bad problem: {detail}"),
            AppError::Driver(e) => write!(f, "{e}"),
            AppError::Instance(e) => write!(f, "{e}"),
            AppError::Analysis(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for AppError {}

impl From<DriverError> for AppError {
    fn from(e: DriverError) -> Self {
        AppError::Driver(e)
    }
}

impl From<InstanceError> for AppError {
    fn from(e: InstanceError) -> Self {
        AppError::Instance(e)
    }
}

impl From<AnalysisError> for AppError {
    fn from(e: AnalysisError) -> Self {
        AppError::Analysis(e)
    }
}
