use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{what}: no sign change found ({} scan points)", trace.len())]
    NoSignChange {
        what: &'static str,
        /// `(argument, residual)` pairs visited by the scan.
        trace: Vec<(f64, f64)>,
    },

    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("ill-conditioned {what}: condition number {condition:e}")]
    IllConditioned { what: &'static str, condition: f64 },

    #[error("Picard increment {increment:e} at iteration {iteration} exceeds envelope {bound:e}")]
    EnvelopeViolated {
        iteration: usize,
        increment: f64,
        bound: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(alloc::format!($($arg)*)) };
}
pub(crate) use domain;
