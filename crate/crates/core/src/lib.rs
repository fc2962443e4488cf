//! Numerical core for diffusions on [0,1] with Wentzell boundary
//! behaviour: hitting kernels, the boundary Riccati system, the boundary
//! Volterra semigroup solver, pathwise Monte Carlo and defect analysis.
#![no_std]
// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
extern crate alloc;

pub mod error;
pub mod linalg;
pub mod math;
pub mod kernel;
pub mod quad;
pub mod riccati;
pub mod semigroup;
pub mod analysis;
pub mod mc;
