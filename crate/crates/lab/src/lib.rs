//! Std-side tooling around `wentzell-core`: run specifications, output
//! files with embedded provenance, parallel Monte Carlo drivers, the
//! verification suite and the subcommands of the `wentzell` binary.

// `!(x > 0.0)` style guards reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod error;
pub mod io;
pub mod parallel;
pub mod profile;
pub mod spec;
pub mod verify;
