//! Density matrices as ensembles of pure states: purification and remote
//! steering, mixing matrices, local correlation tomography, the Hardy
//! probability table and shot-noise simulation of all of it.
//!
//! Start with the programs under `examples/` or the `densmat` binary.

// `!(x <= tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod formats;
pub mod hardy;
pub mod linalg;
pub mod random;
pub mod report;
pub mod sampling;
pub mod steering;
pub mod tolerance;
pub mod tomography;
