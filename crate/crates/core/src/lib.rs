//! Composition of quantum boundary conditions on the unit interval.
//!
//! * [`bc_algebra`]: U(2) boundary conditions, Cayley transforms and the
//!   `star` composition.
//! * [`spectral`]: eigenvalues and eigenfunctions of −d²/dx² under a given
//!   boundary condition.
//! * [`evolution`]: alternating-boundary Trotter evolution, the
//!   Crank–Nicolson reference and the magnetic-flux scenario.
//! * [`cli`]: the `bccompose` command-line front end.

// `!(x < tol)` is how NaN gets rejected; 2×2 kernels read best indexed
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bc_algebra;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod fd;
pub mod grid;
pub mod mat2;
pub mod spectral;

pub use error::{Error, Result};

/// `{:.16e}` with negative zero folded to zero, for every text writer.
pub(crate) fn sci(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}
