//! Time evolution: spectral propagators on a grid, the alternating product
//! formula and its limit, a finite-difference reference integrator and the
//! magnetic ring scenario.

mod crank_nicolson;
mod magnetic;
mod propagator;
mod trotter;

pub use crank_nicolson::cranknicolson_oracle;
pub use magnetic::{magnetic_trotter, wrap_phase, MagneticConfig, MagneticOutcome};
pub use propagator::{project, propagate, Block, ComplexMatrix, GridBasis, Projection};
pub use trotter::{
    limit_evolve, trotter_error_sweep, trotter_evolve, SweepConfig, SweepRow, TrotterConfig, TrotterReport, TrotterRun,
    SWEEP_HEADER,
};
