use crate::bc_algebra::BoundaryCondition;
use crate::error::{Error, Result};
use crate::fd::{CrankNicolson, FdLaplacian};
use crate::grid::StateGrid;

/// `steps` implicit-midpoint steps of length `tau` for the finite-difference
/// Laplacian with ghost-cell boundary rows. Independent of the spectral
/// machinery; used as a reference.
pub fn cranknicolson_oracle(u: &BoundaryCondition, tau: f64, steps: usize, psi0: &StateGrid) -> Result<StateGrid> {
    if !tau.is_finite() {
        return Err(Error::InvalidInput(format!("time step must be finite, got {tau}")));
    }
    let op = FdLaplacian::new(u, psi0.len()).map_err(|e| match e {
        Error::SingularMatrix(what) => Error::UnsupportedBoundaryCondition(format!(
            "{what}: an eigenvalue of K equals twice the inverse grid spacing"
        )),
        other => other,
    })?;
    let cn = CrankNicolson::new(op, tau)?;
    let mut p = psi0.samples().to_vec();
    for _ in 0..steps {
        cn.step(&mut p);
    }
    StateGrid::new(p)
}
