use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An eigenvalue of U lies within the singularity tolerance of −1, so U
    /// is outside the range of the Cayley transform.
    #[error("boundary condition has eigenvalue {eigenvalue} within {tol:e} of -1")]
    SingularBoundaryCondition { eigenvalue: num_complex::Complex64, tol: f64 },

    #[error("matrix is numerically singular: {0}")]
    SingularMatrix(&'static str),

    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("boundary vector violates the constraint of U (residual {residual:e} > {tol:e})")]
    ConstraintViolation { residual: f64, tol: f64 },

    #[error("root refinement failed near energy {energy}: {reason}")]
    ConvergenceFailure { energy: f64, reason: String },

    #[error("point x = {0} lies outside [0, 1]")]
    Domain(f64),

    #[error("grid with {grid_points} points cannot resolve {required}")]
    ResolutionMismatch { grid_points: usize, required: String },

    #[error("unsupported boundary condition: {0}")]
    UnsupportedBoundaryCondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ConvergenceFailure { .. }
                | Error::SingularMatrix(_)
                | Error::ResolutionMismatch { .. }
                | Error::UnsupportedBoundaryCondition(_)
        )
    }
}
