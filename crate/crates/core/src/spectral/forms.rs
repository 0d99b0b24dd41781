//! The boundary form Γ_U and the quadratic form t_U(ψ) = ‖ψ′‖² − Γ_U(φ).
//!
//! Integrating by parts, ⟨ψ, −ψ″⟩ = ‖ψ′‖² − ⟨φ|φ′⟩, and the boundary
//! condition turns ⟨φ|φ′⟩ into a quadratic form of φ alone:
//!
//! * regular U: φ′ = Kφ, so Γ = ⟨φ|Kφ⟩;
//! * one −1 eigenvalue: ⟨ξ|φ⟩ = 0 and ⟨ξ⊥|φ′⟩ = k₂⟨ξ⊥|φ⟩ with
//!   k₂ = −i(1 − u₂)/(1 + u₂), so Γ = k₂ |⟨ξ⊥|φ⟩|²;
//! * U = −I: φ = 0 and Γ = 0.

use super::mode::{BoundaryVector, Mode};
use crate::bc_algebra::{classify, BCClass, BoundaryCondition, SINGULAR_TOL};
use crate::error::{Error, Result};
use crate::grid::StateGrid;
use crate::mat2::{self, inner, Mat2, Vec2, I, ONE};

/// A real form value and the imaginary part discarded to obtain it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormValue {
    pub value: f64,
    pub imag: f64,
}

impl FormValue {
    /// True when the discarded imaginary part is round-off sized.
    pub fn is_real(&self, tol: f64) -> bool {
        self.imag.abs() <= tol * (1.0 + self.value.abs())
    }
}

/// ‖i(I + U)φ′ − (I − U)φ‖₂
pub fn bc_residual(u: &BoundaryCondition, bv: &BoundaryVector) -> f64 {
    let um = *u.matrix();
    let id = Mat2::identity();
    let lhs = (id + um).scale(I).mul_vec(&bv.phi_prime);
    let rhs = (id - um).mul_vec(&bv.phi);
    mat2::norm(&[lhs[0] - rhs[0], lhs[1] - rhs[1]])
}

/// Γ_U(φ). Singular cases require φ to satisfy the constraint within `tol`.
pub fn gamma_form(u: &BoundaryCondition, phi: &Vec2, tol: f64) -> Result<FormValue> {
    match classify(u, SINGULAR_TOL) {
        BCClass::Regular(k) => {
            let z = k.matrix().sandwich(phi, phi);
            Ok(FormValue { value: z.re, imag: z.im })
        }
        BCClass::OneSingular { xi, u2 } => {
            let residual = inner(&xi, phi).norm();
            if residual > tol {
                return Err(Error::ConstraintViolation { residual, tol });
            }
            let prefactor = -I * (ONE - u2) / (ONE + u2);
            let z = prefactor * inner(&mat2::perp(&xi), phi).norm_sqr();
            Ok(FormValue { value: z.re, imag: z.im })
        }
        BCClass::FullDirichlet => {
            let residual = mat2::norm(phi);
            if residual > tol {
                return Err(Error::ConstraintViolation { residual, tol });
            }
            Ok(FormValue { value: 0.0, imag: 0.0 })
        }
    }
}

/// t_U on an eigenmode, with ‖ψ′‖² in closed form.
pub fn kinetic_form(u: &BoundaryCondition, mode: &Mode) -> Result<FormValue> {
    let bv = mode.boundary_vector();
    let tol = 1e-8 * (1.0 + mat2::norm(&bv.phi_prime));
    let gamma = gamma_form(u, &bv.phi, tol)?;
    Ok(FormValue { value: mode.derivative_norm_sqr() - gamma.value, imag: -gamma.imag })
}

/// t_U on a sampled state: finite-difference ‖ψ′‖² and extrapolated
/// boundary values.
pub fn kinetic_form_grid(u: &BoundaryCondition, psi: &StateGrid, tol: f64) -> Result<FormValue> {
    let phi = psi.extrapolated_boundary();
    let gamma = gamma_form(u, &phi, tol)?;
    Ok(FormValue { value: psi.derivative_norm_sqr() - gamma.value, imag: -gamma.imag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc_algebra::{make_named, Family};
    use crate::mat2::{C64, ZERO};

    #[test]
    fn residual_examples() {
        let any = [C64::new(0.3, 1.0), C64::new(-2.0, 0.1)];
        let d = BoundaryCondition::dirichlet();
        assert_eq!(bc_residual(&d, &BoundaryVector { phi: [ZERO; 2], phi_prime: any }), 0.0);
        let n = BoundaryCondition::neumann();
        assert_eq!(bc_residual(&n, &BoundaryVector { phi: any, phi_prime: [ZERO; 2] }), 0.0);
        let r = bc_residual(&d, &BoundaryVector { phi: [ONE, ZERO], phi_prime: [ZERO; 2] });
        assert!((r - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_examples() {
        let phi = [C64::new(0.5, -1.0), C64::new(2.0, 0.0)];
        let a: f64 = 0.9;
        let g = gamma_form(&BoundaryCondition::robin(a), &phi, 1e-12).unwrap();
        let expect = (a / 2.0).tan() * mat2::norm(&phi).powi(2);
        assert!((g.value - expect).abs() < 1e-14 * expect);
        assert_eq!(gamma_form(&BoundaryCondition::neumann(), &phi, 0.0).unwrap().value, 0.0);
        assert_eq!(gamma_form(&BoundaryCondition::dirichlet(), &[ZERO; 2], 0.0).unwrap().value, 0.0);
        assert!(matches!(
            gamma_form(&BoundaryCondition::dirichlet(), &phi, 1e-3),
            Err(Error::ConstraintViolation { .. })
        ));
    }

    #[test]
    fn singular_gamma_matches_robin_end() {
        // Dirichlet at 0, Robin(α) at 1: Γ = tan(α/2)|ψ(1)|²
        let a: f64 = 1.2;
        let u = make_named(Family::MixedDirichletRobin(a));
        let phi = [ZERO, C64::new(0.0, 1.5)];
        let g = gamma_form(&u, &phi, 1e-12).unwrap();
        assert!((g.value - (a / 2.0).tan() * 2.25).abs() < 1e-14);
        assert!(g.is_real(1e-12));
        assert!(gamma_form(&u, &[ONE, ZERO], 1e-6).is_err());
    }

    #[test]
    fn robin_on_constant() {
        let a: f64 = 0.6;
        let psi = StateGrid::from_fn(100, |_| ONE).unwrap();
        let t = kinetic_form_grid(&BoundaryCondition::robin(a), &psi, 0.0).unwrap();
        assert!((t.value + 2.0 * (a / 2.0).tan()).abs() < 1e-14);
    }
}
