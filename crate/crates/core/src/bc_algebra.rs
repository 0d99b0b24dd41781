//! The U(2) algebra of boundary conditions on [0, 1].
//!
//! A boundary condition is a 2×2 unitary U imposing
//! `i(I + U)φ′ = (I − U)φ` on the boundary data φ = (ψ(0), ψ(1)),
//! φ′ = (−ψ′(0), ψ′(1)). Unitaries without a −1 eigenvalue are the image of
//! Hermitian matrices K under the Cayley transform; the eigenvalue −1 encodes
//! a hard constraint on the boundary values.
//!
//! The composition `star` averages Cayley preimages on the unconstrained
//! part and keeps every constraint of either factor, so the −1 eigenspaces
//! are absorbing.

use crate::error::{Error, Result};
use crate::mat2::{self, inner, normal_eigen, Mat2, Vec2, C64, I, ONE, ZERO};
use serde::{Deserialize, Serialize};

/// An eigenvalue counts as −1 when |λ + 1| is below this.
pub const SINGULAR_TOL: f64 = 1e-9;

/// Two −1 eigenvectors are parallel when |⟨ξ, η⟩| > 1 − PARALLEL_TOL.
pub const PARALLEL_TOL: f64 = 1e-9;

/// Accepted ‖U†U − I‖_F for a boundary condition.
pub const UNITARITY_TOL: f64 = 1e-12;

/// Accepted ‖K − K†‖_F, relative to max(1, ‖K‖_F).
pub const HERMITICITY_TOL: f64 = 1e-12;

/// A boundary condition: a 2×2 unitary matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryCondition {
    u: Mat2,
}

impl BoundaryCondition {
    pub fn new(u: Mat2) -> Result<Self> {
        let defect = u.unitarity_defect();
        if !(defect <= UNITARITY_TOL) {
            return Err(Error::NotUnitary { defect });
        }
        Ok(BoundaryCondition { u })
    }

    pub(crate) fn from_unitary_unchecked(u: Mat2) -> Self {
        BoundaryCondition { u }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.u
    }

    pub fn dirichlet() -> Self {
        make_named(Family::Dirichlet)
    }

    pub fn neumann() -> Self {
        make_named(Family::Neumann)
    }

    pub fn robin(alpha: f64) -> Self {
        make_named(Family::Robin(alpha))
    }

    pub fn pseudo_periodic(alpha: f64) -> Self {
        make_named(Family::PseudoPeriodic(alpha))
    }

    /// True when U is exactly −I.
    pub fn is_exact_dirichlet(&self) -> bool {
        self.u == Mat2::scalar(-ONE)
    }

    /// ‖self − other‖_F
    pub fn distance(&self, other: &BoundaryCondition) -> f64 {
        (self.u - other.u).frobenius()
    }
}

/// The named one-parameter families on the interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Dirichlet,
    Neumann,
    /// ψ′(0) = −tan(α/2)ψ(0), ψ′(1) = tan(α/2)ψ(1).
    Robin(f64),
    /// Dirichlet at x = 0, Robin(α) at x = 1.
    MixedDirichletRobin(f64),
    /// ψ(1) = e^{iα}ψ(0), ψ′(1) = e^{iα}ψ′(0).
    PseudoPeriodic(f64),
}

pub fn make_named(family: Family) -> BoundaryCondition {
    let e = |a: f64| C64::from_polar(1.0, a);
    let u = match family {
        Family::Dirichlet => Mat2::scalar(-ONE),
        Family::Neumann => Mat2::identity(),
        Family::Robin(a) => Mat2::scalar(e(-a)),
        Family::MixedDirichletRobin(a) => Mat2::diag(-ONE, e(-a)),
        Family::PseudoPeriodic(a) => Mat2::new(ZERO, e(-a), e(a), ZERO),
    };
    BoundaryCondition::from_unitary_unchecked(u)
}

/// A Hermitian 2×2 matrix K, the Cayley preimage of a regular boundary
/// condition. Physically a boundary inverse length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianBoundaryMatrix {
    k: Mat2,
}

impl HermitianBoundaryMatrix {
    pub fn new(k: Mat2) -> Result<Self> {
        let defect = k.hermiticity_defect();
        if !(defect <= HERMITICITY_TOL * k.frobenius().max(1.0)) {
            return Err(Error::NotHermitian { defect });
        }
        Ok(HermitianBoundaryMatrix { k: k.hermitian_part() })
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.k
    }

    /// Real eigenvalues of K, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        mat2::hermitian_eigen(&self.k).0
    }

    /// ⟨φ|Kφ⟩, real.
    pub fn expectation(&self, phi: &Vec2) -> f64 {
        self.k.sandwich(phi, phi).re
    }
}

/// Spectral decomposition U = u₁|ξ⟩⟨ξ| + u₂|ξ⊥⟩⟨ξ⊥|, with u₁ the
/// eigenvalue closest to −1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralDecomp2 {
    pub u1: C64,
    pub u2: C64,
    pub xi: Vec2,
    pub xi_perp: Vec2,
}

impl SpectralDecomp2 {
    pub fn reconstruct(&self) -> Mat2 {
        Mat2::from_spectrum([self.u1, self.u2], [self.xi, self.xi_perp])
    }

    /// Eigenphases θⱼ = arg uⱼ in (−π, π].
    pub fn phases(&self) -> [f64; 2] {
        [self.u1.arg(), self.u2.arg()]
    }
}

pub fn spectral_decomp(u: &BoundaryCondition) -> SpectralDecomp2 {
    let (vals, vecs) = normal_eigen(&u.u);
    let dist = |z: C64| (z + ONE).norm();
    let (i1, i2) = if dist(vals[0]) <= dist(vals[1]) { (0, 1) } else { (1, 0) };
    SpectralDecomp2 { u1: vals[i1], u2: vals[i2], xi: vecs[i1], xi_perp: vecs[i2] }
}

/// Classification by the number of eigenvalues at −1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BCClass {
    /// No −1 eigenvalue: free ends, φ′ = Kφ.
    Regular(HermitianBoundaryMatrix),
    /// One −1 eigenvalue with eigenvector ξ: ⟨ξ|φ⟩ = 0.
    OneSingular { xi: Vec2, u2: C64 },
    /// U = −I: φ = 0.
    FullDirichlet,
}

impl BCClass {
    pub fn name(&self) -> &'static str {
        match self {
            BCClass::Regular(_) => "Regular",
            BCClass::OneSingular { .. } => "OneSingular",
            BCClass::FullDirichlet => "FullDirichlet",
        }
    }
}

pub fn classify(u: &BoundaryCondition, tol: f64) -> BCClass {
    let sd = spectral_decomp(u);
    let near = |z: C64| (z + ONE).norm() < tol;
    match (near(sd.u1), near(sd.u2)) {
        (true, true) => BCClass::FullDirichlet,
        (true, false) => BCClass::OneSingular { xi: sd.xi, u2: sd.u2 },
        _ => BCClass::Regular(hermitian_from_decomp(&sd)),
    }
}

/// Scalar Cayley transform (1 − ik)/(1 + ik).
pub fn cayley_scalar(k: f64) -> C64 {
    let d = 1.0 + k * k;
    C64::new((1.0 - k * k) / d, -2.0 * k / d)
}

/// Scalar inverse Cayley transform −i(1 − u)/(1 + u) = −tan(θ/2) for
/// u = e^{iθ}. Uses whichever half-angle formula avoids cancellation.
pub fn inverse_cayley_scalar(u: C64) -> f64 {
    if u.re >= 0.0 {
        -u.im / (1.0 + u.re)
    } else {
        -(1.0 - u.re) / u.im
    }
}

fn hermitian_from_decomp(sd: &SpectralDecomp2) -> HermitianBoundaryMatrix {
    let k1 = inverse_cayley_scalar(sd.u1);
    let k2 = inverse_cayley_scalar(sd.u2);
    let k = Mat2::from_spectrum([C64::new(k1, 0.0), C64::new(k2, 0.0)], [sd.xi, sd.xi_perp]);
    HermitianBoundaryMatrix { k: k.hermitian_part() }
}

/// 𝔠(K) = (I − iK)(I + iK)⁻¹.
pub fn cayley(k: &HermitianBoundaryMatrix) -> Result<BoundaryCondition> {
    let ik = k.k.scale(I);
    let denom = (Mat2::identity() + ik).inverse(1e-300).ok_or(Error::SingularMatrix("I + iK"))?;
    Ok(BoundaryCondition::from_unitary_unchecked((Mat2::identity() - ik) * denom))
}

/// 𝔠⁻¹(U) = −i(I − U)(I + U)⁻¹, refused when an eigenvalue of U is within
/// `tol` of −1.
pub fn inverse_cayley(u: &BoundaryCondition, tol: f64) -> Result<HermitianBoundaryMatrix> {
    let sd = spectral_decomp(u);
    if (sd.u1 + ONE).norm() < tol {
        return Err(Error::SingularBoundaryCondition { eigenvalue: sd.u1, tol });
    }
    Ok(hermitian_from_decomp(&sd))
}

/// The composition law W = U ⋆ V.
///
/// `tol` is used both as the singularity tolerance and as the
/// eigenvector-parallelism tolerance.
pub fn star(u: &BoundaryCondition, v: &BoundaryCondition, tol: f64) -> BoundaryCondition {
    use BCClass::*;
    let dirichlet = BoundaryCondition::dirichlet();
    let (cu, cv) = (classify(u, tol), classify(v, tol));
    match (cu, cv) {
        (FullDirichlet, _) | (_, FullDirichlet) => dirichlet,
        (Regular(ku), Regular(kv)) => {
            let k = HermitianBoundaryMatrix { k: (ku.k + kv.k).scale_re(0.5) };
            // I + iK is invertible for Hermitian K
            let w = cayley(&k).expect("Hermitian K").u;
            let w = if w.unitarity_defect() > 1e-12 { w.polar_unitary() } else { w };
            BoundaryCondition::from_unitary_unchecked(w)
        }
        (OneSingular { xi, u2 }, Regular(kv)) | (Regular(kv), OneSingular { xi, u2 }) => {
            let xi_perp = mat2::perp(&xi);
            let kappa = 0.5 * (inverse_cayley_scalar(u2) + kv.k.sandwich(&xi_perp, &xi_perp).re);
            singular_composite(&xi, cayley_scalar(kappa))
        }
        (OneSingular { xi: xu, u2: u2u }, OneSingular { xi: xv, u2: u2v }) => {
            if inner(&xu, &xv).norm() > 1.0 - tol {
                // the averaged projector is symmetric in (u, v)
                let p = Mat2::outer(&xu, &xu) + Mat2::outer(&xv, &xv);
                let xi = mat2::hermitian_eigen(&p).1[1];
                let kappa = 0.5 * (inverse_cayley_scalar(u2u) + inverse_cayley_scalar(u2v));
                singular_composite(&xi, cayley_scalar(kappa))
            } else {
                dirichlet
            }
        }
    }
}

/// −|ξ⟩⟨ξ| + w₂|ξ⊥⟩⟨ξ⊥|
fn singular_composite(xi: &Vec2, w2: C64) -> BoundaryCondition {
    let xi = mat2::normalize(xi);
    let w = Mat2::from_spectrum([-ONE, w2], [xi, mat2::perp(&xi)]);
    BoundaryCondition::from_unitary_unchecked(w)
}

/// Left fold b₁ ⋆ b₂ ⋆ … ⋆ bₙ = ((b₁ ⋆ b₂) ⋆ b₃) ⋆ …
pub fn fold_left(bcs: &[BoundaryCondition], tol: f64) -> Option<BoundaryCondition> {
    let (first, rest) = bcs.split_first()?;
    Some(rest.iter().fold(*first, |acc, b| star(&acc, b, tol)))
}

// ---------------------------------------------------------------------------
// Text records: {"re": [[..]], "im": [[..]]} or {"family": "robin", "alpha": x}

#[derive(Serialize, Deserialize)]
struct MatrixRecord {
    re: [[f64; 2]; 2],
    im: [[f64; 2]; 2],
}

#[derive(Deserialize)]
struct NamedRecord {
    family: String,
    #[serde(default)]
    alpha: Option<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Record {
    Matrix(MatrixRecord),
    Named(NamedRecord),
}

impl Family {
    /// Parses a family name and its angle, e.g. ("robin", Some(1.2)).
    pub fn from_name(name: &str, alpha: Option<f64>) -> Result<Family> {
        let need = |a: Option<f64>| {
            let a = a.ok_or_else(|| Error::InvalidInput(format!("family '{name}' needs an angle")))?;
            if !a.is_finite() {
                return Err(Error::InvalidInput(format!("angle {a} is not finite")));
            }
            Ok(a)
        };
        let no_angle = |a: Option<f64>, f: Family| match a {
            None => Ok(f),
            Some(_) => Err(Error::InvalidInput(format!("family '{name}' takes no angle"))),
        };
        match name.to_ascii_lowercase().as_str() {
            "dirichlet" => no_angle(alpha, Family::Dirichlet),
            "neumann" => no_angle(alpha, Family::Neumann),
            "robin" => Ok(Family::Robin(need(alpha)?)),
            "mixed" | "mixed_dirichlet_robin" => Ok(Family::MixedDirichletRobin(need(alpha)?)),
            "pseudoperiodic" | "pseudo_periodic" => Ok(Family::PseudoPeriodic(need(alpha)?)),
            other => Err(Error::InvalidInput(format!("unknown boundary family '{other}'"))),
        }
    }
}

impl Serialize for BoundaryCondition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = &self.u.0;
        MatrixRecord {
            re: [[m[0][0].re, m[0][1].re], [m[1][0].re, m[1][1].re]],
            im: [[m[0][0].im, m[0][1].im], [m[1][0].im, m[1][1].im]],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundaryCondition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match Record::deserialize(d)? {
            Record::Matrix(r) => BoundaryCondition::new(Mat2::from_real(r.re, r.im)).map_err(D::Error::custom),
            Record::Named(r) => Family::from_name(&r.family, r.alpha).map(make_named).map_err(D::Error::custom),
        }
    }
}
