//! Secular matrices M = i(I + U)Φ′ − (I − U)Φ built from the boundary data
//! of two fundamental solutions.
//!
//! `secular_matrix` uses the plain bases {cos kx, sin kx}, {cosh κx, sinh κx}
//! and {1, x}. Root finding uses rescaled bases that stay bounded for every
//! k and κ:
//!
//! * oscillatory: cos kx, sin(kx)/k
//! * evanescent: e^{−κx}, e^{κ(x−1)}
//!
//! Changing basis by a real matrix with positive determinant multiplies
//! det M by a positive number, so sign changes are preserved.

use crate::bc_algebra::{spectral_decomp, BoundaryCondition};
use crate::mat2::{Mat2, C64, I};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Boundary data of two fundamental solutions, as columns: φ in `phi`,
/// φ′ in `dphi`, and their derivatives with respect to the scan variable.
#[derive(Clone, Copy, Debug)]
pub struct FundamentalData {
    pub phi: Mat2,
    pub dphi: Mat2,
    pub phi_k: Mat2,
    pub dphi_k: Mat2,
}

fn cols(c1: [f64; 2], c2: [f64; 2]) -> Mat2 {
    Mat2::new(re(c1[0]), re(c2[0]), re(c1[1]), re(c2[1]))
}

/// sin(k)/k and its k-derivative.
fn sinc(k: f64) -> (f64, f64) {
    if k.abs() < 1e-4 {
        let k2 = k * k;
        (1.0 - k2 / 6.0, k * (-1.0 / 3.0 + k2 / 30.0))
    } else {
        let (s, c) = k.sin_cos();
        (s / k, (k * c - s) / (k * k))
    }
}

/// {cos kx, sin(kx)/k}
pub fn oscillatory_scaled(k: f64) -> FundamentalData {
    let (s, c) = k.sin_cos();
    let (sk, dsk) = sinc(k);
    FundamentalData {
        phi: cols([1.0, c], [0.0, sk]),
        dphi: cols([0.0, -k * s], [-1.0, c]),
        phi_k: cols([0.0, -s], [0.0, dsk]),
        dphi_k: cols([0.0, -s - k * c], [0.0, -s]),
    }
}

/// {e^{−κx}, e^{κ(x−1)}}
pub fn evanescent_exp(kappa: f64) -> FundamentalData {
    let e = (-kappa).exp();
    FundamentalData {
        phi: cols([1.0, e], [e, 1.0]),
        dphi: cols([kappa, -kappa * e], [-kappa * e, kappa]),
        phi_k: cols([0.0, -e], [-e, 0.0]),
        dphi_k: cols([1.0, (kappa - 1.0) * e], [(kappa - 1.0) * e, 1.0]),
    }
}

/// {cosh κx, sinh(κx)/κ}; well conditioned for small κ.
pub fn evanescent_hyperbolic(kappa: f64) -> FundamentalData {
    let (ch, sh) = (kappa.cosh(), kappa.sinh());
    let shk = if kappa.abs() < 1e-4 { 1.0 + kappa * kappa / 6.0 } else { sh / kappa };
    let zero = Mat2::zero();
    FundamentalData {
        phi: cols([1.0, ch], [0.0, shk]),
        dphi: cols([0.0, kappa * sh], [-1.0, ch]),
        phi_k: zero,
        dphi_k: zero,
    }
}

/// {1, x}
pub fn zero_energy() -> FundamentalData {
    let zero = Mat2::zero();
    FundamentalData {
        phi: cols([1.0, 1.0], [0.0, 1.0]),
        dphi: cols([0.0, 0.0], [-1.0, 1.0]),
        phi_k: zero,
        dphi_k: zero,
    }
}

/// Precomputed pieces of U that every secular evaluation needs.
#[derive(Clone, Copy, Debug)]
pub struct SecularOperator {
    /// i(I + U)
    plus: Mat2,
    /// I − U
    minus: Mat2,
    /// e^{−iγ} with γ the mean eigenphase of U; makes det M real.
    rotation: C64,
    plus_norm: f64,
    minus_norm: f64,
}

impl SecularOperator {
    pub fn new(u: &BoundaryCondition) -> Self {
        let um = *u.matrix();
        let id = Mat2::identity();
        let sd = spectral_decomp(u);
        let [t1, t2] = sd.phases();
        let plus = (id + um).scale(I);
        let minus = id - um;
        SecularOperator {
            plus,
            minus,
            rotation: C64::from_polar(1.0, -0.5 * (t1 + t2)),
            plus_norm: plus.spectral_norm(),
            minus_norm: minus.spectral_norm(),
        }
    }

    pub fn matrix(&self, f: &FundamentalData) -> Mat2 {
        self.plus * f.dphi - self.minus * f.phi
    }

    fn matrix_k(&self, f: &FundamentalData) -> Mat2 {
        self.plus * f.dphi_k - self.minus * f.phi_k
    }

    /// Size of M's entries, the reference for "numerically zero".
    pub fn scale(&self, f: &FundamentalData) -> f64 {
        self.plus_norm * f.dphi.frobenius() + self.minus_norm * f.phi.frobenius()
    }

    /// The rotated determinant e^{−iγ} det M, real up to round-off.
    pub fn rotated_det(&self, f: &FundamentalData) -> C64 {
        self.rotation * self.matrix(f).det()
    }

    /// (s, ds/dk) with s = Re(e^{−iγ} det M).
    pub fn real_det_and_slope(&self, f: &FundamentalData) -> (f64, f64) {
        let m = self.matrix(f);
        let d = self.matrix_k(f);
        let (a, b) = (&m.0, &d.0);
        let slope = b[0][0] * a[1][1] + a[0][0] * b[1][1] - b[0][1] * a[1][0] - a[0][1] * b[1][0];
        ((self.rotation * m.det()).re, (self.rotation * slope).re)
    }
}

/// M(E) in the plain fundamental bases: columns are i(I+U)φ′ − (I−U)φ for
/// cos kx, sin kx (E > 0), cosh κx, sinh κx (E < 0), or 1, x (E = 0).
pub fn secular_matrix(u: &BoundaryCondition, energy: f64) -> Mat2 {
    let data = if energy > 0.0 {
        let k = energy.sqrt();
        let (s, c) = k.sin_cos();
        (cols([1.0, c], [0.0, s]), cols([0.0, -k * s], [-k, k * c]))
    } else if energy < 0.0 {
        let kappa = (-energy).sqrt();
        let (ch, sh) = (kappa.cosh(), kappa.sinh());
        (cols([1.0, ch], [0.0, sh]), cols([0.0, kappa * sh], [-kappa, kappa * ch]))
    } else {
        (cols([1.0, 1.0], [0.0, 1.0]), cols([0.0, 0.0], [-1.0, 1.0]))
    };
    let um = *u.matrix();
    let id = Mat2::identity();
    (id + um).scale(I) * data.1 - (id - um) * data.0
}
