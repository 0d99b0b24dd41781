//! Dense 2×2 complex matrices and 2-vectors.
//!
//! Everything the boundary-condition algebra needs lives here: products,
//! inverses, adjoints, and eigendecompositions of Hermitian and normal
//! matrices. The eigensolvers avoid the characteristic-polynomial square
//! root, which loses half the digits near degenerate eigenvalues.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

pub type C64 = Complex64;

/// A complex 2-vector.
pub type Vec2 = [C64; 2];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// ⟨a|b⟩ = conj(a₁)b₁ + conj(a₂)b₂.
pub fn inner(a: &Vec2, b: &Vec2) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

pub fn norm(a: &Vec2) -> f64 {
    (a[0].norm_sqr() + a[1].norm_sqr()).sqrt()
}

pub fn normalize(a: &Vec2) -> Vec2 {
    let n = norm(a);
    [a[0] / n, a[1] / n]
}

/// A unit vector orthogonal to `a` (assumed normalized).
pub fn perp(a: &Vec2) -> Vec2 {
    [-a[1].conj(), a[0].conj()]
}

/// Row-major 2×2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn zero() -> Self {
        Mat2([[ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        Self::scalar(ONE)
    }

    pub fn scalar(z: C64) -> Self {
        Self::diag(z, z)
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2::new(a, ZERO, ZERO, d)
    }

    pub fn from_real(re: [[f64; 2]; 2], im: [[f64; 2]; 2]) -> Self {
        let mut m = Self::zero();
        for r in 0..2 {
            for c in 0..2 {
                m.0[r][c] = C64::new(re[r][c], im[r][c]);
            }
        }
        m
    }

    /// |a⟩⟨b|
    pub fn outer(a: &Vec2, b: &Vec2) -> Self {
        let mut m = Self::zero();
        for r in 0..2 {
            for c in 0..2 {
                m.0[r][c] = a[r] * b[c].conj();
            }
        }
        m
    }

    /// Builds Σ λⱼ |vⱼ⟩⟨vⱼ| from an orthonormal pair.
    pub fn from_spectrum(values: [C64; 2], vectors: [Vec2; 2]) -> Self {
        Self::outer(&vectors[0], &vectors[0]).scale(values[0]) + Self::outer(&vectors[1], &vectors[1]).scale(values[1])
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[r][c]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, z: C64) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0] * z, m[0][1] * z, m[1][0] * z, m[1][1] * z)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Inverse via the adjugate; `None` when |det| is below `tol` times the
    /// squared Frobenius norm.
    pub fn inverse(&self, tol: f64) -> Option<Self> {
        let d = self.det();
        let scale = self.frobenius().powi(2);
        if !(d.norm() > tol * scale) {
            return None;
        }
        let m = &self.0;
        Some(Mat2::new(m[1][1], -m[0][1], -m[1][0], m[0][0]).scale(d.inv()))
    }

    pub fn mul_vec(&self, v: &Vec2) -> Vec2 {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// ⟨a|M|b⟩
    pub fn sandwich(&self, a: &Vec2, b: &Vec2) -> C64 {
        inner(a, &self.mul_vec(b))
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flat_map(|r| r.iter()).map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flat_map(|r| r.iter()).fold(0.0, |acc: f64, z| acc.max(z.norm()))
    }

    /// Spectral norm (largest singular value).
    pub fn spectral_norm(&self) -> f64 {
        let (s, _) = self.singular_values_and_right_vectors();
        s[0]
    }

    /// ‖M†M − I‖_F
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Mat2::identity()).frobenius()
    }

    /// ‖M − M†‖_F
    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).frobenius()
    }

    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_re(0.5)
    }

    /// Singular values in descending order with the matching right singular
    /// vectors (columns of V in M = U Σ V†).
    pub fn singular_values_and_right_vectors(&self) -> ([f64; 2], [Vec2; 2]) {
        let gram = self.adjoint() * *self;
        let (vals, vecs) = hermitian_eigen(&gram);
        // ascending from hermitian_eigen; flip to descending
        let s = [vals[1].max(0.0).sqrt(), vals[0].max(0.0).sqrt()];
        (s, [vecs[1], vecs[0]])
    }

    /// Nearest unitary in Frobenius norm, U (U†U)^{-1/2}.
    pub fn polar_unitary(&self) -> Self {
        let gram = self.adjoint() * *self;
        let (vals, vecs) = hermitian_eigen(&gram);
        let inv_sqrt = [C64::new(1.0 / vals[0].sqrt(), 0.0), C64::new(1.0 / vals[1].sqrt(), 0.0)];
        let mut u = *self * Mat2::from_spectrum(inv_sqrt, vecs);
        // Newton steps U ← (U + U^{-†})/2 remove the round-off of the
        // eigen route
        for _ in 0..2 {
            match u.inverse(0.0) {
                Some(inv) => u = (u + inv.adjoint()).scale_re(0.5),
                None => break,
            }
        }
        u
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale_re(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let mut m = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                m.0[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        m
    }
}

/// Eigendecomposition of a Hermitian 2×2 matrix (only the Hermitian part of
/// the input is used). Eigenvalues ascending; eigenvectors orthonormal.
pub fn hermitian_eigen(h: &Mat2) -> ([f64; 2], [Vec2; 2]) {
    let p = h.0[0][0].re;
    let r = h.0[1][1].re;
    let q = (h.0[0][1] + h.0[1][0].conj()) * 0.5;
    let mean = 0.5 * (p + r);
    let d = 0.5 * (p - r);
    let s = d.hypot(q.norm());
    if s == 0.0 {
        return ([mean, mean], [[ONE, ZERO], [ZERO, ONE]]);
    }
    // eigenvector of the upper eigenvalue mean + s, built from whichever
    // formula avoids cancellation
    let upper = if d >= 0.0 { [C64::new(d + s, 0.0), q.conj()] } else { [q, C64::new(s - d, 0.0)] };
    let upper = normalize(&upper);
    let lower = perp(&upper);
    ([mean - s, mean + s], [lower, upper])
}

/// Eigendecomposition of a normal 2×2 matrix (e.g. unitary).
///
/// A normal matrix is λ̄ I + N with N = c·H for a Hermitian H, so the
/// eigenvectors come from the Hermitian eigensolver applied to whichever of
/// (N + N†)/2 or (N − N†)/2i is larger. Eigenvalues are the Rayleigh
/// quotients on those vectors.
pub fn normal_eigen(m: &Mat2) -> ([C64; 2], [Vec2; 2]) {
    let half_trace = m.trace() * 0.5;
    let n = *m - Mat2::scalar(half_trace);
    let a = n.hermitian_part();
    let b = (n - n.adjoint()).scale(C64::new(0.0, -0.5));
    let (fa, fb) = (a.frobenius(), b.frobenius());
    let vecs = if fa.max(fb) <= 1e-15 * (1.0 + m.frobenius()) {
        [[ONE, ZERO], [ZERO, ONE]]
    } else if fa >= fb {
        hermitian_eigen(&a).1
    } else {
        hermitian_eigen(&b).1
    };
    let vals = [m.sandwich(&vecs[0], &vecs[0]), m.sandwich(&vecs[1], &vecs[1])];
    (vals, vecs)
}
