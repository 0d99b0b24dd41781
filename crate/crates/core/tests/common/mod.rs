#![allow(dead_code)]

use bccompose::bc_algebra::{cayley, BoundaryCondition, HermitianBoundaryMatrix};
use bccompose::mat2::{self, Mat2, Vec2, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

fn gauss(r: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = r.gen_range(f64::EPSILON..1.0);
    let u2: f64 = r.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

pub fn complex(r: &mut ChaCha8Rng) -> C64 {
    C64::new(gauss(r), gauss(r))
}

pub fn unit_vector(r: &mut ChaCha8Rng) -> Vec2 {
    mat2::normalize(&[complex(r), complex(r)])
}

/// Haar-distributed U(2) element: a uniform first column, completed by
/// its orthogonal direction with a uniform phase.
pub fn haar(r: &mut ChaCha8Rng) -> BoundaryCondition {
    let a = unit_vector(r);
    let b = mat2::perp(&a);
    let p = C64::from_polar(1.0, r.gen_range(-PI..PI));
    BoundaryCondition::new(Mat2::new(a[0], b[0] * p, a[1], b[1] * p)).unwrap()
}

pub fn hermitian(r: &mut ChaCha8Rng, scale: f64) -> HermitianBoundaryMatrix {
    let off = complex(r).scale(scale);
    let k = Mat2::new(C64::new(scale * gauss(r), 0.0), off, off.conj(), C64::new(scale * gauss(r), 0.0));
    HermitianBoundaryMatrix::new(k).unwrap()
}

pub fn regular(r: &mut ChaCha8Rng, scale: f64) -> BoundaryCondition {
    cayley(&hermitian(r, scale)).unwrap()
}

/// One eigenvalue −1 along a random direction, the other away from −1.
pub fn one_singular(r: &mut ChaCha8Rng) -> BoundaryCondition {
    let xi = unit_vector(r);
    one_singular_along(r, xi)
}

pub fn one_singular_along(r: &mut ChaCha8Rng, xi: Vec2) -> BoundaryCondition {
    let theta = r.gen_range(-PI + 0.2..PI - 0.2);
    let u = Mat2::from_spectrum([C64::new(-1.0, 0.0), C64::from_polar(1.0, theta)], [xi, mat2::perp(&xi)]);
    BoundaryCondition::new(u).unwrap()
}

pub fn dist(a: &BoundaryCondition, b: &BoundaryCondition) -> f64 {
    (*a.matrix() - *b.matrix()).frobenius()
}
