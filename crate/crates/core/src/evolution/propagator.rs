//! Spectral propagators on the cell-centred grid.
//!
//! A `GridBasis` holds the eigenmodes of T_U sampled on the grid, with real
//! and imaginary parts stored as separate dense matrices so that projection
//! and reconstruction are plain real matrix products. When the sampled
//! modes are not orthonormal under the grid weights (every case except the
//! ones with discrete-trigonometric structure), they are replaced by their
//! symmetric (Löwdin) orthonormalization, which is the orthonormal set
//! closest to the sampled modes. The projector is then exact and every
//! propagator is unitary to round-off on the basis span.

use crate::bc_algebra::BoundaryCondition;
use crate::error::{Error, Result};
use crate::grid::{cell_centre, StateGrid};
use crate::mat2::{self, Mat2, C64, ONE, ZERO};
use crate::spectral::{find_spectrum, Mode, SolverOptions, SpectralBasis};
use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;

/// Smallest Gram eigenvalue accepted before the basis counts as
/// undersampled.
const MIN_GRAM_EIGENVALUE: f64 = 1e-8;

/// Off-identity Gram entries below this are left alone.
const ORTHONORMAL_TOL: f64 = 1e-12;

/// A block of grid functions (or coefficient vectors) as columns, split
/// into real and imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
}

impl Block {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Block { re: DMatrix::zeros(rows, cols), im: DMatrix::zeros(rows, cols) }
    }

    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let rows = cols.first().map_or(0, |c| c.len());
        Block {
            re: DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i].re),
            im: DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i].im),
        }
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.re.nrows()).map(|i| C64::new(self.re[(i, j)], self.im[(i, j)])).collect()
    }

    pub fn ncols(&self) -> usize {
        self.re.ncols()
    }

    pub fn nrows(&self) -> usize {
        self.re.nrows()
    }

    /// Elementwise product with another block of the same shape.
    pub fn hadamard(&mut self, p: &Block) {
        for ((a, b), (c, d)) in self.re.iter_mut().zip(self.im.iter_mut()).zip(p.re.iter().zip(p.im.iter())) {
            let (x, y) = (*a, *b);
            *a = x * c - y * d;
            *b = x * d + y * c;
        }
    }

    /// Squared 2-norm of every column.
    pub fn column_norms_sqr(&self) -> Vec<f64> {
        (0..self.ncols()).map(|j| self.re.column(j).norm_squared() + self.im.column(j).norm_squared()).collect()
    }
}

/// A complex matrix acting on blocks; real matrices skip half the products.
#[derive(Clone, Debug)]
pub struct ComplexMatrix {
    pub re: DMatrix<f64>,
    pub im: Option<DMatrix<f64>>,
}

impl ComplexMatrix {
    pub fn new(re: DMatrix<f64>, im: DMatrix<f64>) -> Self {
        let im = if im.iter().all(|&x| x == 0.0) { None } else { Some(im) };
        ComplexMatrix { re, im }
    }

    /// out = self · b
    pub fn mul_into(&self, b: &Block, out: &mut Block) {
        out.re.gemm(1.0, &self.re, &b.re, 0.0);
        out.im.gemm(1.0, &self.re, &b.im, 0.0);
        if let Some(im) = &self.im {
            out.re.gemm(-1.0, im, &b.im, 1.0);
            out.im.gemm(1.0, im, &b.re, 1.0);
        }
    }

    pub fn mul(&self, b: &Block) -> Block {
        let mut out = Block::zeros(self.re.nrows(), b.ncols());
        self.mul_into(b, &mut out);
        out
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix { re: self.re.transpose(), im: self.im.as_ref().map(|m| -m.transpose()) }
    }
}

/// Eigenmodes of one boundary condition sampled on an M-point grid.
#[derive(Clone, Debug)]
pub struct GridBasis {
    pub bc: BoundaryCondition,
    pub energies: Vec<f64>,
    /// M × n sampled (orthonormalized) modes, unweighted.
    phi: ComplexMatrix,
    /// w Φ†, the projection onto coefficients.
    proj: ComplexMatrix,
    /// Endpoint values (ψ(0), ψ(1)) of every basis function.
    boundary: Vec<[C64; 2]>,
    grid_size: usize,
    /// Largest deviation of the sampled Gram matrix from the identity.
    pub gram_defect: f64,
}

struct Sampled {
    energy: f64,
    values: Vec<C64>,
    boundary: [C64; 2],
}

fn sample(mode: &Mode, m: usize) -> Sampled {
    Sampled {
        energy: mode.energy,
        values: (0..m).map(|j| mode.value(cell_centre(j, m))).collect(),
        boundary: [mode.value(0.0), mode.value(1.0)],
    }
}

fn grid_inner(a: &[C64], b: &[C64], w: f64) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>() * w
}

/// Energy cutoff that captures at least `m` modes with some margin.
pub fn complete_cutoff(m: usize) -> f64 {
    ((m as f64 + 4.0) * PI).powi(2)
}

impl GridBasis {
    /// The M lowest modes when `cutoff` is None, otherwise all modes with
    /// energy ≤ cutoff (which needs M ≥ 8√cutoff/π).
    pub fn new(bc: &BoundaryCondition, m: usize, cutoff: Option<f64>, opts: &SolverOptions) -> Result<Self> {
        match cutoff {
            Some(e) => {
                check_resolution(m, e)?;
                Self::from_spectrum(&find_spectrum(bc, e, opts)?, m)
            }
            None => {
                let spectrum = find_spectrum(bc, complete_cutoff(m), opts)?;
                Self::complete(&spectrum, m)
            }
        }
    }

    /// Samples an explicit spectral basis.
    pub fn from_spectrum(basis: &SpectralBasis, m: usize) -> Result<Self> {
        if basis.modes.len() > m {
            return Err(Error::ResolutionMismatch { grid_points: m, required: format!("{} modes", basis.modes.len()) });
        }
        let sampled = basis.modes.iter().map(|md| sample(md, m)).collect();
        Self::assemble(basis.bc, sampled, m)
    }

    /// The M lowest modes of `spectrum`. When the M-th and (M+1)-th modes
    /// form a degenerate pair, the combination with the largest grid norm
    /// is kept.
    fn complete(spectrum: &SpectralBasis, m: usize) -> Result<Self> {
        let modes = &spectrum.modes;
        if modes.len() < m {
            return Err(Error::ResolutionMismatch {
                grid_points: m,
                required: format!("{} modes below the search cutoff, found {}", m, modes.len()),
            });
        }
        let mut sampled: Vec<Sampled> = modes[..m].iter().map(|md| sample(md, m)).collect();
        if modes.len() > m {
            let (e1, e2) = (modes[m - 1].energy, modes[m].energy);
            if (e1 - e2).abs() <= 1e-9 * e1.abs().max(1.0) {
                let a = sampled.pop().expect("m ≥ 1");
                let b = sample(&modes[m], m);
                sampled.push(best_combination(a, b, m));
            }
        }
        Self::assemble(spectrum.bc, sampled, m)
    }

    fn assemble(bc: BoundaryCondition, sampled: Vec<Sampled>, m: usize) -> Result<Self> {
        let n = sampled.len();
        let w = 1.0 / m as f64;
        let cols: Vec<Vec<C64>> = sampled.iter().map(|s| s.values.clone()).collect();
        let raw = Block::from_columns(&cols);
        let gram = gram(&raw, w);
        let mut defect_off: f64 = 0.0;
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d = (gram[(i, j)] - if i == j { ONE } else { ZERO }).norm();
                defect = defect.max(d);
                if i != j {
                    defect_off = defect_off.max(d);
                }
            }
        }
        let mut boundary: Vec<[C64; 2]> = sampled.iter().map(|s| s.boundary).collect();
        let (re, im) = if defect <= ORTHONORMAL_TOL {
            (raw.re, raw.im)
        } else if defect_off <= ORTHONORMAL_TOL {
            let mut b = raw;
            for j in 0..n {
                let g = gram[(j, j)].re;
                if !(g > MIN_GRAM_EIGENVALUE) {
                    return Err(undersampled(m, n));
                }
                let s = 1.0 / g.sqrt();
                b.re.column_mut(j).scale_mut(s);
                b.im.column_mut(j).scale_mut(s);
                boundary[j] = [boundary[j][0] * s, boundary[j][1] * s];
            }
            (b.re, b.im)
        } else {
            let s = inverse_sqrt(gram, m)?;
            let s_re = DMatrix::from_fn(n, n, |i, j| s[(i, j)].re);
            let s_im = DMatrix::from_fn(n, n, |i, j| s[(i, j)].im);
            let mut out = Block::zeros(m, n);
            out.re.gemm(1.0, &raw.re, &s_re, 0.0);
            out.re.gemm(-1.0, &raw.im, &s_im, 1.0);
            out.im.gemm(1.0, &raw.re, &s_im, 0.0);
            out.im.gemm(1.0, &raw.im, &s_re, 1.0);
            boundary = (0..n)
                .map(|j| {
                    let mut v = [ZERO; 2];
                    for (i, b) in sampled.iter().enumerate() {
                        v[0] += b.boundary[0] * s[(i, j)];
                        v[1] += b.boundary[1] * s[(i, j)];
                    }
                    v
                })
                .collect();
            (out.re, out.im)
        };
        let phi = ComplexMatrix::new(re, im);
        let mut proj = phi.adjoint();
        proj.re.scale_mut(w);
        if let Some(i) = proj.im.as_mut() {
            i.scale_mut(w);
        }
        Ok(GridBasis {
            bc,
            energies: sampled.iter().map(|s| s.energy).collect(),
            phi,
            proj,
            boundary,
            grid_size: m,
            gram_defect: defect,
        })
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn is_real(&self) -> bool {
        self.phi.im.is_none()
    }

    pub fn sampled(&self) -> &ComplexMatrix {
        &self.phi
    }

    pub fn projector(&self) -> &ComplexMatrix {
        &self.proj
    }

    fn check_grid(&self, m: usize) -> Result<()> {
        if m != self.grid_size {
            return Err(Error::ResolutionMismatch {
                grid_points: m,
                required: format!("the {}-point grid of this basis", self.grid_size),
            });
        }
        Ok(())
    }

    /// Coefficients c_n = Σ_j w conj(χ_n(x_j)) ψ_j.
    pub fn project(&self, state: &StateGrid) -> Result<Vec<C64>> {
        self.check_grid(state.len())?;
        let b = Block::from_columns(&[state.samples().to_vec()]);
        Ok(self.proj.mul(&b).column(0))
    }

    pub fn project_block(&self, states: &Block) -> Block {
        self.proj.mul(states)
    }

    pub fn reconstruct(&self, coeffs: &[C64]) -> StateGrid {
        let b = Block::from_columns(&[coeffs.to_vec()]);
        StateGrid::new(self.phi.mul(&b).column(0)).expect("grid of at least 3 points")
    }

    pub fn reconstruct_block(&self, coeffs: &Block) -> Block {
        self.phi.mul(coeffs)
    }

    /// (ψ(0), ψ(1)) of Σ c_n χ_n from the analytic endpoint values.
    pub fn boundary_values(&self, coeffs: &[C64]) -> [C64; 2] {
        let mut v = [ZERO; 2];
        for (c, b) in coeffs.iter().zip(&self.boundary) {
            v[0] += c * b[0];
            v[1] += c * b[1];
        }
        v
    }

    /// e^{−iE_n τ} for every mode.
    pub fn phases(&self, tau: f64) -> Vec<C64> {
        self.energies.iter().map(|e| C64::from_polar(1.0, -e * tau)).collect()
    }

    /// e^{−iτT_U} ψ: project, apply phases, reconstruct.
    pub fn propagate(&self, state: &StateGrid, tau: f64) -> Result<StateGrid> {
        let c = self.project(state)?;
        let c: Vec<C64> = c.iter().zip(self.phases(tau)).map(|(a, p)| a * p).collect();
        Ok(self.reconstruct(&c))
    }

    /// ‖ψ − Σ c_n χ_n‖ for the projection of ψ.
    pub fn residual(&self, state: &StateGrid) -> Result<f64> {
        let back = self.reconstruct(&self.project(state)?);
        Ok(state.distance(&back))
    }
}

fn undersampled(m: usize, n: usize) -> Error {
    Error::ResolutionMismatch { grid_points: m, required: format!("{n} linearly independent sampled modes") }
}

fn check_resolution(m: usize, cutoff: f64) -> Result<()> {
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::InvalidInput(format!("cutoff energy must be positive, got {cutoff}")));
    }
    let need = 8.0 * cutoff.sqrt() / PI;
    if (m as f64) < need {
        return Err(Error::ResolutionMismatch {
            grid_points: m,
            required: format!("at least {} points for cutoff energy {cutoff}", need.ceil()),
        });
    }
    Ok(())
}

fn best_combination(a: Sampled, b: Sampled, m: usize) -> Sampled {
    let w = 1.0 / m as f64;
    let g = Mat2::new(
        grid_inner(&a.values, &a.values, w),
        grid_inner(&a.values, &b.values, w),
        grid_inner(&b.values, &a.values, w),
        grid_inner(&b.values, &b.values, w),
    );
    let c = mat2::hermitian_eigen(&g).1[1];
    Sampled {
        energy: a.energy,
        values: a.values.iter().zip(&b.values).map(|(x, y)| c[0] * x + c[1] * y).collect(),
        boundary: [c[0] * a.boundary[0] + c[1] * b.boundary[0], c[0] * a.boundary[1] + c[1] * b.boundary[1]],
    }
}

/// w Φ†Φ
fn gram(phi: &Block, w: f64) -> DMatrix<C64> {
    let n = phi.ncols();
    let mut re = DMatrix::zeros(n, n);
    let mut im = DMatrix::zeros(n, n);
    let (a, b) = (&phi.re, &phi.im);
    let (at, bt) = (a.transpose(), b.transpose());
    re.gemm(w, &at, a, 0.0);
    re.gemm(w, &bt, b, 1.0);
    im.gemm(w, &at, b, 0.0);
    im.gemm(-w, &bt, a, 1.0);
    DMatrix::from_fn(n, n, |i, j| C64::new(re[(i, j)], im[(i, j)]))
}

/// G^{−1/2} for a Hermitian positive definite Gram matrix.
fn inverse_sqrt(gram: DMatrix<C64>, m: usize) -> Result<DMatrix<C64>> {
    let n = gram.nrows();
    let eig = SymmetricEigen::new(gram);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > MIN_GRAM_EIGENVALUE) {
        return Err(undersampled(m, n));
    }
    let q = &eig.eigenvectors;
    let mut scaled = q.clone();
    for (j, lam) in eig.eigenvalues.iter().enumerate() {
        let s = 1.0 / lam.sqrt();
        scaled.column_mut(j).scale_mut(s);
    }
    Ok(scaled * q.adjoint())
}

/// Coefficients of a state in an explicit spectral basis, with the
/// reconstruction residual.
#[derive(Clone, Debug)]
pub struct Projection {
    pub coefficients: Vec<C64>,
    pub residual: f64,
}

pub fn project(state: &StateGrid, basis: &SpectralBasis) -> Result<Projection> {
    let gb = GridBasis::from_spectrum(basis, state.len())?;
    let coefficients = gb.project(state)?;
    let residual = state.distance(&gb.reconstruct(&coefficients));
    Ok(Projection { coefficients, residual })
}

pub fn propagate(basis: &SpectralBasis, state: &StateGrid, tau: f64) -> Result<StateGrid> {
    if !tau.is_finite() {
        return Err(Error::InvalidInput(format!("time step must be finite, got {tau}")));
    }
    GridBasis::from_spectrum(basis, state.len())?.propagate(state, tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn dirichlet_complete_basis_is_orthonormal() {
        let gb = GridBasis::new(&BoundaryCondition::dirichlet(), 64, None, &opts()).unwrap();
        assert_eq!(gb.len(), 64);
        assert!(gb.is_real());
        // only the top mode, sin(64πx), is off by its grid norm
        assert!(gb.gram_defect > 0.5);
        let psi = StateGrid::parabola(64).unwrap();
        assert!(gb.residual(&psi).unwrap() < 1e-13);
    }

    #[test]
    fn periodic_complete_basis_keeps_the_sampled_member_of_the_top_pair() {
        let gb = GridBasis::new(&BoundaryCondition::pseudo_periodic(0.0), 32, None, &opts()).unwrap();
        assert_eq!(gb.len(), 32);
        let psi = StateGrid::from_fn(32, |x| C64::new((3.0 * x).sin(), x * x)).unwrap();
        assert!(gb.residual(&psi).unwrap() < 1e-12);
        let out = gb.propagate(&psi, 0.37).unwrap();
        assert!((out.norm() - psi.norm()).abs() < 1e-13);
    }

    #[test]
    fn robin_complete_basis_is_unitary() {
        let gb = GridBasis::new(&BoundaryCondition::robin(-0.9), 48, None, &opts()).unwrap();
        assert!(gb.gram_defect > ORTHONORMAL_TOL);
        let psi = StateGrid::parabola(48).unwrap();
        assert!(gb.residual(&psi).unwrap() < 1e-12);
        let out = gb.propagate(&psi, 0.05).unwrap();
        assert!((out.norm() - psi.norm()).abs() < 1e-13);
    }

    #[test]
    fn cutoff_requires_resolution() {
        let err = GridBasis::new(&BoundaryCondition::dirichlet(), 16, Some(1000.0), &opts()).unwrap_err();
        assert!(matches!(err, Error::ResolutionMismatch { .. }));
    }

    #[test]
    fn project_constant_on_dirichlet() {
        let basis = find_spectrum(&BoundaryCondition::dirichlet(), 2000.0, &opts()).unwrap();
        let psi = StateGrid::from_fn(512, |_| ONE).unwrap();
        let p = project(&psi, &basis).unwrap();
        for (i, c) in p.coefficients.iter().enumerate() {
            let n = (i + 1) as f64;
            let exact = 2f64.sqrt() * (1.0 - (-1f64).powi(i as i32 + 1)) / (n * PI);
            // midpoint-rule error is (nπh)²/24 relative
            assert!((c.re - exact).abs() < 1e-3 * exact.abs() + 1e-13, "{i} {c} {exact}");
            assert!(c.im.abs() < 1e-13);
        }
    }
}
