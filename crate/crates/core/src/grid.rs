//! Wavefunctions sampled on a uniform cell-centred grid of [0, 1].
//!
//! Sample j sits at x_j = (j + ½)/M and carries the midpoint weight 1/M, so
//! the discrete inner product is exact for trigonometric polynomials of
//! degree below M and the grid never touches the endpoints, where a
//! constrained state would be forced to a prescribed value.

use crate::error::{Error, Result};
use crate::mat2::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct StateGrid {
    samples: Vec<C64>,
}

impl StateGrid {
    pub fn new(samples: Vec<C64>) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::InvalidInput(format!("a state grid needs at least 3 points, got {}", samples.len())));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("state grid has non-finite samples".into()));
        }
        Ok(StateGrid { samples })
    }

    /// Samples `f` at the M cell centres.
    pub fn from_fn(m: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        Self::new((0..m).map(|j| f(cell_centre(j, m))).collect())
    }

    /// The test state √30·x(1 − x), normalized on [0, 1].
    pub fn parabola(m: usize) -> Result<Self> {
        Self::from_fn(m, |x| C64::new(30f64.sqrt() * x * (1.0 - x), 0.0))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.len() as f64
    }

    /// Quadrature weight shared by every sample.
    pub fn weight(&self) -> f64 {
        self.spacing()
    }

    pub fn x(&self, j: usize) -> f64 {
        cell_centre(j, self.len())
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.x(j)).collect()
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [C64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    /// Σ w_j conj(a_j) b_j
    pub fn inner(&self, other: &StateGrid) -> C64 {
        assert_eq!(self.len(), other.len(), "grid sizes differ");
        let s: C64 = self.samples.iter().zip(&other.samples).map(|(a, b)| a.conj() * b).sum();
        s * self.weight()
    }

    pub fn norm(&self) -> f64 {
        (self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.weight()).sqrt()
    }

    pub fn distance(&self, other: &StateGrid) -> f64 {
        assert_eq!(self.len(), other.len(), "grid sizes differ");
        let s: f64 = self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).norm_sqr()).sum();
        (s * self.weight()).sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::InvalidInput("cannot normalize the zero state".into()));
        }
        Ok(StateGrid { samples: self.samples.iter().map(|z| z / n).collect() })
    }

    /// Endpoint values (ψ(0), ψ(1)) by linear extrapolation from the two
    /// nearest cell centres.
    pub fn extrapolated_boundary(&self) -> [C64; 2] {
        let p = &self.samples;
        let m = p.len();
        [1.5 * p[0] - 0.5 * p[1], 1.5 * p[m - 1] - 0.5 * p[m - 2]]
    }

    /// ‖ψ′‖² from forward differences between cell centres; the two
    /// half-cells next to the endpoints reuse the nearest difference.
    pub fn derivative_norm_sqr(&self) -> f64 {
        let p = &self.samples;
        let m = p.len();
        let h = self.spacing();
        let diffs: Vec<f64> = p.windows(2).map(|w| (w[1] - w[0]).norm_sqr() / (h * h)).collect();
        let interior: f64 = diffs.iter().sum::<f64>() * h;
        interior + 0.5 * h * (diffs[0] + diffs[m - 2])
    }
}

pub fn cell_centre(j: usize, m: usize) -> f64 {
    (j as f64 + 0.5) / m as f64
}
