//! Second-order finite differences for −d²/dx² on the cell-centred grid.
//!
//! The boundary condition enters through ghost values p₋₁ and p_M. With
//! ψ(0) ≈ (p₋₁ + p₀)/2, −ψ′(0) ≈ (p₋₁ − p₀)/h and the mirror formulas at
//! x = 1, the condition i(I + U)φ′ = (I − U)φ becomes A g = B p for the
//! ghost pair g and the edge pair p, where
//!
//!   A = i(I + U)/h − (I − U)/2,   B = i(I + U)/h + (I − U)/2.
//!
//! G = A⁻¹B is Hermitian with the eigenvectors of U, so the resulting
//! operator is a Hermitian matrix that is tridiagonal apart from the
//! (0, M−1) corner pair. Singular U (Dirichlet, pseudo-periodic) need no
//! special treatment; A is singular only when an eigenvalue of K equals
//! exactly 2/h.

use crate::bc_algebra::BoundaryCondition;
use crate::error::{Error, Result};
use crate::mat2::{Mat2, C64, I, ONE, ZERO};

/// Ghost closure G with (p₋₁, p_M) = G (p₀, p_{M−1}).
pub fn ghost_closure(u: &BoundaryCondition, h: f64) -> Result<Mat2> {
    let u = *u.matrix();
    let id = Mat2::identity();
    let plus = (id + u).scale(I / h);
    let minus = (id - u).scale_re(0.5);
    let a = plus - minus;
    let b = plus + minus;
    let a_inv = a.inverse(1e-13).ok_or(Error::SingularMatrix("ghost-cell boundary closure"))?;
    Ok((a_inv * b).hermitian_part())
}

/// The Hermitian matrix of −d²/dx² under a boundary condition.
#[derive(Clone, Debug)]
pub struct FdLaplacian {
    diag: Vec<f64>,
    off: f64,
    /// Entry (0, M−1); entry (M−1, 0) is its conjugate.
    corner: C64,
}

impl FdLaplacian {
    pub fn new(u: &BoundaryCondition, m: usize) -> Result<Self> {
        if m < 4 {
            return Err(Error::InvalidInput(format!("finite-difference grid too small: {m}")));
        }
        let h = 1.0 / m as f64;
        let g = ghost_closure(u, h)?;
        let h2 = h * h;
        let mut diag = vec![2.0 / h2; m];
        diag[0] = (2.0 - g.get(0, 0).re) / h2;
        diag[m - 1] = (2.0 - g.get(1, 1).re) / h2;
        Ok(FdLaplacian { diag, off: -1.0 / h2, corner: -g.get(0, 1) / h2 })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, p: &[C64]) -> Vec<C64> {
        let m = self.size();
        assert_eq!(p.len(), m);
        let mut out: Vec<C64> = (0..m).map(|j| p[j] * self.diag[j]).collect();
        for j in 0..m - 1 {
            out[j] += p[j + 1] * self.off;
            out[j + 1] += p[j] * self.off;
        }
        out[0] += self.corner * p[m - 1];
        out[m - 1] += self.corner.conj() * p[0];
        out
    }

    /// Number of eigenvalues strictly below `lambda`.
    ///
    /// Inertia of the leading tridiagonal block from its LDLᵀ pivots, plus
    /// the sign of the Schur complement of the last row and column.
    pub fn count_below(&self, lambda: f64) -> usize {
        let m = self.size();
        let n = m - 1;
        let o = self.off;
        let tiny = f64::MIN_POSITIVE.sqrt() * (1.0 + o.abs());
        let mut piv = Vec::with_capacity(n);
        let mut negatives = 0;
        for i in 0..n {
            let mut q = self.diag[i] - lambda;
            if i > 0 {
                q -= o * o / piv[i - 1];
            }
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                negatives += 1;
            }
            piv.push(q);
        }
        // solve (T − λ) x = b for the coupling column b
        let mut b = vec![ZERO; n];
        b[0] += self.corner;
        b[n - 1] += C64::new(o, 0.0);
        let mut y = b.clone();
        for i in 1..n {
            let l = o / piv[i - 1];
            let prev = y[i - 1];
            y[i] -= prev * l;
        }
        let mut x: Vec<C64> = (0..n).map(|i| y[i] / piv[i]).collect();
        for i in (0..n - 1).rev() {
            let l = o / piv[i];
            let next = x[i + 1];
            x[i] -= next * l;
        }
        let bx: f64 = b.iter().zip(&x).map(|(bi, xi)| (bi.conj() * xi).re).sum();
        let schur = self.diag[m - 1] - lambda - bx;
        negatives + usize::from(schur < 0.0)
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn spectrum_bounds(&self) -> (f64, f64) {
        let m = self.size();
        let o = self.off.abs();
        let c = self.corner.norm();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in 0..m {
            let mut r = 0.0;
            if j > 0 {
                r += o;
            }
            if j + 1 < m {
                r += o;
            }
            if j == 0 || j == m - 1 {
                r += c;
            }
            lo = lo.min(self.diag[j] - r);
            hi = hi.max(self.diag[j] + r);
        }
        (lo, hi)
    }

    /// The `count` lowest eigenvalues by bisection on the inertia count.
    pub fn lowest_eigenvalues(&self, count: usize) -> Vec<f64> {
        let count = count.min(self.size());
        let (lo, hi) = self.spectrum_bounds();
        (0..count)
            .map(|i| {
                let (mut a, mut b) = (lo, hi);
                // invariant: count_below(a) ≤ i < count_below(b)
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if mid <= a || mid >= b {
                        break;
                    }
                    if self.count_below(mid) > i {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                0.5 * (a + b)
            })
            .collect()
    }
}

/// Implicit-midpoint (Crank–Nicolson) stepper for i ψ_t = A ψ.
///
/// Each step solves (I + iτA/2) ψ⁺ = (I − iτA/2) ψ by a Thomas sweep on
/// the tridiagonal part and a rank-two Woodbury correction for the corner.
pub struct CrankNicolson {
    op: FdLaplacian,
    half_tau: f64,
    sub: C64,
    denom: Vec<C64>,
    upper_prime: Vec<C64>,
    top_right: C64,
    bottom_left: C64,
    z: [Vec<C64>; 2],
    capacitance_inv: Mat2,
}

impl CrankNicolson {
    pub fn new(op: FdLaplacian, tau: f64) -> Result<Self> {
        let m = op.size();
        let ht = 0.5 * tau;
        let sub = I * (ht * op.off);
        let diag: Vec<C64> = op.diag.iter().map(|d| ONE + I * (ht * d)).collect();
        let mut denom = Vec::with_capacity(m);
        let mut upper_prime = Vec::with_capacity(m);
        for i in 0..m {
            let d = if i == 0 { diag[0] } else { diag[i] - sub * upper_prime[i - 1] };
            if d.norm() == 0.0 {
                return Err(Error::SingularMatrix("Crank-Nicolson tridiagonal block"));
            }
            denom.push(d);
            upper_prime.push(sub / d);
        }
        let mut cn = CrankNicolson {
            half_tau: ht,
            sub,
            denom,
            upper_prime,
            top_right: I * (ht * op.corner),
            bottom_left: I * (ht * op.corner.conj()),
            z: [Vec::new(), Vec::new()],
            capacitance_inv: Mat2::identity(),
            op,
        };
        let mut e0 = vec![ZERO; m];
        e0[0] = ONE;
        let mut e1 = vec![ZERO; m];
        e1[m - 1] = ONE;
        let z0 = cn.thomas(&e0);
        let z1 = cn.thomas(&e1);
        let cap = Mat2::new(
            ONE + cn.top_right * z0[m - 1],
            cn.top_right * z1[m - 1],
            cn.bottom_left * z0[0],
            ONE + cn.bottom_left * z1[0],
        );
        cn.capacitance_inv = cap.inverse(1e-14).ok_or(Error::SingularMatrix("Crank-Nicolson corner correction"))?;
        cn.z = [z0, z1];
        Ok(cn)
    }

    fn thomas(&self, r: &[C64]) -> Vec<C64> {
        let m = r.len();
        let mut y = Vec::with_capacity(m);
        for i in 0..m {
            let prev = if i == 0 { ZERO } else { self.sub * y[i - 1] };
            y.push((r[i] - prev) / self.denom[i]);
        }
        for i in (0..m - 1).rev() {
            let next = y[i + 1];
            y[i] -= self.upper_prime[i] * next;
        }
        y
    }

    pub fn step(&self, p: &mut [C64]) {
        let m = p.len();
        let ap = self.op.apply(p);
        let rhs: Vec<C64> = p.iter().zip(&ap).map(|(a, b)| a - I * (self.half_tau * b)).collect();
        let y = self.thomas(&rhs);
        let w = [self.top_right * y[m - 1], self.bottom_left * y[0]];
        let alpha = self.capacitance_inv.mul_vec(&w);
        for i in 0..m {
            p[i] = y[i] - self.z[0][i] * alpha[0] - self.z[1][i] * alpha[1];
        }
    }
}
