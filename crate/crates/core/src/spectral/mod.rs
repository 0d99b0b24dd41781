//! Eigenvalues and eigenfunctions of T_U = −d²/dx² on [0, 1], in units with
//! 2m = ħ = 1.
//!
//! Energies are zeros of the secular determinant. The search scans the
//! wavenumber on a uniform grid, splits every cell at the extrema of the
//! rotated determinant (so close pairs and tangential double roots are
//! not lost), and refines sign changes with safeguarded Newton steps.
//! Multiplicity comes from the singular values of the secular matrix.

mod forms;
mod mode;
mod secular;

pub use forms::{bc_residual, gamma_form, kinetic_form, kinetic_form_grid, FormValue};
pub use mode::{mode_eval, BoundaryVector, Mode, ModeKind};
pub use secular::{secular_matrix, SecularOperator};

use crate::bc_algebra::{classify, inverse_cayley_scalar, BCClass, BoundaryCondition};
use crate::error::{Error, Result};
use crate::mat2::C64;
use mode::{orthonormal_pair, Raw};
use secular::FundamentalData;
use serde::Serialize;
use std::io::Write;

/// Largest decay rate κ for which evanescent modes are represented.
pub const MAX_KAPPA: f64 = 350.0;

/// Grid offset in units of the scan step; keeps commensurate roots such as
/// k = nπ away from grid points.
const SCAN_OFFSET: f64 = 0.381966011250105;

/// Roots closer than this (relative to max(1, k)) are examined together.
const CLUSTER_TOL: f64 = 1e-7;

/// An extremum of the determinant within this many scale² of zero is
/// treated as a double root.
const TANGENT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Tolerance for an eigenvalue of U to count as −1.
    pub singular_tol: f64,
    /// Scan spacing in k (and κ).
    pub scan_step: f64,
    pub max_iter: usize,
    /// Smallest singular value, relative to the matrix scale, below which a
    /// direction counts as part of the kernel.
    pub degeneracy_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            singular_tol: crate::bc_algebra::SINGULAR_TOL,
            scan_step: std::f64::consts::PI / 20.0,
            max_iter: 200,
            degeneracy_tol: 1e-8,
        }
    }
}

/// Eigenmodes of T_U up to an energy cutoff, by ascending energy.
#[derive(Clone, Debug)]
pub struct SpectralBasis {
    pub bc: BoundaryCondition,
    pub cutoff_energy: f64,
    pub modes: Vec<Mode>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Branch {
    Oscillatory,
    Evanescent,
}

impl Branch {
    fn scan_data(self, x: f64) -> FundamentalData {
        match self {
            Branch::Oscillatory => secular::oscillatory_scaled(x),
            Branch::Evanescent => secular::evanescent_exp(x),
        }
    }

    fn raw(self, x: f64, c: [C64; 2]) -> Raw {
        match self {
            Branch::Oscillatory => Raw::oscillatory(x, c),
            Branch::Evanescent if x < 1.0 => Raw::evanescent_hyperbolic(x, c),
            Branch::Evanescent => Raw::evanescent_exp(x, c),
        }
    }

    /// Basis in which kernel vectors are extracted.
    fn kernel_data(self, x: f64) -> FundamentalData {
        match self {
            Branch::Oscillatory => secular::oscillatory_scaled(x),
            Branch::Evanescent if x < 1.0 => secular::evanescent_hyperbolic(x),
            Branch::Evanescent => secular::evanescent_exp(x),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Root {
    x: f64,
}

struct Scanner<'a> {
    op: &'a SecularOperator,
    branch: Branch,
    opts: &'a SolverOptions,
}

impl Scanner<'_> {
    fn eval(&self, x: f64) -> (f64, f64) {
        self.op.real_det_and_slope(&self.branch.scan_data(x))
    }

    fn scale_sqr(&self, x: f64) -> f64 {
        self.op.scale(&self.branch.scan_data(x)).powi(2)
    }

    fn grid(&self, lo: f64, hi: f64) -> Vec<f64> {
        let h = self.opts.scan_step;
        let mut pts = vec![lo];
        let mut i = 0usize;
        loop {
            let x = (i as f64 + SCAN_OFFSET) * h;
            if x >= hi {
                break;
            }
            if x > lo {
                pts.push(x);
            }
            i += 1;
        }
        if hi > lo {
            pts.push(hi);
        }
        pts
    }

    /// Zero of the slope inside (a, b), where it changes sign.
    fn extremum(&self, mut a: f64, mut b: f64, mut da: f64) -> f64 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let (_, dm) = self.eval(m);
            if dm == 0.0 {
                return m;
            }
            if (dm > 0.0) == (da > 0.0) {
                a = m;
                da = dm;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    /// Root in [a, b] given opposite signs fa, fb.
    fn refine(&self, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
        let mut x = 0.5 * (a + b);
        let mut width = b - a;
        for _ in 0..self.opts.max_iter {
            let (fx, dx) = self.eval(x);
            if fx == 0.0 {
                return Ok(x);
            }
            if (fx > 0.0) == (fa > 0.0) {
                a = x;
                fa = fx;
            } else {
                b = x;
            }
            if b - a <= 4.0 * f64::EPSILON * b.abs().max(a.abs()) {
                return Ok(0.5 * (a + b));
            }
            let newton = x - fx / dx;
            let step_ok = dx != 0.0 && newton > a && newton < b && (newton - x).abs() < 0.5 * width;
            if step_ok {
                width = (newton - x).abs();
                if width <= 2.0 * f64::EPSILON * x.abs() {
                    return Ok(newton);
                }
                x = newton;
            } else {
                width = b - a;
                x = 0.5 * (a + b);
            }
        }
        Err(Error::ConvergenceFailure {
            energy: self.energy(x),
            reason: format!("no convergence in {} iterations", self.opts.max_iter),
        })
    }

    fn energy(&self, x: f64) -> f64 {
        match self.branch {
            Branch::Oscillatory => x * x,
            Branch::Evanescent => -x * x,
        }
    }

    fn roots(&self, lo: f64, hi: f64) -> Result<Vec<Root>> {
        let pts = self.grid(lo, hi);
        let vals: Vec<(f64, f64)> = pts.iter().map(|&x| self.eval(x)).collect();
        let mut roots = Vec::new();
        for (i, &x) in pts.iter().enumerate() {
            if vals[i].0 == 0.0 {
                roots.push(Root { x });
            }
        }
        for c in 0..pts.len().saturating_sub(1) {
            let (xa, xb) = (pts[c], pts[c + 1]);
            let ((sa, da), (sb, db)) = (vals[c], vals[c + 1]);
            let mut pieces = vec![(xa, sa, xb, sb)];
            if (da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0) {
                let xe = self.extremum(xa, xb, da);
                let (se, _) = self.eval(xe);
                let crossing = (se > 0.0) != (sa > 0.0) || (se > 0.0) != (sb > 0.0);
                if se == 0.0 || (!crossing && se.abs() <= TANGENT_TOL * self.scale_sqr(xe)) {
                    roots.push(Root { x: xe });
                }
                pieces = vec![(xa, sa, xe, se), (xe, se, xb, sb)];
            }
            for (p, sp, q, sq) in pieces {
                if sp != 0.0 && sq != 0.0 && (sp > 0.0) != (sq > 0.0) {
                    roots.push(Root { x: self.refine(p, q, sp)? });
                }
            }
        }
        roots.sort_by(|a, b| a.x.total_cmp(&b.x));
        Ok(roots)
    }

    /// Groups nearby roots and emits one or two modes per level.
    fn modes(&self, roots: &[Root]) -> Result<Vec<Mode>> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < roots.len() {
            let mut j = i + 1;
            while j < roots.len() && roots[j].x - roots[j - 1].x <= CLUSTER_TOL * roots[j].x.max(1.0) {
                j += 1;
            }
            let cluster = &roots[i..j];
            let centre = cluster.iter().map(|r| r.x).sum::<f64>() / cluster.len() as f64;
            let (dim, level) = self.level(centre)?;
            if dim == 1 && cluster.len() > 1 {
                for r in cluster {
                    out.extend(self.level(r.x)?.1);
                }
            } else {
                out.extend(level);
            }
            i = j;
        }
        Ok(out)
    }

    fn level(&self, x: f64) -> Result<(usize, Vec<Mode>)> {
        let data = self.branch.kernel_data(x);
        let m = self.op.matrix(&data);
        let scale = self.op.scale(&data);
        let (sv, vecs) = m.singular_values_and_right_vectors();
        let tol = self.opts.degeneracy_tol * scale;
        if sv[1] > 1e-6 * scale {
            return Err(Error::ConvergenceFailure {
                energy: self.energy(x),
                reason: format!("secular matrix is not singular at the refined root (σ = {:e})", sv[1] / scale),
            });
        }
        if sv[0] <= tol {
            let pair = orthonormal_pair(self.branch.raw(x, vecs[1]), self.branch.raw(x, vecs[0]));
            Ok((2, pair.to_vec()))
        } else {
            Ok((1, vec![self.branch.raw(x, vecs[1]).into_mode()]))
        }
    }
}

/// Upper end of the evanescent search window, or None when no negative
/// energies are possible.
fn evanescent_window(u: &BoundaryCondition, opts: &SolverOptions) -> Option<f64> {
    match classify(u, opts.singular_tol) {
        BCClass::Regular(k) => {
            let [lo, hi] = k.eigenvalues();
            Some(2.0 * (lo.abs().max(hi.abs()) + 1.0))
        }
        BCClass::OneSingular { u2, .. } => Some(2.0 * (inverse_cayley_scalar(u2).abs() + 1.0)),
        BCClass::FullDirichlet => None,
    }
}

/// All eigenmodes with energy in [E_lo, e_max].
pub fn find_spectrum(u: &BoundaryCondition, e_max: f64, opts: &SolverOptions) -> Result<SpectralBasis> {
    if !(e_max > 0.0 && e_max.is_finite()) {
        return Err(Error::InvalidInput(format!("e_max must be positive and finite, got {e_max}")));
    }
    let op = SecularOperator::new(u);
    let start = 1e-8;
    let mut modes = Vec::new();

    if let Some(kappa_max) = evanescent_window(u, opts) {
        if kappa_max > MAX_KAPPA {
            return Err(Error::UnsupportedBoundaryCondition(format!(
                "boundary form too strong: evanescent window reaches κ = {kappa_max:.3e} > {MAX_KAPPA}"
            )));
        }
        let sc = Scanner { op: &op, branch: Branch::Evanescent, opts };
        modes.extend(sc.modes(&sc.roots(start, kappa_max)?)?);
    }

    let zero = secular::zero_energy();
    let m0 = op.matrix(&zero);
    let (sv0, v0) = m0.singular_values_and_right_vectors();
    let tol0 = opts.degeneracy_tol * op.scale(&zero);
    let zero_dim = sv0.iter().filter(|&&s| s <= tol0).count();
    match zero_dim {
        2 => modes.extend(orthonormal_pair(Raw::zero(v0[1]), Raw::zero(v0[0]))),
        1 => modes.push(Raw::zero(v0[1]).into_mode()),
        _ => {}
    }

    let sc = Scanner { op: &op, branch: Branch::Oscillatory, opts };
    modes.extend(sc.modes(&sc.roots(start, e_max.sqrt())?)?);

    if zero_dim > 0 {
        // the E = 0 level is already represented
        modes.retain(|m| m.kind == ModeKind::Zero || m.energy.abs() > 1e-7);
    }
    modes.retain(|m| m.energy <= e_max);
    sort_modes(&mut modes);
    Ok(SpectralBasis { bc: *u, cutoff_energy: e_max, modes })
}

fn sort_modes(modes: &mut [Mode]) {
    let key = |m: &Mode| [m.coeff_a.re, m.coeff_a.im, m.coeff_b.re, m.coeff_b.im];
    modes.sort_by(|a, b| {
        a.energy.total_cmp(&b.energy).then(a.kind.order().cmp(&b.kind.order())).then_with(|| {
            let (ka, kb) = (key(a), key(b));
            ka.iter().zip(&kb).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
}

/// One row of spectrum output.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub energy: f64,
    pub kind: &'static str,
    pub re_a: f64,
    pub im_a: f64,
    pub re_b: f64,
    pub im_b: f64,
    pub bc_residual: f64,
}

impl SpectralBasis {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.energy).collect()
    }

    pub fn rows(&self) -> Vec<SpectrumRow> {
        self.modes
            .iter()
            .enumerate()
            .map(|(index, m)| SpectrumRow {
                index,
                energy: m.energy,
                kind: m.kind.name(),
                re_a: m.coeff_a.re,
                im_a: m.coeff_a.im,
                re_b: m.coeff_b.re,
                im_b: m.coeff_b.im,
                bc_residual: bc_residual(&self.bc, &m.boundary_vector()),
            })
            .collect()
    }

    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "index,energy,kind,re_a,im_a,re_b,im_b,bc_residual")?;
        for r in self.rows() {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.index,
                crate::sci(r.energy),
                r.kind,
                crate::sci(r.re_a),
                crate::sci(r.im_a),
                crate::sci(r.re_b),
                crate::sci(r.im_b),
                crate::sci(r.bc_residual)
            )?;
        }
        Ok(())
    }

    pub fn write_json_lines(&self, w: &mut impl Write) -> std::io::Result<()> {
        for r in self.rows() {
            serde_json::to_writer(&mut *w, &r)?;
            writeln!(w)?;
        }
        Ok(())
    }
}
