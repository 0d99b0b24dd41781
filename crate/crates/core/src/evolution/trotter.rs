//! Alternating evolution (e^{−iτT_U} e^{−iτT_V})^N with τ = t/N and its
//! comparison with the composed evolution e^{−i2tT_W}, W = U ⋆ V.
//!
//! The loop runs in coefficient space. With both bases orthonormal on the
//! grid, passing a state from the V basis to the U basis through the grid
//! is the transfer matrix w Φ_U†Φ_V, so each half step is one complex
//! matrix product. Several evaluation times share the transfer matrices
//! and are carried as columns of one block.

use super::propagator::{Block, ComplexMatrix, GridBasis};
use crate::bc_algebra::{star, BoundaryCondition, SINGULAR_TOL};
use crate::error::{Error, Result};
use crate::grid::StateGrid;
use crate::mat2::C64;
use crate::spectral::SolverOptions;
use rayon::prelude::*;
use std::io::Write;

#[derive(Clone, Debug, PartialEq)]
pub struct TrotterConfig {
    pub u: BoundaryCondition,
    pub v: BoundaryCondition,
    /// Half of the total duration 2t.
    pub t: f64,
    pub n_steps: usize,
    /// None selects the complete M-mode basis.
    pub cutoff_energy: Option<f64>,
    pub grid_size: usize,
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("t must be positive and finite, got {t}")));
    }
    Ok(())
}

fn check_grid(m: usize, psi0: &StateGrid) -> Result<()> {
    if psi0.len() != m {
        return Err(Error::ResolutionMismatch { grid_points: psi0.len(), required: format!("grid_size = {m}") });
    }
    Ok(())
}

impl TrotterConfig {
    pub fn validate(&self) -> Result<()> {
        check_time(self.t)?;
        if self.n_steps == 0 {
            return Err(Error::InvalidInput("N must be at least 1".into()));
        }
        Ok(())
    }
}

/// Final state of an alternating run.
#[derive(Clone, Debug)]
pub struct TrotterRun {
    pub state: StateGrid,
    /// |‖ψ_N‖ − ‖ψ₀‖|
    pub unitarity_defect: f64,
    /// (ψ_N(0), ψ_N(1)) from the analytic endpoint values of the U modes.
    pub boundary: [C64; 2],
}

/// The two bases and the transfer matrices between them.
struct Alternation {
    bu: GridBasis,
    bv: GridBasis,
    /// w Φ_U†Φ_V and its adjoint; None when U = V.
    transfer: Option<(ComplexMatrix, ComplexMatrix)>,
}

impl Alternation {
    fn new(u: &BoundaryCondition, v: &BoundaryCondition, m: usize, cutoff: Option<f64>) -> Result<Self> {
        let opts = SolverOptions::default();
        let bu = GridBasis::new(u, m, cutoff, &opts)?;
        if u == v {
            return Ok(Alternation { bv: bu.clone(), bu, transfer: None });
        }
        let bv = GridBasis::new(v, m, cutoff, &opts)?;
        let sv = bv.sampled();
        let phi_v = Block {
            re: sv.re.clone(),
            im: sv.im.clone().unwrap_or_else(|| nalgebra::DMatrix::zeros(sv.re.nrows(), sv.re.ncols())),
        };
        let t = bu.projector().mul(&phi_v);
        let t = ComplexMatrix::new(t.re, t.im);
        let ta = t.adjoint();
        Ok(Alternation { bu, bv, transfer: Some((t, ta)) })
    }

    fn phase_block(basis: &GridBasis, taus: &[f64]) -> Block {
        let cols: Vec<Vec<C64>> = taus.iter().map(|&tau| basis.phases(tau)).collect();
        Block::from_columns(&cols)
    }

    /// U-basis coefficients after N alternating steps, one column per step
    /// length in `taus`, starting from V-basis coefficients `c0`.
    fn run(&self, c0: &[C64], taus: &[f64], n: usize) -> Block {
        let mut cv = Block::from_columns(&vec![c0.to_vec(); taus.len()]);
        let pv = Self::phase_block(&self.bv, taus);
        let pu = Self::phase_block(&self.bu, taus);
        match &self.transfer {
            None => {
                for _ in 0..n {
                    cv.hadamard(&pv);
                    cv.hadamard(&pu);
                }
                cv
            }
            Some((t, ta)) => {
                let mut cu = Block::zeros(self.bu.len(), taus.len());
                for step in 0..n {
                    cv.hadamard(&pv);
                    t.mul_into(&cv, &mut cu);
                    cu.hadamard(&pu);
                    if step + 1 < n {
                        ta.mul_into(&cu, &mut cv);
                    }
                }
                cu
            }
        }
    }
}

fn grid_norms(block: &Block, w: f64) -> Vec<f64> {
    block.column_norms_sqr().into_iter().map(|s| (s * w).sqrt()).collect()
}

/// (e^{−itT_U/N} e^{−itT_V/N})^N ψ₀
pub fn trotter_evolve(cfg: &TrotterConfig, psi0: &StateGrid) -> Result<TrotterRun> {
    cfg.validate()?;
    check_grid(cfg.grid_size, psi0)?;
    let alt = Alternation::new(&cfg.u, &cfg.v, cfg.grid_size, cfg.cutoff_energy)?;
    let c0 = alt.bv.project(psi0)?;
    let cu = alt.run(&c0, &[cfg.t / cfg.n_steps as f64], cfg.n_steps);
    let state = StateGrid::new(alt.bu.reconstruct_block(&cu).column(0))?;
    let unitarity_defect = (state.norm() - psi0.norm()).abs();
    let boundary = alt.bu.boundary_values(&cu.column(0));
    Ok(TrotterRun { state, unitarity_defect, boundary })
}

/// e^{−i2tT_W} ψ₀ with W = U ⋆ V.
pub fn limit_evolve(
    u: &BoundaryCondition,
    v: &BoundaryCondition,
    t: f64,
    psi0: &StateGrid,
    cutoff_energy: Option<f64>,
) -> Result<StateGrid> {
    check_time(t)?;
    let w = star(u, v, SINGULAR_TOL);
    let bw = GridBasis::new(&w, psi0.len(), cutoff_energy, &SolverOptions::default())?;
    bw.propagate(psi0, 2.0 * t)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub u: BoundaryCondition,
    pub v: BoundaryCondition,
    pub t: f64,
    pub n_list: Vec<usize>,
    pub cutoff_energy: Option<f64>,
    pub grid_size: usize,
    /// Number of equispaced times in (0, t] for the averaged error.
    pub time_points: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        check_time(self.t)?;
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return Err(Error::InvalidInput("n_list must hold positive step counts".into()));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("n_list must be strictly ascending".into()));
        }
        if self.time_points == 0 {
            return Err(Error::InvalidInput("time_points must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    /// ‖ψ_N(t) − ψ_W(t)‖ at the final time.
    pub l2_error: f64,
    /// Mean of the same error over the sweep times t_j = j·t/J.
    pub time_averaged_error: f64,
    /// max_j |‖ψ_N(t_j)‖ − ‖ψ₀‖|
    pub unitarity_defect: f64,
    /// (|ψ_N(0)|, |ψ_N(1)|) at the final time.
    pub boundary_magnitude: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct TrotterReport {
    pub composed: BoundaryCondition,
    pub per_n: Vec<SweepRow>,
    /// Time-averaged error at the largest N.
    pub time_averaged_error: f64,
}

pub fn trotter_error_sweep(cfg: &SweepConfig, psi0: &StateGrid) -> Result<TrotterReport> {
    cfg.validate()?;
    check_grid(cfg.grid_size, psi0)?;
    let m = cfg.grid_size;
    let w_grid = 1.0 / m as f64;
    let composed = star(&cfg.u, &cfg.v, SINGULAR_TOL);
    let alt = Alternation::new(&cfg.u, &cfg.v, m, cfg.cutoff_energy)?;
    let bw = GridBasis::new(&composed, m, cfg.cutoff_energy, &SolverOptions::default())?;

    let j = cfg.time_points;
    let times: Vec<f64> = (1..=j).map(|i| cfg.t * i as f64 / j as f64).collect();
    let cw = bw.project(psi0)?;
    let ref_coeffs: Vec<Vec<C64>> =
        times.iter().map(|&tj| cw.iter().zip(bw.phases(2.0 * tj)).map(|(c, p)| c * p).collect()).collect();
    let reference = bw.reconstruct_block(&Block::from_columns(&ref_coeffs));
    let c0 = alt.bv.project(psi0)?;
    let norm0 = psi0.norm();

    let per_n: Vec<SweepRow> = cfg
        .n_list
        .par_iter()
        .map(|&n| {
            let taus: Vec<f64> = times.iter().map(|tj| tj / n as f64).collect();
            let cu = alt.run(&c0, &taus, n);
            let psi = alt.bu.reconstruct_block(&cu);
            let diff = Block { re: &psi.re - &reference.re, im: &psi.im - &reference.im };
            let errors = grid_norms(&diff, w_grid);
            let norms = grid_norms(&psi, w_grid);
            let b = alt.bu.boundary_values(&cu.column(j - 1));
            SweepRow {
                n,
                l2_error: errors[j - 1],
                time_averaged_error: errors.iter().sum::<f64>() / j as f64,
                unitarity_defect: norms.iter().map(|x| (x - norm0).abs()).fold(0.0, f64::max),
                boundary_magnitude: [b[0].norm(), b[1].norm()],
            }
        })
        .collect();
    let time_averaged_error = per_n.last().map_or(f64::NAN, |r| r.time_averaged_error);
    Ok(TrotterReport { composed, per_n, time_averaged_error })
}

pub const SWEEP_HEADER: &str = "N,l2_error,time_averaged_error,unitarity_defect,boundary_mag_0,boundary_mag_1";

impl SweepRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n,
            crate::sci(self.l2_error),
            crate::sci(self.time_averaged_error),
            crate::sci(self.unitarity_defect),
            crate::sci(self.boundary_magnitude[0]),
            crate::sci(self.boundary_magnitude[1])
        )
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::json!({
            "N": self.n,
            "l2_error": self.l2_error,
            "time_averaged_error": self.time_averaged_error,
            "unitarity_defect": self.unitarity_defect,
            "boundary_mag_0": self.boundary_magnitude[0],
            "boundary_mag_1": self.boundary_magnitude[1],
        })
    }
}

impl TrotterReport {
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "{SWEEP_HEADER}")?;
        for r in &self.per_n {
            writeln!(w, "{}", r.csv())?;
        }
        Ok(())
    }
}
