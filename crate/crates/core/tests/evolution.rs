use bccompose::bc_algebra::BoundaryCondition;
use bccompose::evolution::*;
use bccompose::grid::StateGrid;
use bccompose::mat2::C64;
use bccompose::spectral::{find_spectrum, SolverOptions, SpectralBasis};
use std::f64::consts::PI;

fn spectrum(u: &BoundaryCondition, e_max: f64) -> SpectralBasis {
    find_spectrum(u, e_max, &SolverOptions::default()).unwrap()
}

fn parabola(m: usize) -> StateGrid {
    StateGrid::parabola(m).unwrap().normalized().unwrap()
}

fn sampled(basis: &SpectralBasis, i: usize, m: usize) -> StateGrid {
    StateGrid::from_fn(m, |x| basis.modes[i].value(x)).unwrap()
}

const CUTOFF_64: f64 = (64.5 * PI) * (64.5 * PI);

#[test]
fn projection_examples() {
    let m = 2000;
    let dir = spectrum(&BoundaryCondition::dirichlet(), (20.5 * PI).powi(2));
    let p = project(&sampled(&dir, 0, m), &dir).unwrap();
    assert!((p.coefficients[0] - 1.0).norm() < 1e-8);
    assert!(p.coefficients[1..].iter().all(|c| c.norm() < 1e-8));

    let one = StateGrid::from_fn(m, |_| C64::new(1.0, 0.0)).unwrap();
    let p = project(&one, &dir).unwrap();
    for (i, c) in p.coefficients.iter().enumerate().take(10) {
        let n = (i + 1) as f64;
        let exact = 2f64.sqrt() * (1.0 - (-1f64).powi(i as i32 + 1)) / (n * PI);
        // midpoint sampling of sin(nπx) carries a relative O((nπ/M)²) error
        assert!((c.re - exact).abs() <= 1e-4 * exact.abs().max(1e-3), "{i}: {c} vs {exact}");
        assert!(c.im.abs() < 1e-12);
    }

    let neu = spectrum(&BoundaryCondition::neumann(), 400.0);
    let p = project(&one, &neu).unwrap();
    assert!((p.coefficients[0] - 1.0).norm() < 1e-10);
    assert!(p.coefficients[1..].iter().all(|c| c.norm() < 1e-10));
    assert!(p.residual < 1e-10);
}

#[test]
fn propagate_examples() {
    let m = 512;
    let dir = spectrum(&BoundaryCondition::dirichlet(), CUTOFF_64);
    let psi = parabola(m);
    let still = propagate(&dir, &psi, 0.0).unwrap();
    let residual = project(&psi, &dir).unwrap().residual;
    assert!((psi.distance(&still) - residual).abs() < 1e-12);

    let mode = sampled(&dir, 0, m);
    let moved = propagate(&dir, &mode, 1.0).unwrap();
    let phase = C64::from_polar(1.0, -PI * PI);
    let expect = StateGrid::new(mode.samples().iter().map(|z| z * phase).collect()).unwrap();
    assert!(moved.distance(&expect) < 1e-10);

    let robin = spectrum(&BoundaryCondition::robin(0.9), CUTOFF_64);
    let once = propagate(&robin, &psi, 0.03).unwrap();
    let twice = propagate(&robin, &propagate(&robin, &psi, 0.015).unwrap(), 0.015).unwrap();
    assert!(once.distance(&twice) < 1e-10);
}

#[test]
fn identical_factors_reduce_to_one_propagator() {
    let m = 256;
    let u = BoundaryCondition::robin(-0.4);
    let psi = parabola(m);
    let cfg = TrotterConfig { u, v: u, t: 0.04, n_steps: 13, cutoff_energy: None, grid_size: m };
    let run = trotter_evolve(&cfg, &psi).unwrap();
    let basis = GridBasis::new(&u, m, None, &SolverOptions::default()).unwrap();
    assert!(run.state.distance(&basis.propagate(&psi, 0.08).unwrap()) <= 1e-9);
    let limit = limit_evolve(&u, &u, 0.04, &psi, None).unwrap();
    assert!(run.state.distance(&limit) <= 1e-9);
}

#[test]
fn single_alternation_matches_finite_differences() {
    // e^{−itT_N} e^{−itT_D} ψ₀ against Crank–Nicolson with the same ordering,
    // for a bump narrow enough in time and space to stay clear of the ends;
    // a state with ψ′ ≠ 0 at the walls leaves Neumann modes decaying like n⁻²,
    // beyond what the finite-difference oracle resolves
    let m = 2000;
    let (n, d) = (BoundaryCondition::neumann(), BoundaryCondition::dirichlet());
    let t = 0.001;
    let psi = StateGrid::from_fn(m, |x| C64::new((-(x - 0.5f64).powi(2) / (2.0 * 0.05f64.powi(2))).exp(), 0.0))
        .unwrap()
        .normalized()
        .unwrap();
    let cfg = TrotterConfig { u: n, v: d, t, n_steps: 1, cutoff_energy: Some(CUTOFF_64), grid_size: m };
    let run = trotter_evolve(&cfg, &psi).unwrap();
    let (tau, steps) = (1e-6, 1000);
    let mid = cranknicolson_oracle(&d, tau, steps, &psi).unwrap();
    let fd = cranknicolson_oracle(&n, tau, steps, &mid).unwrap();
    assert!(run.state.distance(&fd) <= 1e-4, "{:e}", run.state.distance(&fd));
}

#[test]
fn limit_examples() {
    let m = 256;
    let psi = parabola(m);
    let t = 0.03;
    let (n, d) = (BoundaryCondition::neumann(), BoundaryCondition::dirichlet());
    let dir = GridBasis::new(&d, m, None, &SolverOptions::default()).unwrap();
    let expect = dir.propagate(&psi, 2.0 * t).unwrap();
    assert!(limit_evolve(&n, &d, t, &psi, None).unwrap().distance(&expect) < 1e-12);
    assert!(limit_evolve(&d, &d, t, &psi, None).unwrap().distance(&expect) < 1e-12);

    let a: f64 = 1.2;
    let w = BoundaryCondition::robin(2.0 * ((a / 2.0).tan() / 2.0).atan());
    let expect = GridBasis::new(&w, m, None, &SolverOptions::default()).unwrap().propagate(&psi, 2.0 * t).unwrap();
    let got = limit_evolve(&BoundaryCondition::robin(a), &n, t, &psi, None).unwrap();
    assert!(got.distance(&expect) < 1e-9);
}

fn log_slope(rows: &[SweepRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| ((r.n as f64).ln(), r.time_averaged_error.ln())).collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn neumann_dirichlet_sweep_trends_down() {
    let m = 1024;
    for cutoff in [Some(CUTOFF_64), None] {
        let cfg = SweepConfig {
            u: BoundaryCondition::neumann(),
            v: BoundaryCondition::dirichlet(),
            t: 0.05,
            n_list: vec![4, 8, 16, 32, 64, 128, 256],
            cutoff_energy: cutoff,
            grid_size: m,
            time_points: 16,
        };
        let rep = trotter_error_sweep(&cfg, &parabola(m)).unwrap();
        assert!(rep.composed.is_exact_dirichlet());
        assert!(log_slope(&rep.per_n) < 0.0);
        assert_eq!(rep.per_n.iter().map(|r| r.n).collect::<Vec<_>>(), cfg.n_list);
        if cutoff.is_none() {
            assert!(rep.per_n.iter().all(|r| r.unitarity_defect <= 1e-6));
        }
    }
}

#[test]
fn complete_bases_preserve_the_norm() {
    let m = 256;
    let psi = parabola(m);
    for (u, v) in [
        (BoundaryCondition::robin(0.7), BoundaryCondition::pseudo_periodic(1.0)),
        (BoundaryCondition::pseudo_periodic(0.0), BoundaryCondition::pseudo_periodic(PI)),
        (BoundaryCondition::robin(-2.0), BoundaryCondition::dirichlet()),
    ] {
        let cfg =
            SweepConfig { u, v, t: 0.1, n_list: vec![1, 16, 256], cutoff_energy: None, grid_size: m, time_points: 16 };
        let rep = trotter_error_sweep(&cfg, &psi).unwrap();
        assert!(rep.per_n.iter().all(|r| r.unitarity_defect <= 1e-6), "{rep:?}");
    }
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let m = 128;
    let cfg = SweepConfig {
        u: BoundaryCondition::pseudo_periodic(0.0),
        v: BoundaryCondition::pseudo_periodic(PI),
        t: 0.1,
        n_list: vec![2, 4, 8, 16, 32],
        cutoff_energy: None,
        grid_size: m,
        time_points: 16,
    };
    let psi = StateGrid::from_fn(m, |_| C64::new(1.0, 0.0)).unwrap();
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| trotter_error_sweep(&cfg, &psi).unwrap()).per_n
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn projection_residual_shrinks_with_resolution() {
    let mut last = f64::INFINITY;
    let d = BoundaryCondition::dirichlet();
    for level in 0..4 {
        let m = 128 << level;
        let cutoff = (10.5 * PI).powi(2) * (1 << level) as f64;
        let basis = spectrum(&d, cutoff);
        let res = project(&parabola(m), &basis).unwrap().residual;
        assert!(res < last, "level {level}: {res:e} !< {last:e}");
        last = res;
    }
}

#[test]
fn spectral_and_finite_difference_agree_for_a_nondiagonal_singular_condition() {
    let m = 2000;
    let u = BoundaryCondition::pseudo_periodic(0.5);
    let basis = find_spectrum(&u, 200.0, &SolverOptions::default()).unwrap();
    let psi = StateGrid::from_fn(m, |x| basis.modes[0].value(x) + C64::new(0.0, 0.5) * basis.modes[1].value(x))
        .unwrap()
        .normalized()
        .unwrap();
    let gb = GridBasis::new(&u, m, Some(CUTOFF_64), &SolverOptions::default()).unwrap();
    let spectral = gb.propagate(&psi, 0.02).unwrap();
    let fd = cranknicolson_oracle(&u, 1e-5, 2000, &psi).unwrap();
    assert!(spectral.distance(&fd) <= 1e-4, "{:e}", spectral.distance(&fd));
}

#[test]
fn magnetic_examples() {
    let cfg = MagneticConfig { alpha1: 0.5, alpha2: 0.5, t: 0.4, n_steps: 9, n_modes: 4 };
    let out = magnetic_trotter(&cfg, &[C64::new(1.0, 0.0); 9]).unwrap();
    assert!((out.fidelity - 1.0).abs() < 1e-14 && out.phase.abs() < 1e-12);

    let cfg = MagneticConfig { alpha1: 0.0, alpha2: 1.0, t: 0.3, n_steps: 50, n_modes: 3 };
    let mut c0 = vec![C64::new(0.0, 0.0); 7];
    c0[4] = C64::new(1.0, 0.0); // n = 1
    let out = magnetic_trotter(&cfg, &c0).unwrap();
    let k = 2.0 * PI;
    let expect = C64::from_polar(1.0, -0.3 * (k * k + (k + 1.0).powi(2)));
    assert!((out.final_coeffs[4] - expect).norm() < 1e-12);
    assert!(wrap_phase(out.phase + 0.15).abs() < 1e-12);
    assert!((out.analytic_phase + 0.15).abs() < 1e-15);
}
