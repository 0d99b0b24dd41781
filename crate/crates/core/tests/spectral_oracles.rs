mod common;

use bccompose::bc_algebra::{cayley, classify, make_named, BCClass, BoundaryCondition, Family, SINGULAR_TOL};
use bccompose::grid::StateGrid;
use bccompose::mat2::{self, Mat2, C64};
use bccompose::spectral::*;
use bccompose::Error;
use common::*;
use proptest::prelude::*;
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on Pₙ.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite rule on [0, 1]: `panels` equal panels, 16 nodes each.
fn quadrature(panels: usize) -> Vec<(f64, f64)> {
    let gl = gauss_legendre(16);
    let h = 1.0 / panels as f64;
    (0..panels).flat_map(|p| gl.iter().map(move |&(x, w)| (h * (p as f64 + 0.5 * (x + 1.0)), 0.5 * h * w))).collect()
}

fn families() -> Vec<BoundaryCondition> {
    let mut out: Vec<BoundaryCondition> = [
        Family::Dirichlet,
        Family::Neumann,
        Family::Robin(0.7),
        Family::Robin(-0.7),
        Family::Robin(PI / 2.0),
        Family::Robin(3.0),
        Family::MixedDirichletRobin(0.5),
        Family::MixedDirichletRobin(-2.0),
        Family::PseudoPeriodic(0.0),
        Family::PseudoPeriodic(1.3),
        Family::PseudoPeriodic(PI),
    ]
    .into_iter()
    .map(make_named)
    .collect();
    let mut r = rng(11);
    while out.len() < 16 {
        let u = haar(&mut r);
        if let BCClass::Regular(k) = classify(&u, SINGULAR_TOL) {
            if k.matrix().spectral_norm() < 40.0 {
                out.push(u);
            }
        }
    }
    out.push(one_singular(&mut r));
    out.push(one_singular(&mut r));
    out
}

#[test]
fn gram_matrix_is_identity_under_independent_quadrature() {
    let q = quadrature(128);
    for u in families() {
        let basis = find_spectrum(&u, 3000.0, &SolverOptions::default()).unwrap();
        let vals: Vec<Vec<C64>> = basis.modes.iter().map(|m| q.iter().map(|&(x, _)| m.value(x)).collect()).collect();
        let mut worst = 0f64;
        for i in 0..vals.len() {
            for j in 0..=i {
                let ip: C64 = q.iter().enumerate().map(|(n, &(_, w))| vals[i][n].conj() * vals[j][n] * w).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).norm());
            }
        }
        assert!(worst <= 1e-8, "{:?}: Gram defect {worst:e}", u.matrix());
    }
}

#[test]
fn modes_satisfy_their_boundary_condition() {
    for u in families() {
        let basis = find_spectrum(&u, 3000.0, &SolverOptions::default()).unwrap();
        for m in &basis.modes {
            let res = bc_residual(&u, &m.boundary_vector());
            assert!(res <= 1e-8 * (1.0 + m.energy.abs()), "residual {res:e} at E = {}", m.energy);
            assert!((m.norm_sqr() - 1.0).abs() <= 1e-10);
            let expect = match m.kind {
                ModeKind::Oscillatory { k } => k * k,
                ModeKind::Evanescent { kappa } => -kappa * kappa,
                ModeKind::Zero => 0.0,
            };
            assert_eq!(m.energy, expect);
            assert!((mode_eval(m, 0.0).unwrap() - m.boundary_vector().phi[0]).norm() < 1e-12);
        }
    }
}

#[test]
fn weyl_counting() {
    for u in families() {
        for e_max in [100.0, 1000.0, 20000.0] {
            let n = find_spectrum(&u, e_max, &SolverOptions::default()).unwrap().len() as f64;
            let weyl = f64::sqrt(e_max) / PI;
            assert!((n - weyl).abs() <= 3.0, "count {n} vs {weyl} for {:?}", u.matrix());
        }
    }
}

#[test]
fn pseudo_periodic_plane_waves() {
    for a in [0.2, 1.0, 2.2, -1.7] {
        let basis = find_spectrum(&BoundaryCondition::pseudo_periodic(a), 500.0, &SolverOptions::default()).unwrap();
        let mut exact: Vec<f64> =
            (-5i32..=5).map(|n| (2.0 * PI * n as f64 + a).powi(2)).filter(|&e| e <= 500.0).collect();
        exact.sort_by(f64::total_cmp);
        let got = basis.energies();
        assert_eq!(got.len(), exact.len());
        for (g, e) in got.iter().zip(&exact) {
            assert!((g - e).abs() <= 1e-10 * e);
        }
    }
}

#[test]
fn secular_examples() {
    let d = BoundaryCondition::dirichlet();
    let scale = secular_matrix(&d, PI * PI).frobenius();
    assert!(secular_matrix(&d, PI * PI).det().norm() <= 1e-14 * scale * scale);
    assert!(secular_matrix(&d, 2.0).det().norm() > 0.1);
    assert_eq!(secular_matrix(&BoundaryCondition::neumann(), 0.0).det().norm(), 0.0);
}

#[test]
fn mode_examples() {
    let dir = find_spectrum(&BoundaryCondition::dirichlet(), 20.0, &SolverOptions::default()).unwrap();
    assert!((mode_eval(&dir.modes[0], 0.5).unwrap().norm() - 2f64.sqrt()).abs() < 1e-14);
    assert!(matches!(mode_eval(&dir.modes[0], 1.5), Err(Error::Domain(_))));
    let t = kinetic_form(&BoundaryCondition::dirichlet(), &dir.modes[0]).unwrap();
    assert!((t.value - PI * PI).abs() < 1e-12);

    let neu = find_spectrum(&BoundaryCondition::neumann(), 1.0, &SolverOptions::default()).unwrap();
    assert!((mode_eval(&neu.modes[0], 0.3).unwrap() - 1.0).norm() < 1e-14);
    assert!(kinetic_form(&BoundaryCondition::neumann(), &neu.modes[0]).unwrap().value.abs() < 1e-14);
}

#[test]
fn form_examples() {
    let phi = [C64::new(0.3, -0.4), C64::new(1.2, 0.5)];
    let a: f64 = 1.1;
    let g = gamma_form(&BoundaryCondition::robin(a), &phi, 1e-12).unwrap();
    assert!((g.value - (a / 2.0).tan() * mat2::norm(&phi).powi(2)).abs() < 1e-14);
    assert_eq!(gamma_form(&BoundaryCondition::neumann(), &phi, 1e-12).unwrap().value, 0.0);
    assert_eq!(gamma_form(&BoundaryCondition::dirichlet(), &[C64::new(0.0, 0.0); 2], 1e-12).unwrap().value, 0.0);

    let one = StateGrid::from_fn(200, |_| C64::new(1.0, 0.0)).unwrap();
    let t = kinetic_form_grid(&BoundaryCondition::robin(a), &one, 1e-12).unwrap();
    assert!((t.value + 2.0 * (a / 2.0).tan()).abs() < 1e-13);
}

#[test]
#[allow(clippy::approx_constant)]
fn csv_and_json_rows_agree() {
    let basis = find_spectrum(&BoundaryCondition::robin(1.5707963), 10.0, &SolverOptions::default()).unwrap();
    let mut csv = Vec::new();
    basis.write_csv(&mut csv).unwrap();
    let mut jl = Vec::new();
    basis.write_json_lines(&mut jl).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    let jl = String::from_utf8(jl).unwrap();
    assert_eq!(csv.lines().count(), jl.lines().count() + 1);
    assert!(csv.lines().nth(1).unwrap().contains("evanescent"));
    for (line, row) in jl.lines().zip(basis.rows()) {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["energy"].as_f64().unwrap(), row.energy);
    }
}

fn hermitian_k() -> impl Strategy<Value = Mat2> {
    (-8.0..8.0f64, -8.0..8.0f64, -8.0..8.0f64, -8.0..8.0f64).prop_map(|(a, d, re, im)| {
        let off = C64::new(re, im);
        Mat2::new(C64::new(a, 0.0), off, off.conj(), C64::new(d, 0.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn negative_ground_state_when_constant_has_negative_energy(k in hermitian_k()) {
        let hk = bccompose::bc_algebra::HermitianBoundaryMatrix::new(k).unwrap();
        let u = cayley(&hk).unwrap();
        let one = [C64::new(1.0, 0.0); 2];
        prop_assume!(hk.expectation(&one) > 1e-3);
        let basis = find_spectrum(&u, 50.0, &SolverOptions::default()).unwrap();
        prop_assert!(basis.modes[0].energy < 0.0);
    }

    #[test]
    fn form_equals_energy(k in hermitian_k()) {
        let u = cayley(&bccompose::bc_algebra::HermitianBoundaryMatrix::new(k).unwrap()).unwrap();
        let basis = find_spectrum(&u, 500.0, &SolverOptions::default()).unwrap();
        for m in &basis.modes {
            let t = kinetic_form(&u, m).unwrap();
            prop_assert!((t.value - m.energy).abs() <= 1e-8 * (1.0 + m.energy.abs()));
            prop_assert!(t.is_real(1e-10));
        }
    }
}
