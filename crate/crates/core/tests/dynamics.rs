mod common;

use common::{convolution, params, random_state};
use mmp_core::dynamics::{
    curl_rhs, linear_terms, nonlinear_terms, reduce_mode, rhs, EnergyTerms, MMPParams, MMPState, ReductionMode,
};
use mmp_core::io::presets::single_mode;
use mmp_core::spectral::{Grid, SpectralVectorField};
use mmp_core::Error;
use num_complex::Complex64;

/// `−Σ_k i k_k T_jk` with `T_jk` given as exact convolution sums.
fn neg_div(grid: &Grid, t: impl Fn(usize, usize) -> Vec<Complex64>) -> SpectralVectorField {
    let entries: Vec<Vec<Vec<Complex64>>> = (0..3).map(|j| (0..3).map(|k| t(j, k)).collect()).collect();
    let i = Complex64::new(0.0, 1.0);
    SpectralVectorField::from_mode_fn(grid, |idx| {
        let k = grid.wavenumber(idx);
        [0, 1, 2].map(|j| -(0..3).map(|l| i * k[l] * entries[j][l][idx]).sum::<Complex64>())
    })
}

#[test]
fn nonlinear_terms_match_convolution_sums() {
    let g = Grid::periodic(8).unwrap();
    for seed in 0..2 {
        let s = random_state(&g, seed, 0.9);
        let (u, w, b) = (&s.u, &s.omega, &s.b);
        let sub = |x: Vec<Complex64>, y: Vec<Complex64>| x.iter().zip(&y).map(|(a, c)| a - c).collect::<Vec<_>>();
        let du = neg_div(&g, |j, k| sub(convolution(u, j, u, k), convolution(b, j, b, k))).leray_project();
        let dw = neg_div(&g, |j, k| convolution(w, j, u, k));
        let db = neg_div(&g, |j, k| sub(convolution(b, j, u, k), convolution(b, k, u, j))).leray_project();
        let t = nonlinear_terms(&s).unwrap();
        assert!(t.du.max_abs_diff(&du).unwrap() < 1e-11);
        assert!(t.domega.max_abs_diff(&dw).unwrap() < 1e-11);
        assert!(t.db.max_abs_diff(&db).unwrap() < 1e-11);
    }
}

#[test]
fn linear_terms_match_per_mode_formulas() {
    let g = Grid::periodic(8).unwrap();
    let s = random_state(&g, 4, 1.0);
    let MMPParams { mu, chi, kappa, gamma, nu } = params();
    let t = linear_terms(&s, &params()).unwrap();
    let i = Complex64::new(0.0, 1.0);
    for idx in 0..g.len() {
        let k = g.wavenumber(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let (u, w, b) = (s.u.mode(idx), s.omega.mode(idx), s.b.mode(idx));
        let curl = |v: [Complex64; 3]| {
            [
                i * (k[1] * v[2] - k[2] * v[1]),
                i * (k[2] * v[0] - k[0] * v[2]),
                i * (k[0] * v[1] - k[1] * v[0]),
            ]
        };
        let (cw, cu) = (curl(w), curl(u));
        let kw = k[0] * w[0] + k[1] * w[1] + k[2] * w[2];
        for c in 0..3 {
            let du = -(mu + chi) * k2 * u[c] + chi * cw[c];
            let dw = -gamma * k2 * w[c] - kappa * k[c] * kw + chi * cu[c] - 2.0 * chi * w[c];
            let db = -nu * k2 * b[c];
            assert!((t.du.mode(idx)[c] - du).norm() < 1e-13);
            assert!((t.domega.mode(idx)[c] - dw).norm() < 1e-13);
            assert!((t.db.mode(idx)[c] - db).norm() < 1e-13);
        }
    }
}

#[test]
fn tendencies_are_solenoidal() {
    for n in [8, 16] {
        let g = Grid::periodic(n).unwrap();
        let t = rhs(&random_state(&g, 7, 1.0), &params()).unwrap();
        assert!(t.du.divergence_defect() < 1e-12);
        assert!(t.db.divergence_defect() < 1e-12);
    }
}

#[test]
fn energy_balance_on_random_states() {
    let p = params();
    for (n, seed) in [(8, 1), (8, 2), (16, 3), (16, 4)] {
        let g = Grid::periodic(n).unwrap();
        let s = random_state(&g, seed, 0.8);
        let t = rhs(&s, &p).unwrap();
        let e = EnergyTerms::of(&s).unwrap();
        assert!((t.inner(&s).unwrap() - e.balance(&p)).abs() < 1e-10);
        // the inequality dissipation bounds the balance from below by −D
        assert!(e.balance(&p) <= -e.inequality_dissipation(&p) + 1e-12);
    }
}

#[test]
fn nonlinear_terms_conserve_energy() {
    // transport and magnetic stretching cancel in the sum
    let g = Grid::periodic(16).unwrap();
    let s = random_state(&g, 11, 2.0);
    let t = nonlinear_terms(&s).unwrap();
    let uu = t.du.inner(&s.u).unwrap();
    let bb = t.db.inner(&s.b).unwrap();
    let ww = t.domega.inner(&s.omega).unwrap();
    assert!((uu + bb).abs() < 1e-11);
    assert!(ww.abs() < 1e-11);
    assert!(uu.abs() > 1e-6);
}

#[test]
fn cross_term_symmetry() {
    let g = Grid::periodic(16).unwrap();
    let s = random_state(&g, 12, 1.0);
    let a = s.omega.curl().inner(&s.u).unwrap();
    let b = s.u.curl().inner(&s.omega).unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn curl_system_is_the_curl_of_the_rhs() {
    let p = params();
    for (n, seed) in [(8, 20), (8, 21), (16, 22)] {
        let g = Grid::periodic(n).unwrap();
        let s = random_state(&g, seed, 0.7);
        let t = rhs(&s, &p).unwrap();
        let (dh, di, dj) = curl_rhs(&s.u.curl(), &s.omega.curl(), &s.b.curl(), &s, &p).unwrap();
        assert!(dh.max_abs_diff(&t.du.curl()).unwrap() < 1e-10);
        assert!(di.max_abs_diff(&t.domega.curl()).unwrap() < 1e-10);
        assert!(dj.max_abs_diff(&t.db.curl()).unwrap() < 1e-10);
        let other = MMPParams { kappa: 10.0, ..p };
        let (eh, ei, ej) = curl_rhs(&s.u.curl(), &s.omega.curl(), &s.b.curl(), &s, &other).unwrap();
        assert_eq!((eh, ei, ej), (dh, di, dj));
    }
}

#[test]
fn inconsistent_curls_are_rejected() {
    let g = Grid::periodic(8).unwrap();
    let s = random_state(&g, 2, 1.0);
    let wrong = s.u.curl().scaled(1.01);
    let r = curl_rhs(&wrong, &s.omega.curl(), &s.b.curl(), &s, &params());
    assert!(matches!(r, Err(Error::ConsistencyViolation { .. })));
}

#[test]
fn transverse_magnetic_mode_decays_at_its_rate() {
    let g = Grid::periodic(8).unwrap();
    let s = single_mode(&g, [1, 1, 0], 0.0, 0.0, 0.5).unwrap();
    let t = rhs(&s, &params()).unwrap();
    // a single Fourier mode of b carries no nonlinear flux
    assert!(t.db.sub(&s.b.scaled(-params().nu * 2.0)).unwrap().max_abs() < 1e-15);
    assert!(t.du.max_abs() < 1e-15);
}

#[test]
fn parameter_validation() {
    assert!(matches!(MMPParams::new(0.0, 0.1, 0.1, 0.1, 0.1), Err(Error::Validation(m)) if m.contains("mu must be positive")));
    assert!(matches!(MMPParams::new(0.1, -0.1, 0.1, 0.1, 0.1), Err(Error::Validation(m)) if m.contains("chi")));
    assert!(MMPParams::new(0.1, 0.1, f64::NAN, 0.1, 0.1).is_err());
    assert_eq!(MMPParams::new(0.3, 0.0, 0.0, 0.2, 0.4).unwrap().min_viscosity(), 0.2);
}

#[test]
fn state_grids_must_agree() {
    let a = Grid::periodic(8).unwrap();
    let b = Grid::periodic(16).unwrap();
    let r = MMPState::new(
        SpectralVectorField::zeros(&a),
        SpectralVectorField::zeros(&b),
        SpectralVectorField::zeros(&a),
        0.0,
    );
    assert!(matches!(r, Err(Error::GridMismatch)));
}

#[test]
fn reductions_zero_the_right_fields() {
    let g = Grid::periodic(8).unwrap();
    let s = random_state(&g, 1, 1.0);
    let (p, r) = reduce_mode(&params(), ReductionMode::NavierStokes);
    assert_eq!(p.chi, 0.0);
    let z = r.apply(&s);
    assert_eq!(z.omega.max_abs() + z.b.max_abs(), 0.0);
    assert!(r.check_state(&s).is_err() && r.check_state(&z).is_ok());
    let (p, r) = reduce_mode(&params(), ReductionMode::Micropolar);
    assert_eq!(p, params());
    let z = r.apply(&s);
    assert_eq!(z.b.max_abs(), 0.0);
    assert_eq!(z.omega, s.omega);
    // invariant subspaces: the tendencies keep the zeroed fields at zero
    let t = rhs(&z, &p).unwrap();
    assert_eq!(t.db.max_abs(), 0.0);
    let (p, r) = reduce_mode(&params(), ReductionMode::Mhd);
    let t = rhs(&r.apply(&s), &p).unwrap();
    assert_eq!(t.domega.max_abs(), 0.0);
}
