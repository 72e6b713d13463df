//! Initial-condition presets.

use super::config::{InitialConfig, Preset};
use super::snapshot::load_snapshot;
use crate::dynamics::MMPState;
use crate::error::{Error, Result};
use crate::spectral::{forward_transform, Grid, PhysicalVectorField, SpectralVectorField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tg(x: [f64; 3], axes: [usize; 3]) -> [f64; 3] {
    let (a, b, c) = (x[axes[0]], x[axes[1]], x[axes[2]]);
    let mut v = [0.0; 3];
    v[axes[0]] = a.sin() * b.cos() * c.cos();
    v[axes[1]] = -a.cos() * b.sin() * c.cos();
    v
}

/// Taylor-Green field `(sin x cos y cos z, −cos x sin y cos z, 0)` for `u`;
/// `ω` and `b` use the same pattern on cyclically permuted axes.
pub fn taylor_green(grid: &Grid, u_amp: f64, omega_amp: f64, b_amp: f64) -> MMPState {
    let s = grid.wave_scale();
    let field = |amp: f64, axes: [usize; 3]| {
        forward_transform(&PhysicalVectorField::from_fn(grid, |x| {
            tg([x[0] * s, x[1] * s, x[2] * s], axes).map(|v| amp * v)
        }))
    };
    MMPState {
        u: field(u_amp, [0, 1, 2]),
        omega: field(omega_amp, [1, 2, 0]),
        b: field(b_amp, [2, 0, 1]),
        time: 0.0,
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalized(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|c| c / n)
}

/// Unit vectors orthogonal to the lattice mode `m` and to each other.
pub fn transverse_basis(m: [i64; 3]) -> ([f64; 3], [f64; 3]) {
    let k = normalized(m.map(|c| c as f64));
    let reference = if k[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let e1 = normalized(cross(k, reference));
    (e1, cross(k, e1))
}

/// `A e cos(k·x)` with `e ⊥ k`: coefficients `A e / 2` at `±m`.
pub fn cosine_mode(grid: &Grid, m: [i64; 3], e: [f64; 3], amp: f64) -> Result<SpectralVectorField> {
    let half = (grid.n() / 2) as i64;
    if m.iter().any(|c| c.abs() >= half) {
        return Err(Error::InvalidParameter(format!("mode {m:?} is not resolvable")));
    }
    let mut f = SpectralVectorField::zeros(grid);
    if m == [0, 0, 0] {
        f.set_mode(0, e.map(|c| Complex64::new(amp * c, 0.0)));
        return Ok(f);
    }
    let coeff = e.map(|c| Complex64::new(0.5 * amp * c, 0.0));
    f.set_mode(grid.mode_index(m), coeff);
    f.set_mode(grid.mode_index(m.map(|c| -c)), coeff);
    Ok(f)
}

/// One cosine mode in each field; `u` and `ω` share a transverse direction, `b` uses the other.
pub fn single_mode(grid: &Grid, m: [i64; 3], u_amp: f64, omega_amp: f64, b_amp: f64) -> Result<MMPState> {
    if m == [0, 0, 0] {
        return Err(Error::InvalidParameter("single-mode preset needs a nonzero mode".into()));
    }
    let (e1, e2) = transverse_basis(m);
    Ok(MMPState {
        u: cosine_mode(grid, m, e1, u_amp)?,
        omega: cosine_mode(grid, m, e1, omega_amp)?,
        b: cosine_mode(grid, m, e2, b_amp)?,
        time: 0.0,
    })
}

/// Hermitian, mean-free random field on the modes with every `|m_i| ≤ band`,
/// scaled to unit L² norm.
pub fn random_field(grid: &Grid, rng: &mut impl Rng, band: i64, solenoidal: bool) -> SpectralVectorField {
    let zero = Complex64::new(0.0, 0.0);
    let mut f = SpectralVectorField::zeros(grid);
    for idx in 1..grid.len() {
        if grid.signed_mode(idx).iter().all(|c| c.abs() <= band) {
            let v = [0, 1, 2].map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            f.set_mode(idx, v);
        } else {
            f.set_mode(idx, [zero; 3]);
        }
    }
    f.symmetrize();
    if solenoidal {
        f.leray_project_in_place();
    }
    let norm = f.l2_norm();
    if norm > 0.0 {
        f = f.scaled(1.0 / norm);
    }
    f
}

/// Seeded band-limited data: solenoidal `u` and `b`, unconstrained `ω`, each with L² norm equal to its amplitude.
pub fn random_seeded(
    grid: &Grid,
    seed: u64,
    band: i64,
    u_amp: f64,
    omega_amp: f64,
    b_amp: f64,
) -> MMPState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_field(grid, &mut rng, band, true).scaled(u_amp);
    let omega = random_field(grid, &mut rng, band, false).scaled(omega_amp);
    let b = random_field(grid, &mut rng, band, true).scaled(b_amp);
    MMPState {
        u,
        omega,
        b,
        time: 0.0,
    }
}

/// Initial state described by a config section.
pub fn initial_state(init: &InitialConfig, grid: &Grid) -> Result<MMPState> {
    match init.preset {
        Preset::TaylorGreen => Ok(taylor_green(grid, init.amplitude, init.omega_amplitude, init.b_amplitude)),
        Preset::SingleMode => single_mode(grid, init.mode, init.amplitude, init.omega_amplitude, init.b_amplitude),
        Preset::RandomSeeded => Ok(random_seeded(
            grid,
            init.seed,
            init.band,
            init.amplitude,
            init.omega_amplitude,
            init.b_amplitude,
        )),
        Preset::Snapshot => {
            let path = init
                .path
                .as_ref()
                .ok_or_else(|| Error::Validation("initial.path is required for the snapshot preset".into()))?;
            let (state, _) = load_snapshot(path)?;
            if state.grid().n() != grid.n() {
                return Err(Error::GridMismatch);
            }
            let mut state = MMPState::new(
                rebind(&state.u, grid)?,
                rebind(&state.omega, grid)?,
                rebind(&state.b, grid)?,
                state.time,
            )?;
            state.time = 0.0;
            Ok(state)
        }
    }
}

fn rebind(f: &SpectralVectorField, grid: &Grid) -> Result<SpectralVectorField> {
    SpectralVectorField::from_components(grid, f.clone().into_components())
}
