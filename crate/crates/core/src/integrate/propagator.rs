//! Exact per-mode exponential of the linear operator.
//!
//! For `K = |k| > 0` write `C̃v = i k̂ × v`, which squares to the transverse
//! projector. On its ±1 eigenspaces the `(u, ω)` pair obeys
//! `d/dt (u, ω) = [[−a, ±χK], [±χK, −c]] (u, ω)` with `a = (μ+χ)K²` and
//! `c = γK² + 2χ`, while longitudinal parts decay independently. Summing the
//! two helical blocks leaves only the transverse diagonal entries `g_u`, `g_ω`
//! and an off-diagonal weight `h` multiplying `C̃`.

use crate::dynamics::{MMPParams, MMPState, Tendency};
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralVectorField};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct ModeFactors {
    u_par: f64,
    w_par: f64,
    b: f64,
    g_u: f64,
    g_w: f64,
    h: f64,
}

/// `exp(dt·L)` tabulated mode by mode.
#[derive(Clone, Debug)]
pub struct LinearPropagator {
    grid: Grid,
    dt: f64,
    params: MMPParams,
    factors: Vec<ModeFactors>,
}

/// Entries of `exp(t·[[−a, β], [β, −c]])` as `(e00, e11, e01)`.
pub fn symmetric_2x2_exp(a: f64, c: f64, beta: f64, t: f64) -> (f64, f64, f64) {
    let m = -(a + c) / 2.0;
    let d = (a - c) / 2.0;
    let r = (d * d + beta * beta).sqrt();
    let (cosh_part, sinh_over_r) = if r * t < 1e-3 {
        let x2 = (r * t) * (r * t);
        let e = (m * t).exp();
        (
            e * (1.0 + x2 / 2.0 + x2 * x2 / 24.0),
            e * t * (1.0 + x2 / 6.0 + x2 * x2 / 120.0),
        )
    } else {
        let hi = ((m + r) * t).exp();
        let lo = ((m - r) * t).exp();
        ((hi + lo) / 2.0, (hi - lo) / (2.0 * r))
    };
    (
        cosh_part - d * sinh_over_r,
        cosh_part + d * sinh_over_r,
        beta * sinh_over_r,
    )
}

impl LinearPropagator {
    pub fn new(grid: &Grid, params: &MMPParams, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt >= 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be nonnegative, got {dt}")));
        }
        let MMPParams {
            mu,
            chi,
            kappa,
            gamma,
            nu,
        } = *params;
        let factors = (0..grid.len())
            .map(|idx| {
                let k2 = grid.deriv_k2(idx);
                let k = k2.sqrt();
                let a = (mu + chi) * k2;
                let c = gamma * k2 + 2.0 * chi;
                let (g_u, g_w, h) = symmetric_2x2_exp(a, c, chi * k, dt);
                ModeFactors {
                    u_par: (-a * dt).exp(),
                    w_par: (-(c + kappa * k2) * dt).exp(),
                    b: (-nu * k2 * dt).exp(),
                    g_u,
                    g_w,
                    h,
                }
            })
            .collect();
        Ok(Self {
            grid: grid.clone(),
            dt,
            params: *params,
            factors,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn params(&self) -> &MMPParams {
        &self.params
    }

    /// Applies the exponential to a `(u, ω, b)` triple of fields.
    pub fn apply_fields(
        &self,
        u: &SpectralVectorField,
        omega: &SpectralVectorField,
        b: &SpectralVectorField,
    ) -> Result<[SpectralVectorField; 3]> {
        self.grid.ensure_same(u.grid())?;
        self.grid.ensure_same(omega.grid())?;
        self.grid.ensure_same(b.grid())?;
        let grid = &self.grid;
        let mut out_u = SpectralVectorField::zeros(grid);
        let mut out_w = SpectralVectorField::zeros(grid);
        for idx in 0..grid.len() {
            let f = self.factors[idx];
            let uv = u.mode(idx);
            let wv = omega.mode(idx);
            let k2 = grid.deriv_k2(idx);
            if k2 == 0.0 {
                out_u.set_mode(idx, uv);
                out_w.set_mode(idx, wv.map(|v| v * f.w_par));
                continue;
            }
            let kd = grid.deriv_wavenumber(idx);
            let kn = k2.sqrt();
            let kh = [kd[0] / kn, kd[1] / kn, kd[2] / kn];
            let (u_par, u_perp) = split(kh, uv);
            let (w_par, w_perp) = split(kh, wv);
            let cu = helical(kh, uv);
            let cw = helical(kh, wv);
            let mut nu_ = [Complex64::new(0.0, 0.0); 3];
            let mut nw = nu_;
            for c in 0..3 {
                nu_[c] = u_par[c] * f.u_par + u_perp[c] * f.g_u + cw[c] * f.h;
                nw[c] = w_par[c] * f.w_par + w_perp[c] * f.g_w + cu[c] * f.h;
            }
            out_u.set_mode(idx, nu_);
            out_w.set_mode(idx, nw);
        }
        let out_b = b.scale_modes(|idx| self.factors[idx].b);
        Ok([out_u, out_w, out_b])
    }

    /// `exp(dt·L)` applied to a state; time advances by `dt`.
    pub fn apply(&self, state: &MMPState) -> Result<MMPState> {
        let [u, omega, b] = self.apply_fields(&state.u, &state.omega, &state.b)?;
        Ok(MMPState {
            u,
            omega,
            b,
            time: state.time + self.dt,
        })
    }

    /// `exp(dt·L)` applied to a tendency.
    pub fn apply_tendency(&self, t: &Tendency) -> Result<Tendency> {
        let [du, domega, db] = self.apply_fields(&t.du, &t.domega, &t.db)?;
        Ok(Tendency { du, domega, db })
    }
}

fn split(kh: [f64; 3], v: [Complex64; 3]) -> ([Complex64; 3], [Complex64; 3]) {
    let p = v[0] * kh[0] + v[1] * kh[1] + v[2] * kh[2];
    let par = [p * kh[0], p * kh[1], p * kh[2]];
    (par, [v[0] - par[0], v[1] - par[1], v[2] - par[2]])
}

fn helical(kh: [f64; 3], v: [Complex64; 3]) -> [Complex64; 3] {
    let i = Complex64::new(0.0, 1.0);
    [
        i * (v[2] * kh[1] - v[1] * kh[2]),
        i * (v[0] * kh[2] - v[2] * kh[0]),
        i * (v[1] * kh[0] - v[0] * kh[1]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_2x2_matches_diagonal() {
        let (e00, e11, e01) = symmetric_2x2_exp(2.0, 2.0, 0.0, 0.3);
        assert!((e00 - (-0.6f64).exp()).abs() < 1e-15);
        assert!((e11 - (-0.6f64).exp()).abs() < 1e-15);
        assert_eq!(e01, 0.0);
    }

    #[test]
    fn both_branches_match_uncoupled_decay() {
        // beta = 0 decouples the pair; r·t straddles the series threshold
        for t in [0.0999, 0.1001] {
            let (e00, e11, e01) = symmetric_2x2_exp(1.0, 1.02, 0.0, t);
            assert!((e00 - (-t).exp()).abs() < 1e-15);
            assert!((e11 - (-1.02 * t).exp()).abs() < 1e-15);
            assert_eq!(e01, 0.0);
        }
    }

    #[test]
    fn zero_dt_is_identity() {
        let g = Grid::periodic(8).unwrap();
        let p = MMPParams::new(0.1, 0.2, 0.3, 0.4, 0.5).unwrap();
        let prop = LinearPropagator::new(&g, &p, 0.0).unwrap();
        let mut s = MMPState::zeros(&g);
        s.u.component_mut(0)[g.mode_index([0, 1, 0])] = Complex64::new(0.0, 0.5);
        s.u.component_mut(0)[g.mode_index([0, -1, 0])] = Complex64::new(0.0, -0.5);
        let out = prop.apply(&s).unwrap();
        assert!(out.u.max_abs_diff(&s.u).unwrap() < 1e-16);
    }
}
