//! Right-hand side of the incompressible magneto-micropolar system
//!
//! ```text
//! ∂t u = −(u·∇)u + (b·∇)b + χ∇×ω + (μ+χ)Δu − ∇π
//! ∂t ω = −(u·∇)ω + γΔω + κ∇div ω − 2χω + χ∇×u
//! ∂t b = −(u·∇)b + (b·∇)u + νΔb
//! ```
//!
//! with `div u = div b = 0`. Quadratic terms are evaluated in divergence form
//! from dealiased inputs and dealiased again on output; the pressure is removed
//! by the Leray projection, which is also applied to the induction tendency.

use crate::error::{Error, Result};
use crate::spectral::{
    cross, forward_many, ik, inverse_many, Grid, SpectralVectorField,
};
use num_complex::Complex64;

/// Relative tolerance for the curl-consistency check in [`curl_rhs`].
pub const CURL_CONSISTENCY_TOLERANCE: f64 = 1e-8;

/// Physical coefficients of the system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MMPParams {
    /// Kinematic viscosity.
    pub mu: f64,
    /// Vortex viscosity.
    pub chi: f64,
    /// Spin viscosity multiplying `∇div ω`.
    pub kappa: f64,
    /// Spin viscosity multiplying `Δω`.
    pub gamma: f64,
    /// Magnetic diffusivity.
    pub nu: f64,
}

impl MMPParams {
    pub fn new(mu: f64, chi: f64, kappa: f64, gamma: f64, nu: f64) -> Result<Self> {
        let p = Self {
            mu,
            chi,
            kappa,
            gamma,
            nu,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("mu", self.mu), ("gamma", self.gamma), ("nu", self.nu)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Validation(format!("{name} must be positive")));
            }
        }
        for (name, v) in [("chi", self.chi), ("kappa", self.kappa)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Validation(format!("{name} must be nonnegative")));
            }
        }
        Ok(())
    }

    pub fn min_viscosity(&self) -> f64 {
        self.mu.min(self.gamma).min(self.nu)
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.mu, self.chi, self.kappa, self.gamma, self.nu]
    }
}

/// Velocity, micro-rotation and magnetic field at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct MMPState {
    pub u: SpectralVectorField,
    pub omega: SpectralVectorField,
    pub b: SpectralVectorField,
    pub time: f64,
}

impl MMPState {
    pub fn new(
        u: SpectralVectorField,
        omega: SpectralVectorField,
        b: SpectralVectorField,
        time: f64,
    ) -> Result<Self> {
        u.grid().ensure_same(omega.grid())?;
        u.grid().ensure_same(b.grid())?;
        if !(time.is_finite() && time >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time must be finite and nonnegative, got {time}"
            )));
        }
        Ok(Self { u, omega, b, time })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            u: SpectralVectorField::zeros(grid),
            omega: SpectralVectorField::zeros(grid),
            b: SpectralVectorField::zeros(grid),
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    pub fn ensure_consistent(&self) -> Result<()> {
        self.u.grid().ensure_same(self.omega.grid())?;
        self.u.grid().ensure_same(self.b.grid())
    }

    /// Largest per-mode divergence of `u` and `b`.
    pub fn divergence_defect(&self) -> f64 {
        self.u.divergence_defect().max(self.b.divergence_defect())
    }

    pub fn fields(&self) -> [&SpectralVectorField; 3] {
        [&self.u, &self.omega, &self.b]
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.omega.is_finite() && self.b.is_finite()
    }

    /// Leray-projects `u` and `b` in place.
    pub fn project(&mut self) {
        self.u.leray_project_in_place();
        self.b.leray_project_in_place();
    }

    /// `‖u‖² + ‖ω‖² + ‖b‖²`.
    pub fn energy(&self) -> f64 {
        self.fields().iter().map(|f| f.l2_norm().powi(2)).sum()
    }
}

/// Time derivative of an [`MMPState`].
#[derive(Clone, Debug, PartialEq)]
pub struct Tendency {
    pub du: SpectralVectorField,
    pub domega: SpectralVectorField,
    pub db: SpectralVectorField,
}

impl Tendency {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            du: SpectralVectorField::zeros(grid),
            domega: SpectralVectorField::zeros(grid),
            db: SpectralVectorField::zeros(grid),
        }
    }

    pub fn fields(&self) -> [&SpectralVectorField; 3] {
        [&self.du, &self.domega, &self.db]
    }

    /// `⟨du, u⟩ + ⟨dω, ω⟩ + ⟨db, b⟩`, i.e. half the energy growth rate.
    pub fn inner(&self, state: &MMPState) -> Result<f64> {
        Ok(self.du.inner(&state.u)? + self.domega.inner(&state.omega)? + self.db.inner(&state.b)?)
    }

    pub(crate) fn add_in_place(&mut self, other: &Tendency) {
        self.du.axpy_in_place(1.0, &other.du);
        self.domega.axpy_in_place(1.0, &other.domega);
        self.db.axpy_in_place(1.0, &other.db);
    }
}

fn dealiased_physical(fields: &[&SpectralVectorField]) -> Result<Vec<Vec<f64>>> {
    let grid = fields[0].grid().clone();
    let dealiased: Vec<SpectralVectorField> = fields.iter().map(|f| f.dealias()).collect();
    let comps: Vec<&[Complex64]> = dealiased
        .iter()
        .flat_map(|f| (0..3).map(move |c| f.component(c)))
        .collect();
    inverse_many(&grid, &comps)
}

/// `−Σ_k ∂_k T_jk` from the transformed entries of a flux tensor, dealiased.
fn neg_divergence(grid: &Grid, entry: impl Fn(usize, usize, usize) -> Complex64) -> SpectralVectorField {
    let mut out = SpectralVectorField::from_mode_fn(grid, |idx| {
        let k = ik(grid.deriv_wavenumber(idx));
        let mut v = [Complex64::new(0.0, 0.0); 3];
        for (j, vj) in v.iter_mut().enumerate() {
            *vj = -(k[0] * entry(idx, j, 0) + k[1] * entry(idx, j, 1) + k[2] * entry(idx, j, 2));
        }
        v
    });
    out.dealias_in_place();
    out
}

/// Quadratic terms: `P[−(u·∇)u + (b·∇)b]`, `−(u·∇)ω`, `P[−(u·∇)b + (b·∇)u]`.
pub fn nonlinear_terms(state: &MMPState) -> Result<Tendency> {
    state.ensure_consistent()?;
    let grid = state.grid().clone();
    let phys = dealiased_physical(&[&state.u, &state.omega, &state.b])?;
    let (u, w, b) = (&phys[0..3], &phys[3..6], &phys[6..9]);
    let len = grid.len();
    let pairs = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    let mut products: Vec<Vec<f64>> = Vec::with_capacity(18);
    // momentum flux u⊗u − b⊗b (symmetric)
    for &(j, k) in &pairs {
        products.push((0..len).map(|x| u[j][x] * u[k][x] - b[j][x] * b[k][x]).collect());
    }
    // micro-rotation flux ω_j u_k
    for j in 0..3 {
        for k in 0..3 {
            products.push((0..len).map(|x| w[j][x] * u[k][x]).collect());
        }
    }
    // induction flux b_j u_k − b_k u_j (antisymmetric)
    for &(j, k) in &[(0, 1), (0, 2), (1, 2)] {
        products.push((0..len).map(|x| b[j][x] * u[k][x] - b[k][x] * u[j][x]).collect());
    }
    let hat = forward_many(&grid, &products);
    let sym = |j: usize, k: usize| {
        let (a, b) = if j <= k { (j, k) } else { (k, j) };
        pairs.iter().position(|&p| p == (a, b)).expect("pair")
    };
    let zero = Complex64::new(0.0, 0.0);
    let anti = |idx: usize, j: usize, k: usize| match (j, k) {
        (0, 1) => hat[15][idx],
        (0, 2) => hat[16][idx],
        (1, 2) => hat[17][idx],
        (1, 0) => -hat[15][idx],
        (2, 0) => -hat[16][idx],
        (2, 1) => -hat[17][idx],
        _ => zero,
    };
    let mut du = neg_divergence(&grid, |idx, j, k| hat[sym(j, k)][idx]);
    let domega = neg_divergence(&grid, |idx, j, k| hat[6 + 3 * j + k][idx]);
    let mut db = neg_divergence(&grid, anti);
    du.leray_project_in_place();
    db.leray_project_in_place();
    Ok(Tendency { du, domega, db })
}

/// Diffusion, vortex coupling and micro-rotation damping.
pub fn linear_terms(state: &MMPState, params: &MMPParams) -> Result<Tendency> {
    state.ensure_consistent()?;
    let grid = state.grid().clone();
    let MMPParams {
        mu,
        chi,
        kappa,
        gamma,
        nu,
    } = *params;
    let du = SpectralVectorField::from_mode_fn(&grid, |idx| {
        let k2 = grid.deriv_k2(idx);
        let u = state.u.mode(idx);
        let cw = cross(ik(grid.deriv_wavenumber(idx)), state.omega.mode(idx));
        [0, 1, 2].map(|c| u[c] * (-(mu + chi) * k2) + cw[c] * chi)
    });
    let domega = SpectralVectorField::from_mode_fn(&grid, |idx| {
        let k = grid.deriv_wavenumber(idx);
        let k2 = grid.deriv_k2(idx);
        let w = state.omega.mode(idx);
        let kw = k[0] * w[0] + k[1] * w[1] + k[2] * w[2];
        let cu = cross(ik(k), state.u.mode(idx));
        [0, 1, 2].map(|c| w[c] * (-gamma * k2 - 2.0 * chi) - kw * (kappa * k[c]) + cu[c] * chi)
    });
    let db = state.b.scale_modes(|idx| -nu * grid.deriv_k2(idx));
    Ok(Tendency { du, domega, db })
}

/// Full tendency; `du` and `db` are solenoidal per mode.
pub fn rhs(state: &MMPState, params: &MMPParams) -> Result<Tendency> {
    let mut t = nonlinear_terms(state)?;
    t.add_in_place(&linear_terms(state, params)?);
    t.du.leray_project_in_place();
    t.db.leray_project_in_place();
    Ok(t)
}

fn check_curl(given: &SpectralVectorField, field: &SpectralVectorField) -> Result<SpectralVectorField> {
    given.grid().ensure_same(field.grid())?;
    let exact = field.curl();
    let tolerance = CURL_CONSISTENCY_TOLERANCE * exact.max_abs().max(1.0);
    let mismatch = given.max_abs_diff(&exact)?;
    if mismatch > tolerance {
        return Err(Error::ConsistencyViolation {
            mismatch,
            tolerance,
        });
    }
    Ok(exact)
}

/// `Σ_l ∇f_l × ∂_l g` evaluated from the physical gradients of `f` and `g`.
fn gradient_cross_sum(grid: &Grid, grad_f: &[Vec<f64>], grad_g: &[Vec<f64>]) -> [Vec<f64>; 3] {
    // grad_x[3 * l + m] = ∂_m x_l
    let len = grid.len();
    let mut out = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    for x in 0..len {
        for l in 0..3 {
            let a = [grad_f[3 * l][x], grad_f[3 * l + 1][x], grad_f[3 * l + 2][x]];
            let d = [grad_g[l][x], grad_g[3 + l][x], grad_g[6 + l][x]];
            out[0][x] += a[1] * d[2] - a[2] * d[1];
            out[1][x] += a[2] * d[0] - a[0] * d[2];
            out[2][x] += a[0] * d[1] - a[1] * d[0];
        }
    }
    out
}

fn physical_gradient(f: &SpectralVectorField) -> Result<Vec<Vec<f64>>> {
    let grids: Vec<SpectralVectorField> = (0..3).map(|l| f.dealias().grad_component(l)).collect();
    let refs: Vec<&SpectralVectorField> = grids.iter().collect();
    dealiased_physical(&refs)
}

/// Tendencies of `H = ∇×u`, `I = ∇×ω`, `J = ∇×b`.
///
/// The vortex-stretching terms use the identity
/// `∇×((f·∇)g) = (f·∇)∇×g + Σ_l ∇f_l × ∂_l g`, which for solenoidal `f`, `g`
/// reduces to the familiar `(f·∇)∇×g − (∇×g·∇)f` pair in the `H` equation.
/// The `κ∇div ω` term has no curl and does not appear.
pub fn curl_rhs(
    h: &SpectralVectorField,
    i: &SpectralVectorField,
    j: &SpectralVectorField,
    state: &MMPState,
    params: &MMPParams,
) -> Result<(SpectralVectorField, SpectralVectorField, SpectralVectorField)> {
    state.ensure_consistent()?;
    let h = check_curl(h, &state.u)?;
    let i = check_curl(i, &state.omega)?;
    let j = check_curl(j, &state.b)?;
    let grid = state.grid().clone();
    let len = grid.len();

    let phys = dealiased_physical(&[&state.u, &state.b, &h, &j, &i])?;
    let (u, b, hp, jp, ip) = (&phys[0..3], &phys[3..6], &phys[6..9], &phys[9..12], &phys[12..15]);

    // H: −div(u⊗H − H⊗u) + div(b⊗J − J⊗b), antisymmetric fluxes
    let mut fluxes: Vec<Vec<f64>> = Vec::new();
    for &(a, c) in &[(0, 1), (0, 2), (1, 2)] {
        fluxes.push(
            (0..len)
                .map(|x| {
                    (hp[a][x] * u[c][x] - hp[c][x] * u[a][x]) - (jp[a][x] * b[c][x] - jp[c][x] * b[a][x])
                })
                .collect(),
        );
    }
    // I advection flux I_j u_k; J: H_j b_k − J_j u_k ... kept as advective form below
    for a in 0..3 {
        for c in 0..3 {
            fluxes.push((0..len).map(|x| ip[a][x] * u[c][x]).collect());
        }
    }
    // J: −(u·∇)J + (b·∇)H = −div(u⊗J − b⊗H) written as flux J_j u_k − H_j b_k
    for a in 0..3 {
        for c in 0..3 {
            fluxes.push((0..len).map(|x| jp[a][x] * u[c][x] - hp[a][x] * b[c][x]).collect());
        }
    }
    let grad_u = physical_gradient(&state.u)?;
    let grad_w = physical_gradient(&state.omega)?;
    let grad_b = physical_gradient(&state.b)?;
    let s_uw = gradient_cross_sum(&grid, &grad_u, &grad_w);
    let s_ub = gradient_cross_sum(&grid, &grad_u, &grad_b);
    let s_bu = gradient_cross_sum(&grid, &grad_b, &grad_u);
    for c in 0..3 {
        fluxes.push(s_uw[c].clone());
    }
    for c in 0..3 {
        fluxes.push((0..len).map(|x| s_bu[c][x] - s_ub[c][x]).collect());
    }
    let hat = forward_many(&grid, &fluxes);
    let zero = Complex64::new(0.0, 0.0);
    let anti = |idx: usize, a: usize, c: usize| match (a, c) {
        (0, 1) => hat[0][idx],
        (0, 2) => hat[1][idx],
        (1, 2) => hat[2][idx],
        (1, 0) => -hat[0][idx],
        (2, 0) => -hat[1][idx],
        (2, 1) => -hat[2][idx],
        _ => zero,
    };
    let mut dh = neg_divergence(&grid, anti);
    let mut di = neg_divergence(&grid, |idx, a, c| hat[3 + 3 * a + c][idx]);
    let mut dj = neg_divergence(&grid, |idx, a, c| hat[12 + 3 * a + c][idx]);
    let mut src_i = SpectralVectorField::from_mode_fn(&grid, |idx| {
        [hat[21][idx], hat[22][idx], hat[23][idx]].map(|v| -v)
    });
    let mut src_j = SpectralVectorField::from_mode_fn(&grid, |idx| {
        [hat[24][idx], hat[25][idx], hat[26][idx]]
    });
    src_i.dealias_in_place();
    src_j.dealias_in_place();
    di.axpy_in_place(1.0, &src_i);
    dj.axpy_in_place(1.0, &src_j);

    let MMPParams {
        mu, chi, gamma, nu, ..
    } = *params;
    let ci = i.curl();
    let ch = h.curl();
    dh.axpy_in_place(1.0, &h.scale_modes(|idx| -(mu + chi) * grid.deriv_k2(idx)));
    dh.axpy_in_place(chi, &ci);
    di.axpy_in_place(1.0, &i.scale_modes(|idx| -gamma * grid.deriv_k2(idx) - 2.0 * chi));
    di.axpy_in_place(chi, &ch);
    dj.axpy_in_place(1.0, &j.scale_modes(|idx| -nu * grid.deriv_k2(idx)));
    Ok((dh, di, dj))
}

/// Squared norms entering the energy balance, normalized measure.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyTerms {
    pub grad_u: f64,
    pub grad_omega: f64,
    pub grad_b: f64,
    pub div_omega: f64,
    pub omega: f64,
    /// `⟨∇×u, ω⟩`.
    pub curl_u_omega: f64,
}

impl EnergyTerms {
    pub fn of(state: &MMPState) -> Result<Self> {
        state.ensure_consistent()?;
        let grid = state.grid().clone();
        let grad = |f: &SpectralVectorField| f.weighted_energy(|idx| grid.deriv_k2(idx));
        Ok(Self {
            grad_u: grad(&state.u),
            grad_omega: grad(&state.omega),
            grad_b: grad(&state.b),
            div_omega: state.omega.divergence().l2_norm().powi(2),
            omega: state.omega.l2_norm().powi(2),
            curl_u_omega: state.u.curl().inner(&state.omega)?,
        })
    }

    /// Exact value of `⟨rhs, state⟩ = ½ dE/dt`.
    pub fn balance(&self, p: &MMPParams) -> f64 {
        -(p.mu + p.chi) * self.grad_u - p.gamma * self.grad_omega - p.nu * self.grad_b
            - p.kappa * self.div_omega
            - 2.0 * p.chi * self.omega
            + 2.0 * p.chi * self.curl_u_omega
    }

    /// `μ‖∇u‖² + γ‖∇ω‖² + ν‖∇b‖² + κ‖div ω‖² + χ‖ω‖²`, the dissipation bound
    /// of the energy inequality.
    pub fn inequality_dissipation(&self, p: &MMPParams) -> f64 {
        p.mu * self.grad_u + p.gamma * self.grad_omega + p.nu * self.grad_b
            + p.kappa * self.div_omega
            + p.chi * self.omega
    }
}

/// Parameter reductions onto invariant subspaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionMode {
    /// `χ = 0`, `ω = 0`, `b = 0`.
    NavierStokes,
    /// `χ = 0`, `ω = 0`.
    Mhd,
    /// `b = 0`.
    Micropolar,
}

/// The state constraint that accompanies a reduced parameter set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub mode: ReductionMode,
    pub zero_omega: bool,
    pub zero_b: bool,
}

impl Reduction {
    /// Zeroes the constrained fields.
    pub fn apply(&self, state: &MMPState) -> MMPState {
        let mut s = state.clone();
        let grid = state.grid().clone();
        if self.zero_omega {
            s.omega = SpectralVectorField::zeros(&grid);
        }
        if self.zero_b {
            s.b = SpectralVectorField::zeros(&grid);
        }
        s
    }

    pub fn check_state(&self, state: &MMPState) -> Result<()> {
        if self.zero_omega && state.omega.max_abs() != 0.0 {
            return Err(Error::Validation(format!("{:?} reduction requires omega = 0", self.mode)));
        }
        if self.zero_b && state.b.max_abs() != 0.0 {
            return Err(Error::Validation(format!("{:?} reduction requires b = 0", self.mode)));
        }
        Ok(())
    }
}

pub fn reduce_mode(params: &MMPParams, mode: ReductionMode) -> (MMPParams, Reduction) {
    let mut p = *params;
    let (zero_omega, zero_b) = match mode {
        ReductionMode::NavierStokes => (true, true),
        ReductionMode::Mhd => (true, false),
        ReductionMode::Micropolar => (false, true),
    };
    if zero_omega {
        p.chi = 0.0;
    }
    (
        p,
        Reduction {
            mode,
            zero_omega,
            zero_b,
        },
    )
}
