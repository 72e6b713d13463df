//! Littlewood-Paley decomposition on the periodic lattice.
//!
//! The low-pass profile `χ` equals 1 on `|ξ| ≤ 3/4`, vanishes for `|ξ| ≥ 1`
//! and is joined by the `C^∞` ramp built from `θ(t) = e^{-1/t}`. The annular
//! profile is `φ(ξ) = χ(ξ/2) − χ(ξ)`, supported in `3/4 ≤ |ξ| ≤ 2` and equal
//! to 1 on `1 ≤ |ξ| ≤ 3/2`. Telescoping gives `χ + Σ_{j≥0} φ(2^{-j}·) = 1`.
//!
//! Block `j` multiplies mode `k` by `φ(2^{-j}|k|)` with `|k|` the physical
//! wavenumber, so block indices carry the same meaning on every box size.

use crate::error::{Error, Result};
use crate::spectral::{inverse_transform, Grid, SpectralVectorField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `θ(t) / (θ(t) + θ(1 − t))`: 0 for `t ≤ 0`, 1 for `t ≥ 1`, smooth in between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Radial low-pass profile.
pub fn chi(r: f64) -> f64 {
    1.0 - smooth_step((r - 0.75) * 4.0)
}

/// Radial annular profile `χ(r/2) − χ(r)`.
pub fn phi(r: f64) -> f64 {
    chi(0.5 * r) - chi(r)
}

/// Block range resolvable on a particular grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyadicProfile {
    /// First block; `S_{j_min}` keeps only the mean mode.
    pub j_min: i32,
    /// Last block; `S_{j_min} + Σ_{j_min..=j_max} Δ_j` is the identity on the lattice.
    pub j_max: i32,
}

pub fn build_profile(grid: &Grid) -> DyadicProfile {
    DyadicProfile::new(grid)
}

impl DyadicProfile {
    pub fn new(grid: &Grid) -> Self {
        let j_min = grid.wave_scale().log2().floor() as i32;
        // reconstruction requires max |k| ≤ (3/2)·2^{j_max}
        let mut j_max = j_min;
        while 1.5 * 2f64.powi(j_max) < grid.max_k_magnitude() {
            j_max += 1;
        }
        Self { j_min, j_max }
    }

    pub fn chi(&self, r: f64) -> f64 {
        chi(r)
    }

    pub fn phi(&self, r: f64) -> f64 {
        phi(r)
    }

    /// Multiplier of `Δ_j` at physical radius `r`.
    pub fn block_multiplier(&self, j: i32, r: f64) -> f64 {
        phi(r * 2f64.powi(-j))
    }

    /// Multiplier of `S_j` at physical radius `r`.
    pub fn lowpass_multiplier(&self, j: i32, r: f64) -> f64 {
        chi(r * 2f64.powi(-j))
    }

    pub fn blocks(&self) -> std::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    pub fn block_count(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    pub fn check_block(&self, j: i32) -> Result<()> {
        if j < self.j_min || j > self.j_max {
            Err(Error::BlockOutOfRange {
                j,
                min: self.j_min,
                max: self.j_max,
            })
        } else {
            Ok(())
        }
    }
}

/// `Δ_j F`.
pub fn delta_j(f: &SpectralVectorField, j: i32, profile: &DyadicProfile) -> Result<SpectralVectorField> {
    profile.check_block(j)?;
    let grid = f.grid().clone();
    Ok(f.scale_modes(|idx| profile.block_multiplier(j, grid.k_magnitude(idx))))
}

/// `S_j F = Σ_{k ≤ j−1} Δ_k F`; defined for every integer `j`.
pub fn low_pass(f: &SpectralVectorField, j: i32, profile: &DyadicProfile) -> SpectralVectorField {
    let grid = f.grid().clone();
    f.scale_modes(|idx| profile.lowpass_multiplier(j, grid.k_magnitude(idx)))
}

/// A field split into `S_{j_min} F` and the blocks `Δ_j F`, `j_min ≤ j ≤ j_max`.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub profile: DyadicProfile,
    pub lowpass: SpectralVectorField,
    pub blocks: Vec<(i32, SpectralVectorField)>,
}

impl BlockDecomposition {
    pub fn new(f: &SpectralVectorField, profile: &DyadicProfile) -> Self {
        let blocks = profile
            .blocks()
            .map(|j| (j, delta_j(f, j, profile).expect("block in range")))
            .collect();
        Self {
            profile: *profile,
            lowpass: low_pass(f, profile.j_min, profile),
            blocks,
        }
    }

    pub fn block(&self, j: i32) -> Option<&SpectralVectorField> {
        self.blocks.iter().find(|(b, _)| *b == j).map(|(_, f)| f)
    }

    /// Sum of the low-pass part and all blocks.
    pub fn reconstruct(&self) -> SpectralVectorField {
        let mut out = self.lowpass.clone();
        for (_, b) in &self.blocks {
            out.axpy_in_place(1.0, b);
        }
        out
    }
}

/// Grid maximum of the Euclidean magnitude of the physical field.
pub fn sup_norm(f: &SpectralVectorField) -> Result<f64> {
    Ok(inverse_transform(f)?.max_magnitude())
}

/// `‖Δ_j F‖_∞` as a grid maximum.
pub fn block_sup_norm(f: &SpectralVectorField, j: i32, profile: &DyadicProfile) -> Result<f64> {
    sup_norm(&delta_j(f, j, profile)?)
}

/// Sup norm of the trigonometric interpolant sampled on a grid refined by `factor`.
///
/// Nyquist coefficients are split evenly between `±n/2` so the interpolant is real.
pub fn oversampled_sup_norm(f: &SpectralVectorField, factor: usize) -> Result<f64> {
    if factor == 0 {
        return Err(Error::InvalidParameter("oversampling factor must be >= 1".into()));
    }
    let grid = f.grid();
    let n = grid.n();
    let m = n * factor;
    let fine = Grid::new(m, grid.box_length())?;
    let targets = |s: i64| -> Vec<(usize, f64)> {
        let w = |v: i64| v.rem_euclid(m as i64) as usize;
        if s == (n / 2) as i64 && factor > 1 {
            vec![(w(s), 0.5), (w(-s), 0.5)]
        } else {
            vec![(w(s), 1.0)]
        }
    };
    let mut padded = SpectralVectorField::zeros(&fine);
    for idx in 0..grid.len() {
        let v = f.mode(idx);
        if v.iter().all(|c| c.norm() == 0.0) {
            continue;
        }
        let s = grid.signed_mode(idx);
        for (ti, wi) in targets(s[0]) {
            for (tj, wj) in targets(s[1]) {
                for (tl, wl) in targets(s[2]) {
                    let t = fine.index(ti, tj, tl);
                    let w = wi * wj * wl;
                    for (c, vc) in v.iter().enumerate() {
                        padded.component_mut(c)[t] += vc * w;
                    }
                }
            }
        }
    }
    sup_norm(&padded)
}

/// Lebesgue exponents supported by the Besov machinery.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponent {
    Two,
    Infinity,
}

impl Exponent {
    pub fn from_f64(p: f64) -> Result<Self> {
        if p == 2.0 {
            Ok(Self::Two)
        } else if p == f64::INFINITY {
            Ok(Self::Infinity)
        } else {
            Err(Error::UnsupportedExponent(p))
        }
    }

    pub fn reciprocal(self) -> f64 {
        match self {
            Self::Two => 0.5,
            Self::Infinity => 0.0,
        }
    }
}

/// `‖F‖_p` with p = 2 by Parseval and p = ∞ as a grid maximum.
pub fn lebesgue_norm(f: &SpectralVectorField, p: Exponent) -> Result<f64> {
    match p {
        Exponent::Two => Ok(f.l2_norm()),
        Exponent::Infinity => sup_norm(f),
    }
}

/// Homogeneous Besov norm `(Σ_j 2^{jsq} ‖Δ_j F‖_p^q)^{1/q}` over the resolvable blocks.
pub fn besov_norm(
    f: &SpectralVectorField,
    s: f64,
    p: f64,
    q: f64,
    profile: &DyadicProfile,
) -> Result<f64> {
    let p = Exponent::from_f64(p)?;
    let q = Exponent::from_f64(q)?;
    let grid = f.grid().clone();
    let mut terms = Vec::with_capacity(profile.block_count());
    for j in profile.blocks() {
        let block_norm = match p {
            Exponent::Two => f
                .weighted_energy(|idx| profile.block_multiplier(j, grid.k_magnitude(idx)).powi(2))
                .sqrt(),
            Exponent::Infinity => block_sup_norm(f, j, profile)?,
        };
        terms.push(2f64.powf(j as f64 * s) * block_norm);
    }
    Ok(match q {
        Exponent::Two => crate::sum::pairwise_sum_by(terms.len(), |i| terms[i] * terms[i]).sqrt(),
        Exponent::Infinity => terms.into_iter().fold(0.0, f64::max),
    })
}

/// `‖Λ^s F‖_2 = (Σ_k (1+|k|²)^s |F̂(k)|²)^{1/2}`.
pub fn sobolev_hs(f: &SpectralVectorField, s: f64) -> f64 {
    let grid = f.grid().clone();
    f.weighted_energy(|idx| {
        let k = grid.k_magnitude(idx);
        (1.0 + k * k).powf(s)
    })
    .sqrt()
}

/// Homogeneous `(Σ_{k≠0} |k|^{2s} |F̂(k)|²)^{1/2}`; the mean mode is excluded.
pub fn sobolev_hs_dot(f: &SpectralVectorField, s: f64) -> f64 {
    let grid = f.grid().clone();
    f.weighted_energy(|idx| {
        let k = grid.k_magnitude(idx);
        if k == 0.0 {
            0.0
        } else {
            k.powf(2.0 * s)
        }
    })
    .sqrt()
}

/// Outcome of [`bernstein_scaling_check`].
#[derive(Clone, Debug)]
pub struct BernsteinReport {
    pub p: Exponent,
    pub q: Exponent,
    pub derivative_order: u8,
    pub blocks: Vec<i32>,
    /// `ratios[trial][b]` is the norm ratio at `blocks[b]`.
    pub ratios: Vec<Vec<f64>>,
    /// Fitted log₂-slope per trial.
    pub slopes: Vec<f64>,
    /// `derivative_order + 3(1/p − 1/q)`.
    pub expected_slope: f64,
    pub max_relative_error: f64,
}

impl BernsteinReport {
    pub fn within(&self, relative: f64) -> bool {
        self.max_relative_error <= relative
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Blocks whose whole annulus fits strictly inside the per-axis band, `j ≥ j_min + 1`.
pub fn fully_resolved_blocks(grid: &Grid, profile: &DyadicProfile) -> Vec<i32> {
    (profile.j_min + 1..profile.j_max)
        .filter(|&j| 2f64.powi(j + 1) <= grid.max_resolvable_kinf())
        .collect()
}

/// Measures the dyadic scaling of `‖∂^α Δ_j f‖_q / ‖Δ_j f‖_p`.
///
/// A smooth, even, positive frequency template `ĝ(ξ) = a(1 + ξᵀAξ)` (random
/// per component and per trial) is placed on the lattice as `ĝ(2^{-j}k)`, so
/// each block sees the same profile dilated by `2^j`. The fitted log₂-slope of
/// the ratio against `j` should equal `|α| + 3(1/p − 1/q)`.
pub fn bernstein_scaling_check(
    grid: &Grid,
    profile: &DyadicProfile,
    p: f64,
    q: f64,
    derivative_order: u8,
    trials: usize,
    seed: u64,
) -> Result<BernsteinReport> {
    let p = Exponent::from_f64(p)?;
    let q = Exponent::from_f64(q)?;
    if p.reciprocal() < q.reciprocal() {
        return Err(Error::InvalidParameter("Bernstein check requires p <= q".into()));
    }
    if derivative_order > 1 {
        return Err(Error::InvalidParameter("derivative order must be 0 or 1".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let blocks = fully_resolved_blocks(grid, profile);
    if blocks.len() < 3 {
        return Err(Error::InsufficientRange {
            available: blocks.len(),
            required: 3,
        });
    }
    let expected_slope = derivative_order as f64 + 3.0 * (p.reciprocal() - q.reciprocal());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = blocks.iter().map(|&j| j as f64).collect();
    let mut ratios = Vec::with_capacity(trials);
    let mut slopes = Vec::with_capacity(trials);
    for _ in 0..trials {
        let template: Vec<(f64, [[f64; 3]; 3])> = (0..3)
            .map(|_| {
                let amp = rng.gen_range(0.5..1.5);
                let mut b = [[0.0; 3]; 3];
                for row in b.iter_mut() {
                    for v in row.iter_mut() {
                        *v = rng.gen_range(-0.3..0.3);
                    }
                }
                let mut a = [[0.0; 3]; 3];
                for r in 0..3 {
                    for c in 0..3 {
                        a[r][c] = (0..3).map(|t| b[r][t] * b[c][t]).sum();
                    }
                }
                (amp, a)
            })
            .collect();
        let mut trial_ratios = Vec::with_capacity(blocks.len());
        for &j in &blocks {
            let scale = 2f64.powi(-j);
            let f = SpectralVectorField::from_mode_fn(grid, |idx| {
                let k = grid.wavenumber(idx);
                let xi = [k[0] * scale, k[1] * scale, k[2] * scale];
                let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
                let mut out = [Complex64::new(0.0, 0.0); 3];
                if r <= 3.0 {
                    for (c, (amp, a)) in template.iter().enumerate() {
                        let mut quad = 0.0;
                        for r_ in 0..3 {
                            for c_ in 0..3 {
                                quad += xi[r_] * a[r_][c_] * xi[c_];
                            }
                        }
                        out[c] = Complex64::new(amp * (1.0 + quad), 0.0);
                    }
                }
                out
            });
            let block = delta_j(&f, j, profile)?;
            let denominator = lebesgue_norm(&block, p)?;
            let numerator = if derivative_order == 0 {
                lebesgue_norm(&block, q)?
            } else {
                let mut best: f64 = 0.0;
                for axis in 0..3 {
                    let d = block.map_modes(|idx, v| {
                        let m = Complex64::new(0.0, grid.deriv_wavenumber(idx)[axis]);
                        [v[0] * m, v[1] * m, v[2] * m]
                    });
                    best = best.max(lebesgue_norm(&d, q)?);
                }
                best
            };
            trial_ratios.push(numerator / denominator);
        }
        let ys: Vec<f64> = trial_ratios.iter().map(|r| r.log2()).collect();
        slopes.push(fit_slope(&xs, &ys));
        ratios.push(trial_ratios);
    }
    let max_relative_error = slopes
        .iter()
        .map(|s| ((s - expected_slope) / expected_slope).abs())
        .fold(0.0, f64::max);
    Ok(BernsteinReport {
        p,
        q,
        derivative_order,
        blocks,
        ratios,
        slopes,
        expected_slope,
        max_relative_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_supports() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(0.75), 1.0);
        assert_eq!(chi(1.0), 0.0);
        assert_eq!(phi(0.74), 0.0);
        assert_eq!(phi(1.0), 1.0);
        assert_eq!(phi(1.5), 1.0);
        assert_eq!(phi(2.0), 0.0);
        assert!(phi(1.75) > 0.0 && phi(1.75) < 1.0);
    }

    #[test]
    fn partition_at_radius_two() {
        let total = chi(2.0) + phi(2.0) + (1..60).map(|j| phi(2.0 * 2f64.powi(-j))).sum::<f64>();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn block_range_on_standard_grids() {
        let p8 = DyadicProfile::new(&Grid::periodic(8).unwrap());
        assert_eq!((p8.j_min, p8.j_max), (0, 3));
        let p32 = DyadicProfile::new(&Grid::periodic(32).unwrap());
        assert_eq!((p32.j_min, p32.j_max), (0, 5));
        let half = DyadicProfile::new(&Grid::new(16, std::f64::consts::PI).unwrap());
        assert_eq!(half.j_min, 1);
    }

    #[test]
    fn out_of_range_block_is_an_error() {
        let g = Grid::periodic(8).unwrap();
        let p = DyadicProfile::new(&g);
        let f = SpectralVectorField::zeros(&g);
        assert!(matches!(
            delta_j(&f, 4, &p),
            Err(Error::BlockOutOfRange { j: 4, .. })
        ));
        assert!(block_sup_norm(&f, -1, &p).is_err());
    }

    #[test]
    fn unsupported_exponent() {
        let g = Grid::periodic(8).unwrap();
        let p = DyadicProfile::new(&g);
        let f = SpectralVectorField::zeros(&g);
        assert!(matches!(
            besov_norm(&f, 1.0, 3.0, 2.0, &p),
            Err(Error::UnsupportedExponent(_))
        ));
    }

    #[test]
    fn bernstein_needs_three_blocks() {
        let g = Grid::periodic(16).unwrap();
        let p = DyadicProfile::new(&g);
        assert!(matches!(
            bernstein_scaling_check(&g, &p, 2.0, 2.0, 1, 1, 0),
            Err(Error::InsufficientRange { .. })
        ));
    }
}
