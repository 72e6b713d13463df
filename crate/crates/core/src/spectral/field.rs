use super::fft::Direction;
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::sum::pairwise_sum_by;
use num_complex::Complex64;
use rayon::prelude::*;

/// Imaginary residue tolerated by the inverse transform, relative to max(1, field scale).
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Real 3-vector field sampled on the lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalVectorField {
    grid: Grid,
    comps: [Vec<f64>; 3],
}

/// Fourier coefficients of a real 3-vector field, one complex triple per lattice mode.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralVectorField {
    grid: Grid,
    comps: [Vec<Complex64>; 3],
}

/// Fourier coefficients of a real scalar field.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralScalarField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl PhysicalVectorField {
    pub fn zeros(grid: &Grid) -> Self {
        let len = grid.len();
        Self {
            grid: grid.clone(),
            comps: [vec![0.0; len], vec![0.0; len], vec![0.0; len]],
        }
    }

    /// Samples `f(x, y, z)` at every lattice point.
    pub fn from_fn<F: Fn([f64; 3]) -> [f64; 3]>(grid: &Grid, f: F) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            let v = f(grid.point(idx));
            for (c, vc) in v.into_iter().enumerate() {
                out.comps[c][idx] = vc;
            }
        }
        out
    }

    pub fn from_components(grid: &Grid, comps: [Vec<f64>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::InvalidGrid(format!(
                "component length must be n^3 = {}",
                grid.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            comps,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.comps[c]
    }

    pub fn value(&self, idx: usize) -> [f64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    /// Grid maximum of the Euclidean magnitude.
    pub fn max_magnitude(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| {
                let v = self.value(i);
                (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Mean of |f|² over the lattice.
    pub fn mean_square(&self) -> f64 {
        let len = self.grid.len();
        pairwise_sum_by(len, |i| {
            let v = self.value(i);
            v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
        }) / len as f64
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }
}

impl SpectralVectorField {
    pub fn zeros(grid: &Grid) -> Self {
        let len = grid.len();
        Self {
            grid: grid.clone(),
            comps: [vec![ZERO; len], vec![ZERO; len], vec![ZERO; len]],
        }
    }

    pub fn from_components(grid: &Grid, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::InvalidGrid(format!(
                "component length must be n^3 = {}",
                grid.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            comps,
        })
    }

    /// Builds a field mode by mode from `f(mode index) -> coefficient triple`.
    pub fn from_mode_fn<F: Fn(usize) -> [Complex64; 3]>(grid: &Grid, f: F) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            out.set_mode(idx, f(idx));
        }
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn into_components(self) -> [Vec<Complex64>; 3] {
        self.comps
    }

    pub fn mode(&self, idx: usize) -> [Complex64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    pub fn set_mode(&mut self, idx: usize, v: [Complex64; 3]) {
        for (c, vc) in v.into_iter().enumerate() {
            self.comps[c][idx] = vc;
        }
    }

    /// Applies `f(mode index, coefficients)` to every mode in place.
    pub fn map_modes_in_place<F: Fn(usize, [Complex64; 3]) -> [Complex64; 3]>(&mut self, f: F) {
        for idx in 0..self.grid.len() {
            let v = f(idx, self.mode(idx));
            self.set_mode(idx, v);
        }
    }

    pub fn map_modes<F: Fn(usize, [Complex64; 3]) -> [Complex64; 3]>(&self, f: F) -> Self {
        let mut out = self.clone();
        out.map_modes_in_place(f);
        out
    }

    /// Multiplies every mode by a real radial/per-mode weight.
    pub fn scale_modes<F: Fn(usize) -> f64>(&self, weight: F) -> Self {
        self.map_modes(|idx, v| {
            let w = weight(idx);
            [v[0] * w, v[1] * w, v[2] * w]
        })
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.scale_modes(|_| a)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let mut out = self.clone();
        out.axpy_in_place(a, other);
        Ok(out)
    }

    pub(crate) fn axpy_in_place(&mut self, a: f64, other: &Self) {
        for c in 0..3 {
            for (x, y) in self.comps[c].iter_mut().zip(&other.comps[c]) {
                *x += y * a;
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    /// Real L² inner product on the torus with normalized measure:
    /// `Re Σ_k F(k)·conj(G(k))`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        let len = self.grid.len();
        Ok(pairwise_sum_by(len, |i| {
            (0..3)
                .map(|c| (self.comps[c][i] * other.comps[c][i].conj()).re)
                .sum::<f64>()
        }))
    }

    /// `Σ_k w(k) |F(k)|²` in fixed pairwise order.
    pub fn weighted_energy<F: Fn(usize) -> f64>(&self, weight: F) -> f64 {
        pairwise_sum_by(self.grid.len(), |i| {
            let w = weight(i);
            if w == 0.0 {
                0.0
            } else {
                w * (0..3).map(|c| self.comps[c][i].norm_sqr()).sum::<f64>()
            }
        })
    }

    /// L² norm (normalized measure), equal to sqrt(mean |f|²) by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.weighted_energy(|_| 1.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter().map(|v| v.norm()))
            .fold(0.0, f64::max)
    }

    /// Largest coefficient-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        let mut m: f64 = 0.0;
        for c in 0..3 {
            for (x, y) in self.comps[c].iter().zip(&other.comps[c]) {
                m = m.max((x - y).norm());
            }
        }
        Ok(m)
    }

    /// max_k |F(k) − conj F(−k)|.
    pub fn hermitian_defect(&self) -> f64 {
        let mut m: f64 = 0.0;
        for c in 0..3 {
            let v = &self.comps[c];
            for idx in 0..self.grid.len() {
                m = m.max((v[idx] - v[self.grid.mirror(idx)].conj()).norm());
            }
        }
        m
    }

    /// Replaces every coefficient with the Hermitian part `(F(k) + conj F(−k)) / 2`.
    pub fn symmetrize(&mut self) {
        for c in 0..3 {
            let v = self.comps[c].clone();
            for idx in 0..self.grid.len() {
                self.comps[c][idx] = (v[idx] + v[self.grid.mirror(idx)].conj()) * 0.5;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }
}

impl SpectralScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![ZERO; grid.len()],
        }
    }

    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "coefficient length must be n^3 = {}",
                grid.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        pairwise_sum_by(self.coeffs.len(), |i| self.coeffs[i].norm_sqr()).sqrt()
    }
}

/// Forward transform of one real component, normalized so coefficient 0 is the mean.
///
/// The output is made exactly Hermitian; otherwise FFT rounding on large
/// fields leaves non-Hermitian noise in components that should vanish.
pub fn forward_scalar(grid: &Grid, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    grid.fft(&mut buf, Direction::Forward);
    let norm = 1.0 / grid.len() as f64;
    for idx in 0..buf.len() {
        let m = grid.mirror(idx);
        if idx < m {
            let a = buf[idx];
            let b = buf[m].conj();
            buf[idx] = (a + b) * (0.5 * norm);
            buf[m] = buf[idx].conj();
        } else if idx == m {
            buf[idx] = Complex64::new(buf[idx].re * norm, 0.0);
        }
    }
    buf
}

/// Inverse transform of one component; fails if the result is not real.
pub fn inverse_scalar(grid: &Grid, coeffs: &[Complex64]) -> Result<Vec<f64>> {
    let mut buf = coeffs.to_vec();
    grid.fft(&mut buf, Direction::Inverse);
    let mut scale: f64 = 1.0;
    let mut residue: f64 = 0.0;
    for v in &buf {
        scale = scale.max(v.re.abs());
        residue = residue.max(v.im.abs());
    }
    let tolerance = HERMITIAN_TOLERANCE * scale;
    if residue > tolerance || !residue.is_finite() {
        return Err(Error::HermitianViolation { residue, tolerance });
    }
    Ok(buf.into_iter().map(|v| v.re).collect())
}

/// Physical → spectral. Components are transformed concurrently.
pub fn forward_transform(f: &PhysicalVectorField) -> SpectralVectorField {
    let grid = f.grid();
    let comps: Vec<Vec<Complex64>> = f
        .comps
        .par_iter()
        .map(|c| forward_scalar(grid, c))
        .collect();
    let [a, b, c]: [Vec<Complex64>; 3] = comps.try_into().expect("three components");
    SpectralVectorField {
        grid: grid.clone(),
        comps: [a, b, c],
    }
}

/// Spectral → physical, verifying the imaginary residue stays below tolerance.
pub fn inverse_transform(f: &SpectralVectorField) -> Result<PhysicalVectorField> {
    let grid = f.grid();
    let comps: Vec<Vec<f64>> = f
        .comps
        .par_iter()
        .map(|c| inverse_scalar(grid, c))
        .collect::<Result<_>>()?;
    let [a, b, c]: [Vec<f64>; 3] = comps.try_into().expect("three components");
    Ok(PhysicalVectorField {
        grid: grid.clone(),
        comps: [a, b, c],
    })
}

/// Transforms many scalar arrays concurrently (order of results matches input).
pub(crate) fn forward_many(grid: &Grid, values: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
    values
        .par_iter()
        .map(|v| forward_scalar(grid, v))
        .collect()
}

pub(crate) fn inverse_many(grid: &Grid, coeffs: &[&[Complex64]]) -> Result<Vec<Vec<f64>>> {
    coeffs
        .par_iter()
        .map(|c| inverse_scalar(grid, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_transforms_to_zero() {
        let g = Grid::periodic(8).unwrap();
        let f = forward_transform(&PhysicalVectorField::zeros(&g));
        assert_eq!(f.max_abs(), 0.0);
        let p = inverse_transform(&SpectralVectorField::zeros(&g)).unwrap();
        assert_eq!(p.max_magnitude(), 0.0);
    }

    #[test]
    fn cosine_maps_to_half_coefficients() {
        let g = Grid::periodic(8).unwrap();
        let f = PhysicalVectorField::from_fn(&g, |x| [x[0].cos(), 0.0, 0.0]);
        let s = forward_transform(&f);
        for idx in 0..g.len() {
            let m = g.signed_mode(idx);
            let expect = if m == [1, 0, 0] || m == [-1, 0, 0] { 0.5 } else { 0.0 };
            assert!((s.component(0)[idx] - Complex64::new(expect, 0.0)).norm() < 1e-15);
            assert!(s.component(1)[idx].norm() < 1e-15);
        }
    }

    #[test]
    fn single_mode_inverse() {
        let g = Grid::periodic(8).unwrap();
        let mut s = SpectralVectorField::zeros(&g);
        s.component_mut(0)[g.mode_index([1, 0, 0])] = Complex64::new(0.5, 0.0);
        s.component_mut(0)[g.mode_index([-1, 0, 0])] = Complex64::new(0.5, 0.0);
        let p = inverse_transform(&s).unwrap();
        for idx in 0..g.len() {
            assert!((p.component(0)[idx] - g.point(idx)[0].cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let g = Grid::periodic(8).unwrap();
        let mut s = SpectralVectorField::zeros(&g);
        s.component_mut(2)[g.mode_index([1, 2, 0])] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            inverse_transform(&s),
            Err(Error::HermitianViolation { .. })
        ));
    }
}
