//! Differential operators as Fourier multipliers, Leray projection and 2/3 dealiasing.
//!
//! First-order multipliers use the operator wavenumber, which vanishes on the
//! Nyquist plane so that derivatives of real fields stay real. The Laplacian
//! uses the same wavenumber, keeping `div ∘ grad = Δ` exact mode by mode.
//! `Λ^s` uses the true lattice magnitude.

use super::field::{SpectralScalarField, SpectralVectorField};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Operators accepted by [`apply_operator`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Operator {
    /// Gradient of one component of the input, `i k f̂_c`.
    GradientOfComponent(usize),
    Divergence,
    Curl,
    Laplacian,
    /// Bessel potential `(1 + |k|²)^{s/2}`.
    LambdaS(f64),
}

/// Result of [`apply_operator`]: the divergence is scalar, everything else a vector.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorOutput {
    Scalar(SpectralScalarField),
    Vector(SpectralVectorField),
}

impl OperatorOutput {
    pub fn into_vector(self) -> Option<SpectralVectorField> {
        match self {
            Self::Vector(v) => Some(v),
            Self::Scalar(_) => None,
        }
    }

    pub fn into_scalar(self) -> Option<SpectralScalarField> {
        match self {
            Self::Scalar(s) => Some(s),
            Self::Vector(_) => None,
        }
    }
}

pub fn apply_operator(f: &SpectralVectorField, op: Operator) -> OperatorOutput {
    match op {
        Operator::GradientOfComponent(c) => OperatorOutput::Vector(f.grad_component(c)),
        Operator::Divergence => OperatorOutput::Scalar(f.divergence()),
        Operator::Curl => OperatorOutput::Vector(f.curl()),
        Operator::Laplacian => OperatorOutput::Vector(f.laplacian()),
        Operator::LambdaS(s) => OperatorOutput::Vector(f.lambda_s(s)),
    }
}

pub(crate) fn cross(a: [Complex64; 3], b: [Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn ik(k: [f64; 3]) -> [Complex64; 3] {
    [I * k[0], I * k[1], I * k[2]]
}

impl SpectralVectorField {
    pub fn grad_component(&self, c: usize) -> SpectralVectorField {
        let grid = self.grid().clone();
        let src = self.component(c);
        SpectralVectorField::from_mode_fn(&grid, |idx| {
            let k = grid.deriv_wavenumber(idx);
            let v = src[idx];
            [I * k[0] * v, I * k[1] * v, I * k[2] * v]
        })
    }

    pub fn divergence(&self) -> SpectralScalarField {
        let grid = self.grid().clone();
        let mut out = SpectralScalarField::zeros(&grid);
        for (idx, o) in out.coeffs_mut().iter_mut().enumerate() {
            let k = grid.deriv_wavenumber(idx);
            let v = self.mode(idx);
            *o = I * (k[0] * v[0] + k[1] * v[1] + k[2] * v[2]);
        }
        out
    }

    pub fn curl(&self) -> SpectralVectorField {
        let grid = self.grid().clone();
        self.map_modes(|idx, v| cross(ik(grid.deriv_wavenumber(idx)), v))
    }

    pub fn laplacian(&self) -> SpectralVectorField {
        let grid = self.grid().clone();
        self.scale_modes(|idx| -grid.deriv_k2(idx))
    }

    pub fn lambda_s(&self, s: f64) -> SpectralVectorField {
        let grid = self.grid().clone();
        self.scale_modes(|idx| {
            let k = grid.k_magnitude(idx);
            (1.0 + k * k).powf(0.5 * s)
        })
    }

    /// Largest per-mode divergence |k·f̂(k)|.
    pub fn divergence_defect(&self) -> f64 {
        self.divergence().max_abs()
    }

    /// Orthogonal projection onto divergence-free fields; the mean mode is kept.
    pub fn leray_project(&self) -> SpectralVectorField {
        let mut out = self.clone();
        out.leray_project_in_place();
        out
    }

    pub fn leray_project_in_place(&mut self) {
        let grid = self.grid().clone();
        self.map_modes_in_place(|idx, v| {
            let k2 = grid.deriv_k2(idx);
            if k2 == 0.0 {
                return v;
            }
            let k = grid.deriv_wavenumber(idx);
            let p = (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]) / k2;
            [v[0] - p * k[0], v[1] - p * k[1], v[2] - p * k[2]]
        });
    }

    /// 2/3 rule: zero every mode with an axis index above n/3 in magnitude.
    pub fn dealias(&self) -> SpectralVectorField {
        let mut out = self.clone();
        out.dealias_in_place();
        out
    }

    pub fn dealias_in_place(&mut self) {
        let grid = self.grid().clone();
        let zero = Complex64::new(0.0, 0.0);
        self.map_modes_in_place(|idx, v| {
            if grid.is_dealiased_mode(idx) {
                v
            } else {
                [zero; 3]
            }
        });
    }
}

impl SpectralScalarField {
    pub fn gradient(&self) -> SpectralVectorField {
        let grid = self.grid().clone();
        let src = self.coeffs();
        SpectralVectorField::from_mode_fn(&grid, |idx| {
            let k = grid.deriv_wavenumber(idx);
            let v = src[idx];
            [I * k[0] * v, I * k[1] * v, I * k[2] * v]
        })
    }
}
