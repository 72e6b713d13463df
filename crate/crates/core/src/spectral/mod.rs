//! Periodic grid, spectral transforms and Fourier-multiplier operators.

mod fft;
mod field;
mod grid;
mod ops;

pub use field::{
    forward_scalar, forward_transform, inverse_scalar, inverse_transform, PhysicalVectorField,
    SpectralScalarField, SpectralVectorField, HERMITIAN_TOLERANCE,
};
pub(crate) use field::{forward_many, inverse_many};
pub use grid::Grid;
pub use ops::{apply_operator, Operator, OperatorOutput};
pub(crate) use ops::{cross, ik};
