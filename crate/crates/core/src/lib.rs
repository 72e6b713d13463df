//! Pseudo-spectral solver and spectral-analysis toolkit for the incompressible
//! magneto-micropolar system on the periodic box.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`] — lattice, FFTs, Fourier-multiplier operators, Leray projection, dealiasing.
//! * [`lp`] — Littlewood-Paley blocks, Besov and Sobolev norms, Bernstein scaling checks.
//! * [`dynamics`] — right-hand side of the system, the curl system and parameter reductions.
//! * [`integrate`] — the Picard successive-approximation solver and the IMEX integrating-factor stepper.
//! * [`monitors`] — energy ledger, block sup-norms, the frequency-localized blow-up indicator.
//! * [`io`] — run configuration, snapshots, CSV diagnostics, the `run` and `verify` drivers.

pub mod dynamics;
pub mod error;
pub mod integrate;
pub mod io;
pub mod lp;
pub mod monitors;
pub mod spectral;
pub mod sum;

pub use error::{Error, Result};
