use super::fft::{Direction, Fft3};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

/// Periodic cubic lattice with `n` points per axis on a box of side `box_length`.
///
/// Axis index `i` carries the signed lattice index `i` for `i <= n/2` and
/// `i - n` otherwise, so the resolved set is `{-n/2+1, ..., n/2}`. Physical
/// wavenumbers are those indices scaled by `2π / box_length`.
///
/// Cloning is cheap: the FFT plans and per-mode tables are shared.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    n: usize,
    box_length: f64,
    scale: f64,
    fft: Fft3,
    /// Lattice wavenumber per mode.
    k: Vec<[f64; 3]>,
    /// Wavenumber used by differential operators (Nyquist plane set to 0).
    kd: Vec<[f64; 3]>,
    /// |k| from the lattice wavenumber.
    kmag: Vec<f64>,
    /// |kd|².
    kd2: Vec<f64>,
}

impl Grid {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "n must be an even integer >= 8, got {n}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        let scale = 2.0 * PI / box_length;
        let axis: Vec<f64> = (0..n).map(|i| signed_index(i, n) as f64 * scale).collect();
        let axis_d: Vec<f64> = (0..n)
            .map(|i| if i == n / 2 { 0.0 } else { axis[i] })
            .collect();
        let total = n * n * n;
        let mut k = Vec::with_capacity(total);
        let mut kd = Vec::with_capacity(total);
        let mut kmag = Vec::with_capacity(total);
        let mut kd2 = Vec::with_capacity(total);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let kv = [axis[i], axis[j], axis[l]];
                    let kdv = [axis_d[i], axis_d[j], axis_d[l]];
                    kmag.push((kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]).sqrt());
                    kd2.push(kdv[0] * kdv[0] + kdv[1] * kdv[1] + kdv[2] * kdv[2]);
                    k.push(kv);
                    kd.push(kdv);
                }
            }
        }
        Ok(Self {
            inner: Arc::new(GridInner {
                n,
                box_length,
                scale,
                fft: Fft3::new(n),
                k,
                kd,
                kmag,
                kd2,
            }),
        })
    }

    /// Grid on the 2π-periodic box.
    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn box_length(&self) -> f64 {
        self.inner.box_length
    }

    /// Fundamental wavenumber `2π / box_length`.
    pub fn wave_scale(&self) -> f64 {
        self.inner.scale
    }

    /// Number of lattice points (and of Fourier modes), `n³`.
    pub fn len(&self) -> usize {
        self.inner.n.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.inner.box_length / self.inner.n as f64
    }

    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        let n = self.inner.n;
        (i * n + j) * n + l
    }

    /// Row-major position of the mode with signed lattice indices `m`.
    pub fn mode_index(&self, m: [i64; 3]) -> usize {
        let n = self.inner.n as i64;
        let w = |v: i64| v.rem_euclid(n) as usize;
        self.index(w(m[0]), w(m[1]), w(m[2]))
    }

    /// Signed lattice indices of a mode.
    pub fn signed_mode(&self, idx: usize) -> [i64; 3] {
        let n = self.inner.n;
        [
            signed_index(idx / (n * n), n),
            signed_index((idx / n) % n, n),
            signed_index(idx % n, n),
        ]
    }

    /// Position of the mode `-k`.
    pub fn mirror(&self, idx: usize) -> usize {
        let n = self.inner.n;
        let (i, j, l) = (idx / (n * n), (idx / n) % n, idx % n);
        self.index((n - i) % n, (n - j) % n, (n - l) % n)
    }

    pub fn wavenumber(&self, idx: usize) -> [f64; 3] {
        self.inner.k[idx]
    }

    /// Wavenumber seen by differential operators; zero on the Nyquist plane.
    pub fn deriv_wavenumber(&self, idx: usize) -> [f64; 3] {
        self.inner.kd[idx]
    }

    pub fn k_magnitude(&self, idx: usize) -> f64 {
        self.inner.kmag[idx]
    }

    pub fn deriv_k2(&self, idx: usize) -> f64 {
        self.inner.kd2[idx]
    }

    /// Largest resolvable |k|∞ = (n/2)·2π/L.
    pub fn max_resolvable_kinf(&self) -> f64 {
        (self.inner.n / 2) as f64 * self.inner.scale
    }

    /// Largest Euclidean |k| on the lattice (the cube corner).
    pub fn max_k_magnitude(&self) -> f64 {
        3f64.sqrt() * self.max_resolvable_kinf()
    }

    /// Physical coordinates of a lattice point.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let n = self.inner.n;
        let h = self.spacing();
        [
            (idx / (n * n)) as f64 * h,
            ((idx / n) % n) as f64 * h,
            (idx % n) as f64 * h,
        ]
    }

    /// Largest axis index magnitude kept by the 2/3 rule, strictly below n/3.
    pub fn dealias_cutoff(&self) -> i64 {
        ((self.inner.n - 1) / 3) as i64
    }

    pub fn is_dealiased_mode(&self, idx: usize) -> bool {
        let c = self.dealias_cutoff();
        self.signed_mode(idx).iter().all(|m| m.abs() <= c)
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub(crate) fn fft(&self, data: &mut [Complex64], direction: Direction) {
        self.inner.fft.process(data, direction)
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n == other.inner.n
                && self.inner.box_length.to_bits() == other.inner.box_length.to_bits())
    }
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.inner.n)
            .field("box_length", &self.inner.box_length)
            .finish()
    }
}

fn signed_index(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}
