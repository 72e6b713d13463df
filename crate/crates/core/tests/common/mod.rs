#![allow(dead_code)]

use mmp_core::dynamics::{MMPParams, MMPState};
use mmp_core::io::presets::random_field;
use mmp_core::spectral::{Grid, SpectralVectorField};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

pub fn params() -> MMPParams {
    MMPParams::new(0.05, 0.02, 0.03, 0.04, 0.06).unwrap()
}

/// Solenoidal `u`, `b` and free `ω`, band-limited to the dealiased set.
pub fn random_state(grid: &Grid, seed: u64, amp: f64) -> MMPState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = grid.dealias_cutoff();
    MMPState {
        u: random_field(grid, &mut rng, band, true).scaled(amp),
        omega: random_field(grid, &mut rng, band, false).scaled(amp),
        b: random_field(grid, &mut rng, band, true).scaled(amp),
        time: 0.0,
    }
}

pub fn max_diff(a: &MMPState, b: &MMPState) -> f64 {
    a.fields()
        .iter()
        .zip(b.fields())
        .map(|(x, y)| x.max_abs_diff(y).unwrap())
        .fold(0.0, f64::max)
}

/// `f(x) = Σ_k f̂_k e^{ik·x}` summed directly at every grid point.
pub fn direct_inverse_dft(f: &SpectralVectorField) -> [Vec<f64>; 3] {
    let g = f.grid();
    let s = g.wave_scale();
    let modes: Vec<([f64; 3], [Complex64; 3])> = (0..g.len())
        .map(|idx| (g.signed_mode(idx).map(|m| m as f64 * s), f.mode(idx)))
        .filter(|(_, v)| v.iter().any(|c| c.norm() > 0.0))
        .collect();
    let mut out: [Vec<f64>; 3] = Default::default();
    for x_idx in 0..g.len() {
        let x = g.point(x_idx);
        let mut acc = [Complex64::new(0.0, 0.0); 3];
        for (k, v) in &modes {
            let phase = Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
            for c in 0..3 {
                acc[c] += v[c] * phase;
            }
        }
        for c in 0..3 {
            out[c].push(acc[c].re);
        }
    }
    out
}

/// Exact Fourier coefficients of the product `f_a·g_b` on the modes of `g`
/// inside the dealiased set, summed over all pairs of input modes.
pub fn convolution(f: &SpectralVectorField, a: usize, g: &SpectralVectorField, b: usize) -> Vec<Complex64> {
    let grid = f.grid();
    let n = grid.n() as i64;
    let fa: Vec<([i64; 3], Complex64)> = (0..grid.len())
        .map(|i| (grid.signed_mode(i), f.component(a)[i]))
        .filter(|(_, v)| v.norm() > 0.0)
        .collect();
    let gb: Vec<([i64; 3], Complex64)> = (0..grid.len())
        .map(|i| (grid.signed_mode(i), g.component(b)[i]))
        .filter(|(_, v)| v.norm() > 0.0)
        .collect();
    let cut = grid.dealias_cutoff();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (p, x) in &fa {
        for (q, y) in &gb {
            let k = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
            if k.iter().all(|c| c.abs() <= cut) {
                debug_assert!(k.iter().all(|c| c.abs() < n / 2));
                out[grid.mode_index(k)] += x * y;
            }
        }
    }
    out
}

/// Minimal pseudo-spectral Navier-Stokes solver in rotational form with its
/// own FFT plumbing, 2/3 truncation and integrating-factor Heun steps.
pub struct NsOracle {
    n: usize,
    mu: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    k: Vec<[f64; 3]>,
    keep: Vec<bool>,
}

impl NsOracle {
    pub fn new(n: usize, mu: f64) -> Self {
        let mut planner = FftPlanner::new();
        let freq = |i: usize| if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
        let cut = ((n - 1) / 3) as f64;
        let mut k = Vec::with_capacity(n * n * n);
        let mut keep = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let m = [freq(i), freq(j), freq(l)];
                    keep.push(m.iter().all(|c| c.abs() <= cut));
                    k.push(m);
                }
            }
        }
        Self {
            n,
            mu,
            fwd: planner.plan_fft(n, FftDirection::Forward),
            inv: planner.plan_fft(n, FftDirection::Inverse),
            k,
            keep,
        }
    }

    pub fn index(&self, m: [i64; 3]) -> usize {
        let n = self.n as i64;
        let w = |c: i64| c.rem_euclid(n) as usize;
        (w(m[0]) * self.n + w(m[1])) * self.n + w(m[2])
    }

    fn fft3(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        for line in data.chunks_mut(n) {
            fft.process(line);
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for l in 0..n {
                for j in 0..n {
                    buf[j] = data[(i * n + j) * n + l];
                }
                fft.process(&mut buf);
                for j in 0..n {
                    data[(i * n + j) * n + l] = buf[j];
                }
            }
        }
        for j in 0..n {
            for l in 0..n {
                for i in 0..n {
                    buf[i] = data[(i * n + j) * n + l];
                }
                fft.process(&mut buf);
                for i in 0..n {
                    data[(i * n + j) * n + l] = buf[i];
                }
            }
        }
    }

    fn to_physical(&self, f: &[Complex64]) -> Vec<f64> {
        let mut d = f.to_vec();
        self.fft3(&mut d, &self.inv);
        d.iter().map(|c| c.re).collect()
    }

    fn to_spectral(&self, f: &[f64]) -> Vec<Complex64> {
        let mut d: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fft3(&mut d, &self.fwd);
        let norm = (self.n * self.n * self.n) as f64;
        d.iter().map(|c| c / norm).collect()
    }

    /// `P(u × ∇×u)`, truncated.
    fn nonlinear(&self, u: &[Vec<Complex64>; 3]) -> [Vec<Complex64>; 3] {
        let i = Complex64::new(0.0, 1.0);
        let len = u[0].len();
        let mut w: [Vec<Complex64>; 3] = Default::default();
        for c in 0..3 {
            w[c] = (0..len)
                .map(|x| {
                    let k = self.k[x];
                    let (a, b) = ((c + 1) % 3, (c + 2) % 3);
                    i * (k[a] * u[b][x] - k[b] * u[a][x])
                })
                .collect();
        }
        let up: Vec<Vec<f64>> = u.iter().map(|f| self.to_physical(f)).collect();
        let wp: Vec<Vec<f64>> = w.iter().map(|f| self.to_physical(f)).collect();
        let mut out: [Vec<Complex64>; 3] = Default::default();
        for c in 0..3 {
            let (a, b) = ((c + 1) % 3, (c + 2) % 3);
            let prod: Vec<f64> = (0..len).map(|x| up[a][x] * wp[b][x] - up[b][x] * wp[a][x]).collect();
            out[c] = self.to_spectral(&prod);
        }
        for x in 0..len {
            let k = self.k[x];
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if !self.keep[x] || k2 == 0.0 {
                for f in out.iter_mut() {
                    f[x] = Complex64::new(0.0, 0.0);
                }
                continue;
            }
            let kn = (k[0] * out[0][x] + k[1] * out[1][x] + k[2] * out[2][x]) / k2;
            for c in 0..3 {
                out[c][x] -= kn * k[c];
            }
        }
        out
    }

    /// One integrating-factor Heun step of size `dt` on the 2π box.
    pub fn step(&self, u: &[Vec<Complex64>; 3], dt: f64) -> [Vec<Complex64>; 3] {
        let len = u[0].len();
        let e: Vec<f64> = self
            .k
            .iter()
            .map(|k| (-self.mu * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * dt).exp())
            .collect();
        let n0 = self.nonlinear(u);
        let pred: [Vec<Complex64>; 3] =
            std::array::from_fn(|c| (0..len).map(|x| e[x] * (u[c][x] + dt * n0[c][x])).collect());
        let n1 = self.nonlinear(&pred);
        std::array::from_fn(|c| {
            (0..len)
                .map(|x| e[x] * (u[c][x] + 0.5 * dt * n0[c][x]) + 0.5 * dt * n1[c][x])
                .collect()
        })
    }

    /// Copies a library field into the oracle's layout.
    pub fn import(&self, f: &SpectralVectorField) -> [Vec<Complex64>; 3] {
        let g = f.grid();
        assert_eq!(g.n(), self.n);
        assert!((g.box_length() - 2.0 * PI).abs() < 1e-15);
        let mut out: [Vec<Complex64>; 3] = std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); g.len()]);
        for idx in 0..g.len() {
            let o = self.index(g.signed_mode(idx));
            let v = f.mode(idx);
            for c in 0..3 {
                out[c][o] = v[c];
            }
        }
        out
    }

    /// Largest coefficient difference against a library field.
    pub fn max_diff(&self, u: &[Vec<Complex64>; 3], f: &SpectralVectorField) -> f64 {
        let g = f.grid();
        let mut worst: f64 = 0.0;
        for idx in 0..g.len() {
            let o = self.index(g.signed_mode(idx));
            let v = f.mode(idx);
            for c in 0..3 {
                worst = worst.max((u[c][o] - v[c]).norm());
            }
        }
        worst
    }
}
