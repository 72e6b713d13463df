//! Cubic 3D complex FFT built from rustfft line transforms.

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Unnormalized n³ transform in row-major `(i, j, l)` order, `l` fastest.
pub(crate) struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft(n, FftDirection::Forward),
            inverse: planner.plan_fft(n, FftDirection::Inverse),
        }
    }

    pub fn process(&self, data: &mut [Complex64], direction: Direction) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "buffer must hold n^3 values");
        let fft = match direction {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        let zero = Complex64::new(0.0, 0.0);
        let mut scratch = vec![zero; fft.get_inplace_scratch_len()];
        let plane = n * n;
        let mut buf = vec![zero; plane];

        // l axis: contiguous lines
        fft.process_with_scratch(data, &mut scratch);

        // j axis: transpose each i-slab
        for i in 0..n {
            let slab = &mut data[i * plane..(i + 1) * plane];
            for j in 0..n {
                for l in 0..n {
                    buf[l * n + j] = slab[j * n + l];
                }
            }
            fft.process_with_scratch(&mut buf, &mut scratch);
            for j in 0..n {
                for l in 0..n {
                    slab[j * n + l] = buf[l * n + j];
                }
            }
        }

        // i axis: gather one j-plane at a time
        for j in 0..n {
            for i in 0..n {
                for l in 0..n {
                    buf[l * n + i] = data[i * plane + j * n + l];
                }
            }
            fft.process_with_scratch(&mut buf, &mut scratch);
            for i in 0..n {
                for l in 0..n {
                    data[i * plane + j * n + l] = buf[l * n + i];
                }
            }
        }
    }
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}
