//! 3D complex FFTs on an n³ periodic lattice (n a power of two) with cached
//! plans, plus the discrete frequency lattice ξ ∈ (2π/L)ℤ³ in FFT order.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Forward/inverse 3D transforms for a fixed cube size.
pub struct Fft3 {
    pub n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "grid size must be a power of two");
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Fft3 {
            n,
            forward,
            inverse,
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    /// In-place forward DFT (no normalization), x-fastest layout.
    pub fn forward(&mut self, data: &mut [Complex64]) {
        self.transform(data, true);
    }

    /// In-place inverse DFT including the 1/n³ normalization.
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        self.transform(data, false);
        let scale = 1.0 / (self.n * self.n * self.n) as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    fn transform(&mut self, data: &mut [Complex64], fwd: bool) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n);
        let plan = if fwd { &self.forward } else { &self.inverse };
        // x lines are contiguous
        for line in data.chunks_exact_mut(n) {
            plan.process_with_scratch(line, &mut self.scratch);
        }
        // y and z lines via gather/scatter
        let mut buf = vec![Complex64::default(); n];
        for iz in 0..n {
            for ix in 0..n {
                for (iy, b) in buf.iter_mut().enumerate() {
                    *b = data[idx(n, ix, iy, iz)];
                }
                plan.process_with_scratch(&mut buf, &mut self.scratch);
                for (iy, b) in buf.iter().enumerate() {
                    data[idx(n, ix, iy, iz)] = *b;
                }
            }
        }
        for iy in 0..n {
            for ix in 0..n {
                for (iz, b) in buf.iter_mut().enumerate() {
                    *b = data[idx(n, ix, iy, iz)];
                }
                plan.process_with_scratch(&mut buf, &mut self.scratch);
                for (iz, b) in buf.iter().enumerate() {
                    data[idx(n, ix, iy, iz)] = *b;
                }
            }
        }
    }
}

/// Row-major x-fastest flat index.
#[inline]
pub fn idx(n: usize, ix: usize, iy: usize, iz: usize) -> usize {
    (iz * n + iy) * n + ix
}

/// Signed lattice harmonic for FFT bin i of n (upper half maps to negatives).
#[inline]
pub fn harmonic(n: usize, i: usize) -> i64 {
    if i <= n / 2 - 1 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Frequency component ξ = 2π k / L for FFT bin i.
#[inline]
pub fn freq(n: usize, length: f64, i: usize) -> f64 {
    2.0 * std::f64::consts::PI * harmonic(n, i) as f64 / length
}

/// Bin of the mirrored frequency −ξ.
#[inline]
pub fn mirror_bin(n: usize, i: usize) -> usize {
    if i == 0 {
        0
    } else {
        n - i
    }
}
