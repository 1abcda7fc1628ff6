//! High-wavenumber exponential filter applied axis by axis.
//!
//! Modes with `|k| <= (2/3) k_max` pass untouched. Above that the
//! amplitude is multiplied by `exp(-strength * s^ORDER)`, where `s` rises
//! from 0 at the cutoff to 1 at the Nyquist mode. The transfer function is
//! real and even, so two real rows are filtered per complex transform.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{num_complex::Complex, Fft, FftPlanner};

use crate::grid::Grid;

const CUTOFF: f64 = 2.0 / 3.0;
const ORDER: i32 = 4;
/// Column pairs transformed per task along `x2`.
const COLUMN_BATCH: usize = 64;

pub struct SpectralFilter {
    grid: Grid,
    axis1: Axis,
    axis2: Axis,
}

struct Axis {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Transfer function including the `1/n` normalisation.
    gain: Vec<f64>,
}

impl Axis {
    fn new(planner: &mut FftPlanner<f64>, n: usize, strength: f64) -> Self {
        let gain = (0..n)
            .map(|m| {
                let k = if m <= n / 2 { m } else { n - m } as f64;
                let eta = k / (n / 2) as f64;
                let damp = if eta <= CUTOFF {
                    1.0
                } else {
                    (-strength * ((eta - CUTOFF) / (1.0 - CUTOFF)).powi(ORDER)).exp()
                };
                damp / n as f64
            })
            .collect();
        Axis { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n), gain }
    }

    /// Filters every length-`n` chunk of `buf`.
    fn apply(&self, buf: &mut [Complex<f64>], scratch: &mut [Complex<f64>]) {
        self.forward.process_with_scratch(buf, scratch);
        for chunk in buf.chunks_mut(self.gain.len()) {
            for (z, g) in chunk.iter_mut().zip(&self.gain) {
                *z *= *g;
            }
        }
        self.inverse.process_with_scratch(buf, scratch);
    }

    fn scratch_len(&self) -> usize {
        self.forward.get_inplace_scratch_len().max(self.inverse.get_inplace_scratch_len())
    }
}

impl SpectralFilter {
    pub fn new(grid: Grid, strength: f64) -> Self {
        let mut planner = FftPlanner::new();
        let axis1 = Axis::new(&mut planner, grid.n1, strength);
        let axis2 = Axis::new(&mut planner, grid.n2, strength);
        SpectralFilter { grid, axis1, axis2 }
    }

    /// Transfer function along `x1` for each FFT bin (without normalisation).
    pub fn gain_x1(&self) -> Vec<f64> {
        self.axis1.gain.iter().map(|g| g * self.grid.n1 as f64).collect()
    }

    /// Filters `f` in place along both axes.
    pub fn apply(&self, f: &mut [f64]) {
        let (n1, n2) = (self.grid.n1, self.grid.n2);
        // x1: pair up rows.
        f.par_chunks_mut(2 * n1).for_each_init(
            || (vec![Complex::default(); n1], vec![Complex::default(); self.axis1.scratch_len()]),
            |(buf, scratch), pair| {
                let (a, b) = pair.split_at_mut(n1);
                for i in 0..n1 {
                    buf[i] = Complex::new(a[i], b[i]);
                }
                self.axis1.apply(buf, scratch);
                for i in 0..n1 {
                    a[i] = buf[i].re;
                    b[i] = buf[i].im;
                }
            },
        );
        // x2: pair up columns into a transposed buffer, one column pair per chunk.
        let mut cols = vec![Complex::default(); n1 / 2 * n2];
        for j in 0..n2 {
            let row = &f[j * n1..(j + 1) * n1];
            for p in 0..n1 / 2 {
                cols[p * n2 + j] = Complex::new(row[2 * p], row[2 * p + 1]);
            }
        }
        cols.par_chunks_mut(n2 * COLUMN_BATCH).for_each_init(
            || vec![Complex::default(); self.axis2.scratch_len()],
            |scratch, col| self.axis2.apply(col, scratch),
        );
        for j in 0..n2 {
            let row = &mut f[j * n1..(j + 1) * n1];
            for p in 0..n1 / 2 {
                let z = cols[p * n2 + j];
                row[2 * p] = z.re;
                row[2 * p + 1] = z.im;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn resolved_modes_pass_and_nyquist_is_damped() {
        let g = Grid::new(32, 16, 1.0, 0.0).unwrap();
        let filter = SpectralFilter::new(g, 0.5);
        let smooth = g.sample(|x, y| (2.0 * PI * 3.0 * x).sin() + (2.0 * PI * 2.0 * y).cos());
        let mut f = smooth.clone();
        filter.apply(&mut f);
        assert!(f.iter().zip(&smooth).all(|(a, b)| (a - b).abs() < 1e-13));

        let zigzag = g.sample(|x, _| (PI * 32.0 * x).cos());
        let mut z = zigzag.clone();
        filter.apply(&mut z);
        for (a, b) in z.iter().zip(&zigzag) {
            assert!((a - (-0.5f64).exp() * b).abs() < 1e-12);
        }
    }
}
