//! Doubly periodic Cartesian grid and the fluid state stored on it.

use crate::error::{Error, Result};

/// Uniform cell-centred grid on `[x1_offset, x1_offset + l1) × [0, l2)`.
/// Values are stored row-major with `x1` fastest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub n1: usize,
    pub n2: usize,
    pub l1: f64,
    pub l2: f64,
    pub x1_offset: f64,
}

impl Grid {
    /// The transverse period is fixed to one.
    pub fn new(n1: usize, n2: usize, l1: f64, x1_offset: f64) -> Result<Self> {
        for (name, n) in [("n1", n1), ("n2", n2)] {
            if n < 16 || n % 2 != 0 {
                return Err(Error::Config(format!("grid.{name} must be even and at least 16, got {n}")));
            }
        }
        if !(l1.is_finite() && l1 > 0.0) || !x1_offset.is_finite() {
            return Err(Error::Config(format!("grid.L1 must be positive, got {l1}")));
        }
        Ok(Grid { n1, n2, l1, l2: 1.0, x1_offset })
    }

    #[inline]
    pub fn h1(&self) -> f64 {
        self.l1 / self.n1 as f64
    }

    #[inline]
    pub fn h2(&self) -> f64 {
        self.l2 / self.n2 as f64
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n1 + i
    }

    #[inline]
    pub fn x1(&self, i: usize) -> f64 {
        self.x1_offset + i as f64 * self.h1()
    }

    #[inline]
    pub fn x2(&self, j: usize) -> f64 {
        j as f64 * self.h2()
    }

    /// Integer image shift `k` such that `x1 - k * l1` lies in the window.
    #[inline]
    pub fn image_of(&self, x1: f64) -> f64 {
        ((x1 - self.x1_offset) / self.l1).floor()
    }

    pub fn zeros(&self) -> Vec<f64> {
        vec![0.0; self.len()]
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = self.zeros();
        for j in 0..self.n2 {
            for i in 0..self.n1 {
                out[self.index(i, j)] = f(self.x1(i), self.x2(j));
            }
        }
        out
    }
}

/// Log-density and velocity on the grid at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub grid: Grid,
    pub t: f64,
    pub log_density: Vec<f64>,
    pub vel1: Vec<f64>,
    pub vel2: Vec<f64>,
}

impl FieldState {
    pub fn constant(grid: Grid) -> Self {
        FieldState { grid, t: 0.0, log_density: grid.zeros(), vel1: grid.zeros(), vel2: grid.zeros() }
    }

    pub fn components(&self) -> [&[f64]; 3] {
        [&self.log_density, &self.vel1, &self.vel2]
    }

    pub fn components_mut(&mut self) -> [&mut Vec<f64>; 3] {
        [&mut self.log_density, &mut self.vel1, &mut self.vel2]
    }

    pub fn max_abs_log_density(&self) -> f64 {
        max_abs(&self.log_density)
    }

    pub fn ensure_finite(&self) -> Result<()> {
        for (name, f) in [("log_density", &self.log_density), ("vel1", &self.vel1), ("vel2", &self.vel2)] {
            if f.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(name));
            }
        }
        Ok(())
    }
}

pub fn max_abs(f: &[f64]) -> f64 {
    f.iter().fold(0.0, |m, x| m.max(x.abs()))
}
