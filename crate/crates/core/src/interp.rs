//! Tensor-product cubic Lagrange interpolation on the periodic grid.

use crate::grid::Grid;

/// Formal order of accuracy of the interpolant.
pub const ORDER: u32 = 4;

/// Reusable 4×4 interpolation stencil at one point.
#[derive(Clone, Copy, Debug)]
pub struct Stencil {
    n1: usize,
    rows: [usize; 4],
    cols: [usize; 4],
    w1: [f64; 4],
    w2: [f64; 4],
}

#[inline]
fn weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

#[inline]
fn axis(s: f64, n: usize) -> ([usize; 4], [f64; 4]) {
    let base = s.floor();
    let t = s - base;
    let b = base as i64;
    let n = n as i64;
    let idx = [
        (b - 1).rem_euclid(n) as usize,
        b.rem_euclid(n) as usize,
        (b + 1).rem_euclid(n) as usize,
        (b + 2).rem_euclid(n) as usize,
    ];
    (idx, weights(t))
}

impl Stencil {
    /// Stencil at an unwrapped position; both coordinates are reduced
    /// modulo the periods.
    #[inline]
    pub fn new(grid: &Grid, x1: f64, x2: f64) -> Self {
        let (cols, w1) = axis((x1 - grid.x1_offset) / grid.h1(), grid.n1);
        let (rows, w2) = axis(x2 / grid.h2(), grid.n2);
        Stencil { n1: grid.n1, rows, cols, w1, w2 }
    }

    #[inline]
    pub fn eval(&self, f: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (r, wr) in self.rows.iter().zip(&self.w2) {
            let row = &f[r * self.n1..];
            let mut s = 0.0;
            for (c, wc) in self.cols.iter().zip(&self.w1) {
                s += wc * row[*c];
            }
            acc += wr * s;
        }
        acc
    }
}

impl Stencil {
    /// Interpolates `N` interleaved fields at once.
    #[inline]
    pub fn eval_packed<const N: usize>(&self, f: &[[f64; N]]) -> [f64; N] {
        let mut acc = [0.0; N];
        for (r, wr) in self.rows.iter().zip(&self.w2) {
            let row = &f[r * self.n1..];
            for (c, wc) in self.cols.iter().zip(&self.w1) {
                let w = wr * wc;
                for (a, v) in acc.iter_mut().zip(&row[*c]) {
                    *a += w * v;
                }
            }
        }
        acc
    }
}

pub fn interpolate(grid: &Grid, f: &[f64], x1: f64, x2: f64) -> f64 {
    Stencil::new(grid, x1, x2).eval(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exact_on_nodes_and_cubics() {
        let g = Grid::new(16, 16, 2.0, -0.5).unwrap();
        let f = g.sample(|x, y| (PI * x).sin() + (2.0 * PI * y).cos());
        for (i, j) in [(0, 0), (5, 7), (15, 15)] {
            let got = interpolate(&g, &f, g.x1(i), g.x2(j));
            assert!((got - f[g.index(i, j)]).abs() < 1e-14);
        }
        // Periodic images give the same value.
        let a = interpolate(&g, &f, 0.123, 0.456);
        let b = interpolate(&g, &f, 0.123 + 6.0, 0.456 - 3.0);
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn fourth_order_convergence() {
        let mut errs = Vec::new();
        for n in [32usize, 64, 128] {
            let g = Grid::new(n, n, 1.0, 0.0).unwrap();
            let f = g.sample(|x, y| (2.0 * PI * x).sin() * (2.0 * PI * y).cos());
            let mut e = 0.0f64;
            for k in 0..97 {
                let (x, y) = (0.0137 + k as f64 * 0.0101, 0.71 * k as f64 / 97.0 + 0.003);
                let exact = (2.0 * PI * x).sin() * (2.0 * PI * y).cos();
                e = e.max((interpolate(&g, &f, x, y) - exact).abs());
            }
            errs.push(e);
        }
        let order = (errs[1] / errs[2]).log2();
        assert!(order > 3.7, "order {order}");
    }
}
