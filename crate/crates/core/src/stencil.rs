//! Sixth-order centred periodic finite differences.

use rayon::prelude::*;

use crate::grid::Grid;

/// Formal order of accuracy of every operator in this module.
pub const ORDER: u32 = 6;

const D1: [f64; 3] = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
const D2_CENTER: f64 = -49.0 / 18.0;
const D2: [f64; 3] = [3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0];

#[inline]
fn first_row(src: &[f64], dst: &mut [f64], inv_h: f64) {
    let n = src.len();
    let at = |k: isize| src[k.rem_euclid(n as isize) as usize];
    for i in (0..3).chain(n - 3..n) {
        let k = i as isize;
        dst[i] = inv_h
            * (D1[0] * (at(k + 1) - at(k - 1)) + D1[1] * (at(k + 2) - at(k - 2)) + D1[2] * (at(k + 3) - at(k - 3)));
    }
    for i in 3..n - 3 {
        dst[i] = inv_h
            * (D1[0] * (src[i + 1] - src[i - 1])
                + D1[1] * (src[i + 2] - src[i - 2])
                + D1[2] * (src[i + 3] - src[i - 3]));
    }
}

#[inline]
fn second_row(src: &[f64], dst: &mut [f64], inv_h2: f64) {
    let n = src.len();
    let at = |k: isize| src[k.rem_euclid(n as isize) as usize];
    for i in (0..3).chain(n - 3..n) {
        let k = i as isize;
        dst[i] = inv_h2
            * (D2_CENTER * src[i]
                + D2[0] * (at(k + 1) + at(k - 1))
                + D2[1] * (at(k + 2) + at(k - 2))
                + D2[2] * (at(k + 3) + at(k - 3)));
    }
    for i in 3..n - 3 {
        dst[i] = inv_h2
            * (D2_CENTER * src[i]
                + D2[0] * (src[i + 1] + src[i - 1])
                + D2[1] * (src[i + 2] + src[i - 2])
                + D2[2] * (src[i + 3] + src[i - 3]));
    }
}

/// `∂/∂x1` of `src` into `dst`.
pub fn d1(grid: &Grid, src: &[f64], dst: &mut [f64]) {
    let inv_h = 1.0 / grid.h1();
    dst.par_chunks_mut(grid.n1)
        .zip(src.par_chunks(grid.n1))
        .for_each(|(d, s)| first_row(s, d, inv_h));
}

/// `∂/∂x2` of `src` into `dst`.
pub fn d2(grid: &Grid, src: &[f64], dst: &mut [f64]) {
    let (n1, n2) = (grid.n1, grid.n2);
    let inv_h = 1.0 / grid.h2();
    dst.par_chunks_mut(n1).enumerate().for_each(|(j, d)| {
        let row = |o: isize| {
            let jj = (j as isize + o).rem_euclid(n2 as isize) as usize;
            &src[jj * n1..(jj + 1) * n1]
        };
        let (p1, m1, p2, m2, p3, m3) = (row(1), row(-1), row(2), row(-2), row(3), row(-3));
        for i in 0..n1 {
            d[i] = inv_h * (D1[0] * (p1[i] - m1[i]) + D1[1] * (p2[i] - m2[i]) + D1[2] * (p3[i] - m3[i]));
        }
    });
}

/// `∂²/∂x1²` of `src` into `dst`.
pub fn dd1(grid: &Grid, src: &[f64], dst: &mut [f64]) {
    let inv_h2 = 1.0 / (grid.h1() * grid.h1());
    dst.par_chunks_mut(grid.n1)
        .zip(src.par_chunks(grid.n1))
        .for_each(|(d, s)| second_row(s, d, inv_h2));
}

/// `∂²/∂x2²` of `src` into `dst`.
pub fn dd2(grid: &Grid, src: &[f64], dst: &mut [f64]) {
    let (n1, n2) = (grid.n1, grid.n2);
    let inv_h2 = 1.0 / (grid.h2() * grid.h2());
    dst.par_chunks_mut(n1).enumerate().for_each(|(j, d)| {
        let row = |o: isize| {
            let jj = (j as isize + o).rem_euclid(n2 as isize) as usize;
            &src[jj * n1..(jj + 1) * n1]
        };
        let (c, p1, m1, p2, m2, p3, m3) = (row(0), row(1), row(-1), row(2), row(-2), row(3), row(-3));
        for i in 0..n1 {
            d[i] = inv_h2
                * (D2_CENTER * c[i]
                    + D2[0] * (p1[i] + m1[i])
                    + D2[1] * (p2[i] + m2[i])
                    + D2[2] * (p3[i] + m3[i]));
        }
    });
}

/// Convenience allocating wrappers.
pub fn grad(grid: &Grid, src: &[f64]) -> [Vec<f64>; 2] {
    let mut a = grid.zeros();
    let mut b = grid.zeros();
    d1(grid, src, &mut a);
    d2(grid, src, &mut b);
    [a, b]
}

/// First derivative of a periodic 1D sequence with spacing `h`.
pub fn periodic_derivative(src: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![0.0; src.len()];
    first_row(src, &mut out, 1.0 / h);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn max_err(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn sixth_order_on_trig_data() {
        let mut errs = Vec::new();
        for n in [16usize, 32, 64] {
            let g = Grid::new(n, n, 2.0, -0.5).unwrap();
            let k1 = PI; // one period across L1 = 2
            let f = g.sample(|x, y| (k1 * x).sin() * (2.0 * PI * y).cos());
            let mut out = g.zeros();
            d1(&g, &f, &mut out);
            let e1 = max_err(&out, &g.sample(|x, y| k1 * (k1 * x).cos() * (2.0 * PI * y).cos()));
            d2(&g, &f, &mut out);
            let e2 = max_err(&out, &g.sample(|x, y| -2.0 * PI * (k1 * x).sin() * (2.0 * PI * y).sin()));
            dd1(&g, &f, &mut out);
            let e3 = max_err(&out, &g.sample(|x, y| -k1 * k1 * (k1 * x).sin() * (2.0 * PI * y).cos()));
            dd2(&g, &f, &mut out);
            let e4 = max_err(&out, &g.sample(|x, y| -4.0 * PI * PI * (k1 * x).sin() * (2.0 * PI * y).cos()));
            errs.push([e1, e2, e3, e4]);
        }
        for c in 0..4 {
            let order = (errs[1][c] / errs[2][c]).log2();
            assert!(order > 5.8, "component {c}: order {order}");
        }
    }

    #[test]
    fn constants_have_zero_derivative() {
        let g = Grid::new(16, 16, 1.0, 0.0).unwrap();
        let f = vec![3.5; g.len()];
        let [a, b] = grad(&g, &f);
        assert!(a.iter().chain(&b).all(|x| x.abs() < 1e-12));
    }
}
