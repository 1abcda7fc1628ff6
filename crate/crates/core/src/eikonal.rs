//! Eulerian eikonal function for the right-moving acoustic characteristics.
//!
//! `u` solves `∂t u = -v·∇u + c |∇u|` with `u = 1 - x1` initially. It is
//! stored as `u = (1 - x1) + w` with `w` periodic, so only `w` lives on the
//! grid and `∇u = (w₁ - 1, w₂)`.

use rayon::prelude::*;

use crate::euler::{StageRecord, RK4_NODES, RK4_WEIGHTS};
use crate::filter::SpectralFilter;
use crate::eos::Eos;
use crate::grid::Grid;
use crate::interp::Stencil;
use crate::stencil;

#[derive(Clone, Debug)]
pub struct Eikonal {
    pub grid: Grid,
    /// Periodic part `w` of the eikonal function.
    pub offset: Vec<f64>,
    stage: Vec<f64>,
    rates: [Vec<f64>; 4],
    g1: Vec<f64>,
    g2: Vec<f64>,
}

impl Eikonal {
    /// `u = 1 - x1` at the initial time.
    pub fn new(grid: Grid) -> Self {
        Eikonal {
            grid,
            offset: grid.zeros(),
            stage: grid.zeros(),
            rates: [grid.zeros(), grid.zeros(), grid.zeros(), grid.zeros()],
            g1: grid.zeros(),
            g2: grid.zeros(),
        }
    }

    /// Label value at an unwrapped position.
    pub fn label_at(&self, x1: f64, x2: f64) -> f64 {
        1.0 - x1 + Stencil::new(&self.grid, x1, x2).eval(&self.offset)
    }

    /// Spatial gradient of `u` on the grid.
    pub fn gradient(&self) -> [Vec<f64>; 2] {
        let [mut a, b] = stencil::grad(&self.grid, &self.offset);
        a.iter_mut().for_each(|x| *x -= 1.0);
        [a, b]
    }

    /// Advances `u` through the same RK4 stages the fluid just took.
    pub fn step(&mut self, rec: &StageRecord, filter: Option<&SpectralFilter>) {
        let dt = rec.dt;
        for s in 0..4 {
            if s == 0 {
                self.stage.copy_from_slice(&self.offset);
            } else {
                let a = RK4_NODES[s] * dt;
                let prev = &self.rates[s - 1];
                self.stage
                    .par_iter_mut()
                    .zip(self.offset.par_iter().zip(prev.par_iter()))
                    .for_each(|(o, (b, d))| *o = b + a * d);
            }
            stencil::d1(&self.grid, &self.stage, &mut self.g1);
            stencil::d2(&self.grid, &self.stage, &mut self.g2);
            let (f, c) = (&rec.stages[s].fields, &rec.stages[s].speed);
            let (g1, g2) = (&self.g1, &self.g2);
            self.rates[s].par_iter_mut().enumerate().for_each(|(p, out)| {
                let (a, b) = (g1[p] - 1.0, g2[p]);
                *out = -(f[1][p] * a + f[2][p] * b) + c[p] * (a * a + b * b).sqrt();
            });
        }
        let r = &self.rates;
        self.offset.par_iter_mut().enumerate().for_each(|(p, x)| {
            *x += dt
                * (RK4_WEIGHTS[0] * r[0][p] + RK4_WEIGHTS[1] * r[1][p] + RK4_WEIGHTS[2] * r[2][p] + RK4_WEIGHTS[3] * r[3][p]);
        });
        if let Some(f) = filter {
            f.apply(&mut self.offset);
        }
    }
}

/// Eulerian inverse foliation density `1 / (c |∇u|)` on the grid.
pub fn eulerian_mu(log_density: &[f64], grad_u: &[Vec<f64>; 2], eos: &Eos) -> Vec<f64> {
    log_density
        .par_iter()
        .zip(grad_u[0].par_iter().zip(grad_u[1].par_iter()))
        .map(|(r, (a, b))| 1.0 / (eos.speed(*r) * a.hypot(*b)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::Stepper;
    use crate::grid::FieldState;

    #[test]
    fn background_label_translates_at_unit_speed() {
        let g = Grid::new(32, 16, 2.0, -0.5).unwrap();
        let eos = Eos::polytropic(3.0).unwrap();
        let mut s = FieldState::constant(g);
        let mut stepper = Stepper::new(g, 0.4, 1e-2);
        let mut u = Eikonal::new(g);
        for _ in 0..10 {
            stepper.step(&mut s, &eos, 0.01).unwrap();
            let (rec, filter) = stepper.parts();
            u.step(rec, filter);
        }
        assert!(u.offset.iter().all(|w| (w - 0.1).abs() < 1e-14));
        assert!((u.label_at(0.3, 0.2) - 0.8).abs() < 1e-14);
        let mu = eulerian_mu(&s.log_density, &u.gradient(), &eos);
        assert!(mu.iter().all(|m| (m - 1.0).abs() < 1e-13));
    }
}
