//! Compressible Euler equations in log-density form and their RK4 integrator.
//!
//! ```text
//! ∂t r  = -v·∇r - div v
//! ∂t vⁱ = -v·∇vⁱ - c(r)² ∂ᵢ r
//! ```

use rayon::prelude::*;

use crate::eos::{Eos, LOG_DENSITY_BOUND};
use crate::error::{Error, Result};
use crate::filter::SpectralFilter;
use crate::grid::{max_abs, FieldState, Grid};
use crate::stencil;

/// Per-component data in `(log_density, vel1, vel2)` order.
pub type Triple = [Vec<f64>; 3];

/// Regime guard: leaving it means the perturbative picture no longer applies.
pub const MAX_LOG_DENSITY: f64 = 0.5;
pub const MAX_CHAR_SPEED: f64 = 3.0;

fn triple(grid: &Grid) -> Triple {
    [grid.zeros(), grid.zeros(), grid.zeros()]
}

/// Cartesian gradients of the three state components.
#[derive(Clone, Debug)]
pub struct Gradients {
    pub d1: Triple,
    pub d2: Triple,
}

impl Gradients {
    pub fn new(grid: &Grid) -> Self {
        Gradients { d1: triple(grid), d2: triple(grid) }
    }

    pub fn compute(&mut self, grid: &Grid, comps: [&[f64]; 3]) {
        for (k, f) in comps.iter().enumerate() {
            stencil::d1(grid, f, &mut self.d1[k]);
            stencil::d2(grid, f, &mut self.d2[k]);
        }
    }
}

fn check_domain(state: &FieldState) -> Result<()> {
    let m = state.max_abs_log_density();
    if !m.is_finite() {
        return Err(Error::NonFinite("log_density"));
    }
    if m > LOG_DENSITY_BOUND {
        return Err(Error::EosDomain(m));
    }
    Ok(())
}

/// Time derivatives from gradients already computed for `comps`; also
/// stores the sound speed.
fn fill_rates(eos: &Eos, grid: &Grid, comps: [&[f64]; 3], g: &Gradients, rates: &mut Triple, speed: &mut [f64]) {
    let n1 = grid.n1;
    let [r, v1, v2] = comps;
    let [out_r, out_v1, out_v2] = rates;
    out_r
        .par_chunks_mut(n1)
        .zip(out_v1.par_chunks_mut(n1))
        .zip(out_v2.par_chunks_mut(n1))
        .zip(speed.par_chunks_mut(n1))
        .enumerate()
        .for_each(|(j, (((orow, o1), o2), cs))| {
            let base = j * n1;
            for i in 0..n1 {
                let p = base + i;
                let (a, b) = (v1[p], v2[p]);
                let c = eos.speed(r[p]);
                cs[i] = c;
                let c2 = c * c;
                orow[i] = -(a * g.d1[0][p] + b * g.d2[0][p]) - (g.d1[1][p] + g.d2[2][p]);
                o1[i] = -(a * g.d1[1][p] + b * g.d2[1][p]) - c2 * g.d1[0][p];
                o2[i] = -(a * g.d1[2][p] + b * g.d2[2][p]) - c2 * g.d2[0][p];
            }
        });
}

/// Pure right-hand side of the Euler system.
pub fn euler_rhs(state: &FieldState, eos: &Eos) -> Result<Triple> {
    check_domain(state)?;
    let grid = &state.grid;
    let mut g = Gradients::new(grid);
    g.compute(grid, state.components());
    let mut rates = triple(grid);
    fill_rates(eos, grid, state.components(), &g, &mut rates, &mut grid.zeros());
    Ok(rates)
}

/// Largest characteristic speed `|v| + c` on the grid.
pub fn max_char_speed(state: &FieldState, eos: &Eos) -> f64 {
    let g = &state.grid;
    (0..g.n2)
        .into_par_iter()
        .map(|j| {
            let mut m = 0.0f64;
            for i in 0..g.n1 {
                let p = g.index(i, j);
                let speed = (state.vel1[p].powi(2) + state.vel2[p].powi(2)).sqrt() + eos.speed(state.log_density[p]);
                m = m.max(speed);
            }
            m
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max)
}

/// Fails once the state leaves the near-constant regime.
pub fn regime_check(state: &FieldState, eos: &Eos) -> Result<()> {
    state.ensure_finite()?;
    let r = state.max_abs_log_density();
    if r > MAX_LOG_DENSITY {
        return Err(Error::RegimeExit { t: state.t, reason: format!("max |log-density| = {r:.4} > {MAX_LOG_DENSITY}") });
    }
    let lam = max_char_speed(state, eos);
    if lam > MAX_CHAR_SPEED {
        return Err(Error::RegimeExit { t: state.t, reason: format!("max characteristic speed {lam:.4} > {MAX_CHAR_SPEED}") });
    }
    Ok(())
}

/// Inputs and slopes of one RK4 stage.
#[derive(Clone, Debug)]
pub struct Stage {
    pub fields: Triple,
    pub rates: Triple,
    pub grads: Gradients,
    /// Sound speed of `fields`.
    pub speed: Vec<f64>,
}

impl Stage {
    fn zeros(grid: &Grid) -> Self {
        Stage { fields: triple(grid), rates: triple(grid), grads: Gradients::new(grid), speed: grid.zeros() }
    }

    /// Stage data for a single state.
    pub fn at(state: &FieldState, eos: &Eos) -> Result<Self> {
        check_domain(state)?;
        let grid = &state.grid;
        let mut stage = Stage::zeros(grid);
        for (dst, src) in stage.fields.iter_mut().zip(state.components()) {
            dst.copy_from_slice(src);
        }
        stage.grads.compute(grid, state.components());
        fill_rates(eos, grid, state.components(), &stage.grads, &mut stage.rates, &mut stage.speed);
        Ok(stage)
    }
}

/// The four stages of the most recent step, for coupled sub-systems that
/// must be advanced with the same tableau.
#[derive(Clone, Debug)]
pub struct StageRecord {
    pub grid: Grid,
    pub t0: f64,
    pub dt: f64,
    pub stages: [Stage; 4],
}

/// Node offsets and weights of the classical RK4 tableau.
pub const RK4_NODES: [f64; 4] = [0.0, 0.5, 0.5, 1.0];
pub const RK4_WEIGHTS: [f64; 4] = [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0];

/// Classical RK4 with a post-step spectral filter. Owns its work buffers.
pub struct Stepper {
    cfl: f64,
    filter: Option<SpectralFilter>,
    record: StageRecord,
}

impl Stepper {
    /// `filter_strength <= 0` disables filtering.
    pub fn new(grid: Grid, cfl: f64, filter_strength: f64) -> Self {
        let stage = || Stage::zeros(&grid);
        Stepper {
            cfl,
            filter: (filter_strength > 0.0).then(|| SpectralFilter::new(grid, filter_strength)),
            record: StageRecord { grid, t0: 0.0, dt: 0.0, stages: [stage(), stage(), stage(), stage()] },
        }
    }

    pub fn filter(&self) -> Option<&SpectralFilter> {
        self.filter.as_ref()
    }

    pub fn record(&self) -> &StageRecord {
        &self.record
    }

    /// Stage record of the last step together with the filter, for
    /// advancing coupled fields through the same stages.
    pub fn parts(&self) -> (&StageRecord, Option<&SpectralFilter>) {
        (&self.record, self.filter.as_ref())
    }

    /// Largest admissible step for the current state.
    pub fn max_dt(&self, state: &FieldState, eos: &Eos) -> f64 {
        let g = &state.grid;
        self.cfl * g.h1().min(g.h2()) / max_char_speed(state, eos)
    }

    /// Advances `state` by `dt` and returns the stage record.
    pub fn step(&mut self, state: &mut FieldState, eos: &Eos, dt: f64) -> Result<&StageRecord> {
        check_domain(state)?;
        let limit = self.max_dt(state, eos);
        if !(dt > 0.0 && dt <= limit * (1.0 + 1e-12)) {
            return Err(Error::Config(format!("time step {dt:.3e} violates the CFL limit {limit:.3e}")));
        }
        let grid = state.grid;
        let rec = &mut self.record;
        rec.t0 = state.t;
        rec.dt = dt;
        for s in 0..4 {
            let (done, rest) = rec.stages.split_at_mut(s);
            let stage = &mut rest[0];
            for k in 0..3 {
                let base = state.components()[k];
                let out = &mut stage.fields[k];
                if s == 0 {
                    out.copy_from_slice(base);
                } else {
                    let a = RK4_NODES[s] * dt;
                    let prev = &done[s - 1].rates[k];
                    out.par_iter_mut().zip(base.par_iter().zip(prev.par_iter())).for_each(|(o, (b, d))| *o = b + a * d);
                }
            }
            let comps = [stage.fields[0].as_slice(), &stage.fields[1], &stage.fields[2]];
            if s > 0 {
                let m = max_abs(comps[0]);
                if !(m <= LOG_DENSITY_BOUND) {
                    return Err(if m.is_finite() { Error::EosDomain(m) } else { Error::NonFinite("log_density") });
                }
            }
            stage.grads.compute(&grid, comps);
            fill_rates(eos, &grid, comps, &stage.grads, &mut stage.rates, &mut stage.speed);
        }
        let stages = &rec.stages;
        for (k, f) in state.components_mut().into_iter().enumerate() {
            f.par_iter_mut().enumerate().for_each(|(p, x)| {
                *x += dt
                    * (RK4_WEIGHTS[0] * stages[0].rates[k][p]
                        + RK4_WEIGHTS[1] * stages[1].rates[k][p]
                        + RK4_WEIGHTS[2] * stages[2].rates[k][p]
                        + RK4_WEIGHTS[3] * stages[3].rates[k][p]);
            });
            if let Some(filter) = &self.filter {
                filter.apply(f);
            }
        }
        state.t += dt;
        Ok(&self.record)
    }
}

/// Convenience single step with a fresh integrator.
pub fn step(state: &FieldState, eos: &Eos, dt: f64, cfl: f64, filter_strength: f64) -> Result<FieldState> {
    let mut next = state.clone();
    Stepper::new(state.grid, cfl, filter_strength).step(&mut next, eos, dt)?;
    Ok(next)
}

/// Specific vorticity `(∂1 v2 - ∂2 v1) / rho`.
pub fn specific_vorticity(state: &FieldState) -> Vec<f64> {
    let g = &state.grid;
    let mut a = g.zeros();
    let mut b = g.zeros();
    stencil::d1(g, &state.vel2, &mut a);
    stencil::d2(g, &state.vel1, &mut b);
    a.par_iter_mut()
        .zip(b.par_iter().zip(state.log_density.par_iter()))
        .for_each(|(w, (d, r))| *w = (*w - d) * (-r).exp());
    a
}

/// Specific vorticity and its time derivative, the latter assembled from
/// the Euler right-hand side.
pub fn vorticity_and_rate(state: &FieldState, eos: &Eos) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = &state.grid;
    let rates = euler_rhs(state, eos)?;
    let w = specific_vorticity(state);
    let mut a = g.zeros();
    let mut b = g.zeros();
    stencil::d1(g, &rates[2], &mut a);
    stencil::d2(g, &rates[1], &mut b);
    let dtw = (0..g.len())
        .into_par_iter()
        .map(|p| (a[p] - b[p]) * (-state.log_density[p]).exp() - w[p] * rates[0][p])
        .collect();
    Ok((w, dtw))
}

/// `∂t ϖ + v·∇ϖ`. Vanishes up to truncation error for any smooth state.
pub fn vorticity_transport_residual(state: &FieldState, eos: &Eos) -> Result<Vec<f64>> {
    let (w, dtw) = vorticity_and_rate(state, eos)?;
    let [w1, w2] = stencil::grad(&state.grid, &w);
    let out = (0..w.len())
        .into_par_iter()
        .map(|p| dtw[p] + state.vel1[p] * w1[p] + state.vel2[p] * w2[p])
        .collect();
    Ok(out)
}

/// Max-norms of the Cartesian velocity gradient and of the vorticity gradient.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct GradientNorms {
    /// `max |∂ᵢ vʲ|` over components and cells.
    pub velocity: f64,
    pub log_density: f64,
    /// `max |∇ϖ|`, the discrete Lipschitz constant of the specific vorticity.
    pub vorticity_lipschitz: f64,
    /// `max |∂ᵢ ϖ|` over components.
    pub vorticity_component: f64,
}

pub fn gradient_norms(state: &FieldState) -> GradientNorms {
    let g = &state.grid;
    let mut grads = Gradients::new(g);
    grads.compute(g, state.components());
    let w = specific_vorticity(state);
    let [w1, w2] = stencil::grad(g, &w);
    let velocity = [&grads.d1[1], &grads.d2[1], &grads.d1[2], &grads.d2[2]]
        .iter()
        .map(|f| max_abs(f))
        .fold(0.0, f64::max);
    let log_density = max_abs(&grads.d1[0]).max(max_abs(&grads.d2[0]));
    let lip = w1.iter().zip(&w2).fold(0.0f64, |m, (a, b)| m.max(a.hypot(*b)));
    GradientNorms {
        velocity,
        log_density,
        vorticity_lipschitz: lip,
        vorticity_component: max_abs(&w1).max(max_abs(&w2)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn smooth_state(n: usize) -> FieldState {
        let g = Grid::new(n, n, 1.0, 0.0).unwrap();
        let mut s = FieldState::constant(g);
        s.log_density = g.sample(|x, y| 0.01 * (2.0 * PI * x).sin() * (2.0 * PI * y).cos());
        s.vel1 = g.sample(|x, y| 0.01 * (2.0 * PI * x).cos() + 0.003 * (2.0 * PI * y).sin());
        s.vel2 = g.sample(|x, y| 0.002 * (2.0 * PI * (x + y)).sin());
        s
    }

    #[test]
    fn constant_state_is_steady() {
        let g = Grid::new(32, 16, 2.0, -0.5).unwrap();
        let s = FieldState::constant(g);
        let eos = Eos::polytropic(3.0).unwrap();
        let rates = euler_rhs(&s, &eos).unwrap();
        assert!(rates.iter().flatten().all(|x| *x == 0.0));
        let next = step(&s, &eos, 0.01, 0.4, 1e-2).unwrap();
        assert!(next.components().iter().all(|f| f.iter().all(|x| *x == 0.0)));
        assert!((next.t - 0.01).abs() < 1e-15);
    }

    #[test]
    fn rhs_matches_analytic_rates() {
        // Rates of the smooth state computed by hand from the closed forms.
        let eos = Eos::polytropic(3.0).unwrap();
        let s = smooth_state(64);
        let rates = euler_rhs(&s, &eos).unwrap();
        let g = s.grid;
        let tp = 2.0 * PI;
        let mut err = 0.0f64;
        for j in 0..g.n2 {
            for i in 0..g.n1 {
                let (x, y) = (g.x1(i), g.x2(j));
                let p = g.index(i, j);
                let r = 0.01 * (tp * x).sin() * (tp * y).cos();
                let r1 = 0.01 * tp * (tp * x).cos() * (tp * y).cos();
                let r2 = -0.01 * tp * (tp * x).sin() * (tp * y).sin();
                let v1 = 0.01 * (tp * x).cos() + 0.003 * (tp * y).sin();
                let v11 = -0.01 * tp * (tp * x).sin();
                let v12 = 0.003 * tp * (tp * y).cos();
                let v2 = 0.002 * (tp * (x + y)).sin();
                let v21 = 0.002 * tp * (tp * (x + y)).cos();
                let c2 = (2.0 * r).exp();
                let expect = [
                    -(v1 * r1 + v2 * r2) - (v11 + v21),
                    -(v1 * v11 + v2 * v12) - c2 * r1,
                    -(v1 * v21 + v2 * v21) - c2 * r2,
                ];
                for k in 0..3 {
                    err = err.max((rates[k][p] - expect[k]).abs());
                }
            }
        }
        assert!(err < 1e-9, "max rate error {err}");
    }

    #[test]
    fn cfl_violation_is_a_config_error() {
        let g = Grid::new(32, 16, 1.0, 0.0).unwrap();
        let s = FieldState::constant(g);
        let eos = Eos::polytropic(3.0).unwrap();
        assert!(matches!(step(&s, &eos, 1.0, 0.4, 0.0), Err(Error::Config(_))));
    }

    #[test]
    fn out_of_range_state_is_rejected() {
        let g = Grid::new(16, 16, 1.0, 0.0).unwrap();
        let mut s = FieldState::constant(g);
        s.log_density[3] = 1.5;
        assert!(matches!(euler_rhs(&s, &Eos::polytropic(3.0).unwrap()), Err(Error::EosDomain(_))));
        s.log_density[3] = 0.7;
        assert!(matches!(regime_check(&s, &Eos::polytropic(3.0).unwrap()), Err(Error::RegimeExit { .. })));
    }

    #[test]
    fn steady_shear_vorticity() {
        let g = Grid::new(64, 16, 1.0, 0.0).unwrap();
        let mut s = FieldState::constant(g);
        s.vel2 = g.sample(|x, _| 1e-3 * (2.0 * PI * x).sin());
        let w = specific_vorticity(&s);
        for i in 0..g.n1 {
            let expect = 1e-3 * 2.0 * PI * (2.0 * PI * g.x1(i)).cos();
            assert!((w[g.index(i, 5)] - expect).abs() < 1e-9);
        }
        let res = vorticity_transport_residual(&s, &Eos::polytropic(3.0).unwrap()).unwrap();
        assert!(max_abs(&res) < 1e-14);
    }

    #[test]
    fn transport_residual_shrinks_at_stencil_order() {
        let eos = Eos::polytropic(3.0).unwrap();
        let e: Vec<f64> = [16usize, 32]
            .iter()
            .map(|&n| max_abs(&vorticity_transport_residual(&smooth_state(n), &eos).unwrap()))
            .collect();
        let order = (e[0] / e[1]).log2();
        assert!(order > 5.5, "observed order {order}");
    }
}
