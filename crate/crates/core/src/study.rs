//! Dyadic convergence studies: the plane-symmetric solution against the
//! exact simple wave, the two routes to `mu`, and the residuals of the
//! second-order wave formulation on a rotational, transversely modulated
//! flow.

use serde::Serialize;

use crate::config::RunConfig;
use crate::diagnostics::convergence_orders;
use crate::error::{Error, Result};
use crate::runner::{run, RunOutcome, Simulation};

/// Formal order of the wave residual assembly.
pub const WAVE_ORDER: f64 = 3.0;
/// Formal order of the transport residual.
pub const TRANSPORT_ORDER: f64 = 6.0;
/// Formal order of the plane-symmetric solution and of the `mu` discrepancy.
pub const SOLUTION_ORDER: f64 = 4.0;
/// Observed orders may fall this far below the formal ones.
pub const ORDER_SLACK: f64 = 0.5;

/// Coarsest `n1` of the plane-symmetric study.
pub const PLANE_BASE: usize = 512;
/// Coarsest `n1 = n2` of the residual study.
pub const RESIDUAL_BASE: usize = 32;
/// Time at which residuals are evaluated.
pub const RESIDUAL_TIME: f64 = 0.25;

/// Errors of one quantity over dyadic refinements, finest last.
#[derive(Clone, Debug, Serialize)]
pub struct Series {
    pub name: String,
    pub n1: Vec<usize>,
    pub errors: Vec<f64>,
    pub orders: Vec<f64>,
    /// Smallest acceptable observed order.
    pub required: f64,
}

impl Series {
    pub fn new(name: &str, n1: Vec<usize>, errors: Vec<f64>, required: f64) -> Self {
        let orders = convergence_orders(&errors);
        Series { name: name.into(), n1, errors, orders, required }
    }

    pub fn min_order(&self) -> f64 {
        self.orders.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn passed(&self) -> bool {
        !self.orders.is_empty() && self.min_order() >= self.required
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ConvergenceTable {
    pub series: Vec<Series>,
}

impl ConvergenceTable {
    pub fn get(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    /// Plain-text table, one line per series.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.series {
            let errs: Vec<String> = s.errors.iter().map(|e| format!("{e:.3e}")).collect();
            let ords: Vec<String> = s.orders.iter().map(|o| format!("{o:.2}")).collect();
            out += &format!(
                "{:<16} n1 {:?}  errors [{}]  orders [{}]  required {:.1}\n",
                s.name,
                s.n1,
                errs.join(", "),
                ords.join(", "),
                s.required
            );
        }
        out
    }
}

fn check_levels(levels: usize) -> Result<()> {
    if levels < 3 {
        return Err(Error::Config(format!("a convergence study needs at least 3 levels, got {levels}")));
    }
    Ok(())
}

/// Dyadic refinements of `n1` starting at [`PLANE_BASE`], keeping `n2`.
pub fn plane_levels(cfg: &RunConfig, levels: usize) -> Vec<RunConfig> {
    (0..levels).map(|k| cfg.at_resolution(PLANE_BASE << k, cfg.grid.n2)).collect()
}

/// Exact-solution and dual-route series from plane-symmetric runs that
/// passed `run.t_compare`, coarsest first.
pub fn plane_series(outcomes: &[RunOutcome]) -> Result<Vec<Series>> {
    let n1: Vec<usize> = outcomes.iter().map(|o| o.config.grid.n1).collect();
    let exact = outcomes
        .iter()
        .map(|o| o.exact_error.ok_or_else(|| Error::NotReady(format!("no exact comparison at n1 = {}", o.config.grid.n1))))
        .collect::<Result<Vec<_>>>()?;
    let dual = outcomes
        .iter()
        .map(|o| {
            o.at_compare
                .map(|c| c.dual_route)
                .ok_or_else(|| Error::NotReady(format!("run at n1 = {} never reached t_compare", o.config.grid.n1)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![
        Series::new("exact_solution", n1.clone(), exact, SOLUTION_ORDER - ORDER_SLACK),
        Series::new("dual_route_mu", n1, dual, SOLUTION_ORDER - ORDER_SLACK),
    ])
}

/// Rotational, transversely modulated companion of `cfg` used for the
/// residual study.
pub fn residual_config(cfg: &RunConfig, n: usize) -> RunConfig {
    let mut c = cfg.clone();
    c.grid.n1 = n;
    c.grid.n2 = n;
    c.grid.l1 = 1.0;
    c.grid.x1_offset = 0.0;
    c.data.window_ramp = None;
    if c.data.vorticity_lambda == 0.0 {
        c.data.vorticity_lambda = 0.1 * c.data.amplitude;
    }
    if c.data.transverse_modulation == 0.0 {
        c.data.transverse_modulation = 0.2;
    }
    c.run.t_max = 2.0 * RESIDUAL_TIME;
    c.run.t_compare = 0.0;
    c.lattice.n_u = 9;
    c.lattice.n_theta = 8;
    c
}

/// Residual norms with the middle buffered level at exactly `t_eval`:
/// `[wave r, wave v1, wave v2, transport]`.
pub fn residuals_at(cfg: &RunConfig, t_eval: f64) -> Result<[f64; 4]> {
    let mut sim = Simulation::new(cfg)?;
    let steps = (t_eval / sim.time_step()).ceil() as usize;
    sim.set_time_step(t_eval / steps as f64);
    for _ in 0..steps + 2 {
        sim.step()?;
    }
    let (wave, transport) = sim.residual_norms()?;
    Ok([wave[0], wave[1], wave[2], transport])
}

pub fn residual_series(cfg: &RunConfig, levels: usize) -> Result<Vec<Series>> {
    let n1: Vec<usize> = (0..levels).map(|k| RESIDUAL_BASE << k).collect();
    let norms = n1.iter().map(|&n| residuals_at(&residual_config(cfg, n), RESIDUAL_TIME)).collect::<Result<Vec<_>>>()?;
    let pick = |k: usize| norms.iter().map(|r| r[k]).collect::<Vec<_>>();
    Ok(vec![
        Series::new("wave_rho", n1.clone(), pick(0), WAVE_ORDER - ORDER_SLACK),
        Series::new("wave_v1", n1.clone(), pick(1), WAVE_ORDER - ORDER_SLACK),
        Series::new("wave_v2", n1.clone(), pick(2), WAVE_ORDER - ORDER_SLACK),
        Series::new("transport", n1, pick(3), TRANSPORT_ORDER - ORDER_SLACK),
    ])
}

/// Full study. Plane-symmetric runs stop at `run.t_max`; the outcomes are
/// returned with the table, finest last.
pub fn convergence_study(cfg: &RunConfig, levels: usize) -> Result<(ConvergenceTable, Vec<RunOutcome>)> {
    check_levels(levels)?;
    let outcomes = plane_levels(cfg, levels).iter().map(|c| run(c, |_| {})).collect::<Result<Vec<_>>>()?;
    let mut series = plane_series(&outcomes)?;
    series.extend(residual_series(cfg, levels)?);
    Ok((ConvergenceTable { series }, outcomes))
}
