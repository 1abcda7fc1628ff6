//! Co-evolution of the fluid, the Eulerian eikonal function and the
//! characteristic lattice, with per-row diagnostics and the `mu⋆` stop rule.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::diagnostics::{self, BlowupIndicator, Hierarchy, LevelBuffer};
use crate::eikonal::{eulerian_mu, Eikonal};
use crate::eos::Eos;
use crate::error::Result;
use crate::euler::{self, gradient_norms, specific_vorticity, GradientNorms, Stage, Stepper};
use crate::geometry::{frame_from_eikonal, identity_defect, AcousticPoint, Frame};
use crate::grid::{max_abs, FieldState};
use crate::interp::Stencil;
use crate::plane_wave::{self, build_initial_data, DataRecipe};
use crate::tracer::{lattice_diagnostics, seed_lattice, Lattice};

/// Fixed column order of the run CSV.
pub const CSV_COLUMNS: [&str; 14] = [
    "t",
    "mu_star",
    "max_Xv1",
    "max_Xrho",
    "max_grad_v",
    "max_grad_vort",
    "lip_vort",
    "max_trchi",
    "max_Xbrv2",
    "max_Xbr_rho_minus_v1",
    "res_wave_rho",
    "res_wave_v1",
    "res_wave_v2",
    "res_transport",
];

/// One CSV row. Residuals refer to the level two steps back; wave residuals
/// are `NaN` until five equally spaced levels exist.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Row {
    pub t: f64,
    pub mu_star: f64,
    pub max_xv1: f64,
    pub max_xrho: f64,
    pub max_grad_v: f64,
    pub max_grad_vort: f64,
    pub lip_vort: f64,
    pub max_trchi: f64,
    pub max_xbrv2: f64,
    pub max_xbr_rho_minus_v1: f64,
    pub res_wave_rho: f64,
    pub res_wave_v1: f64,
    pub res_wave_v2: f64,
    pub res_transport: f64,
}

impl Row {
    pub fn values(&self) -> [f64; 14] {
        [
            self.t,
            self.mu_star,
            self.max_xv1,
            self.max_xrho,
            self.max_grad_v,
            self.max_grad_vort,
            self.lip_vort,
            self.max_trchi,
            self.max_xbrv2,
            self.max_xbr_rho_minus_v1,
            self.res_wave_rho,
            self.res_wave_v1,
            self.res_wave_v2,
            self.res_transport,
        ]
    }
}

/// Rows as CSV text with a header of [`CSV_COLUMNS`]. Values use the
/// shortest exact decimal form, so equal runs give identical bytes.
pub fn csv(rows: &[Row]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.values().iter().map(|v| v.to_string()).collect();
        out += &cells.join(",");
        out.push('\n');
    }
    out
}

/// Everything measured at one output time.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Observation {
    pub row: Row,
    pub hierarchy: Hierarchy,
    /// Neighbourhood of the worst characteristic.
    pub blowup: BlowupIndicator,
    pub gradients: GradientNorms,
    /// Largest frame/metric identity defect for eikonal frames, over the
    /// grid and at the lattice points.
    pub identity_defect: f64,
    /// Largest `|g(L,L)|` or `|g(X,X) - 1|` of the transported frames.
    pub transport_drift: f64,
    /// `max |mu_lattice - mu_eikonal| / mu_lattice` over the lattice.
    pub dual_route: f64,
    /// Largest `|u(x) - u_label|` over the lattice.
    pub label_drift: f64,
    pub max_grad_u: f64,
    /// `max |trχ_a - trχ_b|` once the `ln υ` history is available.
    pub trchi_route_gap: Option<f64>,
    /// Specific vorticity at the point with the smallest `mu`.
    pub vorticity_at_worst: f64,
    /// `max |ϖ|` over the grid.
    pub vorticity_scale: f64,
}

/// A running simulation.
pub struct Simulation {
    pub cfg: RunConfig,
    pub eos: Eos,
    pub recipe: DataRecipe,
    pub state: FieldState,
    pub eikonal: Eikonal,
    pub lattice: Lattice,
    stepper: Stepper,
    levels: LevelBuffer,
    dt: f64,
    pub steps: usize,
}

impl Simulation {
    /// Builds the initial data and chooses a fixed step that lands on
    /// `run.t_compare`.
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let eos = cfg.eos.build()?;
        let grid = cfg.grid.build()?;
        let recipe = cfg.data.recipe();
        let state = build_initial_data(&recipe, &eos, grid)?;
        let stepper = Stepper::new(grid, cfg.run.cfl, cfg.run.filter_strength);
        let lattice = seed_lattice(&state, &eos, cfg.lattice.n_u, cfg.lattice.n_theta, cfg.lattice.u_max)?;
        let limit = 0.98 * stepper.max_dt(&state, &eos);
        let t_cmp = cfg.run.t_compare;
        let dt = if t_cmp > 0.0 { t_cmp / (t_cmp / limit).ceil() } else { limit };
        let mut levels = LevelBuffer::default();
        levels.push(&state, dt);
        Ok(Simulation {
            cfg: cfg.clone(),
            eos,
            recipe,
            eikonal: Eikonal::new(grid),
            lattice,
            stepper,
            levels,
            state,
            dt,
            steps: 0,
        })
    }

    /// Overrides the step size, e.g. to share a time grid across levels.
    pub fn set_time_step(&mut self, dt: f64) {
        self.dt = dt;
        self.levels.clear();
        self.levels.push(&self.state, dt);
    }

    pub fn time_step(&self) -> f64 {
        self.dt
    }

    pub fn mu_star(&self) -> f64 {
        diagnostics::mu_star(&self.lattice)
    }

    /// Advances the fluid, the eikonal function and the lattice together.
    pub fn step(&mut self) -> Result<()> {
        let limit = self.stepper.max_dt(&self.state, &self.eos);
        if self.dt > limit {
            self.dt = 0.98 * limit;
        }
        let dt = self.dt;
        self.stepper.step(&mut self.state, &self.eos, dt)?;
        let (rec, filter) = self.stepper.parts();
        self.eikonal.step(rec, filter);
        self.lattice.advance(rec, &self.eos);
        self.lattice.record_upsilon(&self.state.grid, &self.state.log_density, &self.eos, dt);
        self.levels.push(&self.state, dt);
        self.steps += 1;
        euler::regime_check(&self.state, &self.eos)
    }

    /// Fields, time derivatives and gradients at the current time.
    pub fn snapshot(&self) -> Result<Stage> {
        Stage::at(&self.state, &self.eos)
    }

    pub fn eulerian_mu(&self) -> Vec<f64> {
        eulerian_mu(&self.state.log_density, &self.eikonal.gradient(), &self.eos)
    }

    pub fn observe(&self) -> Result<Observation> {
        let eos = &self.eos;
        let g = self.state.grid;
        let snap = self.snapshot()?;
        let diags = lattice_diagnostics(&self.lattice, &g, &snap, eos);
        let hierarchy = diagnostics::regularity_hierarchy(&diags);
        let blowup = diagnostics::blowup_indicator(&self.lattice, &diags, diagnostics::BLOWUP_RADIUS);
        let gradients = gradient_norms(&self.state);
        let grad_u = self.eikonal.gradient();
        let mu_grid = eulerian_mu(&self.state.log_density, &grad_u, eos);

        let grid_defect = (0..g.len())
            .into_par_iter()
            .map(|p| {
                let ap = AcousticPoint::unchecked(self.state.log_density[p], [self.state.vel1[p], self.state.vel2[p]], eos);
                let gu = [grad_u[0][p], grad_u[1][p]];
                identity_defect(&ap, &frame_from_eikonal(&ap, gu), Some(gu))
            })
            .reduce(|| 0.0, f64::max);
        let per_point: Vec<(f64, f64, f64, f64)> = self
            .lattice
            .points
            .par_iter()
            .enumerate()
            .map(|(idx, p)| {
                let st = Stencil::new(&g, p.x[0], p.x[1]);
                let ap = AcousticPoint::unchecked(st.eval(&snap.fields[0]), [st.eval(&snap.fields[1]), st.eval(&snap.fields[2])], eos);
                let gu = [st.eval(&grad_u[0]), st.eval(&grad_u[1])];
                let eik = frame_from_eikonal(&ap, gu);
                let carried = Frame::from_generator(&ap, p.mu, p.generator());
                let drift = ap.inner(&carried.l, &carried.l).abs().max((ap.inner(&carried.x, &carried.x) - 1.0).abs());
                let label = self.lattice.labels[idx / self.lattice.n_theta];
                (
                    identity_defect(&ap, &eik, Some(gu)),
                    drift,
                    (p.mu - eik.mu).abs() / p.mu,
                    (self.eikonal.label_at(p.x[0], p.x[1]) - label).abs(),
                )
            })
            .collect();
        let fold = |f: fn(&(f64, f64, f64, f64)) -> f64| per_point.iter().map(f).fold(0.0f64, f64::max);

        let trchi_route_gap = self.lattice.trchi_from_upsilon().map(|a| {
            a.iter().zip(&diags).fold(0.0f64, |m, (x, d)| m.max((x - d.trchi).abs()))
        });
        let (_, wp) = self.lattice.worst();
        let w = specific_vorticity(&self.state);
        let (res_wave, res_transport) = self.residuals(&mu_grid)?;
        let row = Row {
            t: self.state.t,
            mu_star: self.mu_star(),
            max_xv1: diags.iter().fold(0.0f64, |m, d| m.max(d.along_x[1].abs())),
            max_xrho: diags.iter().fold(0.0f64, |m, d| m.max(d.along_x[0].abs())),
            max_grad_v: gradients.velocity,
            max_grad_vort: gradients.vorticity_component,
            lip_vort: gradients.vorticity_lipschitz,
            max_trchi: hierarchy.trchi,
            max_xbrv2: hierarchy.xb_v2,
            max_xbr_rho_minus_v1: hierarchy.xb_rho_minus_v1,
            res_wave_rho: res_wave[0],
            res_wave_v1: res_wave[1],
            res_wave_v2: res_wave[2],
            res_transport,
        };
        Ok(Observation {
            row,
            hierarchy,
            blowup,
            gradients,
            identity_defect: grid_defect.max(fold(|t| t.0)),
            transport_drift: fold(|t| t.1),
            dual_route: fold(|t| t.2),
            label_drift: fold(|t| t.3),
            max_grad_u: grad_u[0].iter().zip(&grad_u[1]).fold(0.0f64, |m, (a, b)| m.max(a.hypot(*b))),
            trchi_route_gap,
            vorticity_at_worst: Stencil::new(&g, wp.x[0], wp.x[1]).eval(&w),
            vorticity_scale: max_abs(&w),
        })
    }

    /// `max |mu (□_g f - F)|` per wave equation and `max |mu Bϖ|` at the
    /// middle buffered level, weighted by the Eulerian `mu` of the current
    /// level. Until the buffer is full the wave entries are `NaN` and the
    /// transport entry uses the current level.
    pub fn residual_norms(&self) -> Result<([f64; 3], f64)> {
        self.residuals(&self.eulerian_mu())
    }

    fn residuals(&self, mu: &[f64]) -> Result<([f64; 3], f64)> {
        let wave = match self.levels.wave_residuals(&self.eos, Some(mu)) {
            Ok(r) => [max_abs(&r[0]), max_abs(&r[1]), max_abs(&r[2])],
            Err(_) => [f64::NAN; 3],
        };
        let at = self.levels.middle().unwrap_or(&self.state);
        let transport = euler::vorticity_transport_residual(at, &self.eos)?;
        Ok((wave, diagnostics::scaled(&transport, Some(mu))))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MuStop,
    TimeLimit,
}

/// Record of a completed run.
#[derive(Clone, Debug, Serialize)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub rows: Vec<Row>,
    #[serde(skip)]
    pub observations: Vec<Observation>,
    /// `(t, mu⋆)` after every step.
    #[serde(skip)]
    pub clock: Vec<(f64, f64)>,
    pub stop: StopReason,
    pub steps: usize,
    pub dt: f64,
    pub delta_star: f64,
    /// `None` when the data never compress.
    pub crossing_time: Option<f64>,
    /// Observation at `run.t_compare`, if reached.
    pub at_compare: Option<Observation>,
    /// Distance to the exact simple wave at `run.t_compare`, for
    /// plane-symmetric data compared before the crossing time.
    pub exact_error: Option<f64>,
    pub elapsed_s: f64,
    #[serde(skip)]
    pub final_state: FieldState,
}

impl RunOutcome {
    pub fn first(&self) -> &Observation {
        &self.observations[0]
    }

    pub fn last(&self) -> &Observation {
        self.observations.last().expect("every run records its initial row")
    }

    pub fn clock_series(&self) -> (Vec<f64>, Vec<f64>) {
        self.clock.iter().cloned().unzip()
    }

    /// Maximum of the hierarchy quantities over every row.
    pub fn hierarchy(&self) -> Hierarchy {
        let mut h = Hierarchy::default();
        self.observations.iter().for_each(|o| h.merge(&o.hierarchy));
        h
    }

    /// Blowup products over the rows with `mu⋆ ≤ threshold`.
    pub fn late_blowup(&self, threshold: f64) -> Option<BlowupIndicator> {
        self.observations.iter().filter(|o| o.row.mu_star <= threshold).map(|o| o.blowup).reduce(|a, b| {
            BlowupIndicator {
                min_product: a.min_product.min(b.min_product),
                max_product: a.max_product.max(b.max_product),
                min_product_density: a.min_product_density.min(b.min_product_density),
                max_product_density: a.max_product_density.max(b.max_product_density),
            }
        })
    }

    pub fn max_of(&self, f: impl Fn(&Observation) -> f64) -> f64 {
        self.observations.iter().map(f).fold(0.0, f64::max)
    }
}

/// Runs until `mu⋆ ≤ run.mu_stop` or `t ≥ run.t_max`, observing every
/// `run.output_every` steps and at the end. `on_row` sees each row as it
/// is produced.
pub fn run(cfg: &RunConfig, mut on_row: impl FnMut(&Row)) -> Result<RunOutcome> {
    let start = Instant::now();
    let mut sim = Simulation::new(cfg)?;
    let delta_star = plane_wave::delta_star(&sim.recipe, &sim.eos)?;
    let crossing_time = match plane_wave::crossing_time(&sim.recipe, &sim.eos) {
        Ok(t) => Some(t),
        Err(crate::error::Error::NoShock) => None,
        Err(e) => return Err(e),
    };
    let mut observations = Vec::new();
    let mut clock = vec![(0.0, sim.mu_star())];
    let mut at_compare = None;
    let mut exact_error = None;
    let t_cmp = cfg.run.t_compare;
    let stop = loop {
        let mu = sim.mu_star();
        let done = if mu <= cfg.run.mu_stop {
            Some(StopReason::MuStop)
        } else if sim.state.t >= cfg.run.t_max - 1e-9 * sim.time_step() {
            Some(StopReason::TimeLimit)
        } else {
            None
        };
        let compare_now = at_compare.is_none() && t_cmp > 0.0 && (sim.state.t - t_cmp).abs() < 0.5 * sim.time_step();
        if sim.steps % cfg.run.output_every == 0 || done.is_some() || compare_now {
            let obs = sim.observe()?;
            if compare_now {
                at_compare = Some(obs);
                if sim.recipe.is_simple_wave() && crossing_time.is_none_or(|tc| sim.state.t < tc) {
                    exact_error = Some(plane_wave::simple_wave_error(&sim.state, &sim.recipe, &sim.eos)?);
                }
            }
            if sim.steps % cfg.run.output_every == 0 || done.is_some() {
                on_row(&obs.row);
                observations.push(obs);
            }
        }
        if let Some(reason) = done {
            break reason;
        }
        sim.step()?;
        clock.push((sim.state.t, sim.mu_star()));
    };
    Ok(RunOutcome {
        config: cfg.clone(),
        rows: observations.iter().map(|o| o.row).collect(),
        observations,
        clock,
        stop,
        steps: sim.steps,
        dt: sim.time_step(),
        delta_star,
        crossing_time,
        at_compare,
        exact_error,
        elapsed_s: start.elapsed().as_secs_f64(),
        final_state: sim.state,
    })
}
