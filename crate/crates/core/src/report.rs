//! Pass/fail verdicts for completed runs and convergence studies, and the
//! `verdict.json` layout.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Scenario;
use crate::diagnostics::{blowup_reference, fit_lifespan, mu_linearity_fit};
use crate::checkpoint;
use crate::error::{Error, Result};
use crate::runner::{csv, RunOutcome, StopReason};
use crate::study::ConvergenceTable;

/// Fraction of the per-step `mu⋆` clock used for the lifespan fit.
pub const LIFESPAN_TAIL: f64 = 0.3;
/// Rows with `mu⋆` at or below this are in the late phase.
pub const LATE_PHASE: f64 = 0.2;
/// Bound on every frame and metric identity defect.
pub const IDENTITY_TOLERANCE: f64 = 1e-8;
/// The "C" of the small-quantity bounds `C·amplitude`.
pub const HIERARCHY_FACTOR: f64 = 10.0;
/// Required gap between `|X̆v1|` and the small family.
pub const HIERARCHY_GAP: f64 = 5.0;
/// Vorticity at the worst characteristic counts as non-zero above this
/// fraction of its initial maximum.
pub const NONZERO_VORTICITY: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotEvaluated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    /// Headline measured value compared against `bound`.
    pub measured: Option<f64>,
    pub bound: Option<f64>,
    pub detail: String,
}

impl Verdict {
    pub fn check(ok: bool, measured: f64, bound: f64, detail: String) -> Self {
        Verdict { status: if ok { Status::Pass } else { Status::Fail }, measured: Some(measured), bound: Some(bound), detail }
    }

    pub fn skipped(reason: &str) -> Self {
        Verdict { status: Status::NotEvaluated, measured: None, bound: None, detail: reason.into() }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl Default for Verdict {
    fn default() -> Self {
        Verdict::skipped("not part of this scenario")
    }
}

/// One field per acceptance criterion.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Verdicts {
    pub lifespan_vs_delta_star: Verdict,
    pub lifespan_vs_crossing_time: Verdict,
    pub mu_linear_vanishing: Verdict,
    pub blowup_rate: Verdict,
    pub vorticity_regularity: Verdict,
    pub chaplygin_control: Verdict,
    pub reformulation_residuals: Verdict,
    pub frame_identities: Verdict,
    pub dual_route_mu: Verdict,
    pub hierarchy: Verdict,
}

impl Verdicts {
    pub fn entries(&self) -> [(&'static str, &Verdict); 10] {
        [
            ("lifespan_vs_delta_star", &self.lifespan_vs_delta_star),
            ("lifespan_vs_crossing_time", &self.lifespan_vs_crossing_time),
            ("mu_linear_vanishing", &self.mu_linear_vanishing),
            ("blowup_rate", &self.blowup_rate),
            ("vorticity_regularity", &self.vorticity_regularity),
            ("chaplygin_control", &self.chaplygin_control),
            ("reformulation_residuals", &self.reformulation_residuals),
            ("frame_identities", &self.frame_identities),
            ("dual_route_mu", &self.dual_route_mu),
            ("hierarchy", &self.hierarchy),
        ]
    }

    /// No evaluated criterion failed.
    pub fn all_passed(&self) -> bool {
        self.entries().iter().all(|(_, v)| v.status != Status::Fail)
    }
}

/// Summary of a run, written as `verdict.json`.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: Scenario,
    pub n1: usize,
    pub n2: usize,
    pub steps: usize,
    pub dt: f64,
    pub elapsed_s: f64,
    pub stop: StopReason,
    pub t_end: f64,
    pub mu_star_end: f64,
    pub delta_star: f64,
    pub delta_star_inverse: f64,
    pub crossing_time: Option<f64>,
    pub t_obs: Option<f64>,
    pub exact_error: Option<f64>,
    pub convergence: Option<ConvergenceTable>,
    pub verdicts: Verdicts,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Lifespan from the tail of the per-step clock; `None` if the run never
/// stopped on `mu⋆`.
pub fn observed_lifespan(out: &RunOutcome) -> Option<f64> {
    if out.stop != StopReason::MuStop {
        return None;
    }
    let (t, mu) = out.clock_series();
    fit_lifespan(&t, &mu, LIFESPAN_TAIL).ok().map(|f| f.zero())
}

pub fn lifespan_vs_delta_star(out: &RunOutcome, budget_s: f64) -> Verdict {
    let Some(t_obs) = observed_lifespan(out) else {
        return Verdict::skipped("run did not reach mu_stop");
    };
    let target = 1.0 / out.delta_star;
    let rel = (t_obs - target).abs() / target;
    Verdict::check(
        rel <= 0.05 && out.elapsed_s <= budget_s,
        rel,
        0.05,
        format!(
            "T_obs = {t_obs:.5}, 1/delta_star = {target:.5}, n1 = {}, runtime {:.1} s (budget {budget_s} s)",
            out.config.grid.n1, out.elapsed_s
        ),
    )
}

pub fn lifespan_vs_crossing_time(out: &RunOutcome, budget_s: f64) -> Verdict {
    let (Some(t_obs), Some(t_cross)) = (observed_lifespan(out), out.crossing_time) else {
        return Verdict::skipped("no lifespan or no crossing time");
    };
    let rel = (t_obs - t_cross).abs() / t_cross;
    Verdict::check(
        rel <= 0.01 && out.elapsed_s <= budget_s,
        rel,
        0.01,
        format!(
            "T_obs = {t_obs:.5}, T_cross = {t_cross:.5}, n1 = {}, runtime {:.1} s (budget {budget_s} s)",
            out.config.grid.n1, out.elapsed_s
        ),
    )
}

pub fn mu_linear_vanishing(out: &RunOutcome) -> Verdict {
    let Some(t_obs) = observed_lifespan(out) else {
        return Verdict::skipped("run did not reach mu_stop");
    };
    let (t, mu) = out.clock_series();
    let fit = match mu_linearity_fit(&t, &mu, t_obs) {
        Ok(f) => f,
        Err(e) => return Verdict::skipped(&e.to_string()),
    };
    let kappa = -fit.slope;
    let rel = (kappa - out.delta_star).abs() / out.delta_star;
    let kappa_bound = 5.0 * out.config.data.amplitude.abs();
    Verdict::check(
        fit.max_residual <= 0.02 && rel <= kappa_bound,
        fit.max_residual,
        0.02,
        format!(
            "kappa_fit = {kappa:.6}, delta_star = {:.6}, relative gap {rel:.4} (bound {kappa_bound}), {} samples",
            out.delta_star, fit.samples
        ),
    )
}

pub fn blowup_rate(out: &RunOutcome) -> Result<Verdict> {
    let Some(b) = out.late_blowup(LATE_PHASE) else {
        return Ok(Verdict::skipped("no rows in the late phase"));
    };
    let lower = blowup_reference(out.delta_star, &out.config.eos.build()?);
    let upper = 20.0 * out.delta_star;
    Ok(Verdict::check(
        b.min_product >= lower && b.max_product <= upper,
        b.min_product,
        lower,
        format!("mu|Xv1| in [{:.5}, {:.5}], allowed [{lower:.5}, {upper:.5}]", b.min_product, b.max_product),
    ))
}

pub fn vorticity_regularity(out: &RunOutcome, budget_s: f64) -> Verdict {
    let first = out.first();
    let last = out.last();
    let lip0 = first.gradients.vorticity_lipschitz;
    if lip0 == 0.0 {
        return Verdict::skipped("irrotational data");
    }
    let lip_growth = out.max_of(|o| o.gradients.vorticity_lipschitz) / lip0;
    let grad_growth = last.gradients.velocity / first.gradients.velocity;
    let w0 = first.vorticity_scale;
    let w_end = last.vorticity_at_worst.abs();
    let needed = 1.0 / out.config.run.mu_stop;
    Verdict::check(
        lip_growth <= 10.0 && grad_growth >= needed && w_end > NONZERO_VORTICITY * w0 && out.elapsed_s <= budget_s,
        lip_growth,
        10.0,
        format!(
            "lip growth {lip_growth:.3}, max|dv| growth {grad_growth:.2} (need {needed:.1}), \
             |vorticity| at worst point {w_end:.3e} (initial max {w0:.3e}), runtime {:.1} s (budget {budget_s} s)",
            out.elapsed_s
        ),
    )
}

pub fn chaplygin_control(out: &RunOutcome) -> Verdict {
    let last = out.last();
    let reached = out.stop == StopReason::TimeLimit;
    Verdict::check(
        reached && last.row.mu_star >= 0.9,
        last.row.mu_star,
        0.9,
        if reached && last.row.mu_star >= 0.9 {
            format!("no shock: mu_star >= 0.9 at t = {:.4}", last.row.t)
        } else {
            format!("mu_star = {:.4} at t = {:.4}", last.row.mu_star, last.row.t)
        },
    )
}

pub fn frame_identities(outcomes: &[&RunOutcome]) -> Verdict {
    let defect = outcomes.iter().map(|o| o.max_of(|x| x.identity_defect)).fold(0.0, f64::max);
    let drift = outcomes.iter().map(|o| o.max_of(|x| x.transport_drift)).fold(0.0, f64::max);
    Verdict::check(
        defect <= IDENTITY_TOLERANCE,
        defect,
        IDENTITY_TOLERANCE,
        format!("max identity defect {defect:.3e}; transported frames drift {drift:.3e}"),
    )
}

pub fn hierarchy(out: &RunOutcome) -> Verdict {
    let h = out.hierarchy();
    let bound = HIERARCHY_FACTOR * out.config.data.amplitude.abs();
    let small = h.small();
    Verdict::check(
        small <= bound && h.xb_v1 >= HIERARCHY_GAP * small,
        small,
        bound,
        format!(
            "Xb(r-v1) {:.3e}, Xb v2 {:.3e}, tangential {:.3e}, trchi {:.3e}; Xb v1 {:.3e} = {:.1} x small",
            h.xb_rho_minus_v1,
            h.xb_v2,
            h.tangential,
            h.trchi,
            h.xb_v1,
            h.xb_v1 / small
        ),
    )
}

pub fn reformulation_residuals(table: &ConvergenceTable) -> Verdict {
    let names = ["wave_rho", "wave_v1", "wave_v2", "transport"];
    let series: Vec<_> = names.iter().filter_map(|n| table.get(n)).collect();
    if series.len() != names.len() {
        return Verdict::skipped("residual series missing");
    }
    let margin = series.iter().map(|s| s.min_order() - s.required).fold(f64::INFINITY, f64::min);
    let detail = series.iter().map(|s| format!("{} min order {:.2} (need {:.1})", s.name, s.min_order(), s.required));
    Verdict::check(series.iter().all(|s| s.passed()), margin, 0.0, detail.collect::<Vec<_>>().join("; "))
}

pub fn dual_route_mu(table: &ConvergenceTable) -> Verdict {
    let Some(s) = table.get("dual_route_mu") else {
        return Verdict::skipped("dual-route series missing");
    };
    Verdict::check(
        s.passed(),
        s.min_order(),
        s.required,
        format!("discrepancies {:?} at n1 {:?}, orders {:?}", s.errors, s.n1, s.orders),
    )
}

/// Runtime budgets in seconds.
pub const BASELINE_BUDGET_S: f64 = 60.0;
pub const CROSSING_BUDGET_S: f64 = 120.0;
pub const VORTICITY_BUDGET_S: f64 = 600.0;

/// Verdicts for a single run of its scenario.
pub fn assess(out: &RunOutcome) -> Result<Verdicts> {
    let mut v = Verdicts { frame_identities: frame_identities(&[out]), ..Default::default() };
    match out.config.scenario {
        Scenario::Exact1dCheck | Scenario::BaselineShock => {
            v.lifespan_vs_delta_star = lifespan_vs_delta_star(out, BASELINE_BUDGET_S);
            v.lifespan_vs_crossing_time = lifespan_vs_crossing_time(out, CROSSING_BUDGET_S);
            v.mu_linear_vanishing = mu_linear_vanishing(out);
            v.blowup_rate = blowup_rate(out)?;
            v.hierarchy = hierarchy(out);
        }
        Scenario::VorticityShock => v.vorticity_regularity = vorticity_regularity(out, VORTICITY_BUDGET_S),
        Scenario::ChaplyginControl => v.chaplygin_control = chaplygin_control(out),
        Scenario::ConvergenceStudy => {}
    }
    Ok(v)
}

/// Verdicts for a convergence study.
pub fn assess_study(table: &ConvergenceTable, outcomes: &[RunOutcome]) -> Verdicts {
    let refs: Vec<&RunOutcome> = outcomes.iter().collect();
    Verdicts {
        reformulation_residuals: reformulation_residuals(table),
        dual_route_mu: dual_route_mu(table),
        frame_identities: frame_identities(&refs),
        ..Default::default()
    }
}

pub fn report(out: &RunOutcome, verdicts: Verdicts, convergence: Option<ConvergenceTable>) -> Report {
    let last = out.last();
    Report {
        scenario: out.config.scenario,
        n1: out.config.grid.n1,
        n2: out.config.grid.n2,
        steps: out.steps,
        dt: out.dt,
        elapsed_s: out.elapsed_s,
        stop: out.stop,
        t_end: last.row.t,
        mu_star_end: last.row.mu_star,
        delta_star: out.delta_star,
        delta_star_inverse: 1.0 / out.delta_star,
        crossing_time: out.crossing_time,
        t_obs: observed_lifespan(out),
        exact_error: out.exact_error,
        convergence,
        verdicts,
    }
}

/// File names written by [`write_artifacts`].
pub const CSV_FILE: &str = "run.csv";
pub const VERDICT_FILE: &str = "verdict.json";
pub const CHECKPOINT_FILE: &str = "final.chk";

fn write_file(path: PathBuf, bytes: &[u8]) -> Result<()> {
    std::fs::write(&path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes the run CSV, `verdict.json` and the final-state checkpoint into
/// `dir`, creating it if needed.
pub fn write_artifacts(dir: &Path, out: &RunOutcome, report: &Report) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(dir.join(CSV_FILE), csv(&out.rows).as_bytes())?;
    write_file(dir.join(VERDICT_FILE), report.to_json()?.as_bytes())?;
    checkpoint::write(&dir.join(CHECKPOINT_FILE), &out.final_state)
}
