//! Acceptance suite: full-length runs of every scenario, one verdict line
//! per criterion. Exits nonzero if any criterion fails or cannot be
//! evaluated.
//!
//! Expect tens of minutes on a single core.

use std::process::ExitCode;
use std::time::Instant;

use shockform::config::{RunConfig, Scenario};
use shockform::error::Result;
use shockform::report::{self, Status, Verdict, BASELINE_BUDGET_S, CROSSING_BUDGET_S, VORTICITY_BUDGET_S};
use shockform::runner::{run, RunOutcome};
use shockform::study::{plane_levels, plane_series, residual_series, ConvergenceTable};

fn timed<T>(label: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f()?;
    eprintln!("  {label}: {:.1} s", start.elapsed().as_secs_f64());
    Ok(out)
}

fn outcome_line(out: &RunOutcome) -> String {
    format!(
        "{} {}x{}: {} steps, dt {:.3e}, stop {:?}, {:.1} s",
        out.config.scenario.name(),
        out.config.grid.n1,
        out.config.grid.n2,
        out.steps,
        out.dt,
        out.stop,
        out.elapsed_s
    )
}

fn evaluate() -> Result<Vec<(&'static str, Verdict)>> {
    // Plane-symmetric family: coarse levels stop just past the comparison
    // time; the finest level is the full baseline run.
    let baseline = RunConfig::preset(Scenario::BaselineShock);
    let mut levels = plane_levels(&baseline, 3);
    let finest_cfg = levels.pop().expect("three levels");
    let mut plane = Vec::new();
    for mut cfg in levels {
        cfg.run.t_max = cfg.run.t_compare;
        plane.push(timed(&format!("plane n1 = {}", cfg.grid.n1), || run(&cfg, |_| {}))?);
    }
    let finest = timed("baseline n1 = 2048", || run(&finest_cfg, |_| {}))?;
    eprintln!("  {}", outcome_line(&finest));
    plane.push(finest);

    let vort = timed("vorticity", || run(&RunConfig::preset(Scenario::VorticityShock), |_| {}))?;
    eprintln!("  {}", outcome_line(&vort));
    let chap = timed("chaplygin", || run(&RunConfig::preset(Scenario::ChaplyginControl), |_| {}))?;
    eprintln!("  {}", outcome_line(&chap));

    let mut series = plane_series(&plane)?;
    series.extend(timed("residual study", || residual_series(&RunConfig::preset(Scenario::ConvergenceStudy), 3))?);
    let table = ConvergenceTable { series };
    eprint!("{}", table.render());

    let finest = plane.last().expect("three levels");
    let all: Vec<&RunOutcome> = plane.iter().chain([&vort, &chap]).collect();
    Ok(vec![
        ("lifespan_vs_delta_star", report::lifespan_vs_delta_star(finest, BASELINE_BUDGET_S)),
        ("lifespan_vs_crossing_time", report::lifespan_vs_crossing_time(finest, CROSSING_BUDGET_S)),
        ("mu_linear_vanishing", report::mu_linear_vanishing(finest)),
        ("blowup_rate", report::blowup_rate(finest)?),
        ("vorticity_regularity", report::vorticity_regularity(&vort, VORTICITY_BUDGET_S)),
        ("chaplygin_control", report::chaplygin_control(&chap)),
        ("reformulation_residuals", report::reformulation_residuals(&table)),
        ("frame_identities", report::frame_identities(&all)),
        ("dual_route_mu", report::dual_route_mu(&table)),
        ("hierarchy", report::hierarchy(finest)),
    ])
}

fn main() -> ExitCode {
    eprintln!("acceptance: running full scenarios");
    let verdicts = match evaluate() {
        Ok(v) => v,
        Err(e) => {
            println!("acceptance aborted: {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut failed = 0;
    for (k, (name, v)) in verdicts.iter().enumerate() {
        let tag = match v.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NotEvaluated => "NOT EVALUATED",
        };
        if v.status != Status::Pass {
            failed += 1;
        }
        println!("{tag} [{}] {name}: {}", k + 1, v.detail);
    }
    println!("acceptance: {} of {} criteria passed", verdicts.len() - failed, verdicts.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
