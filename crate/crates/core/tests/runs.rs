//! End-to-end behaviour of short runs: reproducibility, conservation of
//! the eikonal labels, the regime of the shock clock and configuration
//! errors.

use shockform::config::{RunConfig, Scenario};
use shockform::error::Error;
use shockform::report::{assess, Status};
use shockform::runner::{csv, run, Simulation, StopReason, CSV_COLUMNS};

fn short(scenario: Scenario, n1: usize, n2: usize, t_max: f64) -> RunConfig {
    let mut cfg = RunConfig::preset(scenario).at_resolution(n1, n2);
    cfg.run.t_max = t_max;
    cfg.run.t_compare = 0.0;
    cfg.run.output_every = 10;
    cfg.lattice.n_u = 17;
    cfg
}

#[test]
fn identical_configs_give_identical_csv() {
    let cfg = short(Scenario::BaselineShock, 128, 16, 0.3);
    let a = csv(&run(&cfg, |_| {}).unwrap().rows);
    let b = csv(&run(&cfg, |_| {}).unwrap().rows);
    assert_eq!(a, b);
    assert!(a.starts_with(&CSV_COLUMNS.join(",")));
}

#[test]
fn clock_is_monotone_and_labels_are_conserved() {
    let cfg = short(Scenario::BaselineShock, 256, 16, 2.0);
    let out = run(&cfg, |_| {}).unwrap();
    assert_eq!(out.stop, StopReason::TimeLimit);
    let (t, mu) = out.clock_series();
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    // mu⋆ may wobble by no more than the amplitude after leaving 1.
    let mut lowest = f64::INFINITY;
    for m in &mu {
        assert!(*m <= lowest + cfg.data.amplitude);
        lowest = lowest.min(*m);
    }
    assert!(out.max_of(|o| o.identity_defect) < 1e-8);

    // Label drift is pure truncation error: it falls at the scheme order.
    let fine = run(&short(Scenario::BaselineShock, 512, 16, 2.0), |_| {}).unwrap();
    let (coarse_drift, fine_drift) = (out.max_of(|o| o.label_drift), fine.max_of(|o| o.label_drift));
    let order = (coarse_drift / fine_drift).log2();
    assert!(order >= 3.5, "drift {coarse_drift:e} -> {fine_drift:e}, order {order}");
}

#[test]
fn rotational_run_keeps_transport_residual_small() {
    let cfg = short(Scenario::VorticityShock, 128, 16, 0.5);
    let out = run(&cfg, |_| {}).unwrap();
    let last = out.last();
    assert!(last.row.res_transport < 1e-6, "{}", last.row.res_transport);
    assert!(last.row.res_wave_rho.is_finite() && last.row.res_wave_rho < 1e-4);
    assert!(last.vorticity_scale > 0.0);
}

#[test]
fn time_step_lands_on_the_comparison_time() {
    let mut cfg = short(Scenario::BaselineShock, 128, 16, 1.0);
    cfg.run.t_compare = 0.7;
    let sim = Simulation::new(&cfg).unwrap();
    let k = 0.7 / sim.time_step();
    assert!((k - k.round()).abs() < 1e-9);
    let out = run(&cfg, |_| {}).unwrap();
    assert!((out.at_compare.unwrap().row.t - 0.7).abs() < 1e-12);
    assert!(out.exact_error.unwrap() < 1e-3);
}

#[test]
fn short_runs_leave_shock_criteria_unevaluated() {
    let cfg = short(Scenario::BaselineShock, 128, 16, 0.3);
    let v = assess(&run(&cfg, |_| {}).unwrap()).unwrap();
    assert_eq!(v.lifespan_vs_delta_star.status, Status::NotEvaluated);
    assert_eq!(v.frame_identities.status, Status::Pass);
    assert!(v.all_passed());
}

#[test]
fn empty_config_lists_required_keys() {
    match RunConfig::parse("") {
        Err(Error::MissingKeys(keys)) => {
            for k in ["scenario", "eos.kind", "grid.n1", "grid.n2", "grid.L1", "run.t_max", "data.amplitude"] {
                assert!(keys.iter().any(|x| x == k), "{k} missing from {keys:?}");
            }
        }
        other => panic!("expected MissingKeys, got {other:?}"),
    }
}

#[test]
fn bad_values_name_their_key() {
    let base = "scenario = baseline_shock\neos.kind = polytropic\ngrid.n1 = 64\ngrid.n2 = 16\ngrid.L1 = 2\n\
                run.t_max = 1\ndata.amplitude = 0.01\n";
    let err = RunConfig::parse(&format!("{base}run.mu_stop = 0.7\n")).unwrap_err();
    assert!(err.to_string().contains("run.mu_stop"), "{err}");
    let err = RunConfig::parse(&format!("{base}grid.colour = red\n")).unwrap_err();
    assert!(matches!(err, Error::Parse { line: 8, .. }), "{err}");
    let err = RunConfig::parse(&base.replace("grid.L1 = 2", "grid.L1 = 1.5")).unwrap_err();
    assert!(err.to_string().contains("grid.L1"), "{err}");
}
