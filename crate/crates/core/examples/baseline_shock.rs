//! Plane-symmetric shock formation for a gamma = 3 gas: runs until the
//! characteristic lattice reports `mu⋆ ≤ 0.05` and compares the fitted
//! lifespan with `1/δ⋆` and the characteristic crossing time.
//!
//! `cargo run --release --example baseline_shock [n1]`

use shockform::config::{RunConfig, Scenario};
use shockform::diagnostics::fit_lifespan;
use shockform::runner::run;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = RunConfig::preset(Scenario::BaselineShock);
    if let Some(n1) = std::env::args().nth(1) {
        cfg = cfg.at_resolution(n1.parse()?, cfg.grid.n2);
    }
    let out = run(&cfg, |row| {
        if (row.t * 2.0).fract() < 0.02 {
            println!("t = {:7.3}  mu* = {:.5}  max|Xv1| = {:.4}", row.t, row.mu_star, row.max_xv1);
        }
    })?;
    let (t, mu) = out.clock_series();
    let fit = fit_lifespan(&t, &mu, 0.3)?;
    println!("steps {}  dt {:.3e}  elapsed {:.1} s", out.steps, out.dt, out.elapsed_s);
    println!("T_obs = {:.5}  1/δ⋆ = {:.5}  T⋆ = {:.5}", fit.zero(), 1.0 / out.delta_star, out.crossing_time.unwrap_or(f64::INFINITY));
    Ok(())
}
