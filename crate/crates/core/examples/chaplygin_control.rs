//! The same data evolved with the Chaplygin gas, whose plane waves are
//! linearly degenerate: `mu⋆` stays near one over the window in which the
//! polytropic run forms a shock.
//!
//! `cargo run --release --example chaplygin_control [n1]`

use shockform::config::{RunConfig, Scenario};
use shockform::report::chaplygin_control;
use shockform::runner::run;

pub fn run_example_at(n1: usize, t_max: f64) -> Result<f64, Box<dyn std::error::Error>> {
    let mut cfg = RunConfig::preset(Scenario::ChaplyginControl).at_resolution(n1, 16);
    cfg.run.t_max = t_max;
    let out = run(&cfg, |row| println!("t = {:7.3}  mu* = {:.5}", row.t, row.mu_star))?;
    println!("{}", chaplygin_control(&out).detail);
    Ok(out.last().row.mu_star)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mu = run_example_at(256, 2.0)?;
    assert!(mu > 0.9);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n1 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1024);
    let t_end = RunConfig::preset(Scenario::ChaplyginControl).run.t_max;
    run_example_at(n1, t_end).map(|_| ())
}
