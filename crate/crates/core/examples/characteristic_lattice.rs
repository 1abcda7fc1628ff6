//! Transport of `mu` and `L` along a lattice of outgoing characteristics,
//! compared with `mu` recovered from the Eulerian eikonal function, and the
//! two routes to `tr χ`.
//!
//! `cargo run --release --example characteristic_lattice [n1]`

use shockform::config::{RunConfig, Scenario};
use shockform::runner::Simulation;

pub fn run_example_at(n1: usize, t_end: f64) -> Result<f64, Box<dyn std::error::Error>> {
    let mut cfg = RunConfig::preset(Scenario::BaselineShock).at_resolution(n1, 16);
    cfg.lattice.n_u = 65;
    cfg.run.t_compare = t_end;
    let mut sim = Simulation::new(&cfg)?;
    println!("n1 = {n1}, dt = {:.3e}, lattice {} x {}", sim.time_step(), sim.lattice.n_u, sim.lattice.n_theta);
    let mut next_report = 0.0;
    while sim.state.t < t_end - 0.5 * sim.time_step() {
        if sim.state.t >= next_report {
            let (j, worst) = sim.lattice.worst();
            println!(
                "t = {:5.2}  mu* = {:.5}  at label u = {:.3}, x1 = {:+.4}",
                sim.state.t,
                worst.mu,
                sim.lattice.labels[j / sim.lattice.n_theta],
                worst.x[0]
            );
            next_report += 0.5;
        }
        sim.step()?;
    }
    let obs = sim.observe()?;
    println!("at t = {:.2}:", sim.state.t);
    println!("  relative gap between transported and eikonal mu {:.3e}", obs.dual_route);
    println!("  label drift of the eikonal function           {:.3e}", obs.label_drift);
    println!("  transported frame drift                       {:.3e}", obs.transport_drift);
    if let Some(gap) = obs.trchi_route_gap {
        println!("  gap between the two tr chi routes            {gap:.3e}");
    }
    Ok(obs.dual_route)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gap = run_example_at(256, 1.0)?;
    assert!(gap < 1e-2);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n1 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(512);
    run_example_at(n1, 4.0).map(|_| ())
}
