//! Shock formation with a transverse shear: the velocity gradient blows
//! up like `1/mu⋆` while the specific vorticity stays Lipschitz and is
//! non-zero where the characteristics cross.
//!
//! `cargo run --release --example vorticity_shock [n1 n2]`

use shockform::config::{RunConfig, Scenario};
use shockform::report::vorticity_regularity;
use shockform::runner::run;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = RunConfig::preset(Scenario::VorticityShock);
    let args: Vec<usize> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    if let [n1, n2] = args[..] {
        cfg = cfg.at_resolution(n1, n2);
    }
    println!("{} x {}, lambda = {}", cfg.grid.n1, cfg.grid.n2, cfg.data.vorticity_lambda);
    let out = run(&cfg, |row| {
        println!(
            "t = {:7.3}  mu* = {:.4}  max|dv| = {:.4}  lip(vort) = {:.4e}  res transport = {:.2e}",
            row.t, row.mu_star, row.max_grad_v, row.lip_vort, row.res_transport
        );
    })?;
    let v = vorticity_regularity(&out, f64::INFINITY);
    println!("{:?}: {}", v.status, v.detail);
    Ok(())
}
