//! The exact plane-symmetric simple wave: data-size functional, crossing
//! time of the characteristics, and a 1D solver run compared against the
//! exact solution before the crossing.
//!
//! `cargo run --release --example simple_wave [n1]`

use shockform::eos::Eos;
use shockform::euler::Stepper;
use shockform::grid::Grid;
use shockform::plane_wave::{build_initial_data, crossing_time, delta_star, exact_simple_wave, simple_wave_error, DataRecipe};

pub fn run_example_at(n1: usize) -> Result<f64, Box<dyn std::error::Error>> {
    let eos = Eos::polytropic(3.0)?;
    let recipe = DataRecipe::windowed_sine(0.01);
    let ds = delta_star(&recipe, &eos)?;
    let tc = crossing_time(&recipe, &eos)?;
    println!("delta_star = {ds:.12}  1/delta_star = {:.5}  crossing time = {tc:.5}", 1.0 / ds);

    for t in [0.0, 2.0, 4.0] {
        let (r, v) = exact_simple_wave(&recipe, &eos, 0.5 + t, t)?;
        println!("t = {t:.1}: at x = {:.1}, r = {r:+.6}, v1 = {v:+.6}", 0.5 + t);
    }

    let grid = Grid::new(n1, 16, 2.0, -0.5)?;
    let mut state = build_initial_data(&recipe, &eos, grid)?;
    let mut stepper = Stepper::new(grid, 0.4, 1e-2);
    let t_end = 2.0;
    let steps = (t_end / (0.98 * stepper.max_dt(&state, &eos))).ceil() as usize;
    for _ in 0..steps {
        stepper.step(&mut state, &eos, t_end / steps as f64)?;
    }
    let err = simple_wave_error(&state, &recipe, &eos)?;
    println!("n1 = {n1}: max deviation from the exact wave at t = {t_end} is {err:.3e}");
    Ok(err)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let err = run_example_at(256)?;
    assert!(err < 1e-4);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n1 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(512);
    run_example_at(n1).map(|_| ())
}
