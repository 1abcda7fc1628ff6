//! Sound speed, its slope, the nonlinearity factor `c'/c + 1` and the
//! Riemann potential for the built-in equations of state and a tabulated
//! law sampled from a polytrope.
//!
//! `cargo run --example eos_tour`

use shockform::eos::Eos;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let knots: Vec<f64> = (0..=40).map(|k| -1.0 + k as f64 * 0.05).collect();
    let speeds: Vec<f64> = knots.iter().map(|r| (0.5 * r).exp()).collect();
    let laws = [
        ("gamma = 3", Eos::polytropic(3.0)?),
        ("gamma = 1.4", Eos::polytropic(1.4)?),
        ("chaplygin", Eos::chaplygin()),
        ("table (gamma = 2)", Eos::tabulated(knots, speeds)?),
    ];
    println!("{:<18} {:>6} {:>9} {:>9} {:>12} {:>10}", "law", "r", "c", "c'", "c'/c + 1", "F(r)");
    for (name, eos) in &laws {
        for r in [-0.1, 0.0, 0.1] {
            println!(
                "{name:<18} {r:>6.2} {:>9.5} {:>9.5} {:>12.3e} {:>10.6}",
                eos.sound_speed(r)?,
                eos.sound_speed_slope(r)?,
                eos.nonlinearity(r)?,
                eos.riemann_potential(r)?
            );
        }
    }
    // Outside the working interval every law refuses to evaluate.
    assert!(laws[0].1.sound_speed(1.5).is_err());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
