//! Observed orders of the wave and transport residuals on a rotational,
//! transversely modulated flow, and optionally of the plane-symmetric
//! solution and the two routes to `mu` (slow: runs up to n1 = 2048).
//!
//! `cargo run --release --example convergence_study [levels] [--plane]`

use shockform::config::{RunConfig, Scenario};
use shockform::study::{convergence_study, residual_series, ConvergenceTable};

pub fn run_example_with(levels: usize) -> Result<ConvergenceTable, Box<dyn std::error::Error>> {
    let cfg = RunConfig::preset(Scenario::ConvergenceStudy);
    let table = ConvergenceTable { series: residual_series(&cfg, levels)? };
    print!("{}", table.render());
    Ok(table)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let table = run_example_with(3)?;
    assert!(table.series.iter().all(|s| s.passed()));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let levels = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3);
    if std::env::args().any(|a| a == "--plane") {
        let (table, _) = convergence_study(&RunConfig::preset(Scenario::ConvergenceStudy), levels)?;
        print!("{}", table.render());
    } else {
        run_example_with(levels)?;
    }
    Ok(())
}
