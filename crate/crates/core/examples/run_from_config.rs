//! A run driven by flat `key = value` text, written out as `run.csv`,
//! `verdict.json` and a binary checkpoint, with the checkpoint read back.
//!
//! `cargo run --release --example run_from_config [out_dir]`

use std::path::{Path, PathBuf};

use shockform::checkpoint;
use shockform::config::RunConfig;
use shockform::report::{assess, report, write_artifacts, CHECKPOINT_FILE};
use shockform::runner::run;

const CONFIG: &str = "\
# short plane-symmetric run on a coarse grid
scenario = baseline_shock
eos.kind = polytropic
eos.gamma = 3
grid.n1 = 256
grid.n2 = 16
grid.L1 = 2
data.amplitude = 0.01
run.t_max = 1.0
run.output_every = 50
lattice.n_u = 33
";

pub fn run_in(dir: &Path) -> Result<(), Box<dyn std::error::Error>> {
    let cfg = RunConfig::parse(CONFIG)?;
    let out = run(&cfg, |_| {})?;
    let rep = report(&out, assess(&out)?, None);
    write_artifacts(dir, &out, &rep)?;
    let restored = checkpoint::read(&dir.join(CHECKPOINT_FILE))?;
    assert_eq!(restored, out.final_state);
    println!("{} rows, final mu* = {:.5}, artifacts in {}", out.rows.len(), rep.mu_star_end, dir.display());
    println!("{}", rep.to_json()?);
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("shockform-example-{}", std::process::id()));
    let result = run_in(&dir);
    let _ = std::fs::remove_dir_all(&dir);
    result
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out/run_from_config"));
    run_in(&dir)
}
