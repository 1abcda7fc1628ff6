use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use shockform::config::{RunConfig, Scenario};
use shockform::report::{self, Status};
use shockform::runner::run;
use shockform::study::convergence_study;

/// Runs a shock-formation scenario and writes run.csv, verdict.json and
/// final.chk.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario preset; overrides the config file's `scenario`.
    #[arg(long)]
    scenario: Option<Scenario>,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
    /// Dyadic levels of the convergence study.
    #[arg(long, default_value_t = 3)]
    levels: usize,
}

fn main() -> ExitCode {
    match execute(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(args: Args) -> Result<bool, Box<dyn std::error::Error>> {
    if let Some(n) = args.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let cfg = match (&args.config, args.scenario) {
        (Some(path), sc) => {
            let mut cfg = RunConfig::load(path)?;
            if let Some(sc) = sc {
                cfg.scenario = sc;
            }
            cfg
        }
        (None, Some(sc)) => RunConfig::preset(sc),
        (None, None) => return Err("pass --config <path> or --scenario <name>".into()),
    };
    cfg.validate()?;
    let dir = args.out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));

    let (outcome, rep) = if cfg.scenario == Scenario::ConvergenceStudy {
        let (table, mut outcomes) = convergence_study(&cfg, args.levels)?;
        print!("{}", table.render());
        let verdicts = report::assess_study(&table, &outcomes);
        let finest = outcomes.pop().expect("at least three levels");
        let rep = report::report(&finest, verdicts, Some(table));
        (finest, rep)
    } else {
        let out = run(&cfg, |row| eprintln!("t = {:9.4}  mu* = {:.5}", row.t, row.mu_star))?;
        let verdicts = report::assess(&out)?;
        let rep = report::report(&out, verdicts, None);
        (out, rep)
    };
    report::write_artifacts(&dir, &outcome, &rep)?;

    println!(
        "{}: {} steps, stop {:?}, {:.1} s, T_obs {:?}, 1/delta_star {:.5}, crossing time {:?}",
        rep.scenario, rep.steps, rep.stop, rep.elapsed_s, rep.t_obs, rep.delta_star_inverse, rep.crossing_time
    );
    for (name, v) in rep.verdicts.entries() {
        if v.status != Status::NotEvaluated {
            println!("{:<26} {:?}  {}", name, v.status, v.detail);
        }
    }
    println!("artifacts in {}", dir.display());
    Ok(rep.verdicts.all_passed())
}
