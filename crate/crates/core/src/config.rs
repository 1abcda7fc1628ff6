//! Flat `key = value` run configuration.
//!
//! Blank lines and `#` comments are ignored. Unknown keys are rejected so
//! that typos do not silently fall back to defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::eos::Eos;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::plane_wave::{self, DataRecipe, Shear, Window};

/// Keys every configuration file must set.
pub const REQUIRED_KEYS: [&str; 7] =
    ["scenario", "eos.kind", "grid.n1", "grid.n2", "grid.L1", "run.t_max", "data.amplitude"];

const OPTIONAL_KEYS: [&str; 19] = [
    "eos.gamma",
    "eos.table_path",
    "grid.x1_offset",
    "data.profile",
    "data.window",
    "data.window_ramp",
    "data.vorticity_lambda",
    "data.vorticity_profile",
    "data.vorticity_phase",
    "data.transverse_modulation",
    "run.cfl",
    "run.filter_strength",
    "run.mu_stop",
    "run.output_every",
    "run.t_compare",
    "lattice.n_u",
    "lattice.n_theta",
    "lattice.u_max",
    "output.dir",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Exact1dCheck,
    BaselineShock,
    VorticityShock,
    ChaplyginControl,
    ConvergenceStudy,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::Exact1dCheck,
        Scenario::BaselineShock,
        Scenario::VorticityShock,
        Scenario::ChaplyginControl,
        Scenario::ConvergenceStudy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Exact1dCheck => "exact_1d_check",
            Scenario::BaselineShock => "baseline_shock",
            Scenario::VorticityShock => "vorticity_shock",
            Scenario::ChaplyginControl => "chaplygin_control",
            Scenario::ConvergenceStudy => "convergence_study",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum EosKind {
    Polytropic { gamma: f64 },
    Chaplygin,
    Custom { table_path: PathBuf },
}

impl EosKind {
    pub fn build(&self) -> Result<Eos> {
        match self {
            EosKind::Polytropic { gamma } => Eos::polytropic(*gamma),
            EosKind::Chaplygin => Ok(Eos::chaplygin()),
            EosKind::Custom { table_path } => Eos::load_table(table_path),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub n1: usize,
    pub n2: usize,
    pub l1: f64,
    pub x1_offset: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.n1, self.n2, self.l1, self.x1_offset)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DataSpec {
    pub amplitude: f64,
    /// Smooth window ramp width; `None` for an unwindowed sine.
    pub window_ramp: Option<f64>,
    pub vorticity_lambda: f64,
    pub vorticity_phase: f64,
    pub transverse_modulation: f64,
}

impl DataSpec {
    pub fn recipe(&self) -> DataRecipe {
        DataRecipe {
            amplitude: self.amplitude,
            window: self.window_ramp.map_or(Window::None, |ramp| Window::Smooth { ramp }),
            shear: if self.vorticity_lambda == 0.0 {
                Shear::None
            } else {
                Shear::Sine { strength: self.vorticity_lambda, phase: self.vorticity_phase }
            },
            modulation: self.transverse_modulation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RunSpec {
    pub t_max: f64,
    pub cfl: f64,
    pub filter_strength: f64,
    pub mu_stop: f64,
    /// Steps between full diagnostic rows.
    pub output_every: usize,
    /// Time at which the two routes to `mu` are compared.
    pub t_compare: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LatticeSpec {
    pub n_u: usize,
    pub n_theta: usize,
    pub u_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub eos: EosKind,
    pub grid: GridSpec,
    pub data: DataSpec,
    pub run: RunSpec,
    pub lattice: LatticeSpec,
    pub output_dir: Option<PathBuf>,
}

fn parse_lines(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: n + 1, msg: format!("expected `key = value`, got `{line}`") })?;
        let (k, v) = (k.trim(), v.trim());
        if !REQUIRED_KEYS.contains(&k) && !OPTIONAL_KEYS.contains(&k) {
            return Err(Error::Parse { line: n + 1, msg: format!("unknown key `{k}`") });
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::Parse { line: n + 1, msg: format!("duplicate key `{k}`") });
        }
    }
    Ok(map)
}

struct Keys(BTreeMap<String, String>);

impl Keys {
    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.0
            .get(key)
            .map(|v| v.parse::<T>().map_err(|_| Error::Config(format!("{key}: cannot parse `{v}`"))))
            .transpose()
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn need<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?.ok_or_else(|| Error::MissingKeys(vec![key.to_string()]))
    }

    fn text(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

impl RunConfig {
    /// Parses and validates configuration text.
    pub fn parse(text: &str) -> Result<Self> {
        let keys = Keys(parse_lines(text)?);
        let missing: Vec<String> =
            REQUIRED_KEYS.iter().filter(|k| !keys.0.contains_key(**k)).map(|k| k.to_string()).collect();
        if !missing.is_empty() {
            return Err(Error::MissingKeys(missing));
        }
        let scenario: Scenario = keys.need("scenario")?;
        let eos = match keys.text("eos.kind").unwrap_or_default() {
            "polytropic" => EosKind::Polytropic { gamma: keys.or("eos.gamma", 3.0)? },
            "chaplygin" => EosKind::Chaplygin,
            "custom" => EosKind::Custom {
                table_path: keys
                    .get::<PathBuf>("eos.table_path")?
                    .ok_or_else(|| Error::Config("eos.kind = custom needs eos.table_path".into()))?,
            },
            other => return Err(Error::Config(format!("eos.kind: unknown kind `{other}`"))),
        };
        let l1: f64 = keys.need("grid.L1")?;
        let grid = GridSpec {
            n1: keys.need("grid.n1")?,
            n2: keys.need("grid.n2")?,
            l1,
            x1_offset: keys.or("grid.x1_offset", 0.5 - 0.5 * l1)?,
        };
        if let Some(p) = keys.text("data.profile") {
            if p != "sine" {
                return Err(Error::Config(format!("data.profile: unknown profile `{p}`")));
            }
        }
        let window_ramp = match keys.text("data.window").unwrap_or("smooth") {
            "smooth" => Some(keys.or("data.window_ramp", plane_wave::DEFAULT_RAMP)?),
            "none" => None,
            other => return Err(Error::Config(format!("data.window: unknown window `{other}`"))),
        };
        let mut vorticity_lambda = keys.or("data.vorticity_lambda", 0.0)?;
        match keys.text("data.vorticity_profile").unwrap_or("sine") {
            "sine" => {}
            "none" => vorticity_lambda = 0.0,
            other => return Err(Error::Config(format!("data.vorticity_profile: unknown profile `{other}`"))),
        }
        let data = DataSpec {
            amplitude: keys.need("data.amplitude")?,
            window_ramp,
            vorticity_lambda,
            vorticity_phase: keys.or("data.vorticity_phase", 0.25)?,
            transverse_modulation: keys.or("data.transverse_modulation", 0.0)?,
        };
        let t_max: f64 = keys.need("run.t_max")?;
        let run = RunSpec {
            t_max,
            cfl: keys.or("run.cfl", 0.4)?,
            filter_strength: keys.or("run.filter_strength", 1e-2)?,
            mu_stop: keys.or("run.mu_stop", 0.05)?,
            output_every: keys.or("run.output_every", 100)?,
            t_compare: keys.or("run.t_compare", 4.0f64.min(t_max))?,
        };
        let lattice = LatticeSpec {
            n_u: keys.or("lattice.n_u", 257)?,
            n_theta: keys.or("lattice.n_theta", if grid.n2 > 16 { 16 } else { 8 })?,
            u_max: keys.or("lattice.u_max", 1.0)?,
        };
        let cfg = RunConfig { scenario, eos, grid, data, run, lattice, output_dir: keys.get("output.dir")? };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Built-in settings for each scenario.
    pub fn preset(scenario: Scenario) -> Self {
        let text = match scenario {
            Scenario::Exact1dCheck => {
                "eos.kind = polytropic\neos.gamma = 3\ngrid.n1 = 512\ngrid.n2 = 16\ngrid.L1 = 2\n\
                 data.amplitude = 0.01\nrun.t_max = 1\nlattice.n_u = 65\nrun.output_every = 20\n"
            }
            Scenario::BaselineShock => {
                "eos.kind = polytropic\neos.gamma = 3\ngrid.n1 = 2048\ngrid.n2 = 16\ngrid.L1 = 2\n\
                 data.amplitude = 0.01\nrun.t_max = 12\n"
            }
            Scenario::VorticityShock => {
                "eos.kind = polytropic\neos.gamma = 3\ngrid.n1 = 1024\ngrid.n2 = 64\ngrid.L1 = 1\n\
                 grid.x1_offset = 0\ndata.window = none\ndata.amplitude = 0.01\ndata.vorticity_lambda = 0.001\ndata.vorticity_phase = 0.45\n\
                 run.t_max = 12\nrun.output_every = 50\n"
            }
            Scenario::ChaplyginControl => {
                "eos.kind = chaplygin\ngrid.n1 = 1024\ngrid.n2 = 16\ngrid.L1 = 2\ndata.amplitude = 0.01\n\
                 run.t_max = 9.549177212592829\n"
            }
            Scenario::ConvergenceStudy => {
                "eos.kind = polytropic\neos.gamma = 3\ngrid.n1 = 512\ngrid.n2 = 16\ngrid.L1 = 2\n\
                 data.amplitude = 0.01\nrun.t_max = 4\nrun.t_compare = 4\nrun.output_every = 200\n"
            }
        };
        Self::parse(&format!("scenario = {}\n{text}", scenario.name())).expect("presets are valid")
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.build()?;
        let r = &self.run;
        if !(r.mu_stop > 0.0 && r.mu_stop < 0.5) {
            return Err(Error::Config(format!("run.mu_stop = {} must lie in (0, 0.5)", r.mu_stop)));
        }
        if !(r.t_max > 0.0 && r.t_max.is_finite()) {
            return Err(Error::Config("run.t_max must be positive".into()));
        }
        if !(r.cfl > 0.0 && r.cfl <= 1.0) {
            return Err(Error::Config(format!("run.cfl = {} must lie in (0, 1]", r.cfl)));
        }
        if !(r.filter_strength >= 0.0) {
            return Err(Error::Config("run.filter_strength must be non-negative".into()));
        }
        if r.output_every == 0 {
            return Err(Error::Config("run.output_every must be at least 1".into()));
        }
        if self.data.window_ramp.is_some() && self.grid.l1 < 2.0 {
            return Err(Error::Config(format!(
                "grid.L1 = {} is too short: windowed data need L1 >= 2 so the pulse never meets its periodic image",
                self.grid.l1
            )));
        }
        let l = &self.lattice;
        if !(l.u_max > 0.0 && l.u_max <= 1.0) {
            return Err(Error::Config(format!("lattice.u_max = {} must lie in (0, 1]", l.u_max)));
        }
        if l.n_u < 5 || l.n_theta < 8 {
            return Err(Error::Config("lattice needs n_u >= 5 and n_theta >= 8".into()));
        }
        self.data.recipe().validate(&self.grid.build()?)
    }

    /// Same configuration on a different grid.
    pub fn at_resolution(&self, n1: usize, n2: usize) -> Self {
        let mut c = self.clone();
        c.grid.n1 = n1;
        c.grid.n2 = n2;
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_lists_required_keys() {
        match RunConfig::parse("") {
            Err(Error::MissingKeys(keys)) => assert_eq!(keys.len(), REQUIRED_KEYS.len()),
            other => panic!("unexpected {other:?}"),
        }
        match RunConfig::parse("scenario = baseline_shock\ngrid.n1 = 64\n") {
            Err(Error::MissingKeys(keys)) => {
                assert!(keys.contains(&"grid.L1".to_string()) && !keys.contains(&"grid.n1".to_string()))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parses_comments_and_defaults() {
        let cfg = RunConfig::parse(
            "# baseline\nscenario = baseline_shock\neos.kind = polytropic  # gamma defaults to 3\n\
             grid.n1 = 256\ngrid.n2 = 16\ngrid.L1 = 2\nrun.t_max = 3\ndata.amplitude = 0.01\n",
        )
        .unwrap();
        assert_eq!(cfg.eos, EosKind::Polytropic { gamma: 3.0 });
        assert_eq!(cfg.grid.x1_offset, -0.5);
        assert_eq!(cfg.run.mu_stop, 0.05);
        assert_eq!(cfg.data.window_ramp, Some(plane_wave::DEFAULT_RAMP));
    }

    #[test]
    fn rejects_bad_input() {
        let base = "scenario = baseline_shock\neos.kind = polytropic\ngrid.n1 = 256\ngrid.n2 = 16\n\
                    run.t_max = 3\ndata.amplitude = 0.01\n";
        assert!(matches!(RunConfig::parse(&format!("{base}grid.L1 = 2\nbogus = 1\n")), Err(Error::Parse { line: 8, .. })));
        assert!(matches!(RunConfig::parse(&format!("{base}grid.L1 = 1.5\n")), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse(&format!("{base}grid.L1 = 2\nrun.mu_stop = 0.7\n")), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse(&format!("{base}grid.L1 = two\n")), Err(Error::Config(_))));
        assert!("no_such".parse::<Scenario>().is_err());
    }

    #[test]
    fn presets_validate() {
        for sc in Scenario::ALL {
            let cfg = RunConfig::preset(sc);
            assert_eq!(cfg.scenario, sc);
            assert_eq!(cfg.scenario.name().parse::<Scenario>().unwrap(), sc);
        }
    }
}
