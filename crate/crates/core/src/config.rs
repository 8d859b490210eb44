//! Plain-text run configuration.
//!
//! Format: `[section]` headers with `key = value` lines; `#` and `;` start
//! comments. Sections: `[grid]`, `[solver]`, `[criterion]`, `[serrin]`,
//! `[monitor]`, `[initial]`. Unknown keys are rejected, so typos fail loudly.
//! Every key has a default; a missing section just keeps the defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::SerrinCondition;
use crate::solver::{BoundaryKind, InitialData, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub r_max: f64,
    pub z_half: f64,
    pub n_r: usize,
    pub n_z: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            r_max: 5.0,
            z_half: 5.0,
            n_r: 128,
            n_z: 128,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverSpec {
    /// Viscosity (1/time * length^2).
    pub nu: f64,
    /// Time step (time units).
    pub dt: f64,
    /// Final time (time units).
    pub t_end: f64,
    /// Advective CFL fraction in (0, 1].
    pub cfl_safety: f64,
    /// Continuity residual target after projection (1/time).
    pub projection_tol: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            nu: 0.1,
            dt: 5e-4,
            t_end: 0.2,
            cfl_safety: 0.5,
            projection_tol: 1e-8,
        }
    }
}

impl SolverSpec {
    pub fn to_solver_config(&self) -> SolverConfig {
        SolverConfig {
            nu: self.nu,
            dt: self.dt,
            t_end: self.t_end,
            cfl_safety: self.cfl_safety,
            projection_tol: self.projection_tol,
            bc: BoundaryKind::DecayingFarField,
            max_projection_iters: 40_000,
            forcing: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionSpec {
    /// Family parameter in (0, 1/14).
    pub eps: f64,
    /// Swirl decay exponent in (0, 1/3).
    pub delta0: f64,
}

impl Default for CriterionSpec {
    fn default() -> Self {
        CriterionSpec {
            eps: 0.05,
            delta0: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SerrinSpec {
    pub s: f64,
    pub w: f64,
    pub d: f64,
    /// Near-axis cutoff radius (length units).
    pub delta1: f64,
}

impl Default for SerrinSpec {
    fn default() -> Self {
        SerrinSpec {
            s: 6.0,
            w: 4.0,
            d: 0.0,
            delta1: 0.5,
        }
    }
}

impl SerrinSpec {
    pub fn to_condition(&self) -> SerrinCondition {
        SerrinCondition {
            s: self.s,
            w: self.w,
            d: self.d,
            delta1: self.delta1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorSpec {
    /// Record every `cadence` solver steps.
    pub cadence: usize,
    pub out_dir: PathBuf,
    pub name: String,
    /// Ensemble size used to calibrate the weighted-estimate constant.
    pub calibration_states: usize,
}

impl Default for MonitorSpec {
    fn default() -> Self {
        MonitorSpec {
            cadence: 10,
            out_dir: PathBuf::from("runs"),
            name: "run".to_string(),
            calibration_states: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialSpec {
    pub recipe: String,
    pub amplitude: f64,
    pub width: f64,
    pub meridional_amplitude: f64,
    pub meridional_width: f64,
    pub checkpoint: Option<PathBuf>,
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec {
            recipe: "gaussian_swirl".to_string(),
            amplitude: 1.0,
            width: 1.0,
            meridional_amplitude: 0.0,
            meridional_width: 1.0,
            checkpoint: None,
        }
    }
}

impl InitialSpec {
    pub fn to_initial_data(&self) -> Result<InitialData> {
        match self.recipe.as_str() {
            "rest" => Ok(InitialData::Rest),
            "gaussian_swirl" => Ok(InitialData::GaussianSwirl {
                amplitude: self.amplitude,
                width: self.width,
            }),
            "meridional" => Ok(InitialData::Meridional {
                amplitude: self.meridional_amplitude,
                width: self.meridional_width,
            }),
            "swirl_and_meridional" => Ok(InitialData::SwirlAndMeridional {
                swirl_amplitude: self.amplitude,
                swirl_width: self.width,
                meridional_amplitude: self.meridional_amplitude,
                meridional_width: self.meridional_width,
            }),
            "checkpoint" => {
                let path = self.checkpoint.clone().ok_or_else(|| {
                    Error::Config("recipe = checkpoint needs a checkpoint path".to_string())
                })?;
                Ok(InitialData::Checkpoint(path))
            }
            other => Err(Error::Config(format!(
                "unknown initial recipe {other:?}; expected rest, gaussian_swirl, meridional, swirl_and_meridional, or checkpoint"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub solver: SolverSpec,
    pub criterion: CriterionSpec,
    pub serrin: SerrinSpec,
    pub monitor: MonitorSpec,
    pub initial: InitialSpec,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        for (section, key, value) in raw_entries(text)? {
            cfg.apply(&section, &key, &value)?;
        }
        Ok(cfg)
    }

    /// Apply one `section.key = value` override (also used by CLI flags).
    pub fn apply(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        let err = |what: &str| Error::Config(format!("bad value for {section}.{key}: {what}"));
        let f = || value.parse::<f64>().map_err(|e| err(&e.to_string()));
        let u = || value.parse::<usize>().map_err(|e| err(&e.to_string()));
        match (section, key) {
            ("grid", "r_max") => self.grid.r_max = f()?,
            ("grid", "z_half") => self.grid.z_half = f()?,
            ("grid", "n_r") => self.grid.n_r = u()?,
            ("grid", "n_z") => self.grid.n_z = u()?,
            ("solver", "nu") => self.solver.nu = f()?,
            ("solver", "dt") => self.solver.dt = f()?,
            ("solver", "t_end") => self.solver.t_end = f()?,
            ("solver", "cfl_safety") => self.solver.cfl_safety = f()?,
            ("solver", "projection_tol") => self.solver.projection_tol = f()?,
            ("criterion", "eps") => self.criterion.eps = f()?,
            ("criterion", "delta0") => self.criterion.delta0 = f()?,
            ("serrin", "s") => self.serrin.s = f()?,
            ("serrin", "w") => self.serrin.w = f()?,
            ("serrin", "d") => self.serrin.d = f()?,
            ("serrin", "delta1") => self.serrin.delta1 = f()?,
            ("monitor", "cadence") => self.monitor.cadence = u()?,
            ("monitor", "out_dir") => self.monitor.out_dir = PathBuf::from(value),
            ("monitor", "name") => self.monitor.name = value.to_string(),
            ("monitor", "calibration_states") => self.monitor.calibration_states = u()?,
            ("monitor", "seed") | ("", "seed") => {
                self.seed = value.parse::<u64>().map_err(|e| err(&e.to_string()))?
            }
            ("initial", "recipe") => self.initial.recipe = value.to_string(),
            ("initial", "amplitude") => self.initial.amplitude = f()?,
            ("initial", "width") => self.initial.width = f()?,
            ("initial", "meridional_amplitude") => self.initial.meridional_amplitude = f()?,
            ("initial", "meridional_width") => self.initial.meridional_width = f()?,
            ("initial", "checkpoint") => self.initial.checkpoint = Some(PathBuf::from(value)),
            _ => {
                return Err(Error::Config(format!(
                    "unknown config key [{section}] {key}"
                )))
            }
        }
        Ok(())
    }

    /// `section.key=value` form used by command-line overrides.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (path, value) = spec
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {spec:?} is not key=value")))?;
        let (section, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| Error::Config(format!("override key {path:?} is not section.key")))?;
        self.apply(section.trim(), key.trim(), value.trim())
    }
}

fn raw_entries(text: &str) -> Result<Vec<(String, String, String)>> {
    let mut out = Vec::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find(['#', ';']) {
            Some(k) => &raw[..k],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| {
                Error::Config(format!("line {}: unterminated section header", lineno + 1))
            })?;
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected key = value", lineno + 1))
        })?;
        out.push((
            section.clone(),
            key.trim().to_string(),
            value.trim().to_string(),
        ));
    }
    Ok(out)
}

/// Echo of the configuration as ordered key/value pairs, for run metadata.
pub fn flatten(cfg: &RunConfig) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        m.insert(k.to_string(), v);
    };
    put("grid.r_max", cfg.grid.r_max.to_string());
    put("grid.z_half", cfg.grid.z_half.to_string());
    put("grid.n_r", cfg.grid.n_r.to_string());
    put("grid.n_z", cfg.grid.n_z.to_string());
    put("solver.nu", cfg.solver.nu.to_string());
    put("solver.dt", cfg.solver.dt.to_string());
    put("solver.t_end", cfg.solver.t_end.to_string());
    put("solver.cfl_safety", cfg.solver.cfl_safety.to_string());
    put("solver.projection_tol", cfg.solver.projection_tol.to_string());
    put("criterion.eps", cfg.criterion.eps.to_string());
    put("criterion.delta0", cfg.criterion.delta0.to_string());
    put("serrin.s", cfg.serrin.s.to_string());
    put("serrin.w", cfg.serrin.w.to_string());
    put("serrin.d", cfg.serrin.d.to_string());
    put("serrin.delta1", cfg.serrin.delta1.to_string());
    put("monitor.cadence", cfg.monitor.cadence.to_string());
    put("monitor.out_dir", cfg.monitor.out_dir.display().to_string());
    put("monitor.name", cfg.monitor.name.clone());
    put(
        "monitor.calibration_states",
        cfg.monitor.calibration_states.to_string(),
    );
    put("monitor.seed", cfg.seed.to_string());
    put("initial.recipe", cfg.initial.recipe.clone());
    put("initial.amplitude", cfg.initial.amplitude.to_string());
    put("initial.width", cfg.initial.width.to_string());
    put(
        "initial.meridional_amplitude",
        cfg.initial.meridional_amplitude.to_string(),
    );
    put(
        "initial.meridional_width",
        cfg.initial.meridional_width.to_string(),
    );
    m
}
