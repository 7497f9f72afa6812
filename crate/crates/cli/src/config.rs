//! Flat `key = value` experiment configs with dotted section prefixes.
//!
//! ```text
//! # comment
//! experiment = parametrix
//! surface = bump(0.2)
//! grid.N = 2048
//! params.j_list = 6, 7, 8
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use wavestrich_core::semiclassical::{SemiclassicalParams, VelocityPreset};
use wavestrich_core::ww_symbols::SurfacePreset;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    Symbols,
    Calculus,
    Parametrix,
    Dispersive,
    Strichartz,
    Glue,
    All,
}

impl Experiment {
    pub const EACH: [Experiment; 6] =
        [Self::Symbols, Self::Calculus, Self::Parametrix, Self::Dispersive, Self::Strichartz, Self::Glue];

    pub fn expand(self) -> Vec<Experiment> {
        if self == Self::All {
            Self::EACH.to_vec()
        } else {
            vec![self]
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Symbols => "symbols",
            Self::Calculus => "calculus",
            Self::Parametrix => "parametrix",
            Self::Dispersive => "dispersive",
            Self::Strichartz => "strichartz",
            Self::Glue => "glue",
            Self::All => "all",
        };
        f.write_str(s)
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [Self::All]
            .into_iter()
            .chain(Self::EACH)
            .find(|e| e.to_string() == s)
            .ok_or_else(|| format!("unknown experiment `{s}` (expected symbols, calculus, parametrix, dispersive, strichartz, glue or all)"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridBlock {
    pub dim: usize,
    pub extent: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamsBlock {
    pub j_list: Vec<u32>,
    pub delta: f64,
    pub nu: f64,
    pub amplitude_order: usize,
    pub horizon: f64,
    pub p: f64,
    pub mu: f64,
    pub s: f64,
    pub ensemble: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub grid: GridBlock,
    pub surface: SurfacePreset,
    pub velocity: VelocityPreset,
    pub params: ParamsBlock,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::All,
            grid: GridBlock { dim: 1, extent: 2.0 * std::f64::consts::PI, points: 2048 },
            surface: SurfacePreset::Flat,
            velocity: VelocityPreset::Zero,
            params: ParamsBlock {
                j_list: vec![6, 7, 8],
                delta: 0.4,
                nu: 0.6,
                amplitude_order: 1,
                horizon: 1.0,
                p: 4.0,
                mu: 0.375,
                s: 0.0,
                ensemble: 16,
                seed: 1,
            },
            output: None,
        }
    }
}

const KEYS: [&str; 17] = [
    "experiment",
    "surface",
    "velocity",
    "grid.dim",
    "grid.L",
    "grid.N",
    "params.j_list",
    "params.delta",
    "params.nu",
    "params.N_amplitude",
    "params.T",
    "params.p",
    "params.mu",
    "params.s",
    "params.ensemble",
    "params.seed",
    "output.dir",
];

fn parse_value<T: FromStr>(key: &str, raw: &str, line: usize) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    raw.parse::<T>().map_err(|e| CliError::Config { line, message: format!("`{key}`: cannot parse `{raw}`: {e}") })
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        let mut cfg = Self::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| CliError::Config { line, message: format!("expected `key = value`, got `{content}`") })?;
            let key = KEYS
                .iter()
                .copied()
                .find(|k| *k == key)
                .ok_or_else(|| CliError::Config { line, message: format!("unknown key `{key}`") })?;
            if let Some(first) = seen.insert(key, line) {
                return Err(CliError::Config { line, message: format!("`{key}` already set on line {first}") });
            }
            match key {
                "experiment" => cfg.experiment = parse_value(key, value, line)?,
                "surface" => cfg.surface = parse_value(key, value, line)?,
                "velocity" => cfg.velocity = parse_value(key, value, line)?,
                "grid.dim" => cfg.grid.dim = parse_value(key, value, line)?,
                "grid.L" => cfg.grid.extent = parse_value(key, value, line)?,
                "grid.N" => cfg.grid.points = parse_value(key, value, line)?,
                "params.j_list" => {
                    cfg.params.j_list = value
                        .split(',')
                        .map(|v| parse_value(key, v.trim(), line))
                        .collect::<Result<_, _>>()?
                }
                "params.delta" => cfg.params.delta = parse_value(key, value, line)?,
                "params.nu" => cfg.params.nu = parse_value(key, value, line)?,
                "params.N_amplitude" => cfg.params.amplitude_order = parse_value(key, value, line)?,
                "params.T" => cfg.params.horizon = parse_value(key, value, line)?,
                "params.p" => cfg.params.p = parse_value(key, value, line)?,
                "params.mu" => cfg.params.mu = parse_value(key, value, line)?,
                "params.s" => cfg.params.s = parse_value(key, value, line)?,
                "params.ensemble" => cfg.params.ensemble = parse_value(key, value, line)?,
                "params.seed" => cfg.params.seed = parse_value(key, value, line)?,
                "output.dir" => cfg.output = Some(PathBuf::from(value)),
                _ => unreachable!("key list and match arms agree"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every numeric field against the preconditions of the modules it feeds.
    pub fn validate(&self) -> Result<(), CliError> {
        let p = &self.params;
        if !(1..=2).contains(&self.grid.dim) {
            return Err(CliError::field("grid.dim", format!("must be 1 or 2, got {}", self.grid.dim)));
        }
        if !(self.grid.extent > 0.0 && self.grid.extent.is_finite()) {
            return Err(CliError::field("grid.L", format!("must be positive, got {}", self.grid.extent)));
        }
        if !self.grid.points.is_power_of_two() || !(16..=2048).contains(&self.grid.points) {
            return Err(CliError::field("grid.N", format!("must be a power of two in [16, 2048], got {}", self.grid.points)));
        }
        if !(p.delta > 0.0 && p.delta <= 0.5) {
            return Err(CliError::field("params.delta", format!("must lie in (0, 1/2], got {}", p.delta)));
        }
        if !(p.nu > 0.0 && p.nu <= 1.0 - p.delta) {
            return Err(CliError::field("params.nu", format!("must lie in (0, 1 − δ], got {}", p.nu)));
        }
        let j0 = SemiclassicalParams::DEFAULT_J0;
        if p.j_list.is_empty() {
            return Err(CliError::field("params.j_list", "empty"));
        }
        if let Some(j) = p.j_list.iter().find(|&&j| j < j0 || j > 10) {
            return Err(CliError::field("params.j_list", format!("j = {j} outside [{j0}, 10]")));
        }
        if p.amplitude_order > 2 {
            return Err(CliError::field("params.N_amplitude", format!("supported orders are 0..=2, got {}", p.amplitude_order)));
        }
        if !(p.horizon > 0.0 && p.horizon <= 1.0) {
            return Err(CliError::field("params.T", format!("must lie in (0, 1], got {}", p.horizon)));
        }
        if !(p.p >= 2.0 && p.p.is_finite()) {
            return Err(CliError::field("params.p", format!("must be finite and ≥ 2, got {}", p.p)));
        }
        if !(p.mu > 0.0 && p.mu < 0.5) {
            return Err(CliError::field("params.mu", format!("must lie in (0, 1/2), got {}", p.mu)));
        }
        if !p.s.is_finite() {
            return Err(CliError::field("params.s", "must be finite"));
        }
        if p.ensemble < 8 {
            return Err(CliError::field("params.ensemble", format!("at least 8 members required, got {}", p.ensemble)));
        }
        Ok(())
    }
}
