//! Run configuration files.
//!
//! The line format is `key = value` with optional `[species]`, `[sweep]`
//! and `[grid]` sections; each `[species]` header starts a new species.
//! `#` begins a comment. The JSON form carries the same fields:
//!
//! ```text
//! {"label": "salt", "alpha_sq": 7.0,
//!  "species": [{"sigma": 1.0, "rho": 0.01, "z": 1}, {"sigma": 1.0, "rho": 0.01, "z": -1}]}
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Result as ModelResult;
use crate::system::{Mixture, Species};

/// A malformed configuration, reported with its line number when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }

    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Eta,
    AlphaSq,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Eta => "eta",
            SweepVariable::AlphaSq => "alpha_sq",
        }
    }
}

impl FromStr for SweepVariable {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "eta" => Ok(SweepVariable::Eta),
            "alpha_sq" => Ok(SweepVariable::AlphaSq),
            other => Err(ConfigError::new(format!(
                "sweep variable must be eta or alpha_sq, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesSpec {
    pub sigma: f64,
    pub rho: f64,
    #[serde(default)]
    pub z: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.steps < 2 {
            return Err(ConfigError::new(format!(
                "sweep needs at least 2 steps, got {}",
                self.steps
            )));
        }
        if !(self.start < self.stop) {
            return Err(ConfigError::new(format!(
                "sweep start {} must be below stop {}",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    /// Evenly spaced values from start to stop inclusive.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: Option<usize>,
    pub dr: Option<f64>,
    pub tol: Option<f64>,
    pub mix: Option<f64>,
    pub max_iter: Option<usize>,
}

/// Contents of a configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub alpha_sq: Option<f64>,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub species: Vec<SpeciesSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::at(e.line(), e.to_string()))
    }

    pub fn from_kv(text: &str) -> Result<Self, ConfigError> {
        parse_kv(text)
    }

    /// Build the validated mixture described by this file.
    pub fn mixture(&self) -> ModelResult<Mixture> {
        let species = self
            .species
            .iter()
            .map(|s| Species::new(s.sigma, s.rho, s.z))
            .collect();
        let m = Mixture::new(species, self.alpha_sq.unwrap_or(0.0))?;
        Ok(m.with_label(self.label.clone().unwrap_or_default()))
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Top,
    Species,
    Sweep,
    Grid,
}

#[derive(Default)]
struct PartialSpecies {
    sigma: Option<f64>,
    rho: Option<f64>,
    z: Option<i32>,
    line: usize,
}

#[derive(Default)]
struct PartialSweep {
    variable: Option<SweepVariable>,
    start: Option<f64>,
    stop: Option<f64>,
    steps: Option<usize>,
    line: usize,
}

fn value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T, ConfigError> {
    raw.parse()
        .map_err(|_| ConfigError::at(line, format!("cannot parse value {raw:?} for key {key}")))
}

fn set<T>(slot: &mut Option<T>, v: T, line: usize, key: &str) -> Result<(), ConfigError> {
    if slot.is_some() {
        return Err(ConfigError::at(line, format!("duplicate key {key}")));
    }
    *slot = Some(v);
    Ok(())
}

fn finish_species(p: PartialSpecies) -> Result<SpeciesSpec, ConfigError> {
    let missing = |k: &str| ConfigError::at(p.line, format!("[species] block is missing {k}"));
    Ok(SpeciesSpec {
        sigma: p.sigma.ok_or_else(|| missing("sigma"))?,
        rho: p.rho.ok_or_else(|| missing("rho"))?,
        z: p.z.unwrap_or(0),
    })
}

fn parse_kv(text: &str) -> Result<ConfigFile, ConfigError> {
    let mut cfg = ConfigFile::default();
    let mut section = Section::Top;
    let mut species: Option<PartialSpecies> = None;
    let mut sweep: Option<PartialSweep> = None;
    let mut grid: Option<GridSpec> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            if let Some(done) = species.take() {
                cfg.species.push(finish_species(done)?);
            }
            section = match name.trim() {
                "species" => {
                    species = Some(PartialSpecies {
                        line,
                        ..Default::default()
                    });
                    Section::Species
                }
                "sweep" => {
                    if sweep.is_some() {
                        return Err(ConfigError::at(line, "duplicate [sweep] section"));
                    }
                    sweep = Some(PartialSweep {
                        line,
                        ..Default::default()
                    });
                    Section::Sweep
                }
                "grid" => {
                    if grid.is_some() {
                        return Err(ConfigError::at(line, "duplicate [grid] section"));
                    }
                    grid = Some(GridSpec::default());
                    Section::Grid
                }
                other => return Err(ConfigError::at(line, format!("unknown section [{other}]"))),
            };
            continue;
        }
        let (key, val) = content.split_once('=').ok_or_else(|| {
            ConfigError::at(line, format!("expected key = value, got {content:?}"))
        })?;
        let (key, val) = (key.trim(), val.trim());
        match section {
            Section::Top => match key {
                "label" => set(&mut cfg.label, val.to_string(), line, key)?,
                "alpha_sq" => set(&mut cfg.alpha_sq, value(line, key, val)?, line, key)?,
                "eta" => set(&mut cfg.eta, value(line, key, val)?, line, key)?,
                _ => return Err(ConfigError::at(line, format!("unknown key {key}"))),
            },
            Section::Species => {
                let s = species.as_mut().expect("species block open");
                match key {
                    "sigma" => set(&mut s.sigma, value(line, key, val)?, line, key)?,
                    "rho" => set(&mut s.rho, value(line, key, val)?, line, key)?,
                    "z" => set(&mut s.z, value(line, key, val)?, line, key)?,
                    _ => return Err(ConfigError::at(line, format!("unknown species key {key}"))),
                }
            }
            Section::Sweep => {
                let s = sweep.as_mut().expect("sweep block open");
                match key {
                    "variable" => set(
                        &mut s.variable,
                        val.parse()
                            .map_err(|e: ConfigError| ConfigError::at(line, e.message))?,
                        line,
                        key,
                    )?,
                    "start" => set(&mut s.start, value(line, key, val)?, line, key)?,
                    "stop" => set(&mut s.stop, value(line, key, val)?, line, key)?,
                    "steps" => set(&mut s.steps, value(line, key, val)?, line, key)?,
                    _ => return Err(ConfigError::at(line, format!("unknown sweep key {key}"))),
                }
            }
            Section::Grid => {
                let g = grid.as_mut().expect("grid block open");
                match key {
                    "n" => set(&mut g.n, value(line, key, val)?, line, key)?,
                    "dr" => set(&mut g.dr, value(line, key, val)?, line, key)?,
                    "tol" => set(&mut g.tol, value(line, key, val)?, line, key)?,
                    "mix" => set(&mut g.mix, value(line, key, val)?, line, key)?,
                    "max_iter" => set(&mut g.max_iter, value(line, key, val)?, line, key)?,
                    _ => return Err(ConfigError::at(line, format!("unknown grid key {key}"))),
                }
            }
        }
    }
    if let Some(done) = species.take() {
        cfg.species.push(finish_species(done)?);
    }
    if let Some(s) = sweep {
        let missing = |k: &str| ConfigError::at(s.line, format!("[sweep] section is missing {k}"));
        cfg.sweep = Some(SweepSpec {
            variable: s.variable.ok_or_else(|| missing("variable"))?,
            start: s.start.ok_or_else(|| missing("start"))?,
            stop: s.stop.ok_or_else(|| missing("stop"))?,
            steps: s.steps.ok_or_else(|| missing("steps"))?,
        });
    }
    cfg.grid = grid;
    Ok(cfg)
}
