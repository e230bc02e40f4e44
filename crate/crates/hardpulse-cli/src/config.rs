//! Job configuration read from TOML or JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Design,
    Invert,
    Simulate,
    Analyze,
    Roundtrip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Equiripple,
    Selfrefocused,
    Halfpulse,
    Slr,
    Frt,
    Dist,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoPaths {
    /// Hard-pulse JSON for `simulate` and `analyze`.
    pub pulse: Option<PathBuf>,
    /// Reduced scattering data JSON for `invert dist`.
    pub reduced: Option<PathBuf>,
    /// Continuum scattering data JSON for `invert dist`.
    pub continuum: Option<PathBuf>,
    /// Polynomial JSON files for `invert frt` (`numerator`, `denominator`) and `invert slr` (`a`, `b`).
    pub numerator: Option<PathBuf>,
    pub denominator: Option<PathBuf>,
    pub a: Option<PathBuf>,
    pub b: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub command: Command,
    pub method: Option<Method>,
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "empty_table")]
    pub parameters: serde_json::Value,
    #[serde(default)]
    pub io: IoPaths,
}

fn one() -> f64 {
    1.0
}

fn empty_table() -> serde_json::Value {
    serde_json::Value::Object(Default::default())
}

pub const DEFAULT_GRID: usize = 4096;

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: JobConfig = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?,
            _ => toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?,
        };
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut cfg.io.pulse,
            &mut cfg.io.reduced,
            &mut cfg.io.continuum,
            &mut cfg.io.numerator,
            &mut cfg.io.denominator,
            &mut cfg.io.a,
            &mut cfg.io.b,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn grid(&self) -> usize {
        self.grid.unwrap_or(DEFAULT_GRID)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let g = self.grid();
        if g < 16 || !g.is_power_of_two() {
            return Err(CliError::Config(format!("grid size {g} must be a power of two of at least 16")));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(CliError::Config(format!("delta must be positive, got {}", self.delta)));
        }
        use Command::*;
        use Method::*;
        let ok = match (self.command, self.method) {
            (Design, Some(Equiripple | Selfrefocused | Halfpulse | Slr)) => true,
            (Invert, Some(Frt | Dist | Slr)) => true,
            (Simulate | Analyze, _) => self.io.pulse.is_some(),
            (Roundtrip, None | Some(Dist)) => true,
            _ => false,
        };
        if !ok {
            return Err(CliError::Config(format!(
                "command {:?} does not accept method {:?} with the given inputs",
                self.command, self.method
            )));
        }
        Ok(())
    }

    pub fn params<T: for<'de> Deserialize<'de>>(&self) -> Result<T, CliError> {
        serde_json::from_value(self.parameters.clone()).map_err(|e| CliError::Config(format!("parameters: {e}")))
    }
}

/// Which inverse scattering routine turns a designed `r` into a pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Inverter {
    #[default]
    Frt,
    Dist,
}

/// Equiripple slice. Ripples may be given on `r` (`delta1`, `delta2`) or on the profile
/// (`delta1_long`, `delta2_trans`); the latter are converted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquirippleParams {
    pub rho: i64,
    pub tau: f64,
    pub band: [f64; 2],
    #[serde(default)]
    pub delta1: Option<f64>,
    #[serde(default)]
    pub delta2: Option<f64>,
    #[serde(default)]
    pub delta1_long: Option<f64>,
    #[serde(default)]
    pub delta2_trans: Option<f64>,
    #[serde(default)]
    pub height: Option<f64>,
    #[serde(default)]
    pub inverter: Inverter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelfRefocusedParams {
    pub k1: f64,
    pub k2: f64,
    pub tau: f64,
    pub band: [f64; 2],
}

/// `Mx(θ) = peak · exp(-(sin((θ - centre)/2) / width)²)` on the grid, or explicit samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfPulseParams {
    #[serde(default)]
    pub peak: Option<f64>,
    #[serde(default)]
    pub width: Option<f64>,
    #[serde(default)]
    pub centre: f64,
    #[serde(default)]
    pub mx: Option<Vec<f64>>,
}

/// SLR slice; `degree` defaults to `2(rho - 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlrParams {
    pub rho: i64,
    pub theta0: f64,
    pub tau: f64,
    pub band: [f64; 2],
    #[serde(default)]
    pub degree: Option<usize>,
    #[serde(default)]
    pub delta1: Option<f64>,
    #[serde(default)]
    pub delta2: Option<f64>,
    #[serde(default)]
    pub delta1_long: Option<f64>,
    #[serde(default)]
    pub delta2_trans: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoParam {
    #[serde(default)]
    pub rho: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateParams {
    #[serde(default)]
    pub soft: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundtripParams {
    #[serde(default = "default_length")]
    pub length: usize,
    #[serde(default = "default_amplitude")]
    pub max_amplitude: f64,
}

fn default_length() -> usize {
    32
}

fn default_amplitude() -> f64 {
    1.0
}
