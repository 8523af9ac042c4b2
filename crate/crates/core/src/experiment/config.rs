use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::ModelKind;
use crate::geometry::{ApertureRegion, Direction, ReceiveArray, RxSampling};
use crate::Error;

/// Problem in a configuration file; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// Dotted path of the offending field, or `json` for parse errors.
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error in `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn default_phi() -> f64 {
    90.0
}

/// Receive array; distances in wavelengths, angles in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayConfig {
    #[serde(default = "default_phi")]
    pub phi_deg: f64,
    #[serde(default)]
    pub theta_deg: f64,
    pub r_min: f64,
    pub r_max: f64,
    #[serde(default)]
    pub sampling: RxSampling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Start of the array; its length `r_max − r_min` stays fixed.
    RMin,
    /// Inner edge `a` of the symmetric modules `[a, a+ℓ] ∪ [−a−ℓ, −a]`.
    GapOffset,
    /// Centered hole fraction `α` in `[−L, L]`.
    HoleFraction,
    /// Azimuth in degrees.
    Phi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    /// `L` for hole-fraction sweeps, in wavelengths.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_length: Option<f64>,
    /// Module length `ℓ` for gap sweeps, in wavelengths.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module_length: Option<f64>,
}

fn default_spacing() -> f64 {
    0.5
}
fn default_rx_count() -> usize {
    256
}
fn default_epsilon() -> f64 {
    crate::dof::DEFAULT_EPSILON
}
fn default_xi_step() -> f64 {
    crate::spectral::DEFAULT_XI_STEP
}
fn default_outputs() -> PathBuf {
    PathBuf::from("out")
}

/// Experiment description. Wavelength is in meters; every other length is
/// in wavelengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub wavelength: f64,
    pub aperture: ApertureRegion,
    pub array: ArrayConfig,
    #[serde(default)]
    pub model: ModelKind,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    #[serde(default = "default_rx_count")]
    pub rx_count: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_xi_step")]
    pub xi_step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default = "default_outputs")]
    pub outputs: PathBuf,
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("must be positive and finite, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| {
            ConfigError::new(
                "json",
                format!("{e} (line {}, column {})", e.line(), e.column()),
            )
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("path", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("wavelength", self.wavelength)?;
        positive("spacing", self.spacing)?;
        positive("epsilon", self.epsilon)?;
        if self.epsilon >= 1.0 {
            return Err(ConfigError::new("epsilon", "must be below 1"));
        }
        positive("xi_step", self.xi_step)?;
        if self.rx_count < 2 {
            return Err(ConfigError::new("rx_count", "need at least 2 receive samples"));
        }
        let a = &self.array;
        positive("array.r_min", a.r_min)?;
        positive("array.r_max", a.r_max)?;
        if a.r_min >= a.r_max {
            return Err(ConfigError::new(
                "array.r_max",
                format!("must exceed array.r_min ({} >= {})", a.r_min, a.r_max),
            ));
        }
        if !a.phi_deg.is_finite() {
            return Err(ConfigError::new("array.phi_deg", "must be finite"));
        }
        if !a.theta_deg.is_finite() {
            return Err(ConfigError::new("array.theta_deg", "must be finite"));
        }
        self.aperture
            .validate()
            .map_err(|e| ConfigError::new("aperture", e.to_string()))?;
        if let Some(s) = &self.sweep {
            validate_sweep(s)?;
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form with `outputs` removed.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = v.as_object_mut() {
            map.remove("outputs");
        }
        let digest = Sha256::digest(v.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn direction(&self) -> Direction {
        Direction::from_degrees(self.array.phi_deg, self.array.theta_deg)
    }

    /// Region in meters.
    pub fn region(&self) -> ApertureRegion {
        self.aperture.scaled(self.wavelength)
    }

    /// Receive array in meters.
    pub fn receive_array(&self) -> Result<ReceiveArray, Error> {
        let l = self.wavelength;
        Ok(
            ReceiveArray::new(self.direction(), self.array.r_min * l, self.array.r_max * l, self.rx_count)?
                .with_sampling(self.array.sampling),
        )
    }
}

fn validate_sweep(s: &SweepConfig) -> Result<(), ConfigError> {
    if s.values.is_empty() {
        return Err(ConfigError::new("sweep.values", "must not be empty"));
    }
    for (i, v) in s.values.iter().enumerate() {
        let field = format!("sweep.values[{i}]");
        if !v.is_finite() {
            return Err(ConfigError::new(field, "must be finite"));
        }
        match s.parameter {
            SweepParameter::RMin => positive(&field, *v)?,
            SweepParameter::GapOffset if *v < 0.0 => {
                return Err(ConfigError::new(field, "gap offset must be nonnegative"));
            }
            SweepParameter::HoleFraction if !(0.0..1.0).contains(v) => {
                return Err(ConfigError::new(field, "hole fraction must lie in [0, 1)"));
            }
            _ => {}
        }
    }
    match s.parameter {
        SweepParameter::HoleFraction => match s.half_length {
            Some(l) => positive("sweep.half_length", l)?,
            None => return Err(ConfigError::new("sweep.half_length", "required for hole_fraction sweeps")),
        },
        SweepParameter::GapOffset => match s.module_length {
            Some(l) => positive("sweep.module_length", l)?,
            None => return Err(ConfigError::new("sweep.module_length", "required for gap_offset sweeps")),
        },
        _ => {}
    }
    Ok(())
}
