//! JSON configuration file. Each section accepts one of several equivalent
//! parameterizations; exactly one of each alternative pair must be present.

use serde::{Deserialize, Serialize};
use std::path::Path;

use super::{
    DriveConfig, MechanicalOscillator, ModelError, OpticalCavity, SignalPulse, SqueezeConfig,
    SystemConfig,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub mechanical: MechanicalSection,
    pub cavity: CavitySection,
    pub drive: DriveSection,
    #[serde(default)]
    pub squeeze: SqueezeSection,
    pub signal: SignalSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanicalSection {
    /// kg
    pub mass: f64,
    /// rad/s
    pub omega_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quality: Option<f64>,
    /// K
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_e: Option<f64>,
    /// Input mirror power transmittance T².
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_transmittance: Option<f64>,
    /// Round-trip power loss ε².
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_loss: Option<f64>,
    /// m
    pub length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<f64>,
    /// W
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_power: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SqueezeSection {
    #[default]
    None,
    TwoPhoton { kappa: f64 },
    Degenerate { upsilon: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    /// N
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub force_amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized_amplitude: Option<f64>,
    /// s
    pub tau: f64,
    #[serde(default)]
    pub phase: f64,
}

enum Pick<T> {
    Left(T),
    Right(T),
}
use Pick::{Left, Right};

fn one_of<T: Copy>(
    a: Option<T>,
    b: Option<T>,
    names: (&str, &str),
) -> Result<Pick<T>, ModelError> {
    match (a, b) {
        (Some(x), None) => Ok(Left(x)),
        (None, Some(y)) => Ok(Right(y)),
        (Some(_), Some(_)) => Err(ModelError::Invalid(format!(
            "give only one of {} and {}",
            names.0, names.1
        ))),
        (None, None) => Err(ModelError::Invalid(format!("one of {} or {} is required", names.0, names.1))),
    }
}


impl ConfigFile {
    pub fn from_json_str(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Invalid(e.to_string()))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config sections always serialize")
    }

    pub fn build(&self) -> Result<SystemConfig, ModelError> {
        let m = &self.mechanical;
        let mech = match one_of(m.gamma_m, m.quality, ("gamma_m", "quality"))? {
            Left(g) => MechanicalOscillator::new(m.mass, m.omega_m, g, m.temperature)?,
            Right(q) => MechanicalOscillator::from_quality(m.mass, m.omega_m, q, m.temperature)?,
        };

        let c = &self.cavity;
        let omega0 = match one_of(c.omega0, c.wavelength, ("omega0", "wavelength"))? {
            Left(w) => w,
            Right(l) => {
                if !(l.is_finite() && l > 0.0) {
                    return Err(ModelError::NonPositive { name: "wavelength", value: l });
                }
                super::wavelength_to_omega(l)
            }
        };
        let rates = (c.gamma0, c.gamma_e);
        let mirrors = (c.power_transmittance, c.power_loss);
        let cavity = match (rates, mirrors) {
            ((Some(g0), Some(ge)), (None, None)) => OpticalCavity::new(g0, ge, c.length, omega0)?,
            ((None, None), (Some(t2), Some(e2))) => {
                OpticalCavity::from_mirrors(t2, e2, c.length, super::omega_to_wavelength(omega0))?
            }
            _ => {
                return Err(ModelError::Invalid(
                    "cavity needs either gamma0 and gamma_e, or power_transmittance and power_loss"
                        .into(),
                ))
            }
        };

        let drive = match one_of(self.drive.k0, self.drive.input_power, ("k0", "input_power"))? {
            Left(k) => DriveConfig::K0(k),
            Right(p) => DriveConfig::InputPower(p),
        };

        let s = &self.signal;
        let signal = match one_of(s.force_amplitude, s.normalized_amplitude, ("force_amplitude", "normalized_amplitude"))? {
            Left(f) => SignalPulse::new(f, s.tau, s.phase)?,
            Right(n) => SignalPulse::from_normalized(n, s.tau, s.phase, &mech)?,
        };

        SystemConfig::new(mech, cavity, drive, self.squeeze.into(), signal)
    }
}

impl From<SqueezeSection> for SqueezeConfig {
    fn from(s: SqueezeSection) -> Self {
        match s {
            SqueezeSection::None => SqueezeConfig::None,
            SqueezeSection::TwoPhoton { kappa } => SqueezeConfig::TwoPhoton { kappa },
            SqueezeSection::Degenerate { upsilon } => SqueezeConfig::Degenerate { upsilon },
        }
    }
}

impl From<SqueezeConfig> for SqueezeSection {
    fn from(s: SqueezeConfig) -> Self {
        match s {
            SqueezeConfig::None => SqueezeSection::None,
            SqueezeConfig::TwoPhoton { kappa } => SqueezeSection::TwoPhoton { kappa },
            SqueezeConfig::Degenerate { upsilon } => SqueezeSection::Degenerate { upsilon },
        }
    }
}

impl SystemConfig {
    pub fn from_json_str(text: &str) -> Result<Self, ModelError> {
        ConfigFile::from_json_str(text)?.build()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ModelError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json_str(&text)
    }

    /// Canonical file form. Stores the primary parameters exactly, so
    /// `to_file().build()` reproduces this configuration bit for bit.
    pub fn to_file(&self) -> ConfigFile {
        let m = self.mechanical();
        let c = self.cavity();
        let (k0, input_power) = match self.drive() {
            DriveConfig::K0(k) => (Some(k), None),
            DriveConfig::InputPower(p) => (None, Some(p)),
        };
        ConfigFile {
            mechanical: MechanicalSection {
                mass: m.mass(),
                omega_m: m.omega_m(),
                gamma_m: Some(m.gamma_m()),
                quality: None,
                temperature: m.temperature(),
            },
            cavity: CavitySection {
                gamma0: Some(c.gamma0()),
                gamma_e: Some(c.gamma_e()),
                power_transmittance: None,
                power_loss: None,
                length: c.length(),
                omega0: Some(c.omega0()),
                wavelength: None,
            },
            drive: DriveSection { k0, input_power },
            squeeze: self.squeeze().into(),
            signal: SignalSection {
                force_amplitude: Some(self.signal().force_amplitude()),
                normalized_amplitude: None,
                tau: self.signal().tau(),
                phase: self.signal().phase(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets;

    const SAMPLE: &str = r#"{
        "mechanical": { "mass": 5e-8, "omega_m": 2199114.857512855, "quality": 1e8, "temperature": 20 },
        "cavity": { "power_transmittance": 3e-4, "power_loss": 1e-6, "length": 0.1, "wavelength": 1.55e-6 },
        "drive": { "input_power": 0.01 },
        "squeeze": { "type": "two_photon", "kappa": 1000.0 },
        "signal": { "normalized_amplitude": 2.0, "tau": 2.8e-5 }
    }"#;

    #[test]
    fn parses_alternative_forms() {
        let cfg = SystemConfig::from_json_str(SAMPLE).unwrap();
        assert_eq!(cfg.squeeze(), SqueezeConfig::TwoPhoton { kappa: 1000.0 });
        let t1 = presets::table1(presets::TauPreset::Table1);
        assert!((cfg.cavity().gamma0() / t1.cavity().gamma0() - 1.0).abs() < 1e-12);
        assert!((cfg.k0() / t1.k0() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn roundtrip_is_exact() {
        let cfg = SystemConfig::from_json_str(SAMPLE).unwrap();
        let text = cfg.to_file().to_json_pretty();
        let back = SystemConfig::from_json_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn rejects_unknown_and_ambiguous() {
        let unknown = SAMPLE.replace("\"length\"", "\"lenght\"");
        assert!(SystemConfig::from_json_str(&unknown).is_err());
        let both = SAMPLE.replace("\"input_power\": 0.01", "\"input_power\": 0.01, \"k0\": 5.0");
        assert!(matches!(SystemConfig::from_json_str(&both), Err(ModelError::Invalid(_))));
        let extra_sq = SAMPLE.replace("\"kappa\": 1000.0", "\"kappa\": 1000.0, \"upsilon\": 1.0");
        assert!(SystemConfig::from_json_str(&extra_sq).is_err());
        let unstable = SAMPLE.replace("\"kappa\": 1000.0", "\"kappa\": 1e9");
        assert!(matches!(SystemConfig::from_json_str(&unstable), Err(ModelError::Unstable { .. })));
    }

    #[test]
    fn squeeze_defaults_to_none() {
        let text = SAMPLE.replace(r#""squeeze": { "type": "two_photon", "kappa": 1000.0 },"#, "");
        let cfg = SystemConfig::from_json_str(&text).unwrap();
        assert_eq!(cfg.squeeze(), SqueezeConfig::None);
    }
}
