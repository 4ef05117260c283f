//! Reference parameter sets.

use serde::Serialize;
use std::f64::consts::PI;
use std::str::FromStr;

use super::{
    DriveConfig, MechanicalOscillator, OpticalCavity, SignalPulse, SqueezeConfig, SystemConfig,
};

pub const MASS: f64 = 5e-8;
pub const MECHANICAL_FREQUENCY_HZ: f64 = 350e3;
pub const QUALITY: f64 = 1e8;
pub const TEMPERATURE: f64 = 20.0;
pub const LENGTH: f64 = 0.1;
pub const POWER_TRANSMITTANCE: f64 = 3e-4;
pub const POWER_LOSS: f64 = 1e-6;
pub const WAVELENGTH: f64 = 1.55e-6;
pub const INPUT_POWER: f64 = 0.01;

/// Pulse durations used by the reference parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TauPreset {
    /// τ = 28 µs.
    #[default]
    Table1,
    /// τ = 0.28 ms, used for the raw sensitivity comparison.
    Fig3,
}

impl TauPreset {
    pub fn seconds(self) -> f64 {
        match self {
            TauPreset::Table1 => 28e-6,
            TauPreset::Fig3 => 0.28e-3,
        }
    }
}

impl FromStr for TauPreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "table1" => Ok(TauPreset::Table1),
            "fig3" => Ok(TauPreset::Fig3),
            other => Err(format!("unknown tau preset '{other}' (expected table1 or fig3)")),
        }
    }
}

/// Reference sensor: 10 mW pump, no squeezing, unit normalized signal amplitude.
pub fn table1(tau: TauPreset) -> SystemConfig {
    table1_with_tau(tau.seconds())
}

pub fn table1_with_tau(tau: f64) -> SystemConfig {
    let mech = MechanicalOscillator::from_quality(
        MASS,
        2.0 * PI * MECHANICAL_FREQUENCY_HZ,
        QUALITY,
        TEMPERATURE,
    )
    .expect("reference oscillator is valid");
    let cavity = OpticalCavity::from_mirrors(POWER_TRANSMITTANCE, POWER_LOSS, LENGTH, WAVELENGTH)
        .expect("reference cavity is valid");
    let signal = SignalPulse::from_normalized(1.0, tau, 0.0, &mech).expect("reference signal is valid");
    SystemConfig::new(mech, cavity, DriveConfig::InputPower(INPUT_POWER), SqueezeConfig::None, signal)
        .expect("reference configuration is valid")
}
