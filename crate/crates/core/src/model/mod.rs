//! Physical parameters of the sensor and the scalar quantities derived from them.
//!
//! All rates are angular (rad/s) half-widths, stored exactly as given. A
//! [`SystemConfig`] is validated and its derived quantities are computed once at
//! construction; afterwards it is immutable.

mod file;
pub mod presets;

use serde::Serialize;
use std::fmt;

use crate::constants::{C_LIGHT, HBAR, K_B};

pub use file::{
    CavitySection, ConfigFile, DriveSection, MechanicalSection, SignalSection, SqueezeSection,
};

/// Ratio above which a "much smaller than" regime condition is reported.
pub const REGIME_RATIO: f64 = 0.1;

/// γ/ω_m above which the sidebands count as unresolved. Looser than
/// [`REGIME_RATIO`] so that the reference cavity (γ/ω_m ≈ 0.103) passes.
pub const SIDEBAND_RATIO: f64 = 0.125;

/// Below this value of ω_m·τ the pulse is not considered resonant.
pub const MIN_OMEGA_TAU: f64 = 10.0;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative and finite, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("oscillator is not underdamped: gamma_m = {gamma_m} >= omega_m = {omega_m}")]
    Overdamped { gamma_m: f64, omega_m: f64 },
    #[error("loss rate gamma_e = {gamma_e} exceeds input coupling gamma0 = {gamma0}")]
    LossExceedsCoupling { gamma0: f64, gamma_e: f64 },
    #[error("dimensionless power is singular: requires gamma0 > gamma_e (gamma0 = {gamma0}, gamma_e = {gamma_e})")]
    SingularPower { gamma0: f64, gamma_e: f64 },
    #[error("unstable squeezing: {what} = {value} exceeds the bound {bound}")]
    Unstable { what: &'static str, value: f64, bound: f64 },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read config {path}: {message}")]
    Io { path: String, message: String },
}

fn positive(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ModelError::NonPositive { name, value })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(ModelError::Negative { name, value })
    }
}

/// Mechanical oscillator. `gamma_m` is the amplitude half-rate, so Q = ω_m / 2γ_m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MechanicalOscillator {
    mass: f64,
    omega_m: f64,
    gamma_m: f64,
    temperature: f64,
}

impl MechanicalOscillator {
    pub fn new(mass: f64, omega_m: f64, gamma_m: f64, temperature: f64) -> Result<Self, ModelError> {
        positive("mass", mass)?;
        positive("omega_m", omega_m)?;
        non_negative("gamma_m", gamma_m)?;
        non_negative("temperature", temperature)?;
        if gamma_m >= omega_m {
            return Err(ModelError::Overdamped { gamma_m, omega_m });
        }
        Ok(Self { mass, omega_m, gamma_m, temperature })
    }

    pub fn from_quality(mass: f64, omega_m: f64, quality: f64, temperature: f64) -> Result<Self, ModelError> {
        positive("quality", quality)?;
        Self::new(mass, omega_m, omega_m / (2.0 * quality), temperature)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }

    pub fn gamma_m(&self) -> f64 {
        self.gamma_m
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Q = ω_m / 2γ_m; infinite for a lossless oscillator.
    pub fn quality(&self) -> f64 {
        if self.gamma_m == 0.0 {
            f64::INFINITY
        } else {
            self.omega_m / (2.0 * self.gamma_m)
        }
    }

    /// x₀ = √(ħ / 2mω_m).
    pub fn zero_point_length(&self) -> f64 {
        (HBAR / (2.0 * self.mass * self.omega_m)).sqrt()
    }

    pub fn thermal_occupancy(&self) -> f64 {
        thermal_occupancy(self.omega_m, self.temperature)
    }

    /// Copy with a different damping rate (used by the figure presets, which set γ_m = 0).
    pub fn with_gamma_m(&self, gamma_m: f64) -> Result<Self, ModelError> {
        Self::new(self.mass, self.omega_m, gamma_m, self.temperature)
    }
}

/// Optical cavity shared by the three modes. `gamma = gamma0 + gamma_e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpticalCavity {
    gamma0: f64,
    gamma_e: f64,
    gamma: f64,
    length: f64,
    omega0: f64,
}

impl OpticalCavity {
    pub fn new(gamma0: f64, gamma_e: f64, length: f64, omega0: f64) -> Result<Self, ModelError> {
        positive("gamma0", gamma0)?;
        non_negative("gamma_e", gamma_e)?;
        positive("length", length)?;
        positive("omega0", omega0)?;
        if gamma_e > gamma0 {
            return Err(ModelError::LossExceedsCoupling { gamma0, gamma_e });
        }
        Ok(Self { gamma0, gamma_e, gamma: gamma0 + gamma_e, length, omega0 })
    }

    pub fn from_wavelength(gamma0: f64, gamma_e: f64, length: f64, wavelength: f64) -> Result<Self, ModelError> {
        positive("wavelength", wavelength)?;
        Self::new(gamma0, gamma_e, length, wavelength_to_omega(wavelength))
    }

    /// Rates from the input-mirror power transmittance T² and round-trip power loss ε²:
    /// γ₀ = cT²/4L, γ_e = cε²/4L.
    pub fn from_mirrors(
        power_transmittance: f64,
        power_loss: f64,
        length: f64,
        wavelength: f64,
    ) -> Result<Self, ModelError> {
        positive("power_transmittance", power_transmittance)?;
        non_negative("power_loss", power_loss)?;
        positive("length", length)?;
        let rate = C_LIGHT / (4.0 * length);
        Self::from_wavelength(rate * power_transmittance, rate * power_loss, length, wavelength)
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn gamma_e(&self) -> f64 {
        self.gamma_e
    }

    /// Total half-rate γ = γ₀ + γ_e.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn wavelength(&self) -> f64 {
        omega_to_wavelength(self.omega0)
    }

    /// γ_e / γ₀.
    pub fn loss_ratio(&self) -> f64 {
        self.gamma_e / self.gamma0
    }

    /// Same total rate γ with a different loss split.
    pub fn with_loss(&self, gamma_e: f64) -> Result<Self, ModelError> {
        Self::new(self.gamma - gamma_e, gamma_e, self.length, self.omega0)
    }
}

pub fn wavelength_to_omega(wavelength: f64) -> f64 {
    2.0 * std::f64::consts::PI * C_LIGHT / wavelength
}

pub fn omega_to_wavelength(omega0: f64) -> f64 {
    2.0 * std::f64::consts::PI * C_LIGHT / omega0
}

/// Internal parametric squeezing of the two sideband modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SqueezeConfig {
    #[default]
    None,
    /// Two-photon (nondegenerate) gain κ = νC₀₂, rad/s.
    TwoPhoton { kappa: f64 },
    /// Degenerate gain υ = 2νC₀₀ in each sideband mode, rad/s.
    Degenerate { upsilon: f64 },
}

impl SqueezeConfig {
    /// κ or υ; zero without squeezing.
    pub fn rate(&self) -> f64 {
        match *self {
            SqueezeConfig::None => 0.0,
            SqueezeConfig::TwoPhoton { kappa } => kappa,
            SqueezeConfig::Degenerate { upsilon } => upsilon,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, SqueezeConfig::Degenerate { .. })
    }

    /// Stability bounds: κ ≤ γ₀ + γ_e, υ < γ₀ + γ_e.
    pub fn check(&self, cavity: &OpticalCavity) -> Result<(), ModelError> {
        let bound = cavity.gamma();
        match *self {
            SqueezeConfig::None => Ok(()),
            SqueezeConfig::TwoPhoton { kappa } => {
                non_negative("kappa", kappa)?;
                if kappa > bound {
                    Err(ModelError::Unstable { what: "kappa", value: kappa, bound })
                } else {
                    Ok(())
                }
            }
            SqueezeConfig::Degenerate { upsilon } => {
                non_negative("upsilon", upsilon)?;
                if upsilon >= bound {
                    Err(ModelError::Unstable { what: "upsilon", value: upsilon, bound })
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Pump strength, given either as the dimensionless power K₀ or as input power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveConfig {
    K0(f64),
    InputPower(f64),
}

/// Resonant square force pulse F_s0·sin(ω_m t + ψ_f) lasting τ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalPulse {
    force_amplitude: f64,
    tau: f64,
    phase: f64,
}

impl SignalPulse {
    pub fn new(force_amplitude: f64, tau: f64, phase: f64) -> Result<Self, ModelError> {
        positive("force_amplitude", force_amplitude)?;
        positive("tau", tau)?;
        if !phase.is_finite() {
            return Err(ModelError::Invalid(format!("phase must be finite, got {phase}")));
        }
        Ok(Self { force_amplitude, tau, phase })
    }

    /// Build from the normalized amplitude f_s0 = F_s0 / √(2ħω_m m).
    pub fn from_normalized(
        normalized: f64,
        tau: f64,
        phase: f64,
        mech: &MechanicalOscillator,
    ) -> Result<Self, ModelError> {
        positive("normalized_amplitude", normalized)?;
        Self::new(normalized * force_scale(mech), tau, phase)
    }

    pub fn force_amplitude(&self) -> f64 {
        self.force_amplitude
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// f_s0 = F_s0 / √(2ħω_m m).
    pub fn normalized_amplitude(&self, mech: &MechanicalOscillator) -> f64 {
        self.force_amplitude / force_scale(mech)
    }

    /// f_s = f_s0 / 2.
    pub fn quadrature_amplitude(&self, mech: &MechanicalOscillator) -> f64 {
        0.5 * self.normalized_amplitude(mech)
    }
}

/// √(2ħω_m m): converts a normalized force (√(rad/s)) to newtons.
pub fn force_scale(mech: &MechanicalOscillator) -> f64 {
    (2.0 * HBAR * mech.omega_m * mech.mass).sqrt()
}

/// Quantities derived once from the inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedQuantities {
    /// Zero-point length x₀, m.
    pub x0: f64,
    pub n_thermal: f64,
    /// Braginsky factor n_T ω_m τ / Q.
    pub braginsky: f64,
    /// Optomechanical coupling η = x₀ω₀/L, 1/s.
    pub eta: f64,
    /// Intracavity photon-flux-normalized pump amplitude squared, C₀².
    pub c0_squared: f64,
    /// Dimensionless pump power K₀, rad/s.
    pub k0: f64,
    /// Input power, W.
    pub input_power: f64,
    pub quality: f64,
}

impl DerivedQuantities {
    /// 4γ₀η²C₀², equal to K₀γ(γ₀ − γ_e).
    pub fn coupling_squared(&self, cavity: &OpticalCavity) -> f64 {
        4.0 * cavity.gamma0() * self.eta * self.eta * self.c0_squared
    }

    /// 𝒩₀ = 4γ₀η²C₀²/γ² for the degenerate variant.
    pub fn n0(&self, cavity: &OpticalCavity) -> f64 {
        self.coupling_squared(cavity) / (cavity.gamma() * cavity.gamma())
    }
}

/// How the frequency dependence of the pump factors 𝒦(Ω), 𝒩(Ω) is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PumpModel {
    /// Full Ω dependence.
    #[default]
    Dispersive,
    /// Frozen at Ω = 0.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RegimeWarning {
    MechanicalDamping { ratio: f64 },
    UnresolvedSideband { ratio: f64 },
    LargeLoss { ratio: f64 },
    ShortPulse { omega_tau: f64 },
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeWarning::MechanicalDamping { ratio } => {
                write!(f, "gamma_m/gamma = {ratio:.3e} is not small")
            }
            RegimeWarning::UnresolvedSideband { ratio } => {
                write!(f, "gamma/omega_m = {ratio:.3e}: sidebands not resolved")
            }
            RegimeWarning::LargeLoss { ratio } => write!(f, "gamma_e/gamma0 = {ratio:.3e} is not small"),
            RegimeWarning::ShortPulse { omega_tau } => {
                write!(f, "omega_m*tau = {omega_tau:.3} < {MIN_OMEGA_TAU}: pulse not resonant")
            }
        }
    }
}

/// Checks γ_m ≪ γ ≪ ω_m, γ_e ≪ γ₀ and ω_mτ ≫ 1 (warnings) and the squeezing
/// stability bound (error).
pub fn validate_regime(
    mech: &MechanicalOscillator,
    cavity: &OpticalCavity,
    squeeze: &SqueezeConfig,
    signal: &SignalPulse,
) -> Result<Vec<RegimeWarning>, ModelError> {
    squeeze.check(cavity)?;
    let mut warnings = Vec::new();
    let damping = mech.gamma_m() / cavity.gamma();
    if damping > REGIME_RATIO {
        warnings.push(RegimeWarning::MechanicalDamping { ratio: damping });
    }
    let sideband = cavity.gamma() / mech.omega_m();
    if sideband > SIDEBAND_RATIO {
        warnings.push(RegimeWarning::UnresolvedSideband { ratio: sideband });
    }
    let loss = cavity.loss_ratio();
    if loss > REGIME_RATIO {
        warnings.push(RegimeWarning::LargeLoss { ratio: loss });
    }
    let omega_tau = mech.omega_m() * signal.tau();
    if omega_tau < MIN_OMEGA_TAU {
        warnings.push(RegimeWarning::ShortPulse { omega_tau });
    }
    Ok(warnings)
}

/// n_T = 1/(exp(ħω_m/k_BT) − 1); zero at T = 0.
pub fn thermal_occupancy(omega_m: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega_m / (K_B * temperature)).exp_m1()
}

/// B = n_T ω_m τ / Q.
pub fn braginsky_factor(n_thermal: f64, omega_m: f64, tau: f64, quality: f64) -> f64 {
    n_thermal * omega_m * tau / quality
}

fn power_denominator(cavity: &OpticalCavity, mech: &MechanicalOscillator) -> Result<f64, ModelError> {
    let (g0, ge, g) = (cavity.gamma0(), cavity.gamma_e(), cavity.gamma());
    if g0 <= ge {
        return Err(ModelError::SingularPower { gamma0: g0, gamma_e: ge });
    }
    Ok(mech.mass() * mech.omega_m() * cavity.length().powi(2) * g * g * (g0 - ge))
}

/// K₀ = 4γ₀ω₀P_in / (mω_mL²γ²(γ₀ − γ_e)).
pub fn dimensionless_power(
    cavity: &OpticalCavity,
    mech: &MechanicalOscillator,
    input_power: f64,
) -> Result<f64, ModelError> {
    non_negative("input_power", input_power)?;
    let den = power_denominator(cavity, mech)?;
    Ok(4.0 * cavity.gamma0() * cavity.omega0() * input_power / den)
}

/// Inverse of [`dimensionless_power`].
pub fn power_for_k0(cavity: &OpticalCavity, mech: &MechanicalOscillator, k0: f64) -> Result<f64, ModelError> {
    non_negative("k0", k0)?;
    let den = power_denominator(cavity, mech)?;
    Ok(k0 * den / (4.0 * cavity.gamma0() * cavity.omega0()))
}

/// Complete, validated sensor configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemConfig {
    mechanical: MechanicalOscillator,
    cavity: OpticalCavity,
    drive: DriveConfig,
    squeeze: SqueezeConfig,
    signal: SignalPulse,
    pump_model: PumpModel,
    derived: DerivedQuantities,
    #[serde(skip)]
    warnings: Vec<RegimeWarning>,
}

impl SystemConfig {
    pub fn new(
        mechanical: MechanicalOscillator,
        cavity: OpticalCavity,
        drive: DriveConfig,
        squeeze: SqueezeConfig,
        signal: SignalPulse,
    ) -> Result<Self, ModelError> {
        let warnings = validate_regime(&mechanical, &cavity, &squeeze, &signal)?;
        let (k0, input_power) = match drive {
            DriveConfig::K0(k0) => (positive("k0", k0)?, power_for_k0(&cavity, &mechanical, k0)?),
            DriveConfig::InputPower(p) => {
                (dimensionless_power(&cavity, &mechanical, positive("input_power", p)?)?, p)
            }
        };
        let x0 = mechanical.zero_point_length();
        let eta = x0 * cavity.omega0() / cavity.length();
        let (g0, ge, g) = (cavity.gamma0(), cavity.gamma_e(), cavity.gamma());
        let c0_squared = k0 * g * (g0 - ge) / (4.0 * g0 * eta * eta);
        let n_thermal = mechanical.thermal_occupancy();
        let quality = mechanical.quality();
        let derived = DerivedQuantities {
            x0,
            n_thermal,
            braginsky: braginsky_factor(n_thermal, mechanical.omega_m(), signal.tau(), quality),
            eta,
            c0_squared,
            k0,
            input_power,
            quality,
        };
        Ok(Self {
            mechanical,
            cavity,
            drive,
            squeeze,
            signal,
            pump_model: PumpModel::Dispersive,
            derived,
            warnings,
        })
    }

    pub fn mechanical(&self) -> &MechanicalOscillator {
        &self.mechanical
    }

    pub fn cavity(&self) -> &OpticalCavity {
        &self.cavity
    }

    pub fn drive(&self) -> DriveConfig {
        self.drive
    }

    pub fn squeeze(&self) -> SqueezeConfig {
        self.squeeze
    }

    pub fn signal(&self) -> &SignalPulse {
        &self.signal
    }

    pub fn pump_model(&self) -> PumpModel {
        self.pump_model
    }

    pub fn derived(&self) -> &DerivedQuantities {
        &self.derived
    }

    pub fn warnings(&self) -> &[RegimeWarning] {
        &self.warnings
    }

    pub fn k0(&self) -> f64 {
        self.derived.k0
    }

    pub fn n_thermal(&self) -> f64 {
        self.derived.n_thermal
    }

    pub fn with_squeeze(&self, squeeze: SqueezeConfig) -> Result<Self, ModelError> {
        self.rebuild(self.mechanical, self.cavity, self.drive, squeeze, self.signal)
    }

    pub fn with_drive(&self, drive: DriveConfig) -> Result<Self, ModelError> {
        self.rebuild(self.mechanical, self.cavity, drive, self.squeeze, self.signal)
    }

    pub fn with_mechanical(&self, mechanical: MechanicalOscillator) -> Result<Self, ModelError> {
        self.rebuild(mechanical, self.cavity, self.drive, self.squeeze, self.signal)
    }

    pub fn with_cavity(&self, cavity: OpticalCavity) -> Result<Self, ModelError> {
        self.rebuild(self.mechanical, cavity, self.drive, self.squeeze, self.signal)
    }

    pub fn with_signal(&self, signal: SignalPulse) -> Result<Self, ModelError> {
        self.rebuild(self.mechanical, self.cavity, self.drive, self.squeeze, signal)
    }

    pub fn with_pump_model(&self, pump_model: PumpModel) -> Self {
        Self { pump_model, ..self.clone() }
    }

    /// Drive chosen so that the degenerate pump scale 𝒩₀ = K₀(γ₀ − γ_e)/γ takes the given value.
    pub fn with_n0(&self, n0: f64) -> Result<Self, ModelError> {
        positive("n0", n0)?;
        let c = &self.cavity;
        self.with_drive(DriveConfig::K0(n0 * c.gamma() / (c.gamma0() - c.gamma_e())))
    }

    fn rebuild(
        &self,
        mechanical: MechanicalOscillator,
        cavity: OpticalCavity,
        drive: DriveConfig,
        squeeze: SqueezeConfig,
        signal: SignalPulse,
    ) -> Result<Self, ModelError> {
        let mut out = Self::new(mechanical, cavity, drive, squeeze, signal)?;
        out.pump_model = self.pump_model;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn table1() -> SystemConfig {
        presets::table1(presets::TauPreset::Table1)
    }

    #[test]
    fn occupancy_table1_and_limits() {
        let w = 2.0 * PI * 350e3;
        let n20 = thermal_occupancy(w, 20.0);
        assert!((n20 / 1.2e6 - 1.0).abs() < 0.03, "n_T = {n20}");
        assert_eq!(thermal_occupancy(w, 0.0), 0.0);
        assert_eq!(thermal_occupancy(1.0, 0.0), 0.0);
        // high-temperature regime: n_T ≈ k_BT/ħω − 1/2
        let n40 = thermal_occupancy(w, 40.0);
        let direct = K_B * 40.0 / (HBAR * w) - 0.5;
        assert!((n40 - direct).abs() / direct < 1e-9);
        assert!((n40 / n20 - 2.0).abs() < 1e-6);
    }

    #[test]
    fn occupancy_monotone() {
        let mut prev = 0.0;
        for i in 1..50 {
            let n = thermal_occupancy(1e6, i as f64 * 0.5);
            assert!(n > prev);
            prev = n;
        }
        let mut prev = f64::INFINITY;
        for i in 1..50 {
            let n = thermal_occupancy(i as f64 * 1e5, 4.0);
            assert!(n < prev);
            prev = n;
        }
    }

    #[test]
    fn braginsky_values() {
        let c = table1();
        let b = c.derived().braginsky;
        assert!((b / 0.75 - 1.0).abs() < 0.05, "B = {b}");
        let n = c.n_thermal();
        let w = c.mechanical().omega_m();
        let b9 = braginsky_factor(n, w, 28e-6, 1e9);
        assert!((b9 / b - 0.1).abs() < 1e-12);
        assert_eq!(braginsky_factor(0.0, w, 28e-6, 1e8), 0.0);
    }

    #[test]
    fn power_conversion_roundtrip_and_linearity() {
        let c = table1();
        let (cav, mech) = (c.cavity(), c.mechanical());
        for &p in &[1e-6, 1e-3, 0.01, 0.37] {
            let k0 = dimensionless_power(cav, mech, p).unwrap();
            let back = power_for_k0(cav, mech, k0).unwrap();
            assert!((back / p - 1.0).abs() < 1e-12);
            let k2 = dimensionless_power(cav, mech, 2.0 * p).unwrap();
            assert!((k2 / k0 - 2.0).abs() < 1e-12);
        }
        assert_eq!(dimensionless_power(cav, mech, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn power_for_table1_pump_is_order_10mw() {
        let c = table1();
        let k0 = PI / 28e-6;
        let p = power_for_k0(c.cavity(), c.mechanical(), k0).unwrap();
        assert!(p > 1e-3 && p < 1e-1, "P_in = {p}");
    }

    #[test]
    fn singular_power_rejected() {
        let mech = MechanicalOscillator::new(1e-9, 1e6, 0.0, 0.0).unwrap();
        let cav = OpticalCavity::new(1e4, 1e4, 0.1, 1e15).unwrap();
        assert!(matches!(
            dimensionless_power(&cav, &mech, 1e-3),
            Err(ModelError::SingularPower { .. })
        ));
    }

    #[test]
    fn quality_roundtrip() {
        for &q in &[10.0, 1e3, 1e8, 3.3e9] {
            let m = MechanicalOscillator::from_quality(1e-9, 2.0 * PI * 350e3, q, 1.0).unwrap();
            assert!((m.quality() / q - 1.0).abs() < 1e-12);
        }
        assert!(MechanicalOscillator::new(1e-9, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn wavelength_roundtrip() {
        for &l in &[532e-9, 1.064e-6, 1.55e-6] {
            let cav = OpticalCavity::from_wavelength(1e5, 0.0, 0.1, l).unwrap();
            assert!((cav.wavelength() / l - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cavity_total_rate_is_exact_sum() {
        let cav = OpticalCavity::new(2.25e5, 750.0, 0.1, 1.2e15).unwrap();
        assert_eq!(cav.gamma(), 2.25e5 + 750.0);
        assert!(OpticalCavity::new(1.0, 2.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn coupling_identity_holds() {
        let base = table1();
        for cfg in [
            base.clone(),
            base.with_drive(DriveConfig::K0(1234.5)).unwrap(),
            base.with_cavity(base.cavity().with_loss(base.cavity().gamma0() * 0.05).unwrap())
                .unwrap(),
        ] {
            let c = cfg.cavity();
            let lhs = cfg.derived().coupling_squared(c);
            let rhs = cfg.k0() * c.gamma() * (c.gamma0() - c.gamma_e());
            assert!((lhs / rhs - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn regime_checks() {
        let c = table1();
        assert!(c.warnings().is_empty(), "{:?}", c.warnings());

        let g = c.cavity().gamma();
        let err = c.with_squeeze(SqueezeConfig::TwoPhoton { kappa: 1.01 * g }).unwrap_err();
        assert!(matches!(err, ModelError::Unstable { what: "kappa", .. }));
        assert!(c.with_squeeze(SqueezeConfig::TwoPhoton { kappa: g }).is_ok());
        assert!(c.with_squeeze(SqueezeConfig::Degenerate { upsilon: g }).is_err());

        let wm = c.mechanical().omega_m();
        let wide = OpticalCavity::new(wm / 2.0 * 0.99, wm / 2.0 * 0.01, 0.1, 1e15).unwrap();
        let w = validate_regime(c.mechanical(), &wide, &SqueezeConfig::None, c.signal()).unwrap();
        assert!(w.iter().any(|w| matches!(w, RegimeWarning::UnresolvedSideband { .. })));

        let short = SignalPulse::new(1e-15, 1.0 / wm, 0.0).unwrap();
        let w = validate_regime(c.mechanical(), c.cavity(), &SqueezeConfig::None, &short).unwrap();
        assert!(matches!(w[..], [RegimeWarning::ShortPulse { .. }]));
    }

    #[test]
    fn signal_normalization() {
        let c = table1();
        let mech = c.mechanical();
        let s = SignalPulse::from_normalized(3.0, 28e-6, 0.1, mech).unwrap();
        assert!((s.normalized_amplitude(mech) / 3.0 - 1.0).abs() < 1e-12);
        assert_eq!(s.quadrature_amplitude(mech) * 2.0, s.normalized_amplitude(mech));
    }

    #[test]
    fn n0_drive_helper() {
        let c = table1().with_n0(PI / 28e-6).unwrap();
        let n0 = c.derived().n0(c.cavity());
        assert!((n0 / (PI / 28e-6) - 1.0).abs() < 1e-12);
    }
}
