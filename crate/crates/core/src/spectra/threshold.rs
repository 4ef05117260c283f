//! Minimum detectable force for a resonant pulse of duration τ.

use serde::Serialize;
use std::f64::consts::PI;

use crate::constants::HBAR;
use crate::model::{force_scale, SystemConfig};

/// Above this value of γ_m·τ the short-pulse approximation is flagged.
pub const SHORT_PULSE_LIMIT: f64 = 0.1;

/// Normalized amplitude f_s0 = √(S·ΔΩ/2π) with ΔΩ = 2π/τ.
pub fn spectral_threshold(psd: f64, tau: f64) -> f64 {
    (psd / tau).sqrt()
}

/// [`spectral_threshold`] converted to newtons.
pub fn spectral_threshold_force(config: &SystemConfig, psd: f64, tau: f64) -> f64 {
    spectral_threshold(psd, tau) * force_scale(config.mechanical())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeDomainThreshold {
    pub tau: f64,
    /// Optimal constant pump 𝒦* = √(γ_m² + ⅓(2π/τ)²).
    pub k_star: f64,
    /// Thermal part of F²/(4ħmω_m), 2γ_m(2n_T+1)/τ.
    pub thermal_term: f64,
    /// Quantum part of F²/(4ħmω_m) from the band-integrated spectrum, 2𝒦*/τ.
    pub band_quantum_term: f64,
    /// Quantum part when the SQL spectrum is used instead, 4π/τ².
    pub sql_quantum_term: f64,
    /// Minimum force, band-integrated variant, N.
    pub band_integrated: f64,
    /// Minimum force, SQL-spectrum variant, N.
    pub sql_form: f64,
    /// F_SQL = (4/τ)√(πħmω_m/√3), N.
    pub f_sql: f64,
    /// γ_m·τ; the approximation assumes this is small.
    pub gamma_m_tau: f64,
}

impl TimeDomainThreshold {
    pub fn short_pulse_ok(&self) -> bool {
        self.gamma_m_tau < SHORT_PULSE_LIMIT
    }
}

/// Detection threshold from the band-integrated baseline spectrum, minimized over a constant pump.
pub fn time_domain_threshold(config: &SystemConfig, tau: f64) -> TimeDomainThreshold {
    let mech = config.mechanical();
    let gm = mech.gamma_m();
    let band = 2.0 * PI / tau;
    let k_star = (gm * gm + band * band / 3.0).sqrt();
    let thermal_term = 2.0 * gm * (2.0 * config.n_thermal() + 1.0) / tau;
    let band_quantum_term = 2.0 * k_star / tau;
    let sql_quantum_term = 4.0 * PI / (tau * tau);
    let scale = 4.0 * HBAR * mech.mass() * mech.omega_m();
    TimeDomainThreshold {
        tau,
        k_star,
        thermal_term,
        band_quantum_term,
        sql_quantum_term,
        band_integrated: (scale * (thermal_term + band_quantum_term)).sqrt(),
        sql_form: (scale * (thermal_term + sql_quantum_term)).sqrt(),
        f_sql: 4.0 / tau * (PI * HBAR * mech.mass() * mech.omega_m() / 3f64.sqrt()).sqrt(),
        gamma_m_tau: gm * tau,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets::{table1, TauPreset};

    #[test]
    fn quantum_terms_differ_by_root_three() {
        let c = table1(TauPreset::Table1);
        let c = c.with_mechanical(c.mechanical().with_gamma_m(0.0).unwrap()).unwrap();
        let t = time_domain_threshold(&c, 28e-6);
        assert_eq!(t.thermal_term, 0.0);
        assert!((t.band_quantum_term / t.sql_quantum_term - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!((t.k_star - 2.0 * PI / 28e-6 / 3f64.sqrt()).abs() / t.k_star < 1e-14);
        assert!((t.band_integrated / t.f_sql - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_spectrum_threshold() {
        assert!((spectral_threshold(4.0, 0.25) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn table1_f_sql_value() {
        let c = table1(TauPreset::Table1);
        let t = time_domain_threshold(&c, 28e-6);
        let expect = 4.0 / 28e-6 * (PI * HBAR * 5e-8 * 2.0 * PI * 350e3 / 3f64.sqrt()).sqrt();
        assert!((t.f_sql / expect - 1.0).abs() < 1e-12);
        assert!(t.short_pulse_ok());
        assert!(t.band_integrated > t.f_sql);
    }
}
