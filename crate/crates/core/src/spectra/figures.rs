//! Reference figure datasets: spectra relative to the SQL for the standard
//! squeezing levels, lossless mechanics (γ_m = 0) and the reference cavity.

use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::{case_spectrum, ratio_to_sql, sql_spectrum, FrequencyGrid, SpectraError, SpectrumCase, SpectrumSeries};
use crate::exec::Execution;
use crate::model::presets::{table1, TauPreset};
use crate::model::{DriveConfig, ModelError, SqueezeConfig, SystemConfig};

/// Squeezing levels of the figure curves, in units of γ₀.
pub const SQUEEZE_LEVELS: [f64; 3] = [0.0, 0.5, 0.9];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
}

impl FigureId {
    pub const ALL: [FigureId; 7] =
        [FigureId::Fig3, FigureId::Fig4, FigureId::Fig5, FigureId::Fig6, FigureId::Fig7, FigureId::Fig8, FigureId::Fig9];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8 => "fig8",
            FigureId::Fig9 => "fig9",
        }
    }

    pub fn case(self) -> SpectrumCase {
        match self {
            FigureId::Fig3 => SpectrumCase::Baseline,
            FigureId::Fig4 => SpectrumCase::NondegRaw,
            FigureId::Fig5 | FigureId::Fig6 => SpectrumCase::NondegSub,
            FigureId::Fig7 => SpectrumCase::DegRaw,
            FigureId::Fig8 | FigureId::Fig9 => SpectrumCase::DegSub,
        }
    }

    pub fn tau_preset(self) -> TauPreset {
        match self {
            FigureId::Fig3 => TauPreset::Fig3,
            _ => TauPreset::Table1,
        }
    }

    /// Pump in units of π/τ (K₀ for two-photon figures, 𝒩₀ for degenerate ones).
    pub fn pump_multiple(self) -> f64 {
        match self {
            FigureId::Fig6 | FigureId::Fig9 => 4.0,
            _ => 1.0,
        }
    }

    pub fn is_degenerate(self) -> bool {
        matches!(self.case(), SpectrumCase::DegRaw | SpectrumCase::DegSub)
    }

    pub fn description(self) -> &'static str {
        match self {
            FigureId::Fig3 => "quantum noise and SQL, no squeezing, no loss, K0 = pi/tau, tau = 0.28 ms",
            FigureId::Fig4 => "two-photon squeezing with loss, raw, K0 = pi/tau",
            FigureId::Fig5 => "two-photon squeezing with loss, back action subtracted, K0 = pi/tau",
            FigureId::Fig6 => "two-photon squeezing with loss, back action subtracted, K0 = 4 pi/tau",
            FigureId::Fig7 => "degenerate squeezing with loss, raw, N0 = pi/tau",
            FigureId::Fig8 => "degenerate squeezing with loss, back action subtracted, N0 = pi/tau",
            FigureId::Fig9 => "degenerate squeezing with loss, back action subtracted, N0 = 4 pi/tau",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown figure '{s}' (expected fig3..fig9)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureCurve {
    pub label: String,
    /// κ or υ in units of γ₀; `None` for curves without squeezing parameter.
    pub squeeze_g0: Option<f64>,
    /// What `series.values` holds.
    pub quantity: &'static str,
    pub series: SpectrumSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureData {
    pub id: FigureId,
    pub description: &'static str,
    pub tau: f64,
    pub pump: f64,
    pub gamma0: f64,
    pub gamma_e: f64,
    pub curves: Vec<FigureCurve>,
}

/// Configuration shared by the curves of a figure, before squeezing is applied.
pub fn figure_config(id: FigureId) -> Result<SystemConfig, ModelError> {
    let base = table1(id.tau_preset());
    let base = base.with_mechanical(base.mechanical().with_gamma_m(0.0)?)?;
    let pump = id.pump_multiple() * PI / id.tau_preset().seconds();
    if id.is_degenerate() {
        base.with_n0(pump)
    } else if id == FigureId::Fig3 {
        let lossless = base.cavity().with_loss(0.0)?;
        base.with_cavity(lossless)?.with_drive(DriveConfig::K0(pump))
    } else {
        base.with_drive(DriveConfig::K0(pump))
    }
}

/// Computes every curve of a figure on the given grid (default grid when `None`).
pub fn figure(id: FigureId, grid: Option<&FrequencyGrid>, exec: Execution) -> Result<FigureData, FigureError> {
    let base = figure_config(id)?;
    let grid = grid.cloned().unwrap_or_else(|| FrequencyGrid::default_for(&base));
    let g0 = base.cavity().gamma0();
    let mut curves = Vec::new();
    if id == FigureId::Fig3 {
        let s = case_spectrum(SpectrumCase::Baseline, &base, &grid, exec)?;
        let mut sql = s.clone();
        sql.label = "sql".into();
        sql.values = sql_spectrum(&base, &grid);
        curves.push(FigureCurve { label: "s_qu".into(), squeeze_g0: None, quantity: "psd", series: s });
        curves.push(FigureCurve { label: "s_sql".into(), squeeze_g0: None, quantity: "psd", series: sql });
    } else {
        for frac in SQUEEZE_LEVELS {
            let sq = if id.is_degenerate() {
                SqueezeConfig::Degenerate { upsilon: frac * g0 }
            } else {
                SqueezeConfig::TwoPhoton { kappa: frac * g0 }
            };
            let cfg = base.with_squeeze(sq)?;
            let s = case_spectrum(id.case(), &cfg, &grid, exec)?;
            let sym = if id.is_degenerate() { "upsilon" } else { "kappa" };
            curves.push(FigureCurve {
                label: format!("{sym}_{frac}g0"),
                squeeze_g0: Some(frac),
                quantity: "ratio_to_sql",
                series: ratio_to_sql(&s, cfg.mechanical().gamma_m()),
            });
        }
    }
    Ok(FigureData {
        id,
        description: id.description(),
        tau: id.tau_preset().seconds(),
        pump: id.pump_multiple() * PI / id.tau_preset().seconds(),
        gamma0: g0,
        gamma_e: base.cavity().gamma_e(),
        curves,
    })
}

#[derive(Debug, thiserror::Error)]
pub enum FigureError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}
