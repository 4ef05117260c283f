//! Signal-referred force noise spectra.
//!
//! Spectra are single-sided, in normalized force units (rad/s), with unit
//! density for every vacuum quadrature input. They are assembled from transfer
//! vectors; the closed forms below give the same numbers by a second route.

pub mod figures;
pub mod io;
pub mod threshold;

use num_complex::Complex64;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::exec::Execution;
use crate::model::{ConfigFile, PumpModel, SqueezeConfig, SystemConfig};
use crate::transfer::{
    degenerate_coeffs, mu, output_transfer, pump_factor, xi, Combination, MeasurementCase, NoiseChannel,
    Quadrature, QuadratureFamily, Sign, TransferError, TransferVector,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error("case {case} cannot be evaluated with {squeeze} squeezing")]
    CaseMismatch { case: SpectrumCase, squeeze: &'static str },
    #[error("assembly requires a signal-referenced transfer vector")]
    NotReferenced,
    #[error("invalid frequency grid: {0}")]
    Grid(String),
    #[error("grids do not align")]
    GridMismatch,
}

/// The six measurement scenarios that have closed-form spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumCase {
    /// No squeezing, raw difference port.
    Baseline,
    /// No squeezing, back action subtracted (lossless closed form).
    LosslessSub,
    /// Two-photon squeezing, raw difference port.
    NondegRaw,
    /// Two-photon squeezing, back action subtracted.
    NondegSub,
    /// Degenerate squeezing, raw difference port.
    DegRaw,
    /// Degenerate squeezing, back action subtracted.
    DegSub,
}

impl SpectrumCase {
    pub const ALL: [SpectrumCase; 6] = [
        SpectrumCase::Baseline,
        SpectrumCase::LosslessSub,
        SpectrumCase::NondegRaw,
        SpectrumCase::NondegSub,
        SpectrumCase::DegRaw,
        SpectrumCase::DegSub,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpectrumCase::Baseline => "baseline",
            SpectrumCase::LosslessSub => "lossless-sub",
            SpectrumCase::NondegRaw => "nondeg-raw",
            SpectrumCase::NondegSub => "nondeg-sub",
            SpectrumCase::DegRaw => "deg-raw",
            SpectrumCase::DegSub => "deg-sub",
        }
    }

    pub fn is_subtracted(self) -> bool {
        matches!(self, SpectrumCase::LosslessSub | SpectrumCase::NondegSub | SpectrumCase::DegSub)
    }

    pub fn combination(self) -> Combination {
        if self.is_subtracted() {
            Combination::Subtracted
        } else {
            Combination::DifferencePort
        }
    }

    /// Squeezing used by this case, taken from the configuration where it applies.
    pub fn squeeze(self, config: &SystemConfig) -> Result<SqueezeConfig, SpectraError> {
        let sq = config.squeeze();
        let mismatch = |name| Err(SpectraError::CaseMismatch { case: self, squeeze: name });
        match self {
            SpectrumCase::Baseline | SpectrumCase::LosslessSub => Ok(SqueezeConfig::None),
            SpectrumCase::NondegRaw | SpectrumCase::NondegSub => match sq {
                SqueezeConfig::Degenerate { .. } => mismatch("degenerate"),
                other => Ok(SqueezeConfig::TwoPhoton { kappa: other.rate() }),
            },
            SpectrumCase::DegRaw | SpectrumCase::DegSub => match sq {
                SqueezeConfig::TwoPhoton { .. } => mismatch("two-photon"),
                other => Ok(SqueezeConfig::Degenerate { upsilon: other.rate() }),
            },
        }
    }

    /// Amplitude-family measurement this case describes.
    pub fn measurement(self, config: &SystemConfig) -> Result<MeasurementCase, SpectraError> {
        Ok(MeasurementCase::new(self.squeeze(config)?, QuadratureFamily::Amplitude, self.combination()))
    }
}

impl fmt::Display for SpectrumCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpectrumCase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SpectrumCase::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SpectrumCase::ALL.iter().map(|c| c.name()).collect();
                format!("unknown case '{s}' (expected one of {})", names.join(", "))
            })
    }
}

/// Single-sided PSD of a signal-referenced output.
pub fn assemble_psd(tv: &TransferVector, n_thermal: f64) -> Result<f64, SpectraError> {
    Ok(channel_contributions(tv, n_thermal)?.iter().map(|(_, v)| v).sum())
}

/// Contribution of each noise channel (both input quadratures folded together).
pub fn channel_contributions(tv: &TransferVector, n_thermal: f64) -> Result<[(NoiseChannel, f64); 5], SpectraError> {
    if !tv.referenced {
        return Err(SpectraError::NotReferenced);
    }
    let weight = |ch: NoiseChannel| if ch == NoiseChannel::Thermal { 2.0 * n_thermal + 1.0 } else { 1.0 };
    let term = |ch: NoiseChannel| {
        let a = tv.coeff(Quadrature::Amplitude, ch).norm_sqr();
        let p = tv.coeff(Quadrature::Phase, ch).norm_sqr();
        (ch, (a + p) * weight(ch))
    };
    Ok([
        term(NoiseChannel::AlphaPlus),
        term(NoiseChannel::AlphaMinus),
        term(NoiseChannel::EpsPlus),
        term(NoiseChannel::EpsMinus),
        term(NoiseChannel::Thermal),
    ])
}

/// S_SQL = 2√(γ_m² + Ω²).
pub fn sql_psd(gamma_m: f64, omega: f64) -> f64 {
    2.0 * gamma_m.hypot(omega)
}

/// Quantum part of the baseline spectrum, (γ_m² + Ω²)/𝒦 + 𝒦, for a real pump 𝒦.
pub fn quantum_psd(k: f64, gamma_m: f64, omega: f64) -> f64 {
    (gamma_m * gamma_m + omega * omega) / k + k
}

/// Minimizes [`quantum_psd`] over 𝒦 by golden-section search in ln 𝒦.
/// Returns (𝒦_opt, S_min).
pub fn minimize_quantum_psd(gamma_m: f64, omega: f64) -> (f64, f64) {
    let scale = gamma_m.abs() + omega.abs();
    assert!(scale > 0.0, "minimization needs gamma_m or omega nonzero");
    let f = |u: f64| quantum_psd(u.exp(), gamma_m, omega);
    let (mut a, mut b) = ((scale * 1e-4).ln(), (scale * 1e4).ln());
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-9 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let u = 0.5 * (a + b);
    (u.exp(), f(u))
}

fn thermal_term(config: &SystemConfig) -> f64 {
    2.0 * config.mechanical().gamma_m() * (2.0 * config.n_thermal() + 1.0)
}

fn mech_sq(config: &SystemConfig, omega: f64) -> f64 {
    let gm = config.mechanical().gamma_m();
    gm * gm + omega * omega
}

fn pump_at(config: &SystemConfig, kappa: f64, omega: f64) -> Result<Complex64, TransferError> {
    let w = match config.pump_model() {
        PumpModel::Dispersive => omega,
        PumpModel::Constant => 0.0,
    };
    pump_factor(config.cavity(), config.k0(), kappa, w)
}

fn degenerate_at(config: &SystemConfig, upsilon: f64, omega: f64) -> Result<(Complex64, Complex64, Complex64), TransferError> {
    let cav = config.cavity();
    let n0 = config.derived().n0(cav);
    let d = degenerate_coeffs(cav, n0, upsilon, omega)?;
    let n = match config.pump_model() {
        PumpModel::Dispersive => d.n,
        PumpModel::Constant => degenerate_coeffs(cav, n0, upsilon, 0.0)?.n,
    };
    Ok((d.zeta, d.sigma, n))
}

/// No squeezing, no loss, raw: 2γ_m(2n_T+1) + (γ_m²+Ω²)/|𝒦| + |𝒦|.
pub fn sf_baseline(config: &SystemConfig, omega: f64) -> Result<f64, SpectraError> {
    let k = pump_at(config, 0.0, omega)?.norm();
    Ok(thermal_term(config) + mech_sq(config, omega) / k + k)
}

/// No squeezing, no loss, subtracted: 2γ_m(2n_T+1) + (γ_m²+Ω²)/|𝒦|.
pub fn sf_lossless_subtracted(config: &SystemConfig, omega: f64) -> Result<f64, SpectraError> {
    let k = pump_at(config, 0.0, omega)?.norm();
    Ok(thermal_term(config) + mech_sq(config, omega) / k)
}

/// Two-photon squeezing with loss, raw difference port.
pub fn sf_nondeg_raw(config: &SystemConfig, kappa: f64, omega: f64) -> Result<f64, SpectraError> {
    let cav = config.cavity();
    let k = pump_at(config, kappa, omega)?;
    let xm = xi(cav, kappa, omega, Sign::Minus)?;
    let mm = mu(cav, kappa, omega, Sign::Minus)?;
    let (xn, mn) = (xm.norm(), mm.norm());
    Ok(thermal_term(config)
        + mech_sq(config, omega) / k.norm() * (xn + mn * mn / xn)
        + (xm * k).norm() * (1.0 + cav.loss_ratio()))
}

/// Two-photon squeezing with loss, back action subtracted.
pub fn sf_nondeg_subtracted(config: &SystemConfig, kappa: f64, omega: f64) -> Result<f64, SpectraError> {
    let cav = config.cavity();
    let k = pump_at(config, kappa, omega)?;
    let xm = xi(cav, kappa, omega, Sign::Minus)?;
    let xp = xi(cav, kappa, omega, Sign::Plus)?;
    let mm = mu(cav, kappa, omega, Sign::Minus)?;
    let (xn, mn) = (xm.norm(), mm.norm());
    Ok(thermal_term(config)
        + mech_sq(config, omega) / k.norm() * (xn + mn * mn / xn)
        + (xm * k).norm() * cav.loss_ratio() / xp.norm_sqr())
}

/// Degenerate squeezing with loss, raw difference port.
pub fn sf_deg_raw(config: &SystemConfig, upsilon: f64, omega: f64) -> Result<f64, SpectraError> {
    let r = config.cavity().loss_ratio();
    let (z, s, n) = degenerate_at(config, upsilon, omega)?;
    Ok(thermal_term(config)
        + mech_sq(config, omega) / n.norm() * (z.norm_sqr() + s.norm_sqr() * r)
        + n.norm() * (1.0 + r))
}

/// Degenerate squeezing with loss, back action subtracted.
pub fn sf_deg_subtracted(config: &SystemConfig, upsilon: f64, omega: f64) -> Result<f64, SpectraError> {
    let r = config.cavity().loss_ratio();
    let (z, s, n) = degenerate_at(config, upsilon, omega)?;
    Ok((z.norm_sqr() + s.norm_sqr() * r) * mech_sq(config, omega) / n.norm()
        + n.norm() / z.norm_sqr() * r
        + thermal_term(config))
}

/// Closed-form spectrum of a case, using the configuration's squeezing rate.
pub fn closed_form_psd(case: SpectrumCase, config: &SystemConfig, omega: f64) -> Result<f64, SpectraError> {
    let rate = case.squeeze(config)?.rate();
    match case {
        SpectrumCase::Baseline => sf_baseline(config, omega),
        SpectrumCase::LosslessSub => sf_lossless_subtracted(config, omega),
        SpectrumCase::NondegRaw => sf_nondeg_raw(config, rate, omega),
        SpectrumCase::NondegSub => sf_nondeg_subtracted(config, rate, omega),
        SpectrumCase::DegRaw => sf_deg_raw(config, rate, omega),
        SpectrumCase::DegSub => sf_deg_subtracted(config, rate, omega),
    }
}

/// Assembled spectrum of a case at one frequency.
pub fn case_psd(case: SpectrumCase, config: &SystemConfig, omega: f64) -> Result<f64, SpectraError> {
    measured_psd(&case.measurement(config)?, config, omega)
}

/// Assembled spectrum of an arbitrary measurement at one frequency.
pub fn measured_psd(case: &MeasurementCase, config: &SystemConfig, omega: f64) -> Result<f64, SpectraError> {
    let tv = output_transfer(case, config, omega)?.referenced()?;
    assemble_psd(&tv, config.n_thermal())
}

/// Frequency grid, rad/s, strictly increasing and positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyGrid(Vec<f64>);

impl FrequencyGrid {
    pub const DEFAULT_POINTS: usize = 400;
    pub const DEFAULT_MIN_G0: f64 = 1e-3;
    pub const DEFAULT_MAX_G0: f64 = 10.0;

    pub fn new(points: Vec<f64>) -> Result<Self, SpectraError> {
        if points.is_empty() {
            return Err(SpectraError::Grid("empty grid".into()));
        }
        if points.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(SpectraError::Grid("frequencies must be positive and finite".into()));
        }
        if points.windows(2).any(|p| p[1] <= p[0]) {
            return Err(SpectraError::Grid("frequencies must be strictly increasing".into()));
        }
        Ok(Self(points))
    }

    /// `n` log-spaced points from `min` to `max` inclusive.
    pub fn log(min: f64, max: f64, n: usize) -> Result<Self, SpectraError> {
        if !(min > 0.0 && max > min && min.is_finite() && max.is_finite()) {
            return Err(SpectraError::Grid(format!("need 0 < min < max, got [{min}, {max}]")));
        }
        match n {
            0 => Err(SpectraError::Grid("need at least one point".into())),
            1 => Self::new(vec![min]),
            _ => {
                let (a, b) = (min.ln(), max.ln());
                let step = (b - a) / (n - 1) as f64;
                let mut pts: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
                pts[0] = min;
                pts[n - 1] = max;
                Self::new(pts)
            }
        }
    }

    /// 400 log-spaced points over [10⁻³γ₀, 10γ₀].
    pub fn default_for(config: &SystemConfig) -> Self {
        let g0 = config.cavity().gamma0();
        Self::log(Self::DEFAULT_MIN_G0 * g0, Self::DEFAULT_MAX_G0 * g0, Self::DEFAULT_POINTS)
            .expect("default grid is valid")
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A spectrum over a grid together with what produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSeries {
    pub label: String,
    pub case: MeasurementCase,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub pump_model: PumpModel,
    pub config: ConfigFile,
}

impl SpectrumSeries {
    pub fn min(&self) -> Option<(f64, f64)> {
        self.grid
            .iter()
            .zip(&self.values)
            .map(|(&w, &v)| (w, v))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Per-channel decomposition of a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseBudget {
    pub channels: Vec<(NoiseChannel, Vec<f64>)>,
    pub total: SpectrumSeries,
}

fn series(label: String, case: MeasurementCase, config: &SystemConfig, grid: &FrequencyGrid, values: Vec<f64>) -> SpectrumSeries {
    SpectrumSeries {
        label,
        case,
        grid: grid.points().to_vec(),
        values,
        pump_model: config.pump_model(),
        config: config.to_file(),
    }
}

/// Assembled spectrum of a measurement over a grid.
pub fn spectrum(
    case: &MeasurementCase,
    config: &SystemConfig,
    grid: &FrequencyGrid,
    exec: Execution,
) -> Result<SpectrumSeries, SpectraError> {
    let values = exec.try_map(grid.points(), |&w| measured_psd(case, config, w))?;
    Ok(series(format!("{:?}/{:?}", case.family, case.combination), *case, config, grid, values))
}

/// Assembled spectrum of a named case over a grid.
pub fn case_spectrum(
    case: SpectrumCase,
    config: &SystemConfig,
    grid: &FrequencyGrid,
    exec: Execution,
) -> Result<SpectrumSeries, SpectraError> {
    let m = case.measurement(config)?;
    let mut s = spectrum(&m, config, grid, exec)?;
    s.label = case.name().to_string();
    Ok(s)
}

/// Closed-form spectrum of a named case over a grid.
pub fn closed_form_spectrum(
    case: SpectrumCase,
    config: &SystemConfig,
    grid: &FrequencyGrid,
    exec: Execution,
) -> Result<SpectrumSeries, SpectraError> {
    let m = case.measurement(config)?;
    let values = exec.try_map(grid.points(), |&w| closed_form_psd(case, config, w))?;
    Ok(series(format!("{}-closed-form", case.name()), m, config, grid, values))
}

/// Spectrum split by noise channel.
pub fn noise_budget(
    case: &MeasurementCase,
    config: &SystemConfig,
    grid: &FrequencyGrid,
    exec: Execution,
) -> Result<NoiseBudget, SpectraError> {
    let n_t = config.n_thermal();
    let rows = exec.try_map(grid.points(), |&w| -> Result<_, SpectraError> {
        let tv = output_transfer(case, config, w)?.referenced()?;
        channel_contributions(&tv, n_t)
    })?;
    let mut channels: Vec<(NoiseChannel, Vec<f64>)> =
        rows.first().map(|r| r.iter().map(|(c, _)| (*c, Vec::with_capacity(rows.len()))).collect()).unwrap_or_default();
    for row in &rows {
        for (k, (_, v)) in row.iter().enumerate() {
            channels[k].1.push(*v);
        }
    }
    let totals = rows.iter().map(|r| r.iter().map(|(_, v)| v).sum()).collect();
    let total = series(format!("{:?}/{:?}", case.family, case.combination), *case, config, grid, totals);
    Ok(NoiseBudget { channels, total })
}

/// SQL curve 2√(γ_m² + Ω²) on a grid.
pub fn sql_spectrum(config: &SystemConfig, grid: &FrequencyGrid) -> Vec<f64> {
    let gm = config.mechanical().gamma_m();
    grid.points().iter().map(|&w| sql_psd(gm, w)).collect()
}

/// Pointwise ratio to the SQL; points where the SQL vanishes are dropped.
pub fn ratio_to_sql(series: &SpectrumSeries, gamma_m: f64) -> SpectrumSeries {
    let mut out = series.clone();
    out.label = format!("{}/sql", series.label);
    let (grid, values) = series
        .grid
        .iter()
        .zip(&series.values)
        .filter_map(|(&w, &v)| {
            let s = sql_psd(gamma_m, w);
            (s > 0.0).then_some((w, v / s))
        })
        .unzip();
    out.grid = grid;
    out.values = values;
    out
}
