//! Monte-Carlo check of a closed-form spectrum against the simulator.
//!
//! Each trial is an independent stationary realization one segment long, so
//! segments are independent and trials can run in parallel. The signal-port
//! record (plus the weighted reference record for subtracted cases) is
//! transformed, divided by the analytic signal gain, and averaged per bin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::integrate::{simulate, InitialState, Integrator, SimulationSettings};
use super::sde::{NoiseMask, SdeSystem};
use super::welch::{PeriodogramAccumulator, SegmentTransform, Window, MIN_SEGMENTS};
use super::OracleError;
use crate::exec::Execution;
use crate::model::{SqueezeConfig, SystemConfig};
use crate::spectra::{closed_form_psd, measured_psd, FrequencyGrid, SpectrumCase};
use crate::transfer::{output_transfer, subtraction_pair, Combination, MeasurementCase, Quadrature, QuadratureFamily};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationSettings {
    pub segments: usize,
    /// Samples per segment; chosen automatically when `None`.
    pub segment_len: Option<usize>,
    /// Time step; 0.05 over the fastest rate when `None`.
    pub dt: Option<f64>,
    pub seed: u64,
    /// Relative tolerance per point.
    pub tolerance: f64,
    /// Fraction of points that must agree.
    pub coverage: f64,
    /// Lowest and highest checked frequency, in units of γ₀.
    pub omega_min_g0: f64,
    pub omega_max_g0: f64,
    pub points: usize,
    /// Shift of the analytic squeezing rate, in units of γ₀ (negative control).
    pub perturb_kappa: Option<f64>,
    pub integrator: Integrator,
    pub window: Window,
    pub family: QuadratureFamily,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        Self {
            segments: 200,
            segment_len: None,
            dt: None,
            seed: 1,
            tolerance: 0.05,
            coverage: 0.95,
            omega_min_g0: 1e-2,
            omega_max_g0: 10.0,
            points: 40,
            perturb_kappa: None,
            integrator: Integrator::Exact,
            window: Window::Hann,
            family: QuadratureFamily::Amplitude,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationPoint {
    /// Requested frequency.
    pub omega_target: f64,
    /// Frequency of the bin used.
    pub omega: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub analytic: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub case: SpectrumCase,
    pub family: QuadratureFamily,
    pub seed: u64,
    pub integrator: Integrator,
    pub dt: f64,
    pub segment_len: usize,
    pub segments: usize,
    pub tolerance: f64,
    pub coverage: f64,
    pub perturb_kappa: Option<f64>,
    /// "closed_form" for the amplitude family, "transfer" otherwise.
    pub reference: &'static str,
    pub fraction_within: f64,
    pub passed: bool,
    pub points: Vec<ValidationPoint>,
}

/// Simulation layout derived from the settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plan {
    pub dt: f64,
    pub segment_len: usize,
}

/// Case and configuration the analytic side is evaluated with.
pub fn analytic_side(
    config: &SystemConfig,
    case: SpectrumCase,
    perturb: Option<f64>,
) -> Result<(SpectrumCase, SystemConfig), OracleError> {
    let sq = case.squeeze(config)?;
    let Some(delta) = perturb else {
        return Ok((case, config.with_squeeze(sq)?));
    };
    let shift = delta * config.cavity().gamma0();
    let (case, sq) = match (case, sq) {
        (SpectrumCase::Baseline, _) => (SpectrumCase::NondegRaw, SqueezeConfig::TwoPhoton { kappa: shift }),
        (SpectrumCase::LosslessSub, _) => (SpectrumCase::NondegSub, SqueezeConfig::TwoPhoton { kappa: shift }),
        (c, SqueezeConfig::Degenerate { upsilon }) => (c, SqueezeConfig::Degenerate { upsilon: upsilon + shift }),
        (c, other) => (c, SqueezeConfig::TwoPhoton { kappa: other.rate() + shift }),
    };
    Ok((case, config.with_squeeze(sq)?))
}

fn systems(config: &SystemConfig, family: QuadratureFamily) -> Result<Vec<(Quadrature, f64, f64)>, OracleError> {
    // (quadrature, weight on its signal port, weight on its reference port)
    let (c, s) = family.weights();
    let mut out = Vec::new();
    if c != 0.0 {
        out.push((Quadrature::Amplitude, c, c));
    }
    if s != 0.0 {
        out.push((Quadrature::Phase, s, s));
    }
    for (q, _, _) in &out {
        SdeSystem::new(config, *q, NoiseMask::default())?;
    }
    Ok(out)
}

/// Signal and reference output index of one quadrature system.
fn ports(q: Quadrature) -> (usize, usize) {
    match q {
        Quadrature::Amplitude => (SdeSystem::DIFFERENCE, SdeSystem::SUM),
        Quadrature::Phase => (SdeSystem::SUM, SdeSystem::DIFFERENCE),
    }
}

pub fn plan(config: &SystemConfig, settings: &ValidationSettings) -> Result<Plan, OracleError> {
    let mut fastest: f64 = 0.0;
    let mut slowest_optical = f64::INFINITY;
    for (q, _, _) in systems(config, settings.family)? {
        let sys = SdeSystem::new(config, q, NoiseMask::default())?;
        fastest = fastest.max(sys.largest_rate());
        slowest_optical = slowest_optical.min(sys.slowest_optical_rate());
    }
    let dt = settings.dt.unwrap_or(0.05 / fastest);
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(OracleError::Settings(format!("dt must be positive, got {dt}")));
    }
    let segment_len = match settings.segment_len {
        Some(n) => n,
        None => {
            // ten bins below the lowest frequency and a hundred optical correlation times
            let omega_min = settings.omega_min_g0 * config.cavity().gamma0();
            let duration = (20.0 * PI / omega_min).max(100.0 / slowest_optical);
            ((duration / dt).ceil() as usize).next_power_of_two()
        }
    };
    Ok(Plan { dt, segment_len })
}

/// Runs the simulator for `case` and compares with the analytic spectrum.
pub fn validate(
    config: &SystemConfig,
    case: SpectrumCase,
    settings: &ValidationSettings,
    exec: Execution,
) -> Result<ValidationReport, OracleError> {
    if settings.segments < MIN_SEGMENTS {
        return Err(OracleError::TooFewSegments { segments: settings.segments, required: MIN_SEGMENTS });
    }
    if !(settings.omega_min_g0 > 0.0 && settings.omega_max_g0 > settings.omega_min_g0) || settings.points == 0 {
        return Err(OracleError::Settings("invalid validation band".into()));
    }
    let sim_config = config.with_squeeze(case.squeeze(config)?)?;
    let (analytic_case, analytic_config) = analytic_side(config, case, settings.perturb_kappa)?;
    let plan = plan(&sim_config, settings)?;
    let transform = SegmentTransform::new(plan.segment_len, plan.dt, settings.window)?;
    let g0 = config.cavity().gamma0();
    let targets = FrequencyGrid::log(settings.omega_min_g0 * g0, settings.omega_max_g0 * g0, settings.points)?;

    let mut bins: Vec<usize> = targets.points().iter().map(|&w| transform.nearest_bin(w)).collect();
    bins.dedup();
    let nyquist = transform.bins();
    if bins.iter().any(|&k| k >= nyquist) {
        return Err(OracleError::Settings("highest frequency is at or above Nyquist".into()));
    }

    // analytic signal gain and subtraction weight per bin
    let family = settings.family;
    let signal_case = MeasurementCase::for_config(&analytic_config, family, MeasurementCase::signal_port(family));
    let mut weights = Vec::with_capacity(bins.len());
    for &k in &bins {
        let w = transform.bin_omega(k);
        let gain = output_transfer(&signal_case, &analytic_config, w)?.signal_gain();
        let sub = if case.is_subtracted() {
            subtraction_pair(&analytic_config, family, w)?.2
        } else {
            Complex64::new(0.0, 0.0)
        };
        weights.push((gain, sub));
    }

    let quads = systems(&sim_config, family)?;
    let trial_sets: Vec<(Quadrature, f64, SdeSystem)> = quads
        .iter()
        .map(|&(q, c, _)| Ok((q, c, SdeSystem::new(&sim_config, q, NoiseMask::default())?)))
        .collect::<Result<_, OracleError>>()?;

    let per_trial = exec.map_range(settings.segments, |trial| -> Result<Vec<f64>, OracleError> {
        let mut sig = vec![Complex64::new(0.0, 0.0); bins.len()];
        let mut rf = sig.clone();
        for (slot, (q, c, sys)) in trial_sets.iter().enumerate() {
            let run = SimulationSettings {
                dt: plan.dt,
                steps: plan.segment_len,
                seed: settings.seed,
                trial: (trial * trial_sets.len() + slot) as u64,
                integrator: settings.integrator,
                initial: InitialState::Stationary,
                pulse: None,
                record_state: false,
            };
            let t = simulate(sys, &run)?;
            let (sp, rp) = ports(*q);
            let xs = transform.transform(t.port(sp));
            let xr = if case.is_subtracted() { Some(transform.transform(t.port(rp))) } else { None };
            for (i, &k) in bins.iter().enumerate() {
                sig[i] += xs[k] * *c;
                if let Some(xr) = &xr {
                    rf[i] += xr[k] * *c;
                }
            }
        }
        Ok(bins
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let (gain, w) = weights[i];
                (sig[i] + w * rf[i]).norm_sqr() / gain.norm_sqr()
            })
            .collect())
    });
    let mut acc = PeriodogramAccumulator::new(bins.len());
    for p in per_trial {
        acc.push(&p?);
    }
    let (mean, stderr) = acc.finish();

    let reference = if family == QuadratureFamily::Amplitude { "closed_form" } else { "transfer" };
    let mut points = Vec::with_capacity(targets.len());
    for &target in targets.points() {
        let k = transform.nearest_bin(target);
        let i = bins.iter().position(|&b| b == k).expect("bin was collected");
        let w = transform.bin_omega(k);
        let analytic = if family == QuadratureFamily::Amplitude {
            closed_form_psd(analytic_case, &analytic_config, w)?
        } else {
            let m = MeasurementCase::new(analytic_config.squeeze(), family, analytic_case.combination());
            measured_psd(&m, &analytic_config, w)?
        };
        let (estimate, se) = (mean[i], stderr[i]);
        let within = (estimate - analytic).abs() <= (3.0 * se).max(settings.tolerance * analytic);
        points.push(ValidationPoint { omega_target: target, omega: w, estimate, stderr: se, analytic, within });
    }
    let fraction_within = points.iter().filter(|p| p.within).count() as f64 / points.len() as f64;
    Ok(ValidationReport {
        case,
        family,
        seed: settings.seed,
        integrator: settings.integrator,
        dt: plan.dt,
        segment_len: plan.segment_len,
        segments: settings.segments,
        tolerance: settings.tolerance,
        coverage: settings.coverage,
        perturb_kappa: settings.perturb_kappa,
        reference,
        fraction_within,
        passed: fraction_within >= settings.coverage,
        points,
    })
}

/// Compares the deterministic response to a square pulse (noise off) with
/// the analytic transfer applied to the same drive. Returns the largest
/// deviation relative to the peak response.
pub fn pulse_response_error(config: &SystemConfig, dt: f64, steps: usize) -> Result<f64, OracleError> {
    use super::integrate::PulseDrive;
    use rustfft::FftPlanner;

    let sys = SdeSystem::new(config, Quadrature::Amplitude, NoiseMask::silent())?;
    let pulse = PulseDrive::from_config(config, Quadrature::Amplitude, 0.0);
    let run = SimulationSettings {
        dt,
        steps,
        seed: 0,
        trial: 0,
        integrator: Integrator::Exact,
        initial: InitialState::Zero,
        pulse: Some(pulse),
        record_state: false,
    };
    let sim = simulate(&sys, &run)?;

    // frequency-domain prediction on the same sample grid; the window must
    // be long enough for the response to decay
    let n = steps;
    let case = MeasurementCase::for_config(config, QuadratureFamily::Amplitude, Combination::DifferencePort);
    let mut spec: Vec<Complex64> = (0..n).map(|j| Complex64::new(pulse.average(j as f64 * dt, dt), 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(&mut spec);
    for (k, v) in spec.iter_mut().enumerate() {
        let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        let w = 2.0 * PI * kk / (n as f64 * dt);
        // e^{+iΩt} convention: a real signal's negative bins use Ω < 0.
        // Holding the input and averaging the output over a step each add a
        // box filter; their phases cancel, leaving sinc².
        let h = output_transfer(&case, config, w)?.coeff(Quadrature::Amplitude, crate::transfer::NoiseChannel::Signal);
        let x = 0.5 * w * dt;
        let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
        *v *= h * sinc * sinc;
    }
    planner.plan_fft_forward(n).process(&mut spec);
    let predicted: Vec<f64> = spec.iter().map(|v| v.re / n as f64).collect();
    let peak = predicted.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let err = sim.difference.iter().zip(&predicted).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(err / peak)
}
