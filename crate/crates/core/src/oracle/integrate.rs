//! Time stepping of an [`SdeSystem`].
//!
//! The exact stepper samples the joint Gaussian law of the next state, the
//! step-averaged state and the Wiener increments, so the box-averaged output
//! samples carry the right correlations at any step size. Euler–Maruyama is
//! kept as an independent cross-check.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::sde::{SdeSystem, CHANNELS, STATES};
use super::OracleError;
use crate::model::SystemConfig;
use crate::transfer::Quadrature;

const AUG: usize = 2 * STATES + CHANNELS;
const JOINT: usize = 2 * STATES;

/// RNG stream for the initial state draw.
const INITIAL_STREAM: u64 = 0x40;
/// RNG stream for the conditional state draw of the exact stepper.
const STATE_STREAM: u64 = 0x41;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    #[default]
    Exact,
    EulerMaruyama,
}

impl std::str::FromStr for Integrator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Integrator::Exact),
            "euler" | "euler-maruyama" => Ok(Integrator::EulerMaruyama),
            _ => Err(format!("unknown integrator '{s}' (expected exact or euler)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// Drawn from the stationary covariance; falls back to zero when none exists.
    #[default]
    Stationary,
    Zero,
}

/// Square drive on the mechanical quadrature, in normalized units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseDrive {
    pub amplitude: f64,
    pub start: f64,
    pub duration: f64,
}

impl PulseDrive {
    /// The component of the configured pulse seen by one quadrature. The
    /// amplitude quadrature gets f_s cos ψ and the phase quadrature f_s sin ψ.
    pub fn from_config(config: &SystemConfig, quadrature: Quadrature, start: f64) -> Self {
        let s = config.signal();
        let fs = s.quadrature_amplitude(config.mechanical());
        let amplitude = match quadrature {
            Quadrature::Amplitude => fs * s.phase().cos(),
            Quadrature::Phase => fs * s.phase().sin(),
        };
        Self { amplitude, start, duration: s.tau() }
    }

    /// Mean drive over [t, t + dt].
    pub fn average(&self, t: f64, dt: f64) -> f64 {
        let lo = t.max(self.start);
        let hi = (t + dt).min(self.start + self.duration);
        if hi <= lo {
            0.0
        } else {
            self.amplitude * (hi - lo) / dt
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationSettings {
    pub dt: f64,
    pub steps: usize,
    pub seed: u64,
    /// Index of the independent realization; selects the RNG streams.
    pub trial: u64,
    pub integrator: Integrator,
    pub initial: InitialState,
    pub pulse: Option<PulseDrive>,
    /// Also keep the state at the end of every step.
    pub record_state: bool,
}

/// Output samples of both ports, each the average over one step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub dt: f64,
    pub sum: Vec<f64>,
    pub difference: Vec<f64>,
    /// (g₊, g₋, d) after each step, when requested.
    pub states: Vec<[f64; 3]>,
}

impl Trajectory {
    pub fn port(&self, index: usize) -> &[f64] {
        if index == SdeSystem::SUM {
            &self.sum
        } else {
            &self.difference
        }
    }
}

/// Keyed normal stream: independent per (seed, trial, channel).
pub fn normal_stream(seed: u64, trial: u64, channel: u64) -> impl FnMut() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((trial << 8) | channel);
    move || rng.sample::<f64, _>(StandardNormal)
}

/// Precomputed one-step law for the exact stepper.
#[derive(Debug, Clone)]
pub struct ExactStep {
    pub dt: f64,
    /// x' mean map.
    pub phi: Matrix3<f64>,
    /// Step-averaged state mean map.
    pub psi: Matrix3<f64>,
    /// Regression of (x', x̄) on the normalized Wiener increments.
    pub gain: SMatrix<f64, JOINT, CHANNELS>,
    /// Square root of the conditional covariance of (x', x̄).
    pub root: SMatrix<f64, JOINT, JOINT>,
    /// Zero-order-hold response of x' and x̄ to a unit input.
    pub input: SVector<f64, JOINT>,
}

impl ExactStep {
    pub fn new(system: &SdeSystem, dt: f64) -> Result<Self, OracleError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(OracleError::Settings(format!("dt must be positive, got {dt}")));
        }
        let mut a = SMatrix::<f64, AUG, AUG>::zeros();
        let mut b = SMatrix::<f64, AUG, CHANNELS>::zeros();
        for r in 0..STATES {
            for c in 0..STATES {
                a[(r, c)] = system.drift[(r, c)];
            }
            a[(STATES + r, r)] = 1.0;
            for k in 0..CHANNELS {
                b[(r, k)] = system.noise[(r, k)];
            }
        }
        for k in 0..CHANNELS {
            b[(JOINT + k, k)] = 1.0;
        }
        let mut m = SMatrix::<f64, { 2 * AUG }, { 2 * AUG }>::zeros();
        m.fixed_view_mut::<AUG, AUG>(0, 0).copy_from(&(-a * dt));
        m.fixed_view_mut::<AUG, AUG>(0, AUG).copy_from(&(b * b.transpose() * dt));
        m.fixed_view_mut::<AUG, AUG>(AUG, AUG).copy_from(&(a.transpose() * dt));
        let e = m.exp();
        let trans = e.fixed_view::<AUG, AUG>(AUG, AUG).transpose();
        let mut cov = trans * e.fixed_view::<AUG, AUG>(0, AUG);

        // rescale to (x', x̄ = ∫x/Δ, W/√Δ)
        let mut scale = SVector::<f64, AUG>::repeat(1.0);
        for k in 0..STATES {
            scale[STATES + k] = 1.0 / dt;
        }
        for k in 0..CHANNELS {
            scale[JOINT + k] = 1.0 / dt.sqrt();
        }
        for r in 0..AUG {
            for c in 0..AUG {
                cov[(r, c)] *= scale[r] * scale[c];
            }
        }
        cov = (cov + cov.transpose()) * 0.5;

        let phi = trans.fixed_view::<STATES, STATES>(0, 0).into_owned();
        let psi = trans.fixed_view::<STATES, STATES>(STATES, 0).into_owned() / dt;
        let szz = cov.fixed_view::<JOINT, JOINT>(0, 0).into_owned();
        let szw = cov.fixed_view::<JOINT, CHANNELS>(0, JOINT).into_owned();
        let sww = cov.fixed_view::<CHANNELS, CHANNELS>(JOINT, JOINT).into_owned();
        let gain = szw * sww.try_inverse().ok_or(OracleError::Singular { omega: 0.0 })?;
        let cond = szz - gain * szw.transpose();
        let root = psd_sqrt6(&((cond + cond.transpose()) * 0.5));

        // zero-order hold: exp([[A, b, 0], [0, 0, 1], [0, 0, 0]] Δ)
        let mut h = SMatrix::<f64, 5, 5>::zeros();
        for r in 0..STATES {
            for c in 0..STATES {
                h[(r, c)] = system.drift[(r, c)] * dt;
            }
            h[(r, STATES)] = system.signal_input[r] * dt;
        }
        h[(STATES, STATES + 1)] = dt;
        let he = h.exp();
        let mut input = SVector::<f64, JOINT>::zeros();
        for r in 0..STATES {
            input[r] = he[(r, STATES)];
            input[STATES + r] = he[(r, STATES + 1)] / dt;
        }
        Ok(Self { dt, phi, psi, gain, root, input })
    }
}

macro_rules! psd_sqrt {
    ($name:ident, $n:literal) => {
        /// Symmetric square root with negative round-off eigenvalues clipped.
        fn $name(m: &SMatrix<f64, $n, $n>) -> SMatrix<f64, $n, $n> {
            let eig = m.symmetric_eigen();
            let d = SMatrix::<f64, $n, $n>::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
            eig.eigenvectors * d * eig.eigenvectors.transpose()
        }
    };
}
psd_sqrt!(psd_sqrt3, 3);
psd_sqrt!(psd_sqrt6, 6);

fn initial_state(system: &SdeSystem, settings: &SimulationSettings) -> Vector3<f64> {
    if settings.initial == InitialState::Zero {
        return Vector3::zeros();
    }
    match system.stationary_covariance() {
        Ok(p) => {
            let mut draw = normal_stream(settings.seed, settings.trial, INITIAL_STREAM);
            let z = Vector3::from_fn(|_, _| draw());
            psd_sqrt3(&p) * z
        }
        Err(_) => Vector3::zeros(),
    }
}

/// Runs one realization and returns the box-averaged port outputs.
pub fn simulate(system: &SdeSystem, settings: &SimulationSettings) -> Result<Trajectory, OracleError> {
    let dt = settings.dt;
    if settings.steps == 0 {
        return Err(OracleError::Settings("steps must be positive".into()));
    }
    let mut streams: Vec<_> =
        (0..CHANNELS as u64).map(|k| normal_stream(settings.seed, settings.trial, k)).collect();
    let mut x = initial_state(system, settings);
    let mut sum = Vec::with_capacity(settings.steps);
    let mut difference = Vec::with_capacity(settings.steps);
    let mut states = Vec::with_capacity(if settings.record_state { settings.steps } else { 0 });
    let inv_sqrt_dt = 1.0 / dt.sqrt();
    let u_at = |n: usize| settings.pulse.map_or(0.0, |p| p.average(n as f64 * dt, dt));

    match settings.integrator {
        Integrator::Exact => {
            let step = ExactStep::new(system, dt)?;
            let mut cond = normal_stream(settings.seed, settings.trial, STATE_STREAM);
            for n in 0..settings.steps {
                let w = SVector::<f64, CHANNELS>::from_fn(|k, _| streams[k]());
                let z = SVector::<f64, JOINT>::from_fn(|_, _| cond());
                let mut joint = step.gain * w + step.root * z + step.input * u_at(n);
                let next = step.phi * x;
                let mean = step.psi * x;
                for r in 0..STATES {
                    joint[r] += next[r];
                    joint[STATES + r] += mean[r];
                }
                let avg = joint.fixed_rows::<STATES>(STATES).into_owned();
                let out = system.output * avg + system.feedthrough * w * inv_sqrt_dt;
                sum.push(out[0]);
                difference.push(out[1]);
                x = joint.fixed_rows::<STATES>(0).into_owned();
                if settings.record_state {
                    states.push([x[0], x[1], x[2]]);
                }
            }
        }
        Integrator::EulerMaruyama => {
            let sqrt_dt = dt.sqrt();
            for n in 0..settings.steps {
                let w = SVector::<f64, CHANNELS>::from_fn(|k, _| streams[k]());
                let next = x
                    + (system.drift * x + system.signal_input * u_at(n)) * dt
                    + system.noise * w * sqrt_dt;
                let avg = (x + next) * 0.5;
                let out = system.output * avg + system.feedthrough * w * inv_sqrt_dt;
                sum.push(out[0]);
                difference.push(out[1]);
                x = next;
                if settings.record_state {
                    states.push([x[0], x[1], x[2]]);
                }
            }
        }
    }
    Ok(Trajectory { dt, sum, difference, states })
}
