//! Linear quadrature Langevin equations of one family (amplitude or phase).
//!
//! State x = (g₊, g₋, d). Noise inputs, in this order: α₊, α₋, ε₊, ε₋, q, each
//! a unit-intensity white noise. Outputs b± = −α± + √(2γ₀) g±.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use num_complex::Complex64;

use super::OracleError;
use crate::model::{SqueezeConfig, SystemConfig};
use crate::transfer::Quadrature;

pub const STATES: usize = 3;
pub const CHANNELS: usize = 5;

pub type NoiseMatrix = SMatrix<f64, STATES, CHANNELS>;
pub type OutputMatrix = SMatrix<f64, 2, STATES>;
pub type FeedMatrix = SMatrix<f64, 2, CHANNELS>;

/// Which noise inputs are active, and a common amplitude scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseMask {
    /// α₊, α₋, ε₊, ε₋, q
    pub enabled: [bool; CHANNELS],
    /// Amplitude multiplier applied to every enabled channel.
    pub scale: f64,
}

impl Default for NoiseMask {
    fn default() -> Self {
        Self { enabled: [true; CHANNELS], scale: 1.0 }
    }
}

impl NoiseMask {
    pub fn silent() -> Self {
        Self { enabled: [false; CHANNELS], scale: 1.0 }
    }

    pub fn gain(&self, channel: usize) -> f64 {
        if self.enabled[channel] {
            self.scale
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdeSystem {
    pub quadrature: Quadrature,
    /// Drift A in dx = A x dt + B dW + b_u u dt.
    pub drift: Matrix3<f64>,
    /// B, masked and scaled.
    pub noise: NoiseMatrix,
    /// Signal input vector b_u.
    pub signal_input: Vector3<f64>,
    /// C in b = C x + D ξ.
    pub output: OutputMatrix,
    /// D, masked and scaled.
    pub feedthrough: FeedMatrix,
    pub mask: NoiseMask,
}

impl SdeSystem {
    pub fn new(config: &SystemConfig, quadrature: Quadrature, mask: NoiseMask) -> Result<Self, OracleError> {
        let cav = config.cavity();
        let (g0, ge, g) = (cav.gamma0(), cav.gamma_e(), cav.gamma());
        let gm = config.mechanical().gamma_m();
        let coupling = (config.derived().coupling_squared(cav) / (2.0 * g0)).sqrt();
        let phase = quadrature == Quadrature::Phase;
        // decay rates of (g₊, g₋)
        let (r_plus, r_minus) = match config.squeeze() {
            SqueezeConfig::None => (g, g),
            SqueezeConfig::TwoPhoton { kappa } if phase => (g + kappa, g - kappa),
            SqueezeConfig::TwoPhoton { kappa } => (g - kappa, g + kappa),
            SqueezeConfig::Degenerate { upsilon } if phase => (g - upsilon, g - upsilon),
            SqueezeConfig::Degenerate { upsilon } => (g + upsilon, g + upsilon),
        };
        if r_plus <= 0.0 || r_minus <= 0.0 {
            return Err(OracleError::Unstable { rate: r_plus.min(r_minus) });
        }
        let mut drift = Matrix3::zeros();
        drift[(0, 0)] = -r_plus;
        drift[(1, 1)] = -r_minus;
        drift[(2, 2)] = -gm;
        if phase {
            drift[(0, 2)] = -coupling;
            drift[(2, 1)] = coupling;
        } else {
            drift[(1, 2)] = -coupling;
            drift[(2, 0)] = coupling;
        }

        let thermal = (2.0 * gm * (2.0 * config.n_thermal() + 1.0)).sqrt();
        let (a, e) = ((2.0 * g0).sqrt(), (2.0 * ge).sqrt());
        let mut noise = NoiseMatrix::zeros();
        noise[(0, 0)] = a * mask.gain(0);
        noise[(1, 1)] = a * mask.gain(1);
        noise[(0, 2)] = e * mask.gain(2);
        noise[(1, 3)] = e * mask.gain(3);
        noise[(2, 4)] = thermal * mask.gain(4);

        let mut output = OutputMatrix::zeros();
        output[(0, 0)] = a;
        output[(1, 1)] = a;
        let mut feedthrough = FeedMatrix::zeros();
        feedthrough[(0, 0)] = -mask.gain(0);
        feedthrough[(1, 1)] = -mask.gain(1);

        Ok(Self { quadrature, drift, noise, signal_input: Vector3::new(0.0, 0.0, 1.0), output, feedthrough, mask })
    }

    /// Largest drift rate magnitude, used to choose the time step.
    pub fn largest_rate(&self) -> f64 {
        self.drift.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Slowest optical decay rate.
    pub fn slowest_optical_rate(&self) -> f64 {
        (-self.drift[(0, 0)]).min(-self.drift[(1, 1)])
    }

    /// Eigenvalues of the drift (block-triangular, so the diagonal).
    pub fn eigenvalues(&self) -> [f64; 3] {
        [self.drift[(0, 0)], self.drift[(1, 1)], self.drift[(2, 2)]]
    }

    pub fn is_asymptotically_stable(&self) -> bool {
        self.eigenvalues().iter().all(|&l| l < 0.0)
    }

    /// Output port index of the sum (0) and difference (1) outputs.
    pub const SUM: usize = 0;
    pub const DIFFERENCE: usize = 1;

    /// Frequency response H(Ω) = C(−iΩ − A)⁻¹[B, b_u] + [D, 0], outputs × (5 noises + signal).
    pub fn frequency_response(&self, omega: f64) -> Result<[[Complex64; CHANNELS + 1]; 2], OracleError> {
        let mut m = self.drift.map(|v| Complex64::new(-v, 0.0));
        for k in 0..STATES {
            m[(k, k)] += Complex64::new(0.0, -omega);
        }
        let inv = m.try_inverse().ok_or(OracleError::Singular { omega })?;
        let c = self.output.map(|v| Complex64::new(v, 0.0));
        let mut inputs = SMatrix::<Complex64, STATES, { CHANNELS + 1 }>::zeros();
        for r in 0..STATES {
            for k in 0..CHANNELS {
                inputs[(r, k)] = Complex64::new(self.noise[(r, k)], 0.0);
            }
            inputs[(r, CHANNELS)] = Complex64::new(self.signal_input[r], 0.0);
        }
        let h = c * inv * inputs;
        let mut out = [[Complex64::new(0.0, 0.0); CHANNELS + 1]; 2];
        for (p, row) in out.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = h[(p, k)];
                if k < CHANNELS {
                    *v += self.feedthrough[(p, k)];
                }
            }
        }
        Ok(out)
    }

    /// Stationary state covariance P from A P + P Aᵀ + B Bᵀ = 0.
    pub fn stationary_covariance(&self) -> Result<Matrix3<f64>, OracleError> {
        if !self.is_asymptotically_stable() {
            return Err(OracleError::NotStationary);
        }
        lyapunov(&self.drift, &(self.noise * self.noise.transpose()))
    }
}

/// Solves A P + P Aᵀ + Q = 0 by vectorization.
pub fn lyapunov(a: &Matrix3<f64>, q: &Matrix3<f64>) -> Result<Matrix3<f64>, OracleError> {
    let id = Matrix3::<f64>::identity();
    let mut k = SMatrix::<f64, 9, 9>::zeros();
    // vec(A P) = (I ⊗ A) vec P, vec(P Aᵀ) = (A ⊗ I) vec P, column-major
    for i in 0..3 {
        for j in 0..3 {
            for r in 0..3 {
                for c in 0..3 {
                    k[(i * 3 + r, j * 3 + c)] += id[(i, j)] * a[(r, c)] + a[(i, j)] * id[(r, c)];
                }
            }
        }
    }
    let rhs = SVector::<f64, 9>::from_iterator(q.iter().map(|v| -v));
    let sol = k.lu().solve(&rhs).ok_or(OracleError::NotStationary)?;
    let p = Matrix3::from_iterator(sol.iter().copied());
    Ok((p + p.transpose()) * 0.5)
}
