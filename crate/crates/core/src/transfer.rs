//! Frequency-domain transfer coefficients from the input channels to the
//! measured output quadratures.
//!
//! Every output is a linear combination of six channels per input quadrature
//! (amplitude and phase). Pure families populate one quadrature only; a general
//! homodyne angle populates both.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::exec::Execution;
use crate::model::{OpticalCavity, PumpModel, SqueezeConfig, SystemConfig};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum TransferError {
    #[error("transfer function has a pole at omega = {omega} (stability boundary)")]
    Pole { omega: f64 },
    #[error("the {0} carries no mechanical signal; it cannot be signal-referenced")]
    NoSignal(&'static str),
    #[error("reference port carries no back-action term at omega = {omega}; subtraction undefined")]
    NoBackAction { omega: f64 },
    #[error("squeezing of the measurement case is outside the stable range for this cavity")]
    UnstableSqueeze,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum NoiseChannel {
    AlphaPlus,
    AlphaMinus,
    EpsPlus,
    EpsMinus,
    Thermal,
    Signal,
}

impl NoiseChannel {
    pub const ALL: [NoiseChannel; 6] = [
        NoiseChannel::AlphaPlus,
        NoiseChannel::AlphaMinus,
        NoiseChannel::EpsPlus,
        NoiseChannel::EpsMinus,
        NoiseChannel::Thermal,
        NoiseChannel::Signal,
    ];

    /// The four optical vacuum inputs.
    pub const VACUUM: [NoiseChannel; 4] = [
        NoiseChannel::AlphaPlus,
        NoiseChannel::AlphaMinus,
        NoiseChannel::EpsPlus,
        NoiseChannel::EpsMinus,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    /// Exchange the sum/difference label (α₊ ↔ α₋, ε₊ ↔ ε₋).
    pub const fn swapped(self) -> Self {
        match self {
            NoiseChannel::AlphaPlus => NoiseChannel::AlphaMinus,
            NoiseChannel::AlphaMinus => NoiseChannel::AlphaPlus,
            NoiseChannel::EpsPlus => NoiseChannel::EpsMinus,
            NoiseChannel::EpsMinus => NoiseChannel::EpsPlus,
            other => other,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            NoiseChannel::AlphaPlus => "alpha_plus",
            NoiseChannel::AlphaMinus => "alpha_minus",
            NoiseChannel::EpsPlus => "eps_plus",
            NoiseChannel::EpsMinus => "eps_minus",
            NoiseChannel::Thermal => "thermal",
            NoiseChannel::Signal => "signal",
        }
    }
}

/// Input quadrature a channel belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Quadrature {
    Amplitude,
    Phase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureFamily {
    Amplitude,
    Phase,
    /// Homodyne angle φ: b_± = b_±a cos φ ± b_±φ sin φ in the two modes.
    General { phi: f64 },
}

impl QuadratureFamily {
    /// Weights (cos φ, sin φ) of the amplitude and phase parts.
    pub fn weights(self) -> (f64, f64) {
        match self {
            QuadratureFamily::Amplitude => (1.0, 0.0),
            QuadratureFamily::Phase => (0.0, 1.0),
            QuadratureFamily::General { phi } => (phi.cos(), phi.sin()),
        }
    }

    /// Angle φ of the family (0 for amplitude, π/2 for phase).
    pub fn angle(self) -> f64 {
        match self {
            QuadratureFamily::Amplitude => 0.0,
            QuadratureFamily::Phase => FRAC_PI_2,
            QuadratureFamily::General { phi } => phi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Combination {
    SumPort,
    DifferencePort,
    /// Signal port with the back action estimated from the reference port removed.
    Subtracted,
}

/// Role of a physical port for a given family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Signal,
    Reference,
}

fn role(family: QuadratureFamily, port: Combination) -> Role {
    // The phase family swaps sum and difference; the general angle keeps the
    // amplitude labelling (the difference b₊ − b₋ carries the motion).
    let phase = matches!(family, QuadratureFamily::Phase);
    match (port, phase) {
        (Combination::DifferencePort, false) | (Combination::SumPort, true) => Role::Signal,
        _ => Role::Reference,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementCase {
    pub squeeze: SqueezeConfig,
    pub family: QuadratureFamily,
    pub combination: Combination,
}

impl MeasurementCase {
    pub fn new(squeeze: SqueezeConfig, family: QuadratureFamily, combination: Combination) -> Self {
        Self { squeeze, family, combination }
    }

    /// Case using the configuration's own squeezing.
    pub fn for_config(config: &SystemConfig, family: QuadratureFamily, combination: Combination) -> Self {
        Self::new(config.squeeze(), family, combination)
    }

    /// The port carrying the mechanical signal for this family.
    pub fn signal_port(family: QuadratureFamily) -> Combination {
        match family {
            QuadratureFamily::Phase => Combination::SumPort,
            _ => Combination::DifferencePort,
        }
    }

    /// The port carrying only the back-action estimate.
    pub fn reference_port(family: QuadratureFamily) -> Combination {
        match family {
            QuadratureFamily::Phase => Combination::DifferencePort,
            _ => Combination::SumPort,
        }
    }
}

/// Coefficients of one output at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferVector {
    pub omega: f64,
    pub amplitude: [Complex64; 6],
    pub phase: [Complex64; 6],
    /// Whether the vector has been divided by its signal gain.
    pub referenced: bool,
}

impl TransferVector {
    pub fn zero(omega: f64) -> Self {
        let z = [Complex64::new(0.0, 0.0); 6];
        Self { omega, amplitude: z, phase: z, referenced: false }
    }

    pub fn component(&self, q: Quadrature) -> &[Complex64; 6] {
        match q {
            Quadrature::Amplitude => &self.amplitude,
            Quadrature::Phase => &self.phase,
        }
    }

    pub fn coeff(&self, q: Quadrature, ch: NoiseChannel) -> Complex64 {
        self.component(q)[ch.index()]
    }

    /// Response to the signal force along the measured quadrature angle.
    pub fn signal_gain(&self) -> Complex64 {
        self.amplitude[NoiseChannel::Signal.index()] + self.phase[NoiseChannel::Signal.index()]
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = *self;
        out.amplitude.iter_mut().chain(out.phase.iter_mut()).for_each(|c| *c *= s);
        out
    }

    /// Component-wise `self + w·other`.
    pub fn add_scaled(&self, other: &Self, w: Complex64) -> Self {
        let mut out = *self;
        for k in 0..6 {
            out.amplitude[k] += w * other.amplitude[k];
            out.phase[k] += w * other.phase[k];
        }
        out
    }

    /// Divide by the signal gain so that the signal coefficient becomes 1.
    pub fn referenced(&self) -> Result<Self, TransferError> {
        let g = self.signal_gain();
        if g.norm() == 0.0 || !g.is_finite() {
            return Err(TransferError::NoSignal("requested port"));
        }
        let mut out = self.scaled(g.inv());
        out.referenced = true;
        let k = NoiseChannel::Signal.index();
        let one = Complex64::new(1.0, 0.0);
        if self.phase[k].norm() == 0.0 {
            out.amplitude[k] = one;
        } else if self.amplitude[k].norm() == 0.0 {
            out.phase[k] = one;
        }
        Ok(out)
    }

    /// Largest coefficient magnitude.
    pub fn max_norm(&self) -> f64 {
        self.amplitude.iter().chain(&self.phase).map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// All (quadrature, channel, coefficient) triples.
    pub fn entries(&self) -> impl Iterator<Item = (Quadrature, NoiseChannel, Complex64)> + '_ {
        [Quadrature::Amplitude, Quadrature::Phase].into_iter().flat_map(move |q| {
            NoiseChannel::ALL.into_iter().map(move |ch| (q, ch, self.coeff(q, ch)))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

fn checked(num: Complex64, den: Complex64, omega: f64) -> Result<Complex64, TransferError> {
    if den.norm() == 0.0 {
        Err(TransferError::Pole { omega })
    } else {
        Ok(num / den)
    }
}

/// ξ₊ = (γ₀−γ_e+κ+iΩ)/(γ₀+γ_e−κ−iΩ), ξ₋ = (γ₀−γ_e−κ+iΩ)/(γ₀+γ_e+κ−iΩ).
pub fn xi(cavity: &OpticalCavity, kappa: f64, omega: f64, sign: Sign) -> Result<Complex64, TransferError> {
    let k = match sign {
        Sign::Plus => kappa,
        Sign::Minus => -kappa,
    };
    let (g0, ge) = (cavity.gamma0(), cavity.gamma_e());
    checked(
        Complex64::new(g0 - ge + k, omega),
        Complex64::new(g0 + ge - k, -omega),
        omega,
    )
}

/// μ± = 2√(γ₀γ_e)/(γ₀+γ_e∓κ−iΩ).
pub fn mu(cavity: &OpticalCavity, kappa: f64, omega: f64, sign: Sign) -> Result<Complex64, TransferError> {
    let k = match sign {
        Sign::Plus => kappa,
        Sign::Minus => -kappa,
    };
    let num = 2.0 * (cavity.gamma0() * cavity.gamma_e()).sqrt();
    checked(Complex64::new(num, 0.0), Complex64::new(cavity.gamma() - k, -omega), omega)
}

/// 𝒦(Ω) = K₀γ(γ₀−γ_e)/(γ₀² − (κ+γ_e−iΩ)²).
pub fn pump_factor(cavity: &OpticalCavity, k0: f64, kappa: f64, omega: f64) -> Result<Complex64, TransferError> {
    let (g0, ge) = (cavity.gamma0(), cavity.gamma_e());
    let s = Complex64::new(kappa + ge, -omega);
    checked(Complex64::new(k0 * cavity.gamma() * (g0 - ge), 0.0), g0 * g0 - s * s, omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegenerateCoeffs {
    pub zeta: Complex64,
    /// σ = 2γ₀/(γ+υ−iΩ); the loss channel enters as σ√(γ_e/γ₀).
    pub sigma: Complex64,
    /// 𝒩 = γ²𝒩₀/(γ+υ−iΩ)².
    pub n: Complex64,
}

/// ζ, σ and 𝒩 for degenerate gain υ and pump scale 𝒩₀.
pub fn degenerate_coeffs(
    cavity: &OpticalCavity,
    n0: f64,
    upsilon: f64,
    omega: f64,
) -> Result<DegenerateCoeffs, TransferError> {
    let (g0, ge, g) = (cavity.gamma0(), cavity.gamma_e(), cavity.gamma());
    let den = Complex64::new(g + upsilon, -omega);
    Ok(DegenerateCoeffs {
        zeta: checked(Complex64::new(g0 - ge - upsilon, omega), den, omega)?,
        sigma: checked(Complex64::new(2.0 * g0, 0.0), den, omega)?,
        n: checked(Complex64::new(g * g * n0, 0.0), den * den, omega)?,
    })
}

/// Frequency at which the pump factors are evaluated.
fn pump_omega(model: PumpModel, omega: f64) -> f64 {
    match model {
        PumpModel::Dispersive => omega,
        PumpModel::Constant => 0.0,
    }
}

/// Signal and reference ports of one pure family, in that family's own channel labels.
struct FamilyPorts {
    signal: [Complex64; 6],
    reference: [Complex64; 6],
}

fn place(entries: &[(NoiseChannel, Complex64)], swap: bool) -> [Complex64; 6] {
    let mut out = [Complex64::new(0.0, 0.0); 6];
    for &(ch, c) in entries {
        let ch = if swap { ch.swapped() } else { ch };
        out[ch.index()] = c;
    }
    out
}

fn family_ports(
    squeeze: SqueezeConfig,
    config: &SystemConfig,
    quadrature: Quadrature,
    omega: f64,
) -> Result<FamilyPorts, TransferError> {
    use NoiseChannel::*;
    let cav = config.cavity();
    let gm = config.mechanical().gamma_m();
    let r = cav.loss_ratio().sqrt();
    let mech = Complex64::new(gm, -omega);
    let wp = pump_omega(config.pump_model(), omega);
    let swap = quadrature == Quadrature::Phase;

    // (own-port vacuum, own-port loss, back-action amplitude, signal amplitude, reference vacuum, reference loss)
    let (a_own, e_own, ba, sig, a_ref, e_ref) = match squeeze {
        SqueezeConfig::Degenerate { upsilon } => {
            // Degenerate gain squeezes the amplitude quadratures and
            // anti-squeezes the phase quadratures.
            let u = if swap { -upsilon } else { upsilon };
            let d = degenerate_coeffs(cav, config.derived().n0(cav), u, omega)?;
            let n = if wp == omega {
                d.n
            } else {
                degenerate_coeffs(cav, config.derived().n0(cav), u, wp)?.n
            };
            (d.zeta, d.sigma * r, n, n.sqrt(), d.zeta, d.sigma * r)
        }
        other => {
            let kappa = other.rate();
            let xm = xi(cav, kappa, omega, Sign::Minus)?;
            let xp = xi(cav, kappa, omega, Sign::Plus)?;
            let mm = mu(cav, kappa, omega, Sign::Minus)?;
            let mp = mu(cav, kappa, omega, Sign::Plus)?;
            let k = pump_factor(cav, config.k0(), kappa, wp)?;
            (xm, mm, xm * k, (xm * k).sqrt(), xp, mp)
        }
    };
    if mech.norm() == 0.0 {
        return Err(TransferError::Pole { omega });
    }
    let ba = -ba / mech;
    let sig = -sig / mech;
    let signal = place(
        &[
            (AlphaMinus, a_own),
            (EpsMinus, e_own),
            (AlphaPlus, ba),
            (EpsPlus, ba * r),
            (Thermal, sig * (2.0 * gm).sqrt()),
            (Signal, sig),
        ],
        swap,
    );
    let reference = place(&[(AlphaPlus, a_ref), (EpsPlus, e_ref)], swap);
    Ok(FamilyPorts { signal, reference })
}

fn check_squeeze(case: &MeasurementCase, config: &SystemConfig) -> Result<(), TransferError> {
    case.squeeze.check(config.cavity()).map_err(|_| TransferError::UnstableSqueeze)
}

/// Raw (unreferenced) output of a single physical port.
fn port_vector(
    case: &MeasurementCase,
    config: &SystemConfig,
    port: Combination,
    omega: f64,
) -> Result<TransferVector, TransferError> {
    let (c, s) = case.family.weights();
    let pick = |p: &FamilyPorts| match role(case.family, port) {
        Role::Signal => p.signal,
        Role::Reference => p.reference,
    };
    let mut out = TransferVector::zero(omega);
    if c != 0.0 {
        let p = family_ports(case.squeeze, config, Quadrature::Amplitude, omega)?;
        out.amplitude = pick(&p).map(|z| z * c);
    }
    if s != 0.0 {
        let p = family_ports(case.squeeze, config, Quadrature::Phase, omega)?;
        out.phase = pick(&p).map(|z| z * s);
    }
    Ok(out)
}

/// Channels through which the reference port sees the back-action vacuum.
fn back_action_channels() -> [(Quadrature, NoiseChannel); 2] {
    [(Quadrature::Amplitude, NoiseChannel::AlphaPlus), (Quadrature::Phase, NoiseChannel::AlphaMinus)]
}

/// Weight w such that signal + w·reference carries the least back-action vacuum.
/// For a pure family, or two-photon squeezing at any angle, the cancellation is exact.
pub fn subtraction_weight(signal: &TransferVector, reference: &TransferVector) -> Result<Complex64, TransferError> {
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (q, ch) in back_action_channels() {
        let r = reference.coeff(q, ch);
        num += r.conj() * signal.coeff(q, ch);
        den += r.norm_sqr();
    }
    if den == 0.0 {
        return Err(TransferError::NoBackAction { omega: signal.omega });
    }
    Ok(-num / den)
}

/// Raw output coefficients for a measurement case.
pub fn output_transfer(
    case: &MeasurementCase,
    config: &SystemConfig,
    omega: f64,
) -> Result<TransferVector, TransferError> {
    check_squeeze(case, config)?;
    match case.combination {
        Combination::Subtracted => {
            let sig = port_vector(case, config, MeasurementCase::signal_port(case.family), omega)?;
            let rf = port_vector(case, config, MeasurementCase::reference_port(case.family), omega)?;
            let w = subtraction_weight(&sig, &rf)?;
            Ok(sig.add_scaled(&rf, w))
        }
        port => port_vector(case, config, port, omega),
    }
}

/// Back-action-subtracted signal port for the configuration's squeezing.
pub fn subtracted_transfer(
    config: &SystemConfig,
    family: QuadratureFamily,
    omega: f64,
) -> Result<TransferVector, TransferError> {
    output_transfer(&MeasurementCase::for_config(config, family, Combination::Subtracted), config, omega)
}

/// Signal port and the subtraction weight applied to the reference port.
pub fn subtraction_pair(
    config: &SystemConfig,
    family: QuadratureFamily,
    omega: f64,
) -> Result<(TransferVector, TransferVector, Complex64), TransferError> {
    let case = MeasurementCase::for_config(config, family, Combination::Subtracted);
    let sig = port_vector(&case, config, MeasurementCase::signal_port(family), omega)?;
    let rf = port_vector(&case, config, MeasurementCase::reference_port(family), omega)?;
    let w = subtraction_weight(&sig, &rf)?;
    Ok((sig, rf, w))
}

/// Transfer vectors over a frequency grid.
pub fn transfer_grid(
    case: &MeasurementCase,
    config: &SystemConfig,
    omegas: &[f64],
    exec: Execution,
) -> Result<Vec<TransferVector>, TransferError> {
    exec.try_map(omegas, |&w| output_transfer(case, config, w))
}
