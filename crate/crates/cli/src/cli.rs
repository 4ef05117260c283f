//! Argument definitions.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

use varsens::model::presets::TauPreset;
use varsens::oracle::Integrator;
use varsens::spectra::figures::FigureId;
use varsens::spectra::SpectrumCase;
use varsens::transfer::QuadratureFamily;
use varsens::PumpModel;

use crate::rate::Rate;

#[derive(Debug, Clone, Parser)]
#[command(name = "varsens", version, about = "Force-sensor noise spectra, thresholds and oracle validation")]
pub struct Cli {
    /// JSON configuration file; the built-in Table 1 preset is used when absent.
    #[arg(long, global = true, env = "VARSENS_CONFIG")]
    pub config: Option<PathBuf>,

    /// Replace the signal duration τ with a preset value.
    #[arg(long, global = true, value_parser = parse_tau_preset)]
    pub tau_preset: Option<TauPreset>,

    /// Evaluate grids and trials on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Noise spectrum of one measurement case over a frequency grid.
    Spectrum(SpectrumArgs),
    /// Reference figure datasets (ratio to the SQL).
    Figure(FigureArgs),
    /// Detection thresholds for the configured signal.
    Threshold(ThresholdArgs),
    /// Check a closed-form spectrum against the Langevin simulator.
    Validate(ValidateArgs),
    /// Re-run a manifest and compare output digests.
    Replay(ReplayArgs),
    /// Write the Table 1 configuration as JSON.
    InitConfig(InitConfigArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Figure(_) => "figure",
            Command::Threshold(_) => "threshold",
            Command::Validate(_) => "validate",
            Command::Replay(_) => "replay",
            Command::InitConfig(_) => "init-config",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Args)]
pub struct SqueezeArgs {
    /// Two-photon squeezing rate κ (rad/s or `g0` multiple).
    #[arg(long, conflicts_with = "upsilon")]
    pub kappa: Option<Rate>,
    /// Degenerate squeezing rate υ (rad/s or `g0` multiple).
    #[arg(long)]
    pub upsilon: Option<Rate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Amplitude,
    Phase,
}

#[derive(Debug, Clone, Copy, Default, Args)]
pub struct FamilyArgs {
    /// Homodyne quadrature family.
    #[arg(long, value_enum, conflicts_with = "phi")]
    pub family: Option<FamilyArg>,
    /// General homodyne angle φ in radians.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
}

impl FamilyArgs {
    pub fn resolve(self) -> QuadratureFamily {
        match (self.family, self.phi) {
            (_, Some(phi)) => QuadratureFamily::General { phi },
            (Some(FamilyArg::Phase), None) => QuadratureFamily::Phase,
            _ => QuadratureFamily::Amplitude,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PumpArg {
    Dispersive,
    Constant,
}

impl From<PumpArg> for PumpModel {
    fn from(p: PumpArg) -> Self {
        match p {
            PumpArg::Dispersive => PumpModel::Dispersive,
            PumpArg::Constant => PumpModel::Constant,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[arg(long, value_parser = parse_case)]
    pub case: SpectrumCase,
    #[command(flatten)]
    pub squeeze: SqueezeArgs,
    #[arg(long, default_value = "1e-3g0")]
    pub omega_min: Rate,
    #[arg(long, default_value = "10g0")]
    pub omega_max: Rate,
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    /// Add one column per noise channel.
    #[arg(long, conflicts_with_all = ["closed_form", "ratio_to_sql"])]
    pub budget: bool,
    /// Use the closed-form expression instead of the assembled transfer vector.
    #[arg(long)]
    pub closed_form: bool,
    /// Divide by the SQL spectrum.
    #[arg(long)]
    pub ratio_to_sql: bool,
    #[arg(long, value_enum)]
    pub pump_model: Option<PumpArg>,
    #[command(flatten)]
    pub family: FamilyArgs,
    /// CSV path; a JSON copy and a manifest are written next to it. Stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    /// Figure ids (fig3..fig9) or `all`.
    #[arg(required = true, value_parser = parse_figure_selection)]
    pub ids: Vec<FigureSelection>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureSelection {
    All,
    One(FigureId),
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Signal duration in seconds (overrides the configuration).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Mechanical quality factor (overrides the configuration).
    #[arg(long)]
    pub quality: Option<f64>,
    /// Case whose spectrum sets the spectral-domain threshold.
    #[arg(long, value_parser = parse_case, default_value = "baseline")]
    pub case: SpectrumCase,
    /// Frequency of the spectral threshold; the spectrum minimum over the default grid when absent.
    #[arg(long)]
    pub omega: Option<Rate>,
    #[command(flatten)]
    pub squeeze: SqueezeArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long, value_parser = parse_case, default_value = "baseline")]
    pub case: SpectrumCase,
    #[command(flatten)]
    pub squeeze: SqueezeArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub segments: usize,
    /// Segment duration in seconds; chosen from the band and decay rates when absent.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Time step in seconds.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Shift the analytic squeezing rate by this many γ₀ (negative control).
    #[arg(long, allow_hyphen_values = true)]
    pub perturb_kappa: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
    #[arg(long, default_value = "exact")]
    pub integrator: Integrator,
    #[command(flatten)]
    pub family: FamilyArgs,
    /// JSON report path (a manifest is written next to it).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Also write the regenerated files here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct InitConfigArgs {
    /// Destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_case(s: &str) -> Result<SpectrumCase, String> {
    s.parse()
}

fn parse_tau_preset(s: &str) -> Result<TauPreset, String> {
    s.parse()
}

fn parse_figure_selection(s: &str) -> Result<FigureSelection, String> {
    if s.eq_ignore_ascii_case("all") {
        Ok(FigureSelection::All)
    } else {
        s.parse().map(FigureSelection::One)
    }
}
