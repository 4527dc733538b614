//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use coulomb_pt::phase_shifts::ExtensionPolicy;

use crate::output::Format;
use crate::settings::Overrides;

#[derive(Debug, Parser)]
#[command(name = "coulomb-pt", version, about = "Second-order partial-wave Coulomb scattering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First- and second-order phase shifts against the exact Coulomb phase.
    PhaseShifts(PhaseShiftsArgs),
    /// Angular distribution at fixed momentum, with Rutherford and Møller references.
    XsecAngle(XsecAngleArgs),
    /// Momentum sweep at fixed angle on a logarithmic grid.
    XsecMomentum(XsecMomentumArgs),
    /// Cross section as a function of the wavepacket time shift.
    DeltaProfile(DeltaProfileArgs),
    /// Run the numerical self-checks; exits with 1 if any fails.
    Validate(ValidateArgs),
}

fn parse_extension(s: &str) -> Result<ExtensionPolicy, String> {
    match s {
        "hold" => Ok(ExtensionPolicy::Hold),
        "zero" => Ok(ExtensionPolicy::Zero),
        "log-extrapolate" => Ok(ExtensionPolicy::LogExtrapolate),
        _ => Err(format!("expected hold, zero or log-extrapolate, got {s:?}")),
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// Momentum of either particle in the CM frame [MeV]
    #[arg(long)]
    pub p_mev: Option<f64>,
    /// Particle mass [MeV]
    #[arg(long)]
    pub mass_mev: Option<f64>,
    /// Coupling constant
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Relative momentum spread of the wavepackets
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Highest partial wave (default 50 for phase-shifts, ceil(7/epsilon) otherwise)
    #[arg(long)]
    pub l_max: Option<usize>,
    /// Highest partial wave with a computed second-order shift
    #[arg(long)]
    pub l_max_delta2: Option<usize>,
    /// Perturbative order of the phase shifts
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub order: Option<u8>,
    /// Keep only even partial waves (identical bosons)
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub symmetrize: Option<bool>,
    /// Observation time shift
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Initial separation in units of the position spread (default sqrt(epsilon))
    #[arg(long)]
    pub r_over_sigma_x: Option<f64>,
    /// Continuation of the second-order shift past --l-max-delta2
    #[arg(long, value_parser = parse_extension)]
    pub extension: Option<ExtensionPolicy>,
    /// Output file (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Flat TOML file of settings; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Common {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            p_mev: self.p_mev,
            mass_mev: self.mass_mev,
            alpha: self.alpha,
            epsilon: self.epsilon,
            l_max: self.l_max,
            l_max_delta2: self.l_max_delta2,
            order: self.order,
            symmetrize: self.symmetrize,
            delta: self.delta,
            r_over_sigma_x: self.r_over_sigma_x,
            extension: self.extension,
            ..Default::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct PhaseShiftsArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct XsecAngleArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub theta_min_deg: Option<f64>,
    #[arg(long)]
    pub theta_max_deg: Option<f64>,
    #[arg(long)]
    pub theta_step_deg: Option<f64>,
}

#[derive(Debug, Args)]
pub struct XsecMomentumArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub theta_deg: Option<f64>,
    #[arg(long)]
    pub p_min_mev: Option<f64>,
    #[arg(long)]
    pub p_max_mev: Option<f64>,
    #[arg(long)]
    pub p_points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DeltaProfileArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub theta_deg: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_max: Option<f64>,
    #[arg(long)]
    pub delta_step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Replace every check's tolerance (e.g. 1e-20 to exercise the failure path)
    #[arg(long)]
    pub force_tolerance: Option<f64>,
}
