use std::path::PathBuf;

use aniso_core::TaylorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "aniso",
    version,
    about = "Anisometry lower bounds and optimal azimuthal maps between constant-curvature spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate bounds over a (rho, kappa, alpha) sweep.
    Bounds(BoundsArgs),
    /// Export the polar grid of an azimuthal map.
    Map(MapArgs),
    /// Run a verification suite and print a JSON report.
    Verify(VerifyArgs),
    /// Print leading Taylor coefficients at the origin.
    Taylor(TaylorArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    General,
    #[value(alias = "vp")]
    VolumePreserving,
    Conformal,
    #[value(alias = "qc")]
    Quasiconformal,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Source curvatures, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub rho: Vec<f64>,
    /// Target curvatures, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub kappa: Vec<f64>,
    /// Ball radii, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ClassArg::General)]
    pub class: ClassArg,
    /// Distortion bound, required by and only accepted with the quasiconformal class.
    #[arg(long = "Q")]
    pub q: Option<f64>,
    /// Injectivity radius of the source (default: unbounded).
    #[arg(long = "inj-m")]
    pub inj_m: Option<f64>,
    /// Injectivity radius of the target (default: unbounded).
    #[arg(long = "inj-n")]
    pub inj_n: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Equidistant,
    Contracting,
    Conformal,
    #[value(alias = "vp")]
    VolumePreserving,
    #[value(alias = "qc")]
    Quasiconformal,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub rho: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// R'(0) for the contracting, conformal and quasiconformal families.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Distortion bound of the quasiconformal family.
    #[arg(long = "Q")]
    pub q: Option<f64>,
    /// Transition radius of the quasiconformal family (default: computed).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Grid points per axis (radii from 0 to alpha, and angles).
    #[arg(long, default_value_t = 33)]
    pub resolution: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    Sharpness,
    Taylor,
    Ellipsoid,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<TaylorKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = TaylorKind::ALL.iter().map(|k| k.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

#[derive(Debug, Args)]
pub struct TaylorArgs {
    /// Curvatures, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub kappa: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Restrict to one expansion (default: all).
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<TaylorKind>,
    #[command(flatten)]
    pub output: OutputArgs,
}
