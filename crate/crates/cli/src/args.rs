use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "cavityj", version, about = "Cavity-modified magnetic exchange and its magnon signatures")]
pub struct Cli {
    /// JSON file with option values; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output CSV path (default: `<command>.csv`).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "CAVITYJ_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Photonic density of states of a cavity.
    Pdos(PdosArgs),
    /// Resummed exchange J/J0 over a geometry sweep.
    Exchange(ExchangeArgs),
    /// Single-mode weight moments and closed-form comparison.
    SingleMode(SingleModeArgs),
    /// Variational exchange for an explicit mode set.
    Variational(VariationalArgs),
    /// Two-magnon Raman spectra for a set of exchange shifts.
    Raman(RamanArgs),
    /// Magnon dispersion or transverse structure factor along a zone path.
    Sqw(SqwArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Pdos(_) => "pdos",
            Command::Exchange(_) => "exchange",
            Command::SingleMode(_) => "single-mode",
            Command::Variational(_) => "variational",
            Command::Raman(_) => "raman",
            Command::Sqw(_) => "sqw",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CavityKind {
    Fp,
    Surface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSelection {
    Surface,
    Bulk,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpacingArg {
    Lin,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScreeningArg {
    None,
    ImageCharge,
    DipoleModeSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InteractionArg {
    Screened,
    Bare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeArg {
    Lorentzian,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SqwKind {
    Heatmap,
    Dispersion,
}

macro_rules! options {
    ($(#[$meta:meta])* $name:ident { $($(#[$fmeta:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
        #[serde(deny_unknown_fields, default)]
        pub struct $name {
            $(
                $(#[$fmeta])*
                #[serde(skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }
    };
}

options!(PdosArgs {
    #[arg(long, value_enum)]
    cavity: CavityKind,
    /// Mirror distance (um).
    #[arg(long)]
    d_um: f64,
    /// Probe height: `mid` or a value in nm.
    #[arg(long)]
    z: String,
    /// Probe height (nm).
    #[arg(long)]
    z_nm: f64,
    /// Substrate preset name (gold, srtio3) or JSON path.
    #[arg(long)]
    substrate: String,
    #[arg(long)]
    omega_min_ev: f64,
    #[arg(long)]
    omega_max_ev: f64,
    /// Number of grid points.
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    spacing: SpacingArg,
    /// Which surface-cavity modes to include.
    #[arg(long, value_enum)]
    modes: ModeSelection,
    /// Wall separation for the bulk-mode discretization (m).
    #[arg(long)]
    l_perp_m: f64,
});

options!(ExchangeArgs {
    #[arg(long, value_enum)]
    cavity: CavityKind,
    /// Mirror distance for a single point (um).
    #[arg(long)]
    d_um: f64,
    /// Probe height: `mid` or a value in nm.
    #[arg(long)]
    z: String,
    /// Probe height (nm); the sweep variable for surface cavities.
    #[arg(long)]
    z_nm: f64,
    #[arg(long)]
    substrate: String,
    #[arg(long)]
    sweep_from: f64,
    #[arg(long)]
    sweep_to: f64,
    #[arg(long)]
    sweep_count: usize,
    #[arg(long, value_enum)]
    sweep_spacing: SpacingArg,
    #[arg(long)]
    t_ev: f64,
    #[arg(long)]
    u0_ev: f64,
    #[arg(long)]
    a_nm: f64,
    /// Gaussian regularizer cutoff 1/eta (eV); 0 disables it.
    #[arg(long)]
    cutoff_ev: f64,
    #[arg(long, value_enum)]
    screening: ScreeningArg,
    #[arg(long, value_enum)]
    interaction_in_m: InteractionArg,
    #[arg(long, value_enum)]
    modes: ModeSelection,
    #[arg(long)]
    l_perp_m: f64,
    /// Upper end of the tabulated bulk PDOS (eV).
    #[arg(long)]
    bulk_omega_max_ev: f64,
    #[arg(long)]
    bulk_n: usize,
});

options!(SingleModeArgs {
    #[arg(long, value_enum)]
    cavity: CavityKind,
    #[arg(long)]
    d_um: f64,
    #[arg(long)]
    z: String,
    #[arg(long)]
    z_nm: f64,
    #[arg(long)]
    substrate: String,
    #[arg(long)]
    n_max: u32,
    #[arg(long)]
    u0_ev: f64,
    #[arg(long)]
    a_nm: f64,
    #[arg(long)]
    cutoff_ev: f64,
});

options!(VariationalArgs {
    #[arg(long)]
    t_ev: f64,
    #[arg(long)]
    u0_ev: f64,
    /// Mode energies (eV), comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    omega_ev: Vec<f64>,
    /// Squared couplings, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    g2: Vec<f64>,
    /// Longitudinal parts of the squared couplings (default 0).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    g2_long: Vec<f64>,
});

options!(RamanArgs {
    #[arg(long)]
    j_ev: f64,
    #[arg(long)]
    k_ev: f64,
    #[arg(long)]
    spin: f64,
    /// Relative exchange shifts in percent, comma separated; the first is the reference.
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    delta_j_pct: Vec<f64>,
    #[arg(long)]
    omega_min_ev: f64,
    #[arg(long)]
    omega_max_ev: f64,
    #[arg(long)]
    n_omega: usize,
    /// Half width at half maximum (meV).
    #[arg(long)]
    linewidth_mev: f64,
    #[arg(long, value_enum)]
    shape: ShapeArg,
    /// Zone grid size N (N x N points).
    #[arg(long)]
    grid: usize,
});

options!(SqwArgs {
    #[arg(long, value_enum)]
    kind: SqwKind,
    #[arg(long)]
    path: String,
    #[arg(long)]
    points_per_segment: usize,
    #[arg(long)]
    j_ev: f64,
    #[arg(long)]
    k_ev: f64,
    #[arg(long)]
    spin: f64,
    #[arg(long)]
    omega_min_ev: f64,
    #[arg(long)]
    omega_max_ev: f64,
    #[arg(long)]
    n_omega: usize,
    #[arg(long)]
    linewidth_mev: f64,
    #[arg(long, value_enum)]
    shape: ShapeArg,
});
