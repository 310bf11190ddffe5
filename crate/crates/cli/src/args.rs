use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

const SCENARIO_HELP: &str = "\
Comma-separated scenario list. Items:
  conv            conventional model, all phase noise untrusted
  trusted         trusted phase-noise model without attack
  pia:g=G[,n=N]   phase-insensitive amplifier on the reference, gain G >= 1,
                  idler variance N >= 1 (default 1)
  voa:r=R         attenuator relaxed by factor R >= 1
  voa:r=1/T       ratio 1/T at every distance
A key=value item without a kind continues the previous attack, so
`pia:g=2,n=1,voa:r=1/T` is two scenarios.";

/// Security analysis of CV-QKD with a locally generated local oscillator.
///
/// Parameters come from the canonical profile, optionally replaced by a JSON
/// config (`--config`) and then by individual `--set name=value` overrides
/// using the config key names. Exit status: 0 success, 2 invalid input,
/// 3 computation error; errors are also written to stderr as JSON.
#[derive(Debug, Parser)]
#[command(name = "phaseref", version)]
pub struct Cli {
    /// JSON parameter file; unknown keys are rejected.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Override one parameter after the config is loaded, e.g. `--set xi_0=0`
    /// or `--set leakage_variant=SUM`. Repeatable.
    #[arg(long = "set", global = true, value_name = "NAME=VALUE")]
    pub overrides: Vec<String>,

    /// Output format. Defaults to csv for `sweep` and json otherwise; csv is
    /// available for `point` and `sweep` only.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write results to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Seed for sampled monitor readings.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Noise budget and key rate of each scenario at one distance.
    Point(PointArgs),
    /// Key rates of each scenario over a distance grid.
    Sweep(SweepArgs),
    /// Attack bookkeeping, key loss and zero-key distances at one distance.
    Attack {
        #[command(subcommand)]
        kind: AttackAt,
    },
    /// Distance interval where the trusted model claims a key the attack has
    /// already removed.
    Region {
        #[command(subcommand)]
        kind: AttackKind,
    },
    /// Intensity-monitor verdict and defended key rate.
    Monitor(MonitorArgs),
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Fiber length in km.
    #[arg(long, value_name = "KM")]
    pub distance: f64,

    #[arg(long, default_value = "conv,trusted", value_name = "LIST", long_help = SCENARIO_HELP)]
    pub scenarios: String,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// First distance in km.
    #[arg(long, default_value_t = 0.0, value_name = "KM")]
    pub from: f64,

    /// Last distance in km, included when it falls on the grid.
    #[arg(long, default_value_t = 80.0, value_name = "KM")]
    pub to: f64,

    /// Grid step in km.
    #[arg(long, default_value_t = 1.0, value_name = "KM")]
    pub step: f64,

    #[arg(
        long,
        default_value = "conv,trusted,pia:g=2,pia:g=10,voa:r=1/T",
        value_name = "LIST",
        long_help = SCENARIO_HELP
    )]
    pub scenarios: String,
}

#[derive(Debug, Subcommand)]
pub enum AttackAt {
    /// Phase-insensitive amplifier on the reference pulse.
    Pia {
        #[command(flatten)]
        spec: PiaArgs,
        /// Fiber length in km.
        #[arg(long, value_name = "KM")]
        distance: f64,
    },
    /// Variable optical attenuator relaxed after calibration.
    Voa {
        #[command(flatten)]
        spec: VoaArgs,
        /// Fiber length in km.
        #[arg(long, value_name = "KM")]
        distance: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum AttackKind {
    /// Phase-insensitive amplifier on the reference pulse.
    Pia(PiaArgs),
    /// Variable optical attenuator relaxed after calibration.
    Voa(VoaArgs),
}

#[derive(Debug, Args)]
pub struct PiaArgs {
    /// Amplification factor, >= 1.
    #[arg(long, value_name = "G")]
    pub g: f64,

    /// Idler-mode variance in SNU, >= 1.
    #[arg(long, default_value_t = 1.0, value_name = "N")]
    pub n: f64,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct VoaArgs {
    /// Fixed intensity ratio, >= 1.
    #[arg(long, value_name = "R")]
    pub r: Option<f64>,

    /// Distance-dependent ratio; `inverse-T` uses r = 1/T.
    #[arg(long, value_enum, value_name = "MODE")]
    pub r_mode: Option<RatioMode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RatioMode {
    #[value(name = "inverse-T")]
    InverseT,
}

#[derive(Debug, Args)]
pub struct MonitorArgs {
    /// Fiber length in km.
    #[arg(long, value_name = "KM")]
    pub distance: f64,

    /// Relative half-width of the intensity reading interval.
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,

    /// Relative deviation from the calibrated intensity that raises an alarm.
    #[arg(long, default_value_t = 0.05)]
    pub tau: f64,

    /// Attack applied to the reference, in scenario syntax (`pia:g=2`,
    /// `voa:r=1/T`). Omit for an honest channel.
    #[arg(long, value_name = "SPEC")]
    pub attack: Option<String>,

    /// Draw the reading uniformly inside the interval; requires `--seed`.
    #[arg(long)]
    pub sampled: bool,

    /// Share of the reference power tapped to the meter.
    #[arg(long, default_value_t = 0.01)]
    pub tap_ratio: f64,

    /// Gain of the monitor amplifier.
    #[arg(long, default_value_t = 100.0)]
    pub monitor_gain: f64,
}
