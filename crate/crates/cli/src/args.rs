use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use edgeav_core::provisioning::ConfigKind;
use edgeav_core::ModelParams;

use crate::error::CliError;
use crate::files::read_text;

#[derive(Debug, Parser)]
#[command(name = "edgeav", version, about = "Edge resource provisioning and safe-speed analysis for edge-assisted AVs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic mobility trace from a demand profile.
    Generate(GenerateArgs),
    /// Aggregate a mobility trace into hourly per-area demand.
    Ingest(IngestArgs),
    /// Search hourly edge configurations and derive peak/average deployments.
    Configure(ConfigureArgs),
    /// Compute AV safe speeds under a deployed configuration.
    Safespeed(SafeSpeedArgs),
    /// Compare regular and AV travel times over route scenarios.
    Route(RouteArgs),
    /// Run generate/ingest, configure, safespeed and route in sequence.
    All(AllArgs),
    /// Simulate one scheduler run and dump its job log.
    SchedDebug(SchedDebugArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Directory holding all stage inputs and outputs.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

/// Model parameters: built-in defaults, then an optional TOML file, then
/// individual flags.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// TOML file with model parameters.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Blind distances to evaluate, meters, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub blind_distances_m: Option<Vec<f64>>,
    /// Data size of one offloaded job, bits.
    #[arg(long)]
    pub data_size_bits: Option<f64>,
    /// Worst-case execution time of one job, seconds.
    #[arg(long)]
    pub exec_time_s: Option<f64>,
    /// Channel capacity increment, bits per second.
    #[arg(long)]
    pub capacity_step_bps: Option<f64>,
    /// Logical core increment.
    #[arg(long)]
    pub core_step: Option<u64>,
    /// Working period of one simulation, seconds.
    #[arg(long)]
    pub working_period_s: Option<f64>,
    /// Queuing-delay factor applied to the execution time.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Response-time variation threshold.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Initial deadline-miss counter.
    #[arg(long)]
    pub miss_sentinel: Option<u64>,
    /// Initial response-time variation.
    #[arg(long)]
    pub variation_sentinel: Option<f64>,
    /// Maximum scheduler simulations per configuration search.
    #[arg(long)]
    pub max_sched_calls: Option<u64>,
}

impl ParamArgs {
    /// Resolved parameters and the flag overrides that were applied, keyed
    /// by flag name.
    pub fn resolve(&self) -> anyhow::Result<(ModelParams, BTreeMap<String, String>)> {
        let mut model = match &self.params {
            Some(path) => toml::from_str(&read_text(path)?)
                .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?,
            None => ModelParams::default(),
        };
        let mut overrides = BTreeMap::new();
        macro_rules! apply {
            ($($field:ident),*) => {$(
                if let Some(value) = self.$field {
                    model.$field = value;
                    overrides.insert(stringify!($field).replace('_', "-"), value.to_string());
                }
            )*};
        }
        apply!(
            data_size_bits,
            exec_time_s,
            capacity_step_bps,
            core_step,
            working_period_s,
            eta,
            epsilon,
            miss_sentinel,
            variation_sentinel,
            max_sched_calls
        );
        if let Some(blinds) = &self.blind_distances_m {
            model.blind_distances_m = blinds.clone();
            let joined: Vec<String> = blinds.iter().map(f64::to_string).collect();
            overrides.insert("blind-distances-m".into(), joined.join(","));
        }
        if model.blind_distances_m.is_empty() || model.blind_distances_m.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(CliError::Input("blind distances must be a non-empty list of positive numbers".into()).into());
        }
        Ok((model, overrides))
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// Demand profile JSON; the built-in city-shaped profile when omitted.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Area grid JSON; the built-in 3x3 grid when omitted.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Overrides the profile's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    /// Trace CSV; defaults to `<out>/trace.csv`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Area grid JSON; the built-in 3x3 grid when omitted.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// The trace has `lat,lon` columns instead of projected `x,y`.
    #[arg(long)]
    pub geo: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConfigureArgs {
    /// Demand CSV; defaults to `<out>/demand.csv`.
    #[arg(long)]
    pub demand: Option<PathBuf>,
    /// Worker threads for the searches; all cores when omitted.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SafeSpeedArgs {
    /// Demand CSV; defaults to `<out>/demand.csv`.
    #[arg(long)]
    pub demand: Option<PathBuf>,
    /// Deployed configurations CSV; defaults to `<out>/deployed_configs.csv`.
    #[arg(long)]
    pub configs: Option<PathBuf>,
    /// Which deployed configuration the AVs run under.
    #[arg(long, default_value = "average")]
    pub kind: ConfigKind,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RouteArgs {
    /// Scenario JSON files or directories containing them.
    #[arg(long, required = true, num_args = 1..)]
    pub scenarios: Vec<PathBuf>,
    /// Demand CSV; defaults to `<out>/demand.csv`.
    #[arg(long)]
    pub demand: Option<PathBuf>,
    /// Safe speeds CSV; defaults to `<out>/safe_speeds.csv`.
    #[arg(long)]
    pub safe_speeds: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AllArgs {
    /// Demand profile JSON for the synthetic trace.
    #[arg(long, conflicts_with = "trace")]
    pub profile: Option<PathBuf>,
    /// Use an existing trace instead of generating one.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Area grid JSON; the built-in 3x3 grid when omitted.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// The trace has `lat,lon` columns instead of projected `x,y`.
    #[arg(long, requires = "trace")]
    pub geo: bool,
    /// Overrides the profile's seed.
    #[arg(long, conflicts_with = "trace")]
    pub seed: Option<u64>,
    /// Scenario JSON files or directories; the route stage is skipped when
    /// none are given.
    #[arg(long, num_args = 1..)]
    pub scenarios: Vec<PathBuf>,
    /// Which deployed configuration the AVs run under.
    #[arg(long, default_value = "average")]
    pub kind: ConfigKind,
    /// Worker threads for the searches; all cores when omitted.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SchedDebugArgs {
    #[arg(long, default_value_t = 1)]
    pub cores: u64,
    #[arg(long)]
    pub vehicles: u64,
    #[arg(long, default_value_t = 0)]
    pub transfer_ms: u64,
    #[arg(long, default_value_t = 16)]
    pub exec_ms: u64,
    #[arg(long)]
    pub deadline_ms: u64,
    #[arg(long, default_value_t = 60_000)]
    pub working_period_ms: u64,
    /// Writes the per-job event log CSV here.
    #[arg(long)]
    pub log: Option<PathBuf>,
}
