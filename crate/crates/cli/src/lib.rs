//! The `edgeav` pipeline: each subcommand is one stage reading and writing
//! files under a shared output directory.

pub mod args;
mod commands;
pub mod error;
mod files;
mod manifest;
pub mod tables;

use anyhow::Result;

pub use args::Cli;
use args::{Command, ConfigureArgs, GenerateArgs, IngestArgs, RouteArgs, SafeSpeedArgs};
pub use error::{exit_code, CliError};

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => commands::generate(&a).map(drop),
        Command::Ingest(a) => commands::ingest(&a),
        Command::Configure(a) => commands::configure(&a),
        Command::Safespeed(a) => commands::safespeed(&a),
        Command::Route(a) => commands::route(&a).map(drop),
        Command::All(a) => {
            let (model, overrides) = a.params.resolve()?;
            let generated = a.trace.is_none();
            if generated {
                commands::generate(&GenerateArgs {
                    profile: a.profile.clone(),
                    grid: a.grid.clone(),
                    seed: a.seed,
                    out: a.out.clone(),
                })?;
            }
            commands::ingest(&IngestArgs {
                trace: a.trace.clone(),
                grid: a.grid.clone(),
                geo: a.geo,
                out: a.out.clone(),
            })?;
            commands::configure(&ConfigureArgs {
                demand: None,
                jobs: a.jobs,
                params: a.params.clone(),
                out: a.out.clone(),
            })?;
            commands::safespeed(&SafeSpeedArgs {
                demand: None,
                configs: None,
                kind: a.kind,
                params: a.params.clone(),
                out: a.out.clone(),
            })?;
            if !a.scenarios.is_empty() {
                commands::route(&RouteArgs {
                    scenarios: a.scenarios.clone(),
                    demand: None,
                    safe_speeds: None,
                    out: a.out.clone(),
                })?;
            }
            manifest::write(&a, &model, &overrides)
        }
        Command::SchedDebug(a) => commands::sched_debug(&a),
    }
}
