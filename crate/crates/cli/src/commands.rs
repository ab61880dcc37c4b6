use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use edgeav_core::ingest::{
    aggregate_hourly, parse_trace, read_demand, synthesize_trace, write_demand, write_trace, Columns, HourlyDemand,
    SynthProfile,
};
use edgeav_core::provisioning::{average_config, cluster_hours, peak_config, safe_speed, ConfigKind, ProvisionError};
use edgeav_core::routing::compare_routes;
use edgeav_core::scheduler::{sched_log, write_job_log};
use edgeav_core::search::{configuration_search, SearchError};
use edgeav_core::{
    DeployedConfig, EdgeConfig, HourlyConfig, HourlyConfigTable, ModelParams, Scenario, SchedParams, SearchParams,
    TravelReport,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{ConfigureArgs, GenerateArgs, IngestArgs, RouteArgs, SafeSpeedArgs, SchedDebugArgs};
use crate::error::CliError;
use crate::files::{create_with, ingest_error, json_files, load_grid, open, read_rows, read_text, write_rows};
use crate::tables::*;

pub const TRIP_NOTE: &str = "speeds of the departure hour are applied to the whole trip";

pub fn generate(args: &GenerateArgs) -> Result<PathBuf> {
    let grid = load_grid(args.grid.as_deref())?;
    let mut profile = match &args.profile {
        Some(p) => SynthProfile::from_json(&read_text(p)?).map_err(|e| ingest_error(p, e))?,
        None => SynthProfile::cologne_shaped(1),
    };
    if let Some(seed) = args.seed {
        profile.seed = seed;
    }
    let records = synthesize_trace(&profile, &grid).map_err(|e| CliError::Input(format!("profile: {e}")))?;
    let path = args.out.out.join(TRACE_CSV);
    create_with(&path, |out| Ok(write_trace(out, &records)?))?;
    eprintln!("wrote {} ({} records)", path.display(), records.len());
    Ok(path)
}

pub fn ingest(args: &IngestArgs) -> Result<()> {
    let grid = load_grid(args.grid.as_deref())?;
    let trace = args.trace.clone().unwrap_or_else(|| args.out.out.join(TRACE_CSV));
    let columns = if args.geo { Columns::Geo } else { Columns::Projected };
    let parsed = parse_trace(open(&trace)?, &grid, columns).map_err(|e| ingest_error(&trace, e))?;
    if parsed.malformed > 0 {
        eprintln!(
            "{}: skipped {} malformed lines (first at line {})",
            trace.display(),
            parsed.malformed,
            parsed.first_malformed_line.unwrap_or(0)
        );
    }
    if parsed.malformed * 2 > parsed.lines() {
        return Err(CliError::Format(format!(
            "{}: {} of {} lines are malformed; wrong column layout?",
            trace.display(),
            parsed.malformed,
            parsed.lines()
        ))
        .into());
    }
    let outside = parsed.records.iter().filter(|r| r.area.is_none()).count();
    if outside > 0 {
        eprintln!("{}: {outside} records outside every area", trace.display());
    }
    let demand = aggregate_hourly(&parsed.records, &grid);
    let path = args.out.out.join(DEMAND_CSV);
    create_with(&path, |out| Ok(write_demand(out, &demand)?))?;
    eprintln!("wrote {} ({} rows)", path.display(), demand.len());
    Ok(())
}

fn load_demand(path: &Path) -> Result<Vec<HourlyDemand>> {
    read_demand(open(path)?).map_err(|e| ingest_error(path, e))
}

/// Demand rows with traffic, as `(row, vehicles, speed)`.
fn busy(demand: &[HourlyDemand]) -> impl Iterator<Item = (&HourlyDemand, f64, f64)> {
    demand
        .iter()
        .filter_map(|d| d.avg_speed_mps.filter(|_| d.avg_vehicles > 0.0).map(|s| (d, d.avg_vehicles, s)))
}

fn search_row(model: &ModelParams, d: &HourlyDemand, vehicles: f64, speed: f64, blind_m: f64) -> Result<HourlyRow> {
    let row = |config: Option<EdgeConfig>, search_calls, status| HourlyRow {
        area_id: d.area_id.clone(),
        hour: d.hour,
        blind_m,
        capacity_bps: config.map(|c| c.capacity_bps),
        cores: config.map(|c| c.cores),
        search_calls,
        status,
    };
    Ok(match configuration_search(&SearchParams::from_model(model, blind_m, vehicles, speed)) {
        Ok(out) => row(Some(out.config), out.sched_calls, SearchStatus::Ok),
        Err(SearchError::Infeasible { .. }) => row(None, 0, SearchStatus::Infeasible),
        Err(SearchError::WorkingPeriodTooShort { .. }) => row(None, 0, SearchStatus::PeriodTooShort),
        Err(SearchError::BudgetExceeded { budget }) => row(None, budget, SearchStatus::BudgetExceeded),
        Err(SearchError::Stalled { .. }) => row(None, 0, SearchStatus::Stalled),
        Err(e) => {
            return Err(CliError::Input(format!("{} hour {} at {blind_m} m: {e}", d.area_id, d.hour)).into());
        }
    })
}

pub fn configure(args: &ConfigureArgs) -> Result<()> {
    let (model, _) = args.params.resolve()?;
    let out = &args.out.out;
    let demand = load_demand(&args.demand.clone().unwrap_or_else(|| out.join(DEMAND_CSV)))?;
    configure_demand(&demand, &model, args.jobs, out)
}

pub fn configure_demand(demand: &[HourlyDemand], model: &ModelParams, jobs: Option<usize>, out: &Path) -> Result<()> {
    let mut areas: Vec<&str> = Vec::new();
    for d in demand {
        if !areas.contains(&d.area_id.as_str()) {
            areas.push(&d.area_id);
        }
    }
    let mut tasks = Vec::new();
    for &area in &areas {
        for &blind in &model.blind_distances_m {
            for (d, v, s) in busy(demand).filter(|(d, _, _)| d.area_id == area) {
                tasks.push((d, v, s, blind));
            }
        }
    }
    if tasks.is_empty() {
        return Err(CliError::Input("demand has no hour with traffic".into()).into());
    }

    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build()?;
    let rows: Vec<HourlyRow> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(d, v, s, blind)| search_row(model, d, v, s, blind))
            .collect::<Result<Vec<_>>>()
    })?;
    if rows.iter().all(|r| r.status == SearchStatus::Infeasible) {
        return Err(CliError::Input("every (area, hour, blind distance) is infeasible".into()).into());
    }

    let table: HourlyConfigTable = rows
        .iter()
        .filter_map(|r| {
            Some(HourlyConfig {
                area_id: r.area_id.clone(),
                hour: r.hour,
                blind_m: r.blind_m,
                config: EdgeConfig {
                    capacity_bps: r.capacity_bps?,
                    cores: r.cores?,
                },
            })
        })
        .collect();
    let mut deployed: Vec<DeployedConfig> = Vec::new();
    for (area, blind) in table.groups() {
        deployed.push(peak_config(&table, &area, blind)?);
        deployed.push(average_config(&table, &area, blind)?);
    }

    let mut clusters = Vec::new();
    for &area in &areas {
        let counts: Vec<(u8, f64)> = busy(demand).filter(|(d, _, _)| d.area_id == area).map(|(d, v, _)| (d.hour, v)).collect();
        match cluster_hours(&counts) {
            Ok(levels) => clusters.extend(levels.into_iter().zip(&counts).map(|((hour, level), &(_, v))| ClusterRow {
                area_id: area.to_string(),
                hour,
                avg_vehicles: v,
                level,
            })),
            Err(ProvisionError::Degenerate(why)) => eprintln!("{area}: hours not clustered ({why})"),
            Err(e) => return Err(e.into()),
        }
    }

    write_rows(&out.join(HOURLY_CSV), &rows)?;
    write_rows(&out.join(DEPLOYED_CSV), &deployed)?;
    write_rows(&out.join(CLUSTERS_CSV), &clusters)?;

    let stuck: Vec<&HourlyRow> = rows
        .iter()
        .filter(|r| matches!(r.status, SearchStatus::BudgetExceeded | SearchStatus::Stalled))
        .collect();
    if let Some(first) = stuck.first() {
        return Err(CliError::Budget(format!(
            "{} searches did not finish (first: {} hour {} at {} m, {:?}); see {}",
            stuck.len(),
            first.area_id,
            first.hour,
            first.blind_m,
            first.status,
            HOURLY_CSV
        ))
        .into());
    }
    Ok(())
}

pub fn safespeed(args: &SafeSpeedArgs) -> Result<()> {
    let (model, _) = args.params.resolve()?;
    let out = &args.out.out;
    let demand = load_demand(&args.demand.clone().unwrap_or_else(|| out.join(DEMAND_CSV)))?;
    let configs_path = args.configs.clone().unwrap_or_else(|| out.join(DEPLOYED_CSV));
    let deployed: Vec<DeployedConfig> = read_rows(&configs_path)?;
    safespeed_rows(&demand, &deployed, args.kind, &model, &configs_path, out)
}

pub fn safespeed_rows(
    demand: &[HourlyDemand],
    deployed: &[DeployedConfig],
    kind: ConfigKind,
    model: &ModelParams,
    configs_path: &Path,
    out: &Path,
) -> Result<()> {
    let deployed: Vec<&DeployedConfig> = deployed.iter().filter(|c| c.kind == kind).collect();
    if deployed.is_empty() {
        return Err(CliError::Input(format!("{} has no {kind} configurations", configs_path.display())).into());
    }
    let mut rows = Vec::new();
    for config in deployed {
        for (d, v, s) in busy(demand).filter(|(d, _, _)| d.area_id == config.area_id) {
            let safe = safe_speed(v, s, config, config.blind_m, model)
                .map_err(|e| CliError::Input(format!("{} hour {} at {} m: {e}", d.area_id, d.hour, config.blind_m)))?;
            rows.push(SafeSpeedRow {
                area_id: d.area_id.clone(),
                hour: d.hour,
                blind_m: config.blind_m,
                kind,
                regular_mps: safe.regular_mps,
                safe_mps: safe.safe_mps,
                rmax_ms: safe.max_response_ms,
                misses: safe.deadline_misses,
            });
        }
    }
    write_rows(&out.join(SAFE_SPEEDS_CSV), &rows)
}

#[derive(Serialize)]
struct RouteSummary<'a> {
    note: &'a str,
    scenarios: Vec<TravelReport>,
}

fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
        .collect()
}

pub fn route(args: &RouteArgs) -> Result<Vec<PathBuf>> {
    let out = &args.out.out;
    let demand = load_demand(&args.demand.clone().unwrap_or_else(|| out.join(DEMAND_CSV)))?;
    let safe_path = args.safe_speeds.clone().unwrap_or_else(|| out.join(SAFE_SPEEDS_CSV));
    let safe: Vec<SafeSpeedRow> = read_rows(&safe_path)?;
    route_reports(&args.scenarios, &demand, &safe, out)
}

pub fn route_reports(scenario_paths: &[PathBuf], demand: &[HourlyDemand], safe: &[SafeSpeedRow], out: &Path) -> Result<Vec<PathBuf>> {
    let regular: HashMap<(&str, u8), f64> = busy(demand).map(|(d, _, s)| ((d.area_id.as_str(), d.hour), s)).collect();
    let safe_by: HashMap<(&str, u8, u64), f64> =
        safe.iter().map(|r| ((r.area_id.as_str(), r.hour, r.blind_m.to_bits()), r.safe_mps)).collect();
    let mut blinds: Vec<f64> = safe.iter().map(|r| r.blind_m).collect();
    blinds.sort_by(f64::total_cmp);
    blinds.dedup();

    let mut written = Vec::new();
    let mut reports = Vec::new();
    let mut seen: BTreeMap<String, PathBuf> = BTreeMap::new();
    for path in json_files(scenario_paths)? {
        let scenario: Scenario = serde_json::from_str(&read_text(&path)?)
            .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
        if let Some(other) = seen.insert(slug(&scenario.name), path.clone()) {
            return Err(CliError::Input(format!(
                "scenario name {:?} used by both {} and {}",
                scenario.name,
                other.display(),
                path.display()
            ))
            .into());
        }
        let report = compare_routes(
            &scenario,
            |area: &str, hour| regular.get(&(area, hour)).copied(),
            |area: &str, hour, blind: f64| safe_by.get(&(area, hour, blind.to_bits())).copied(),
            &blinds,
        )
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let rows: Vec<RouteRow> = report
            .routes
            .iter()
            .flat_map(|r| {
                r.av_s.iter().map(|av| RouteRow {
                    scenario: report.scenario.clone(),
                    route: r.route.clone(),
                    length_m: r.length_m,
                    regular_s: r.regular_s,
                    blind_m: av.blind_m,
                    av_s: av.seconds,
                })
            })
            .collect();
        let csv_path = out.join(ROUTES_DIR).join(format!("{}.csv", slug(&scenario.name)));
        write_rows(&csv_path, &rows)?;
        written.push(csv_path);
        reports.push(report);
    }
    let summary_path = out.join(ROUTE_SUMMARY_JSON);
    let summary = RouteSummary {
        note: TRIP_NOTE,
        scenarios: reports,
    };
    create_with(&summary_path, |f| {
        serde_json::to_writer_pretty(&mut *f, &summary)?;
        Ok(std::io::Write::write_all(f, b"\n")?)
    })?;
    eprintln!("wrote {}", summary_path.display());
    written.push(summary_path);
    Ok(written)
}

pub fn sched_debug(args: &SchedDebugArgs) -> Result<()> {
    let params = SchedParams::new(
        args.cores,
        args.transfer_ms,
        args.exec_ms,
        args.vehicles,
        args.deadline_ms,
        args.working_period_ms,
    )
    .map_err(|e| CliError::Input(e.to_string()))?;
    let (outcome, jobs) = sched_log(&params);
    println!(
        "vehicles_per_core={} deadline_misses={} max_response_ms={} jobs_completed={}",
        params.vehicles_per_core(),
        outcome.deadline_misses,
        outcome.max_response_ms,
        outcome.jobs_completed
    );
    if let Some(path) = &args.log {
        create_with(path, |f| Ok(write_job_log(f, &jobs)?)).with_context(|| format!("job log {}", path.display()))?;
        eprintln!("wrote {} ({} jobs)", path.display(), jobs.len());
    }
    Ok(())
}
