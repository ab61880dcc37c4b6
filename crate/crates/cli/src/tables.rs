//! Row types of the CSV artifacts written between stages.

use edgeav_core::provisioning::{ConfigKind, TrafficLevel};
use serde::{Deserialize, Serialize};

pub const TRACE_CSV: &str = "trace.csv";
pub const DEMAND_CSV: &str = "demand.csv";
pub const HOURLY_CSV: &str = "hourly_configs.csv";
pub const DEPLOYED_CSV: &str = "deployed_configs.csv";
pub const CLUSTERS_CSV: &str = "hour_clusters.csv";
pub const SAFE_SPEEDS_CSV: &str = "safe_speeds.csv";
pub const ROUTES_DIR: &str = "routes";
pub const ROUTE_SUMMARY_JSON: &str = "route_summary.json";
pub const MANIFEST_JSON: &str = "manifest.json";

/// How the configuration search for one row ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Ok,
    /// The deadline is shorter than the queuing slack.
    Infeasible,
    /// Transfer plus execution exceeds the working period.
    PeriodTooShort,
    BudgetExceeded,
    /// The search provably never terminates.
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyRow {
    pub area_id: String,
    pub hour: u8,
    pub blind_m: f64,
    pub capacity_bps: Option<f64>,
    pub cores: Option<u64>,
    pub search_calls: u64,
    pub status: SearchStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRow {
    pub area_id: String,
    pub hour: u8,
    pub avg_vehicles: f64,
    pub level: TrafficLevel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SafeSpeedRow {
    pub area_id: String,
    pub hour: u8,
    pub blind_m: f64,
    pub kind: ConfigKind,
    pub regular_mps: f64,
    pub safe_mps: f64,
    pub rmax_ms: u64,
    pub misses: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteRow {
    pub scenario: String,
    pub route: String,
    pub length_m: f64,
    pub regular_s: f64,
    pub blind_m: f64,
    pub av_s: f64,
}
