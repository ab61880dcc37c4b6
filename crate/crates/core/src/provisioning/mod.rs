//! Deployed configurations, AV safe speeds and traffic-level clustering.
//!
//! Hourly configurations come from [`crate::search`]. The peak
//! configuration takes the largest capacity and core count over the hours;
//! the average configuration takes the mean capacity and the rounded-up
//! mean core count over the hours that carried traffic. Under a deployed
//! configuration, an hour whose worst response time exceeds the deadline
//! forces AVs down to `L / r_max`.

mod kmeans;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::ModelParams;
use crate::scalar::{ceil_count, ceil_ms, floor_ms, Scalar};
use crate::scheduler::{sched, SchedError, SchedParams};
use crate::search::EdgeConfig;

pub use kmeans::{kmeans_1d, KMeans1d, MAX_LLOYD_ITERATIONS};

#[derive(Debug, Error, PartialEq)]
pub enum ProvisionError {
    #[error("no hourly configurations for area {area_id} at blind distance {blind_m} m")]
    NoHours { area_id: String, blind_m: f64 },
    #[error("{0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Sched(#[from] SchedError),
}

/// Configuration required by one (area, hour, blind distance).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyConfig<T> {
    pub area_id: String,
    pub hour: u8,
    pub blind_m: T,
    pub config: EdgeConfig<T>,
}

/// Required configurations indexed by (area, hour, blind distance).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HourlyConfigTable<T> {
    entries: Vec<HourlyConfig<T>>,
}

impl<T: Scalar> HourlyConfigTable<T> {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn push(&mut self, entry: HourlyConfig<T>) {
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[HourlyConfig<T>] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn for_area<'a>(&'a self, area_id: &'a str, blind_m: T) -> impl Iterator<Item = &'a HourlyConfig<T>> + 'a {
        self.entries
            .iter()
            .filter(move |e| e.area_id == area_id && e.blind_m == blind_m)
    }

    pub fn get(&self, area_id: &str, hour: u8, blind_m: T) -> Option<&EdgeConfig<T>> {
        self.entries
            .iter()
            .find(|e| e.area_id == area_id && e.hour == hour && e.blind_m == blind_m)
            .map(|e| &e.config)
    }

    /// Distinct (area, blind distance) pairs in first-seen order.
    pub fn groups(&self) -> Vec<(String, T)> {
        let mut out: Vec<(String, T)> = Vec::new();
        for e in &self.entries {
            if !out.iter().any(|(a, l)| *a == e.area_id && *l == e.blind_m) {
                out.push((e.area_id.clone(), e.blind_m));
            }
        }
        out
    }
}

impl<T: Scalar> FromIterator<HourlyConfig<T>> for HourlyConfigTable<T> {
    fn from_iter<I: IntoIterator<Item = HourlyConfig<T>>>(iter: I) -> Self {
        Self {
            entries: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfigKind {
    Peak,
    Average,
}

impl fmt::Display for ConfigKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConfigKind::Peak => "peak",
            ConfigKind::Average => "average",
        })
    }
}

impl FromStr for ConfigKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "peak" => Ok(ConfigKind::Peak),
            "average" => Ok(ConfigKind::Average),
            other => Err(format!("unknown configuration kind {other:?}")),
        }
    }
}

/// A configuration deployed for a whole day in one area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeployedConfig<T> {
    pub area_id: String,
    pub blind_m: T,
    pub kind: ConfigKind,
    pub capacity_bps: T,
    pub cores: u64,
}

fn hours_for<'a, T: Scalar>(
    table: &'a HourlyConfigTable<T>,
    area_id: &str,
    blind_m: T,
) -> Result<Vec<&'a EdgeConfig<T>>, ProvisionError> {
    let hours: Vec<_> = table
        .entries()
        .iter()
        .filter(|e| e.area_id == area_id && e.blind_m == blind_m)
        .map(|e| &e.config)
        .collect();
    if hours.is_empty() {
        return Err(ProvisionError::NoHours {
            area_id: area_id.to_string(),
            blind_m: blind_m.as_f64(),
        });
    }
    Ok(hours)
}

/// Componentwise maximum over the hours.
pub fn peak_config<T: Scalar>(
    table: &HourlyConfigTable<T>,
    area_id: &str,
    blind_m: T,
) -> Result<DeployedConfig<T>, ProvisionError> {
    let hours = hours_for(table, area_id, blind_m)?;
    Ok(DeployedConfig {
        area_id: area_id.to_string(),
        blind_m,
        kind: ConfigKind::Peak,
        capacity_bps: hours.iter().map(|c| c.capacity_bps).fold(T::neg_infinity(), T::max),
        cores: hours.iter().map(|c| c.cores).max().expect("non-empty"),
    })
}

/// Mean capacity and rounded-up mean core count over the hours present in
/// the table (the hours with traffic).
pub fn average_config<T: Scalar>(
    table: &HourlyConfigTable<T>,
    area_id: &str,
    blind_m: T,
) -> Result<DeployedConfig<T>, ProvisionError> {
    let hours = hours_for(table, area_id, blind_m)?;
    let n = T::from_count(hours.len() as u64);
    let capacity = hours.iter().fold(T::zero(), |acc, c| acc + c.capacity_bps) / n;
    let core_sum: u64 = hours.iter().map(|c| c.cores).sum();
    Ok(DeployedConfig {
        area_id: area_id.to_string(),
        blind_m,
        kind: ConfigKind::Average,
        capacity_bps: capacity,
        cores: core_sum.div_ceil(hours.len() as u64),
    })
}

/// AV speed limit for one hour under a deployed configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafeSpeed<T> {
    pub regular_mps: T,
    pub safe_mps: T,
    pub max_response_ms: u64,
    pub deadline_misses: u64,
}

/// Simulates an hour's demand on a deployed configuration and returns
/// `min(S, L / r_max)`. When no deadline is missed the regular speed is
/// returned as is.
pub fn safe_speed<T: Scalar>(
    vehicles: T,
    speed_mps: T,
    deployed: &DeployedConfig<T>,
    blind_m: T,
    model: &ModelParams<T>,
) -> Result<SafeSpeed<T>, ProvisionError> {
    if !(vehicles > T::zero()) {
        return Err(ProvisionError::Domain("safe speed needs a positive vehicle count".into()));
    }
    if !(speed_mps > T::zero()) {
        return Err(ProvisionError::Domain("safe speed needs a positive regular speed".into()));
    }
    if !(blind_m > T::zero()) {
        return Err(ProvisionError::Domain("blind distance must be positive".into()));
    }
    if !(deployed.capacity_bps > T::zero()) {
        return Err(ProvisionError::Domain(format!(
            "{} has zero channel capacity but carries traffic",
            deployed.area_id
        )));
    }
    let vehicles = ceil_count(vehicles);
    let transfer = model.data_size_bits * T::from_count(vehicles) / deployed.capacity_bps;
    let params = SchedParams::new(
        deployed.cores,
        ceil_ms(transfer),
        ceil_ms(model.exec_time_s).max(1),
        vehicles,
        floor_ms(blind_m / speed_mps),
        floor_ms(model.working_period_s),
    )?;
    let outcome = sched(&params);
    if outcome.jobs_completed == 0 {
        return Err(ProvisionError::Domain(format!(
            "no job completes within the working period (transfer {} ms)",
            params.transfer_ms()
        )));
    }
    let safe_mps = if outcome.deadline_misses == 0 {
        speed_mps
    } else {
        let limit = blind_m * T::lit(1000.0) / T::from_count(outcome.max_response_ms);
        limit.min(speed_mps)
    };
    Ok(SafeSpeed {
        regular_mps: speed_mps,
        safe_mps,
        max_response_ms: outcome.max_response_ms,
        deadline_misses: outcome.deadline_misses,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrafficLevel {
    Low,
    Medium,
    High,
}

impl fmt::Display for TrafficLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrafficLevel::Low => "low",
            TrafficLevel::Medium => "medium",
            TrafficLevel::High => "high",
        })
    }
}

/// Labels hours low/medium/high traffic with a 3-cluster k-means over
/// their vehicle counts.
pub fn cluster_hours<T: Scalar>(counts: &[(u8, T)]) -> Result<Vec<(u8, TrafficLevel)>, ProvisionError> {
    let values: Vec<T> = counts.iter().map(|&(_, v)| v).collect();
    let km = kmeans_1d(&values, 3)?;
    const LEVELS: [TrafficLevel; 3] = [TrafficLevel::Low, TrafficLevel::Medium, TrafficLevel::High];
    Ok(counts
        .iter()
        .zip(&km.assignment)
        .map(|(&(hour, _), &cluster)| (hour, LEVELS[cluster]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{configuration_search, SearchParams};

    fn table(rows: &[(u8, f64, u64)]) -> HourlyConfigTable<f64> {
        rows.iter()
            .map(|&(hour, capacity_bps, cores)| HourlyConfig {
                area_id: "A5".into(),
                hour,
                blind_m: 2.0,
                config: EdgeConfig { capacity_bps, cores },
            })
            .collect()
    }

    #[test]
    fn peak_and_average_by_inspection() {
        let t = table(&[(7, 10e6, 2), (8, 30e6, 5), (9, 20e6, 3)]);
        let peak = peak_config(&t, "A5", 2.0).unwrap();
        assert_eq!((peak.capacity_bps, peak.cores), (30e6, 5));
        let avg = average_config(&t, "A5", 2.0).unwrap();
        assert_eq!((avg.capacity_bps, avg.cores), (20e6, 4));
        assert_eq!(avg.kind, ConfigKind::Average);
    }

    #[test]
    fn identical_hours_collapse() {
        let rows: Vec<_> = (0..24).map(|h| (h, 7e6, 6)).collect();
        let t = table(&rows);
        let peak = peak_config(&t, "A5", 2.0).unwrap();
        let avg = average_config(&t, "A5", 2.0).unwrap();
        assert_eq!((peak.capacity_bps, peak.cores), (7e6, 6));
        assert_eq!((avg.capacity_bps, avg.cores), (peak.capacity_bps, peak.cores));
    }

    #[test]
    fn empty_group_is_an_error() {
        let t = table(&[(7, 10e6, 2)]);
        assert!(matches!(peak_config(&t, "A5", 4.0), Err(ProvisionError::NoHours { .. })));
        assert!(matches!(average_config(&t, "A1", 2.0), Err(ProvisionError::NoHours { .. })));
    }

    #[test]
    fn own_config_gives_regular_speed() {
        let model = ModelParams::<f64>::default();
        let (v, s, l) = (40.0, 9.0, 8.0);
        let found = configuration_search(&SearchParams::from_model(&model, l, v, s)).unwrap();
        let deployed = DeployedConfig {
            area_id: "A".into(),
            blind_m: l,
            kind: ConfigKind::Peak,
            capacity_bps: found.config.capacity_bps,
            cores: found.config.cores,
        };
        let out = safe_speed(v, s, &deployed, l, &model).unwrap();
        assert_eq!(out.deadline_misses, 0);
        assert_eq!(out.safe_mps, s);
    }

    #[test]
    fn single_vehicle_closed_form() {
        let model = ModelParams::<f64>::default();
        // t = 1.8e6 / 4e6 = 450 ms, r = 466 ms; d = 4 m / 10 m/s = 400 ms.
        let deployed = DeployedConfig {
            area_id: "A".into(),
            blind_m: 4.0,
            kind: ConfigKind::Average,
            capacity_bps: 4e6,
            cores: 1,
        };
        let out = safe_speed(1.0, 10.0, &deployed, 4.0, &model).unwrap();
        assert_eq!(out.max_response_ms, 466);
        assert!(out.deadline_misses > 0);
        assert!((out.safe_mps - 4.0 / 0.466).abs() < 1e-12);
    }

    #[test]
    fn zero_capacity_with_traffic() {
        let model = ModelParams::<f64>::default();
        let deployed = DeployedConfig {
            area_id: "A".into(),
            blind_m: 4.0,
            kind: ConfigKind::Average,
            capacity_bps: 0.0,
            cores: 1,
        };
        assert!(matches!(
            safe_speed(3.0, 10.0, &deployed, 4.0, &model),
            Err(ProvisionError::Domain(_))
        ));
    }

    #[test]
    fn hours_cluster_into_levels() {
        let counts = [(0u8, 10.0), (1, 11.0), (2, 12.0), (3, 500.0), (4, 510.0), (5, 1800.0), (6, 1810.0)];
        let labels = cluster_hours(&counts).unwrap();
        let levels: Vec<TrafficLevel> = labels.iter().map(|&(_, l)| l).collect();
        use TrafficLevel::*;
        assert_eq!(levels, vec![Low, Low, Low, Medium, Medium, High, High]);
    }
}
