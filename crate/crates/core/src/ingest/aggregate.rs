use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::grid::AreaGrid;
use super::trace::TaggedRecord;
use super::IngestError;

/// Length of one counting window, seconds.
pub const WINDOW_S: u32 = 180;
/// Windows sampled at the start of every hour.
pub const WINDOWS_PER_HOUR: u32 = 5;
pub const HOURS: u8 = 24;

/// Average demand of one area during one hour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyDemand {
    pub area_id: String,
    pub hour: u8,
    /// Mean count of unique vehicles per window.
    pub avg_vehicles: f64,
    /// Mean of the per-window mean speeds, over windows that saw traffic.
    /// Absent when no window did.
    pub avg_speed_mps: Option<f64>,
}

#[derive(Default)]
struct Window<'a> {
    vehicles: HashSet<&'a str>,
    speeds: Vec<f64>,
}

impl Window<'_> {
    fn mean_speed(&mut self) -> Option<f64> {
        if self.speeds.is_empty() {
            return None;
        }
        // Order-independent sum.
        self.speeds.sort_by(f64::total_cmp);
        Some(self.speeds.iter().sum::<f64>() / self.speeds.len() as f64)
    }
}

/// Per-(area, hour) demand from the five 3-minute windows covering the
/// first quarter hour. A vehicle counts in a window if any of its samples
/// falls in the area during that window. Returns one entry per area and
/// hour, in grid order then hour order.
pub fn aggregate_hourly(records: &[TaggedRecord], grid: &AreaGrid) -> Vec<HourlyDemand> {
    let mut windows: HashMap<(usize, u8, u32), Window<'_>> = HashMap::new();
    for tagged in records {
        let Some(area) = tagged.area else { continue };
        let r = &tagged.record;
        let hour = (r.timestamp / 3600) as u8;
        let offset = r.timestamp % 3600;
        if offset >= WINDOW_S * WINDOWS_PER_HOUR {
            continue;
        }
        let w = windows.entry((area, hour, offset / WINDOW_S)).or_default();
        w.vehicles.insert(r.vehicle_id.as_str());
        w.speeds.push(r.speed_mps);
    }

    let mut out = Vec::with_capacity(grid.len() * HOURS as usize);
    for area in 0..grid.len() {
        for hour in 0..HOURS {
            let mut count_sum = 0usize;
            let mut speed_means = Vec::new();
            for w in 0..WINDOWS_PER_HOUR {
                if let Some(window) = windows.get_mut(&(area, hour, w)) {
                    count_sum += window.vehicles.len();
                    speed_means.extend(window.mean_speed());
                }
            }
            let avg_speed_mps =
                (!speed_means.is_empty()).then(|| speed_means.iter().sum::<f64>() / speed_means.len() as f64);
            out.push(HourlyDemand {
                area_id: grid.area_id(area).to_string(),
                hour,
                avg_vehicles: count_sum as f64 / WINDOWS_PER_HOUR as f64,
                avg_speed_mps,
            });
        }
    }
    out
}

pub const DEMAND_HEADER: [&str; 4] = ["area_id", "hour", "avg_vehicles", "avg_speed_mps"];

pub fn write_demand<W: Write>(out: W, demand: &[HourlyDemand]) -> Result<(), IngestError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(DEMAND_HEADER)?;
    for d in demand {
        writer.write_record([
            d.area_id.clone(),
            d.hour.to_string(),
            d.avg_vehicles.to_string(),
            d.avg_speed_mps.map(|s| s.to_string()).unwrap_or_default(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_demand<R: Read>(source: R) -> Result<Vec<HourlyDemand>, IngestError> {
    let mut reader = csv::Reader::from_reader(source);
    let header = reader.headers()?.clone();
    if header.iter().ne(DEMAND_HEADER) {
        return Err(IngestError::Format {
            line: 1,
            message: format!("expected header {}", DEMAND_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, row) in reader.records().enumerate() {
        let line = i as u64 + 2;
        let row = row?;
        let bad = |message: String| IngestError::Format { line, message };
        if row.len() != 4 {
            return Err(bad(format!("expected 4 fields, found {}", row.len())));
        }
        let hour: u8 = row[1].parse().map_err(|_| bad(format!("bad hour {:?}", &row[1])))?;
        if hour >= HOURS {
            return Err(bad(format!("hour {hour} out of range")));
        }
        let avg_vehicles: f64 = row[2].parse().map_err(|_| bad(format!("bad vehicle count {:?}", &row[2])))?;
        let avg_speed_mps = if row[3].is_empty() {
            None
        } else {
            Some(row[3].parse::<f64>().map_err(|_| bad(format!("bad speed {:?}", &row[3])))?)
        };
        if !(avg_vehicles >= 0.0) {
            return Err(bad(format!("negative vehicle count {avg_vehicles}")));
        }
        if avg_vehicles > 0.0 && !avg_speed_mps.is_some_and(|s| s > 0.0) {
            return Err(bad("traffic without a positive speed".into()));
        }
        if !seen.insert((row[0].to_string(), hour)) {
            return Err(bad(format!("duplicate entry for {} hour {hour}", &row[0])));
        }
        out.push(HourlyDemand {
            area_id: row[0].to_string(),
            hour,
            avg_vehicles,
            avg_speed_mps,
        });
    }
    Ok(out)
}
