//! Synthetic traces whose aggregated demand reproduces a target profile.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::aggregate::{HOURS, WINDOWS_PER_HOUR, WINDOW_S};
use super::grid::AreaGrid;
use super::trace::TraceRecord;
use super::IngestError;

/// Target demand of one (area, hour).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub vehicles: f64,
    pub speed_mps: f64,
}

/// Target demand per area and hour plus the generator seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthProfile {
    pub seed: u64,
    pub areas: BTreeMap<String, BTreeMap<u8, Target>>,
}

impl SynthProfile {
    pub fn from_json(text: &str) -> Result<Self, IngestError> {
        serde_json::from_str(text).map_err(|e| IngestError::InvalidProfile(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }

    pub fn target(&self, area_id: &str, hour: u8) -> Option<Target> {
        self.areas.get(area_id)?.get(&hour).copied()
    }

    fn validate(&self, grid: &AreaGrid) -> Result<(), IngestError> {
        for (area, hours) in &self.areas {
            if grid.index_of(area).is_none() {
                return Err(IngestError::UnknownArea(area.clone()));
            }
            for (&hour, t) in hours {
                let bad = |why: &str| IngestError::InvalidProfile(format!("{area} hour {hour}: {why}"));
                if hour >= HOURS {
                    return Err(bad("hour out of range"));
                }
                if !(t.vehicles >= 0.0 && t.vehicles.is_finite()) {
                    return Err(bad("vehicle target must be non-negative"));
                }
                if !(t.speed_mps >= 0.0 && t.speed_mps.is_finite()) {
                    return Err(bad("speed target must be non-negative"));
                }
                if t.vehicles > 0.0 && t.speed_mps == 0.0 {
                    return Err(bad("traffic with zero speed"));
                }
            }
        }
        Ok(())
    }

    /// Day-long profile shaped after the reference city study: morning and
    /// afternoon rush hours, a lunch bump, quiet nights, heavy central areas
    /// (A2, A5), moderate ones (A3, A6) and light outskirts (A7-A9).
    pub fn cologne_shaped(seed: u64) -> Self {
        // Share of the area's peak count present in each hour.
        const LOAD: [f64; 24] = [
            0.05, 0.03, 0.02, 0.02, 0.04, 0.10, 0.35, 1.00, 0.80, 0.35, 0.28, 0.32, 0.70, 0.35, 0.35, 0.80, 1.00,
            0.90, 0.75, 0.35, 0.25, 0.18, 0.12, 0.08,
        ];
        // Speed falls linearly from free flow and saturates at the rush-hour
        // value once the load reaches this share of the peak.
        const SATURATION_LOAD: f64 = 0.8;
        // (area, peak vehicles, rush-hour speed, free-flow speed, base load).
        // Speeds are m/s. The base load is the share of the peak present at
        // all hours, so outskirt areas swing less over the day than the
        // centre.
        const AREAS: [(&str, f64, f64, f64, f64); 9] = [
            ("A1", 600.0, 9.0, 13.5, 0.2),
            ("A2", 1800.0, 6.0, 12.5, 0.0),
            ("A3", 750.0, 10.7, 14.0, 0.3),
            ("A4", 900.0, 8.5, 13.0, 0.2),
            ("A5", 1800.0, 6.0, 12.5, 0.0),
            ("A6", 750.0, 10.7, 14.0, 0.3),
            ("A7", 400.0, 11.0, 14.5, 0.4),
            ("A8", 400.0, 11.0, 14.5, 0.4),
            ("A9", 400.0, 10.7, 14.0, 0.4),
        ];
        let areas = AREAS
            .iter()
            .map(|&(id, peak, rush, free, base)| {
                let hours = LOAD
                    .iter()
                    .enumerate()
                    .map(|(h, &daily)| {
                        let load = base + (1.0 - base) * daily;
                        let vehicles = (peak * load).round();
                        let speed_mps = free - (free - rush) * (load / SATURATION_LOAD).min(1.0);
                        (
                            h as u8,
                            Target {
                                vehicles,
                                speed_mps: (speed_mps * 100.0).round() / 100.0,
                            },
                        )
                    })
                    .collect();
                (id.to_string(), hours)
            })
            .collect();
        Self { seed, areas }
    }
}

fn round_to(value: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (value * scale).round() / scale
}

/// Generates a trace whose aggregation reproduces the profile.
///
/// Each of the five counting windows of an (area, hour) receives an integer
/// number of distinct vehicles, distributed so the five-window mean is the
/// target rounded to the nearest 0.2. Some vehicles carry over from the
/// previous window. Every vehicle leaves one or two samples inside the area
/// during the window, and the sample speeds are jittered around the target
/// with zero mean so each window averages the target speed. Output is
/// sorted by timestamp then vehicle id and is a pure function of the
/// profile and grid.
pub fn synthesize_trace(profile: &SynthProfile, grid: &AreaGrid) -> Result<Vec<TraceRecord>, IngestError> {
    profile.validate(grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let side = grid.side_m();
    let mut records = Vec::new();

    for (area_id, hours) in &profile.areas {
        let area = &grid.areas()[grid.index_of(area_id).expect("validated")];
        for (&hour, target) in hours {
            let total = (target.vehicles * WINDOWS_PER_HOUR as f64).round() as u64;
            if total == 0 {
                continue;
            }
            let mut counts = [total / WINDOWS_PER_HOUR as u64; WINDOWS_PER_HOUR as usize];
            let mut order: Vec<usize> = (0..WINDOWS_PER_HOUR as usize).collect();
            order.shuffle(&mut rng);
            for &w in order.iter().take((total % WINDOWS_PER_HOUR as u64) as usize) {
                counts[w] += 1;
            }

            let mut next_id = 0u64;
            let mut previous: Vec<String> = Vec::new();
            for (w, &count) in counts.iter().enumerate() {
                let count = count as usize;
                previous.shuffle(&mut rng);
                let carry = (previous.len().min(count) as f64 * rng.gen_range(0.0..0.5)) as usize;
                let mut ids: Vec<String> = previous.drain(..carry).collect();
                while ids.len() < count {
                    ids.push(format!("{area_id}-{hour:02}-{next_id:05}"));
                    next_id += 1;
                }

                let window_start = hour as u32 * 3600 + w as u32 * WINDOW_S;
                let first = records.len();
                let mut jitter = Vec::new();
                for id in &ids {
                    for _ in 0..rng.gen_range(1..=2) {
                        records.push(TraceRecord {
                            timestamp: window_start + rng.gen_range(0..WINDOW_S),
                            vehicle_id: id.clone(),
                            x: round_to(area.x_min + rng.gen_range(0.5..side - 0.5), 2),
                            y: round_to(area.y_min + rng.gen_range(0.5..side - 0.5), 2),
                            speed_mps: 0.0,
                        });
                        jitter.push(rng.gen_range(-0.25..0.25));
                    }
                }
                let mean_jitter = jitter.iter().sum::<f64>() / jitter.len() as f64;
                for (r, j) in records[first..].iter_mut().zip(&jitter) {
                    r.speed_mps = round_to(target.speed_mps * (1.0 + j - mean_jitter), 4);
                }
                previous = ids;
            }
        }
    }

    records.sort_by(|a, b| (a.timestamp, &a.vehicle_id).cmp(&(b.timestamp, &b.vehicle_id)));
    Ok(records)
}
