//! Route travel times for regular vehicles and edge-assisted AVs.
//!
//! A route is a fixed sequence of (area, distance) segments. Each segment
//! is driven at the speed of its area at the departure hour; AVs use the
//! safe speed for their blind distance instead of the regular speed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum RoutingError {
    #[error("no speed for area {area_id} at hour {hour}{}", blind_suffix(*.blind_m))]
    MissingSpeed {
        area_id: String,
        hour: u8,
        blind_m: Option<f64>,
    },
    #[error("non-positive speed {speed_mps} m/s for area {area_id} at hour {hour}")]
    NonPositiveSpeed { area_id: String, hour: u8, speed_mps: f64 },
    #[error("invalid route {route}: {reason}")]
    InvalidRoute { route: String, reason: String },
    #[error("invalid scenario {scenario}: {reason}")]
    InvalidScenario { scenario: String, reason: String },
}

fn blind_suffix(blind_m: Option<f64>) -> String {
    blind_m.map(|l| format!(" (blind distance {l} m)")).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment<T> {
    pub area_id: String,
    pub distance_m: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route<T> {
    pub name: String,
    pub segments: Vec<Segment<T>>,
}

impl<T: Scalar> Route<T> {
    pub fn new(name: impl Into<String>, segments: Vec<Segment<T>>) -> Result<Self, RoutingError> {
        let route = Self {
            name: name.into(),
            segments,
        };
        route.validate()?;
        Ok(route)
    }

    pub fn validate(&self) -> Result<(), RoutingError> {
        let invalid = |reason: String| RoutingError::InvalidRoute {
            route: self.name.clone(),
            reason,
        };
        if self.segments.is_empty() {
            return Err(invalid("no segments".into()));
        }
        for s in &self.segments {
            if !(s.distance_m > T::zero() && s.distance_m.is_finite()) {
                return Err(invalid(format!("segment in {} has distance {}", s.area_id, s.distance_m)));
            }
        }
        Ok(())
    }

    pub fn length_m(&self) -> T {
        self.segments.iter().fold(T::zero(), |acc, s| acc + s.distance_m)
    }

    /// This route followed by `other`.
    pub fn concat(&self, other: &Route<T>) -> Route<T> {
        Route {
            name: format!("{}+{}", self.name, other.name),
            segments: self.segments.iter().chain(&other.segments).cloned().collect(),
        }
    }

    /// The same route with every distance multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Route<T> {
        Route {
            name: self.name.clone(),
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    area_id: s.area_id.clone(),
                    distance_m: s.distance_m * factor,
                })
                .collect(),
        }
    }
}

/// A labelled place, in geographic coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub label: String,
    pub lat: f64,
    pub lon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area_id: Option<String>,
}

/// Alternative routes between two places at a departure hour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario<T> {
    pub name: String,
    pub hour: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Location>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub destination: Option<Location>,
    pub routes: Vec<Route<T>>,
}

impl<T: Scalar> Scenario<T> {
    pub fn validate(&self) -> Result<(), RoutingError> {
        let invalid = |reason: &str| RoutingError::InvalidScenario {
            scenario: self.name.clone(),
            reason: reason.to_string(),
        };
        if self.hour >= 24 {
            return Err(invalid("hour out of range"));
        }
        if self.routes.len() < 2 {
            return Err(invalid("needs at least two routes"));
        }
        for (i, r) in self.routes.iter().enumerate() {
            if self.routes[..i].iter().any(|o| o.name == r.name) {
                return Err(invalid("route names must be unique"));
            }
            r.validate()?;
        }
        Ok(())
    }
}

/// Sum of segment distance over segment speed at `hour`.
pub fn travel_time<T: Scalar>(
    route: &Route<T>,
    hour: u8,
    speed: impl Fn(&str, u8) -> Option<T>,
) -> Result<T, RoutingError> {
    timed(route, hour, None, |area| speed(area, hour))
}

fn timed<T: Scalar>(
    route: &Route<T>,
    hour: u8,
    blind_m: Option<T>,
    speed: impl Fn(&str) -> Option<T>,
) -> Result<T, RoutingError> {
    let mut total = T::zero();
    for s in &route.segments {
        let v = speed(&s.area_id).ok_or_else(|| RoutingError::MissingSpeed {
            area_id: s.area_id.clone(),
            hour,
            blind_m: blind_m.map(Scalar::as_f64),
        })?;
        if !(v > T::zero()) {
            return Err(RoutingError::NonPositiveSpeed {
                area_id: s.area_id.clone(),
                hour,
                speed_mps: v.as_f64(),
            });
        }
        total = total + s.distance_m / v;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvTime<T> {
    pub blind_m: T,
    pub seconds: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteTimes<T> {
    pub route: String,
    pub length_m: T,
    pub regular_s: T,
    pub av_s: Vec<AvTime<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FastestAv<T> {
    pub blind_m: T,
    pub route: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TravelReport<T> {
    pub scenario: String,
    pub hour: u8,
    pub routes: Vec<RouteTimes<T>>,
    pub fastest_regular: String,
    pub fastest_av: Vec<FastestAv<T>>,
    /// Blind distances at which the fastest AV route differs from the
    /// fastest regular route.
    pub inversion_blind_m: Vec<T>,
    pub inversion: bool,
}

/// Index of the smallest time; earlier routes win ties.
fn fastest<T: Scalar>(times: impl Iterator<Item = T>) -> usize {
    let mut best: Option<(usize, T)> = None;
    for (i, t) in times.enumerate() {
        if best.is_none_or(|(_, b)| t < b) {
            best = Some((i, t));
        }
    }
    best.map(|(i, _)| i).unwrap_or(0)
}

/// Compares the scenario's routes under regular speeds and under AV safe
/// speeds for every blind distance.
pub fn compare_routes<T: Scalar>(
    scenario: &Scenario<T>,
    regular: impl Fn(&str, u8) -> Option<T>,
    safe: impl Fn(&str, u8, T) -> Option<T>,
    blind_distances_m: &[T],
) -> Result<TravelReport<T>, RoutingError> {
    scenario.validate()?;
    let hour = scenario.hour;
    let mut routes = Vec::with_capacity(scenario.routes.len());
    for route in &scenario.routes {
        let regular_s = travel_time(route, hour, &regular)?;
        let av_s = blind_distances_m
            .iter()
            .map(|&blind_m| {
                timed(route, hour, Some(blind_m), |area| safe(area, hour, blind_m))
                    .map(|seconds| AvTime { blind_m, seconds })
            })
            .collect::<Result<Vec<_>, _>>()?;
        routes.push(RouteTimes {
            route: route.name.clone(),
            length_m: route.length_m(),
            regular_s,
            av_s,
        });
    }

    let fastest_regular = routes[fastest(routes.iter().map(|r| r.regular_s))].route.clone();
    let fastest_av: Vec<FastestAv<T>> = blind_distances_m
        .iter()
        .enumerate()
        .map(|(i, &blind_m)| FastestAv {
            blind_m,
            route: routes[fastest(routes.iter().map(|r| r.av_s[i].seconds))].route.clone(),
        })
        .collect();
    let inversion_blind_m: Vec<T> = fastest_av
        .iter()
        .filter(|f| f.route != fastest_regular)
        .map(|f| f.blind_m)
        .collect();
    Ok(TravelReport {
        scenario: scenario.name.clone(),
        hour,
        inversion: !inversion_blind_m.is_empty(),
        routes,
        fastest_regular,
        fastest_av,
        inversion_blind_m,
    })
}
