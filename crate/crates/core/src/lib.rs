//! Edge resource provisioning for edge-assisted autonomous vehicles.
//!
//! The crate turns vehicular mobility traces into hourly per-area demand,
//! searches the smallest channel capacity and logical core count that keep
//! every offloaded job within its blind-distance deadline under
//! non-preemptive EDF, derives peak and average deployments, and measures
//! the resulting AV safe speeds and route travel times.
//!
//! Real-valued analysis is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`, which is what the file formats use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ingest;
pub mod params;
pub mod provisioning;
pub mod routing;
pub mod scalar;
pub mod scheduler;
pub mod search;
pub mod units;

pub use scalar::Scalar;
pub use scheduler::{sched, SchedOutcome, SchedParams};

pub type ModelParams = params::ModelParams<f64>;
pub type SearchParams = search::SearchParams<f64>;
pub type EdgeConfig = search::EdgeConfig<f64>;
pub type SearchOutcome = search::SearchOutcome<f64>;
pub type HourlyConfig = provisioning::HourlyConfig<f64>;
pub type HourlyConfigTable = provisioning::HourlyConfigTable<f64>;
pub type DeployedConfig = provisioning::DeployedConfig<f64>;
pub type SafeSpeed = provisioning::SafeSpeed<f64>;
pub type Route = routing::Route<f64>;
pub type Segment = routing::Segment<f64>;
pub type Scenario = routing::Scenario<f64>;
pub type TravelReport = routing::TravelReport<f64>;
