//! Experiment parameters with their reference defaults.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Model and search parameters. All quantities are SI: bits, seconds,
/// meters, bits per second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams<T> {
    /// Blind distances `L` to evaluate, meters.
    pub blind_distances_m: Vec<T>,
    /// Data size of one offloaded job `D`, bits.
    pub data_size_bits: T,
    /// Worst-case execution time of one job at the edge `E`, seconds.
    pub exec_time_s: T,
    /// Channel capacity increment `Δb`, bits per second.
    pub capacity_step_bps: T,
    /// Logical core increment `Δc`.
    pub core_step: u64,
    /// Working period `W` of one simulation, seconds.
    pub working_period_s: T,
    /// Queuing-delay factor `η` applied to the execution time.
    pub eta: T,
    /// Response-time variation threshold `ε`.
    pub epsilon: T,
    /// Initial value of the deadline-miss counter (`M`).
    pub miss_sentinel: u64,
    /// Initial value of the response-time variation (`N`); also used when
    /// no job completes.
    pub variation_sentinel: T,
    /// Hard cap on scheduler simulations per configuration search.
    pub max_sched_calls: u64,
}

impl<T: Scalar> Default for ModelParams<T> {
    fn default() -> Self {
        Self {
            blind_distances_m: [2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 16.0, 20.0]
                .into_iter()
                .map(T::lit)
                .collect(),
            data_size_bits: T::lit(1.8e6),
            exec_time_s: T::lit(0.016),
            capacity_step_bps: T::lit(2e6),
            core_step: 5,
            working_period_s: T::lit(60.0),
            eta: T::lit(2.0),
            epsilon: T::lit(0.005),
            miss_sentinel: 100,
            variation_sentinel: T::lit(100.0),
            max_sched_calls: 1_000_000,
        }
    }
}
