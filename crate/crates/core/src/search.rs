//! Minimum edge configuration search.
//!
//! Starting from the channel capacity that lets every vehicle upload within
//! the deadline left after `η·E` of processing slack, the search probes the
//! scheduler with a growing number of logical cores. When adding cores stops
//! changing the worst response time by more than `ε`, the capacity is bumped
//! by `Δb` and the core sweep restarts from one core. The first
//! configuration with no deadline misses is returned.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::ModelParams;
use crate::scalar::{ceil_count, ceil_ms, floor_ms, Scalar};
use crate::scheduler::{sched, SchedError, SchedOutcome, SchedParams};

#[derive(Debug, Error, PartialEq)]
pub enum SearchError {
    #[error("speed must be positive, got {speed_mps} m/s")]
    NonPositiveSpeed { speed_mps: f64 },
    #[error("invalid search parameter: {0}")]
    InvalidParams(String),
    /// `L/S ≤ ηE`: no capacity can deliver a job in time. Feasibility
    /// returns below `max_speed_mps` at this blind distance, or above
    /// `min_blind_m` at this speed.
    #[error(
        "deadline {deadline_s} s leaves no transfer time after queuing slack; \
         need speed < {max_speed_mps} m/s or blind distance > {min_blind_m} m"
    )]
    Infeasible {
        deadline_s: f64,
        max_speed_mps: f64,
        min_blind_m: f64,
    },
    #[error("transfer time {transfer_ms} ms plus execution leaves no job inside the {working_period_ms} ms working period")]
    WorkingPeriodTooShort {
        transfer_ms: u64,
        working_period_ms: u64,
    },
    #[error("search budget of {budget} scheduler calls exhausted")]
    BudgetExceeded { budget: u64 },
    /// The core sweep stops at `cores` before the per-core load fits the
    /// deadline, and the transfer time cannot shrink any further, so no
    /// capacity increment can ever remove the misses.
    #[error("search cannot terminate: core sweep stalls at {cores} cores with misses even at {transfer_ms} ms transfer time")]
    Stalled { cores: u64, transfer_ms: u64 },
    #[error("returned configuration failed re-simulation: {0:?}")]
    Unsound(SchedOutcome),
    #[error(transparent)]
    Sched(#[from] SchedError),
}

/// Inputs of one configuration search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchParams<T> {
    pub blind_m: T,
    /// Average vehicle count; rounded up before simulation.
    pub vehicles: T,
    pub speed_mps: T,
    pub data_size_bits: T,
    pub exec_time_s: T,
    pub working_period_s: T,
    pub eta: T,
    pub capacity_step_bps: T,
    pub core_step: u64,
    pub epsilon: T,
    pub miss_sentinel: u64,
    pub variation_sentinel: T,
    pub max_sched_calls: u64,
}

impl<T: Scalar> SearchParams<T> {
    pub fn from_model(model: &ModelParams<T>, blind_m: T, vehicles: T, speed_mps: T) -> Self {
        Self {
            blind_m,
            vehicles,
            speed_mps,
            data_size_bits: model.data_size_bits,
            exec_time_s: model.exec_time_s,
            working_period_s: model.working_period_s,
            eta: model.eta,
            capacity_step_bps: model.capacity_step_bps,
            core_step: model.core_step,
            epsilon: model.epsilon,
            miss_sentinel: model.miss_sentinel,
            variation_sentinel: model.variation_sentinel,
            max_sched_calls: model.max_sched_calls,
        }
    }

    fn validate(&self) -> Result<(), SearchError> {
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(SearchError::InvalidParams(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("blind distance", self.blind_m)?;
        positive("data size", self.data_size_bits)?;
        positive("execution time", self.exec_time_s)?;
        positive("working period", self.working_period_s)?;
        positive("capacity increment", self.capacity_step_bps)?;
        positive("epsilon", self.epsilon)?;
        positive("vehicle count", self.vehicles)?;
        if !(self.eta >= T::one()) {
            return Err(SearchError::InvalidParams(format!("eta must be at least 1, got {}", self.eta)));
        }
        if self.core_step == 0 {
            return Err(SearchError::InvalidParams("core increment must be at least 1".into()));
        }
        if self.miss_sentinel == 0 {
            return Err(SearchError::InvalidParams("miss sentinel must be positive".into()));
        }
        Ok(())
    }
}

/// A channel capacity and logical core count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeConfig<T> {
    pub capacity_bps: T,
    pub cores: u64,
}

/// A configuration found by [`configuration_search`] plus bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome<T> {
    pub config: EdgeConfig<T>,
    /// Scheduler simulations actually executed.
    pub sched_calls: u64,
    /// Outcome of re-simulating the returned configuration.
    pub verified: SchedOutcome,
}

/// Relative deadline `d = L/S`, seconds.
pub fn relative_deadline<T: Scalar>(blind_m: T, speed_mps: T) -> Result<T, SearchError> {
    if !(speed_mps > T::zero()) {
        return Err(SearchError::NonPositiveSpeed {
            speed_mps: speed_mps.as_f64(),
        });
    }
    Ok(blind_m / speed_mps)
}

/// Capacity `D·V / (L/S − ηE)` that lets `V` uploads of `D` bits share the
/// channel and still leave `ηE` of the deadline for processing.
pub fn initial_capacity<T: Scalar>(
    data_size_bits: T,
    vehicles: T,
    blind_m: T,
    speed_mps: T,
    eta: T,
    exec_time_s: T,
) -> Result<T, SearchError> {
    let deadline = relative_deadline(blind_m, speed_mps)?;
    let slack = eta * exec_time_s;
    let max_transfer = deadline - slack;
    if !(max_transfer > T::zero()) {
        return Err(SearchError::Infeasible {
            deadline_s: deadline.as_f64(),
            max_speed_mps: (blind_m / slack).as_f64(),
            min_blind_m: (slack * speed_mps).as_f64(),
        });
    }
    Ok(data_size_bits * vehicles / max_transfer)
}

/// Scheduler inputs that stay fixed for the whole search.
struct Probe {
    vehicles: u64,
    exec_ms: u64,
    deadline_ms: u64,
    working_period_ms: u64,
}

impl Probe {
    fn params(&self, cores: u64, transfer_ms: u64) -> Result<SchedParams, SchedError> {
        SchedParams::new(
            cores,
            transfer_ms,
            self.exec_ms,
            self.vehicles,
            self.deadline_ms,
            self.working_period_ms,
        )
    }
}

/// Finds the first capacity/core pair on the `(b0 + nΔb, 1 + mΔc)` lattice,
/// in search order, with zero deadline misses.
pub fn configuration_search<T: Scalar>(p: &SearchParams<T>) -> Result<SearchOutcome<T>, SearchError> {
    p.validate()?;
    let vehicles = ceil_count(p.vehicles);
    let load_bits = p.data_size_bits * T::from_count(vehicles);
    let deadline = relative_deadline(p.blind_m, p.speed_mps)?;
    let base_capacity = initial_capacity(
        p.data_size_bits,
        T::from_count(vehicles),
        p.blind_m,
        p.speed_mps,
        p.eta,
        p.exec_time_s,
    )?;
    let probe = Probe {
        vehicles,
        exec_ms: ceil_ms(p.exec_time_s).max(1),
        deadline_ms: floor_ms(deadline),
        working_period_ms: floor_ms(p.working_period_s),
    };
    let transfer_at = |step: u64| ceil_ms(load_bits / (base_capacity + T::from_count(step) * p.capacity_step_bps));

    let mut misses = p.miss_sentinel;
    let mut calls = 0u64;
    let mut step = 0u64;
    let mut cores = 1u64;
    while misses > 0 {
        let transfer_ms = transfer_at(step);
        if transfer_ms + probe.exec_ms > probe.working_period_ms {
            return Err(SearchError::WorkingPeriodTooShort {
                transfer_ms,
                working_period_ms: probe.working_period_ms,
            });
        }
        cores = 1;
        let mut max_response = T::zero();
        let mut variation = p.variation_sentinel;
        while misses > 0 && variation > p.epsilon {
            if calls >= p.max_sched_calls {
                return Err(SearchError::BudgetExceeded {
                    budget: p.max_sched_calls,
                });
            }
            let outcome = sched(&probe.params(cores, transfer_ms)?);
            calls += 1;
            misses = outcome.deadline_misses;
            let response = T::from_count(outcome.max_response_ms);
            variation = if response > T::zero() {
                ((max_response - response) / response).abs()
            } else {
                p.variation_sentinel
            };
            max_response = response;
            if misses > 0 && variation > p.epsilon {
                cores += p.core_step;
            }
        }
        if misses > 0 {
            // The core sweep depends on the capacity only through the
            // rounded transfer time, so every capacity step that keeps it
            // unchanged would replay the same sweep. Jump to the first step
            // that shortens it.
            step = next_shorter_transfer(step, transfer_ms, &transfer_at)
                .ok_or(SearchError::Stalled { cores, transfer_ms })?;
        }
    }

    let config = EdgeConfig {
        capacity_bps: base_capacity + T::from_count(step) * p.capacity_step_bps,
        cores,
    };
    let verified = sched(&probe.params(cores, transfer_at(step))?);
    if verified.deadline_misses > 0 {
        return Err(SearchError::Unsound(verified));
    }
    Ok(SearchOutcome {
        config,
        sched_calls: calls,
        verified,
    })
}

/// Smallest step after `step` whose transfer time is below `transfer_ms`.
/// `None` when the transfer time cannot shrink any further.
fn next_shorter_transfer(step: u64, transfer_ms: u64, transfer_at: &impl Fn(u64) -> u64) -> Option<u64> {
    if transfer_ms == 0 {
        return None;
    }
    // Exponential probe then bisection; transfer time is non-increasing in
    // the step.
    let mut hi = step + 1;
    let mut span = 1u64;
    while transfer_at(hi) >= transfer_ms {
        span = span.checked_mul(2)?;
        hi = step.checked_add(span)?;
        if hi == u64::MAX {
            return None;
        }
    }
    let mut lo = step;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if transfer_at(mid) < transfer_ms {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}
