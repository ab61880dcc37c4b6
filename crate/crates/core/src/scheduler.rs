//! Non-preemptive EDF processing of periodic offloads on the most heavily
//! loaded logical core of an edge server.
//!
//! Time is discrete with a 1 ms quantum. `V` vehicles are balanced over `c`
//! cores and only the busiest core, serving `⌈V/c⌉` vehicles, is simulated.
//! Every vehicle offloads its first job at time 0; a job offloaded at `o`
//! reaches the server at `o + t` and must finish by `o + d`. Whenever the
//! core is free it starts the arrived job with the earliest absolute
//! deadline (lowest vehicle index on ties) and runs it for `E` ms. A vehicle
//! offloads its next job the instant the previous one finishes. The run
//! ends once the clock reaches `W`, or when a job would start after
//! `W - E`.

use std::collections::VecDeque;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchedError {
    #[error("core count must be at least 1")]
    NoCores,
    #[error("vehicle count must be at least 1")]
    NoVehicles,
    #[error("execution time must be at least 1 ms")]
    ZeroExecution,
    #[error("relative deadline must be at least 1 ms")]
    ZeroDeadline,
    #[error("working period ({working_period_ms} ms) shorter than execution time ({exec_ms} ms)")]
    PeriodShorterThanJob { working_period_ms: u64, exec_ms: u64 },
}

/// Inputs of one simulation, all times in integer milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchedParams {
    cores: u64,
    transfer_ms: u64,
    exec_ms: u64,
    vehicles: u64,
    deadline_ms: u64,
    working_period_ms: u64,
}

impl SchedParams {
    pub fn new(
        cores: u64,
        transfer_ms: u64,
        exec_ms: u64,
        vehicles: u64,
        deadline_ms: u64,
        working_period_ms: u64,
    ) -> Result<Self, SchedError> {
        if cores == 0 {
            return Err(SchedError::NoCores);
        }
        if vehicles == 0 {
            return Err(SchedError::NoVehicles);
        }
        if exec_ms == 0 {
            return Err(SchedError::ZeroExecution);
        }
        if deadline_ms == 0 {
            return Err(SchedError::ZeroDeadline);
        }
        if working_period_ms < exec_ms {
            return Err(SchedError::PeriodShorterThanJob {
                working_period_ms,
                exec_ms,
            });
        }
        Ok(Self {
            cores,
            transfer_ms,
            exec_ms,
            vehicles,
            deadline_ms,
            working_period_ms,
        })
    }

    pub fn cores(&self) -> u64 {
        self.cores
    }

    pub fn transfer_ms(&self) -> u64 {
        self.transfer_ms
    }

    pub fn exec_ms(&self) -> u64 {
        self.exec_ms
    }

    pub fn vehicles(&self) -> u64 {
        self.vehicles
    }

    pub fn deadline_ms(&self) -> u64 {
        self.deadline_ms
    }

    pub fn working_period_ms(&self) -> u64 {
        self.working_period_ms
    }

    /// Vehicles served by the most loaded core, `⌈V/c⌉`.
    pub fn vehicles_per_core(&self) -> u64 {
        self.vehicles.div_ceil(self.cores)
    }

    pub fn with_cores(self, cores: u64) -> Result<Self, SchedError> {
        Self::new(
            cores,
            self.transfer_ms,
            self.exec_ms,
            self.vehicles,
            self.deadline_ms,
            self.working_period_ms,
        )
    }

    pub fn with_transfer_ms(self, transfer_ms: u64) -> Self {
        Self {
            transfer_ms,
            ..self
        }
    }

    pub fn with_deadline_ms(self, deadline_ms: u64) -> Result<Self, SchedError> {
        Self::new(
            self.cores,
            self.transfer_ms,
            self.exec_ms,
            self.vehicles,
            deadline_ms,
            self.working_period_ms,
        )
    }
}

/// Result of one simulation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchedOutcome {
    pub deadline_misses: u64,
    pub max_response_ms: u64,
    pub jobs_completed: u64,
}

/// One processed job, as written by the debug event log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobRecord {
    /// 1-based index of the vehicle on the simulated core.
    pub vehicle: u64,
    pub offload_ms: u64,
    pub arrive_ms: u64,
    pub start_ms: u64,
    pub finish_ms: u64,
    pub deadline_ms: u64,
    pub missed: bool,
}

impl JobRecord {
    pub fn response_ms(&self) -> u64 {
        self.finish_ms - self.offload_ms
    }
}

pub fn sched(params: &SchedParams) -> SchedOutcome {
    sched_traced(params, |_| {})
}

/// Runs the simulation, handing every completed job to `on_job` in
/// completion order.
pub fn sched_traced(params: &SchedParams, mut on_job: impl FnMut(&JobRecord)) -> SchedOutcome {
    let t = params.transfer_ms;
    let e = params.exec_ms;
    let d = params.deadline_ms;
    let w = params.working_period_ms;

    // Pending jobs keyed by offload time. Arrival and absolute deadline are
    // both the offload time plus a constant, so the queue ordered by
    // (offload, vehicle) is simultaneously in arrival and EDF order. A
    // re-offload happens at the current finish time, which is later than
    // every pending offload, so pushing to the back keeps the order.
    let mut pending: VecDeque<(u64, u64)> = (1..=params.vehicles_per_core()).map(|v| (0, v)).collect();

    let mut outcome = SchedOutcome::default();
    let mut k = 0u64;
    while k < w {
        let (offload, vehicle) = *pending.front().expect("at least one vehicle per core");
        let arrive = offload + t;
        if arrive > k {
            // Nothing has arrived; the clock ticks forward until the head
            // job shows up.
            k = arrive;
            continue;
        }
        let start = k;
        if start + e > w {
            break;
        }
        let finish = start + e;
        k = finish;
        let deadline = offload + d;
        let missed = finish > deadline;
        if missed {
            outcome.deadline_misses += 1;
        }
        outcome.max_response_ms = outcome.max_response_ms.max(finish - offload);
        outcome.jobs_completed += 1;
        on_job(&JobRecord {
            vehicle,
            offload_ms: offload,
            arrive_ms: arrive,
            start_ms: start,
            finish_ms: finish,
            deadline_ms: deadline,
            missed,
        });
        pending.pop_front();
        pending.push_back((finish, vehicle));
    }
    outcome
}

/// Runs the simulation and returns every job alongside the outcome.
pub fn sched_log(params: &SchedParams) -> (SchedOutcome, Vec<JobRecord>) {
    let mut jobs = Vec::new();
    let outcome = sched_traced(params, |job| jobs.push(*job));
    (outcome, jobs)
}

pub const JOB_LOG_HEADER: [&str; 7] = [
    "vehicle",
    "offload_ms",
    "arrive_ms",
    "start_ms",
    "finish_ms",
    "deadline_ms",
    "missed",
];

/// Writes the per-job event log as CSV.
pub fn write_job_log<W: Write>(out: W, jobs: &[JobRecord]) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(JOB_LOG_HEADER)?;
    for job in jobs {
        writer.write_record([
            job.vehicle.to_string(),
            job.offload_ms.to_string(),
            job.arrive_ms.to_string(),
            job.start_ms.to_string(),
            job.finish_ms.to_string(),
            job.deadline_ms.to_string(),
            job.missed.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
