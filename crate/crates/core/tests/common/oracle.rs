//! Reference implementations used to check the library against independent
//! formulations of the same models.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use edgeav_core::scalar::{ceil_count, ceil_ms, floor_ms};
use edgeav_core::SearchParams;

/// `(deadline misses, max response ms, jobs completed)` of one simulation.
pub type Outcome = (u64, u64, u64);

/// Event-driven non-preemptive EDF on the most loaded core.
///
/// Jobs in flight sit in an arrival queue; once arrived they move to a
/// ready queue keyed by `(absolute deadline, vehicle)`. The core repeatedly
/// takes the ready job with the earliest deadline, or idles until the next
/// arrival when nothing is ready.
pub fn event_queue_sched(cores: u64, t: u64, e: u64, vehicles: u64, d: u64, w: u64) -> Outcome {
    let per_core = vehicles.div_ceil(cores);
    let mut in_flight: BinaryHeap<Reverse<(u64, u64, u64)>> = BinaryHeap::new();
    for v in 1..=per_core {
        in_flight.push(Reverse((t, v, 0)));
    }
    let mut ready: BinaryHeap<Reverse<(u64, u64, u64)>> = BinaryHeap::new();
    let (mut misses, mut r_max, mut done) = (0, 0, 0);
    let mut now = 0u64;
    loop {
        while let Some(&Reverse((arrive, v, offload))) = in_flight.peek() {
            if arrive > now {
                break;
            }
            in_flight.pop();
            ready.push(Reverse((offload + d, v, offload)));
        }
        let Some(Reverse((deadline, v, offload))) = ready.pop() else {
            match in_flight.peek() {
                Some(&Reverse((arrive, _, _))) if arrive < w => {
                    now = arrive;
                    continue;
                }
                _ => break,
            }
        };
        if now + e > w {
            break;
        }
        let finish = now + e;
        if finish > deadline {
            misses += 1;
        }
        r_max = r_max.max(finish - offload);
        done += 1;
        in_flight.push(Reverse((finish + t, v, finish)));
        now = finish;
    }
    (misses, r_max, done)
}

/// Alg. 2 transcribed line by line: a clock advanced one millisecond at a
/// time, with a job list scanned for the earliest deadline among arrived
/// jobs.
pub fn stepping_sched(cores: u64, t: u64, e: u64, vehicles: u64, d: u64, w: u64) -> Outcome {
    let per_core = vehicles.div_ceil(cores) as usize;
    let mut offload = vec![0u64; per_core];
    let (mut misses, mut r_max, mut done) = (0, 0, 0);
    let mut k = 0u64;
    while k < w {
        let chosen = (0..per_core)
            .filter(|&i| offload[i] + t <= k)
            .min_by_key(|&i| (offload[i] + d, i));
        match chosen {
            Some(i) if k + e <= w => {
                let finish = k + e;
                let response = finish - offload[i];
                if response > d {
                    misses += 1;
                }
                r_max = r_max.max(response);
                done += 1;
                offload[i] = finish;
                k = finish;
            }
            Some(_) => break,
            None => k += 1,
        }
    }
    (misses, r_max, done)
}

/// Result of the literal configuration search.
#[derive(Debug, Clone, PartialEq)]
pub enum LiteralSearch {
    Found {
        capacity_bps: f64,
        cores: u64,
        step: u64,
        /// Every `(capacity step, cores, misses)` probed, in order.
        visited: Vec<(u64, u64, u64)>,
    },
    /// Even an instantaneous transfer leaves misses after the core sweep.
    Stalled,
    /// The step cap was hit before a decision.
    GaveUp,
}

/// Alg. 1 without shortcuts: every capacity step runs the full core sweep.
/// Simulations are memoized on `(cores, transfer ms)`, which does not change
/// the sequence of probed points.
pub fn literal_search(p: &SearchParams, max_steps: u64) -> LiteralSearch {
    let vehicles = ceil_count(p.vehicles);
    let deadline = p.blind_m / p.speed_mps;
    let b0 = p.data_size_bits * vehicles as f64 / (deadline - p.eta * p.exec_time_s);
    let d = floor_ms(deadline);
    let e = ceil_ms(p.exec_time_s).max(1);
    let w = floor_ms(p.working_period_s);
    let mut memo: HashMap<(u64, u64), Outcome> = HashMap::new();
    let mut sim = |cores: u64, t: u64| *memo.entry((cores, t)).or_insert_with(|| event_queue_sched(cores, t, e, vehicles, d, w));

    let sweep = |sim: &mut dyn FnMut(u64, u64) -> Outcome, t: u64, visited: &mut Vec<(u64, u64, u64)>, step: u64| {
        let mut c = 1;
        let mut r_prev = 0.0;
        loop {
            let (misses, r, _) = sim(c, t);
            visited.push((step, c, misses));
            let r = r as f64;
            let variation = if r > 0.0 { (r_prev - r).abs() / r } else { p.variation_sentinel };
            r_prev = r;
            if misses == 0 {
                return Some(c);
            }
            if variation <= p.epsilon {
                return None;
            }
            c += p.core_step;
        }
    };

    if sweep(&mut sim, 0, &mut Vec::new(), 0).is_none() {
        return LiteralSearch::Stalled;
    }
    let mut visited = Vec::new();
    for step in 0..max_steps {
        let capacity = b0 + step as f64 * p.capacity_step_bps;
        let t = ceil_ms(p.data_size_bits * vehicles as f64 / capacity);
        if let Some(cores) = sweep(&mut sim, t, &mut visited, step) {
            return LiteralSearch::Found {
                capacity_bps: capacity,
                cores,
                step,
                visited,
            };
        }
    }
    LiteralSearch::GaveUp
}
