//! Single-server FIFO queue driven by Lindley's recursion.
//!
//! Indexing: ancilla 1 arrives at time zero and `T[n]` is the gap between
//! arrivals `n` and `n + 1`, so every interarrival time is a fresh draw.

use alloc::vec::Vec;

use crate::distributions::DistributionSpec;
use crate::error::{invalid, Result};
use crate::rng::RngStream;

/// One Lindley update: returns `(W_{n+1}, I_{n+1})` from `(W_n, S_n, T_n)`.
pub fn lindley_step(w_prev: f64, s_prev: f64, t_prev: f64) -> Result<(f64, f64)> {
    if !(w_prev >= 0.0 && s_prev >= 0.0 && t_prev >= 0.0) {
        return Err(invalid("lindley_step inputs must be nonnegative"));
    }
    Ok(lindley_step_unchecked(w_prev, s_prev, t_prev))
}

#[inline]
fn lindley_step_unchecked(w_prev: f64, s_prev: f64, t_prev: f64) -> (f64, f64) {
    let x = w_prev + s_prev - t_prev;
    if x > 0.0 {
        (x, 0.0)
    } else {
        (0.0, -x)
    }
}

/// Per-ancilla timing record. Index 0 holds ancilla 1.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QueueTrace {
    /// Interarrival time to the next ancilla.
    pub interarrival: Vec<f64>,
    pub service: Vec<f64>,
    /// Waiting time in the queue, `W^q`.
    pub waiting: Vec<f64>,
    /// Server idle time before this service.
    pub idle: Vec<f64>,
    pub arrival: Vec<f64>,
    pub departure: Vec<f64>,
}

impl QueueTrace {
    /// Builds a trace from interarrival and service times.
    pub fn from_times(interarrival: Vec<f64>, service: Vec<f64>) -> Result<Self> {
        if interarrival.len() != service.len() || service.is_empty() {
            return Err(invalid("trace needs equal, nonzero numbers of T and S"));
        }
        if interarrival
            .iter()
            .chain(&service)
            .any(|x| !(x.is_finite() && *x >= 0.0))
        {
            return Err(invalid("times must be finite and nonnegative"));
        }
        let n = service.len();
        let mut waiting = Vec::with_capacity(n);
        let mut idle = Vec::with_capacity(n);
        let mut arrival = Vec::with_capacity(n);
        let mut departure = Vec::with_capacity(n);
        let (mut w, mut i, mut t) = (0.0, 0.0, 0.0);
        for k in 0..n {
            if k > 0 {
                (w, i) = lindley_step_unchecked(w, service[k - 1], interarrival[k - 1]);
                t += interarrival[k - 1];
            }
            waiting.push(w);
            idle.push(i);
            arrival.push(t);
            departure.push(t + w + service[k]);
        }
        Ok(QueueTrace {
            interarrival,
            service,
            waiting,
            idle,
            arrival,
            departure,
        })
    }

    pub fn len(&self) -> usize {
        self.service.len()
    }

    pub fn is_empty(&self) -> bool {
        self.service.is_empty()
    }

    /// Number in system N(t) as a right-continuous step function: the
    /// returned `(time, count)` breakpoints hold from `time` until the next
    /// breakpoint. Starts at `(0, _)`.
    pub fn queue_length(&self) -> Vec<(f64, usize)> {
        let mut events: Vec<(f64, i64)> = self
            .arrival
            .iter()
            .map(|&t| (t, 1))
            .chain(self.departure.iter().map(|&s| (s, -1)))
            .collect();
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, usize)> = Vec::with_capacity(events.len() + 1);
        let mut count: i64 = 0;
        if events.first().is_none_or(|e| e.0 > 0.0) {
            out.push((0.0, 0));
        }
        let mut k = 0;
        while k < events.len() {
            let t = events[k].0;
            while k < events.len() && events[k].0 == t {
                count += events[k].1;
                k += 1;
            }
            debug_assert!(count >= 0);
            out.push((t, count as usize));
        }
        out
    }
}

/// Simulates `n_ancillas` customers, drawing `T_n` then `S_n` for each.
pub fn simulate_queue(
    arrival: &DistributionSpec,
    service: &DistributionSpec,
    n_ancillas: usize,
    stream: &mut RngStream,
) -> Result<QueueTrace> {
    arrival.validate()?;
    service.validate()?;
    if n_ancillas == 0 {
        return Err(invalid("n_ancillas must be >= 1"));
    }
    let mut t = Vec::with_capacity(n_ancillas);
    let mut s = Vec::with_capacity(n_ancillas);
    for _ in 0..n_ancillas {
        t.push(arrival.sample(stream));
        s.push(service.sample(stream));
    }
    QueueTrace::from_times(t, s)
}

/// r = E(S)/E(T) = λ/μ.
pub fn utilization(arrival: &DistributionSpec, service: &DistributionSpec) -> Result<f64> {
    let m = arrival.mean();
    if !(m > 0.0) {
        return Err(invalid("mean interarrival time must be > 0"));
    }
    Ok(service.mean() / m)
}

/// Streaming Lindley recursion for long runs that should not be stored.
/// Yields `(W_n, I_n)` for n = 1, 2, ... with the same draw order as
/// [`simulate_queue`].
#[derive(Debug, Clone)]
pub struct LindleyWalk {
    arrival: DistributionSpec,
    service: DistributionSpec,
    stream: RngStream,
    state: Option<(f64, f64)>,
    pending: (f64, f64),
}

impl LindleyWalk {
    pub fn new(arrival: DistributionSpec, service: DistributionSpec, stream: RngStream) -> Result<Self> {
        arrival.validate()?;
        service.validate()?;
        Ok(LindleyWalk {
            arrival,
            service,
            stream,
            state: None,
            pending: (0.0, 0.0),
        })
    }
}

impl Iterator for LindleyWalk {
    type Item = (f64, f64);

    fn next(&mut self) -> Option<(f64, f64)> {
        let (w, i) = match self.state {
            None => (0.0, 0.0),
            Some((w, _)) => lindley_step_unchecked(w, self.pending.1, self.pending.0),
        };
        let t = self.arrival.sample(&mut self.stream);
        let s = self.service.sample(&mut self.stream);
        self.pending = (t, s);
        self.state = Some((w, i));
        Some((w, i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lindley_step_examples() {
        assert_eq!(lindley_step(0.0, 2.0, 1.0).unwrap(), (1.0, 0.0));
        assert_eq!(lindley_step(0.0, 0.5, 1.0).unwrap(), (0.0, 0.5));
        assert_eq!(lindley_step(3.0, 1.0, 5.0).unwrap(), (0.0, 1.0));
        assert!(lindley_step(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn deterministic_fast_service_idles() {
        let a = DistributionSpec::deterministic(1.0).unwrap();
        let s = DistributionSpec::deterministic(0.5).unwrap();
        let tr = simulate_queue(&a, &s, 5, &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(tr.waiting, [0.0; 5]);
        assert_eq!(tr.idle, [0.0, 0.5, 0.5, 0.5, 0.5]);
        assert_eq!(tr.arrival, [0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn deterministic_slow_service_waits() {
        let a = DistributionSpec::deterministic(1.0).unwrap();
        let s = DistributionSpec::deterministic(2.0).unwrap();
        let tr = simulate_queue(&a, &s, 4, &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(tr.waiting, [0.0, 1.0, 2.0, 3.0]);
        assert_eq!(tr.idle, [0.0; 4]);
        assert_eq!(tr.departure, [2.0, 4.0, 6.0, 8.0]);
    }

    #[test]
    fn utilization_examples() {
        let e = |r| DistributionSpec::exponential(r).unwrap();
        let d1 = DistributionSpec::deterministic(1.0).unwrap();
        assert!((utilization(&e(0.5), &e(1.0)).unwrap() - 0.5).abs() < 1e-15);
        assert!((utilization(&e(1.0), &d1).unwrap() - 1.0).abs() < 1e-15);
        assert!((utilization(&e(1.2), &d1).unwrap() - 1.2).abs() < 1e-12);
        let d0 = DistributionSpec::deterministic(0.0).unwrap();
        assert!(utilization(&d0, &d1).is_err());
    }

    #[test]
    fn queue_length_single_ancilla() {
        let tr = QueueTrace::from_times(alloc::vec![0.0], alloc::vec![1.0]).unwrap();
        assert_eq!(tr.queue_length(), [(0.0, 1), (1.0, 0)]);
    }

    #[test]
    fn queue_length_before_first_departure() {
        let tr = QueueTrace::from_times(alloc::vec![1.0; 3], alloc::vec![2.0; 3]).unwrap();
        let steps = tr.queue_length();
        // value on [1, 2)
        let before = steps.iter().rev().find(|(t, _)| *t < 2.0).unwrap();
        assert_eq!(before.1, 2);
        assert_eq!(steps.last().unwrap(), &(6.0, 0));
    }

    #[test]
    fn walk_matches_stored_trace() {
        let a = DistributionSpec::exponential(0.7).unwrap();
        let s = DistributionSpec::exponential(1.0).unwrap();
        let tr = simulate_queue(&a, &s, 500, &mut RngStream::new(9, 3)).unwrap();
        let walk: Vec<(f64, f64)> = LindleyWalk::new(a, s, RngStream::new(9, 3))
            .unwrap()
            .take(500)
            .collect();
        for (k, (w, i)) in walk.into_iter().enumerate() {
            assert_eq!(w, tr.waiting[k]);
            assert_eq!(i, tr.idle[k]);
        }
    }
}
