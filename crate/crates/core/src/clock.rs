//! The virtual operation clock.
//!
//! All algorithms run on a uniform-cost model: one hash probe, one list
//! pointer advance, one comparison or one emission each costs exactly one
//! tick. Delay is the largest tick gap between consecutive emissions,
//! including the time to the first emission and from the last emission to
//! termination.

use alloc::vec::Vec;

/// Monotone tick counter with a log of emission times.
#[derive(Debug, Clone, Default)]
pub struct OpClock {
    ticks: u64,
    emission_log: Vec<u64>,
}

impl OpClock {
    pub fn new() -> Self {
        OpClock::default()
    }

    pub fn now(&self) -> u64 {
        self.ticks
    }

    pub fn charge(&mut self, n: u64) {
        self.ticks += n;
    }

    /// Record an emission at the current tick.
    pub fn log_emission(&mut self) {
        debug_assert!(
            self.emission_log.last().is_none_or(|&t| t < self.ticks),
            "emission log must be strictly increasing"
        );
        self.emission_log.push(self.ticks);
    }

    pub fn emission_log(&self) -> &[u64] {
        &self.emission_log
    }
}

/// Delay measurement over one enumerator run.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayReport {
    /// Largest gap, including time to first emission and to termination.
    pub max_gap: u64,
    /// Average over the same gap sequence.
    pub mean_gap: f64,
    /// Number of tuples emitted.
    pub emissions: u64,
    /// Total ticks from start of the run to termination.
    pub total_ticks: u64,
}

impl DelayReport {
    /// Build from the emission times of one run spanning `[start, end]`.
    pub fn from_emissions(start: u64, end: u64, emissions: &[u64]) -> DelayReport {
        let total_ticks = end - start;
        if emissions.is_empty() {
            return DelayReport {
                max_gap: total_ticks,
                mean_gap: total_ticks as f64,
                emissions: 0,
                total_ticks,
            };
        }
        let mut max_gap = 0u64;
        let mut prev = start;
        for &t in emissions {
            max_gap = max_gap.max(t - prev);
            prev = t;
        }
        max_gap = max_gap.max(end - prev);
        // Gap count is emissions + 1: first, in-between, and termination.
        let mean_gap = total_ticks as f64 / (emissions.len() as f64 + 1.0);
        DelayReport {
            max_gap,
            mean_gap,
            emissions: emissions.len() as u64,
            total_ticks,
        }
    }
}
