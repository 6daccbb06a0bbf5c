//! Kernel timing.
//!
//! A kernel is timed by reading the clock, running the work, synchronizing
//! the backend and reading the clock again, so no in-flight work escapes the
//! measurement. Times accumulate per category inside a [`KernelTimer`].

use std::sync::{Arc, Mutex};
use std::time::Instant;

use crate::portability::Backend;

/// Source of monotonic time in seconds.
pub trait Clock: Send + Sync {
    fn now(&self) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub struct MonotonicClock {
    origin: Instant,
}

impl MonotonicClock {
    pub fn new() -> Self {
        Self {
            origin: Instant::now(),
        }
    }
}

impl Default for MonotonicClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for MonotonicClock {
    fn now(&self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }
}

/// Deterministic clock that advances by a fixed tick on every read.
///
/// Every timed kernel then measures exactly one tick, which makes category
/// totals equal to `tick * number of timed kernels`.
#[derive(Debug)]
pub struct TickClock {
    tick: f64,
    now: Mutex<f64>,
}

impl TickClock {
    pub fn new(tick: f64) -> Self {
        Self {
            tick,
            now: Mutex::new(0.0),
        }
    }

    pub fn reads(&self) -> f64 {
        *self.now.lock().unwrap() / self.tick
    }
}

impl Clock for TickClock {
    fn now(&self) -> f64 {
        let mut now = self.now.lock().unwrap();
        *now += self.tick;
        *now
    }
}

/// Runs `work`, synchronizes `backend` and returns the result with the
/// elapsed seconds.
pub fn time_kernel<R>(clock: &dyn Clock, backend: &Backend, work: impl FnOnce() -> R) -> (R, f64) {
    let start = clock.now();
    let out = work();
    backend.synchronize();
    let stop = clock.now();
    (out, (stop - start).max(0.0))
}

/// Per-category accumulated kernel times for one rank and repetition.
pub struct KernelTimer {
    clock: Arc<dyn Clock>,
    totals: Vec<(String, f64)>,
}

impl std::fmt::Debug for KernelTimer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelTimer")
            .field("totals", &self.totals)
            .finish()
    }
}

impl Default for KernelTimer {
    fn default() -> Self {
        Self::new(Arc::new(MonotonicClock::new()))
    }
}

impl KernelTimer {
    pub fn new(clock: Arc<dyn Clock>) -> Self {
        Self {
            clock,
            totals: Vec::new(),
        }
    }

    pub fn clock(&self) -> &dyn Clock {
        self.clock.as_ref()
    }

    /// Times `work` and adds the elapsed seconds to `category`.
    pub fn time<R>(&mut self, backend: &Backend, category: &str, work: impl FnOnce() -> R) -> R {
        let (out, secs) = time_kernel(self.clock.as_ref(), backend, work);
        self.add(category, secs);
        out
    }

    pub fn add(&mut self, category: &str, seconds: f64) {
        match self.totals.iter_mut().find(|(c, _)| c == category) {
            Some((_, total)) => *total += seconds,
            None => self.totals.push((category.to_string(), seconds)),
        }
    }

    pub fn total(&self, category: &str) -> Option<f64> {
        self.totals
            .iter()
            .find(|(c, _)| c == category)
            .map(|&(_, t)| t)
    }

    /// Categories in first-use order.
    pub fn totals(&self) -> &[(String, f64)] {
        &self.totals
    }

    pub fn reset(&mut self) {
        self.totals.clear();
    }
}
