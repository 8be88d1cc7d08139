use std::time::{Instant, SystemTime, UNIX_EPOCH};

use newsgpt_core::agent::Clock;

/// Microseconds since the Unix epoch, read from a monotonic source anchored
/// once at construction, so marks never run backwards.
#[derive(Debug, Clone, Copy)]
pub struct SystemClock {
    origin: Instant,
    origin_us: u64,
}

impl SystemClock {
    pub fn new() -> Self {
        let origin_us = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_micros() as u64)
            .unwrap_or(0);
        Self {
            origin: Instant::now(),
            origin_us,
        }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now_us(&self) -> u64 {
        self.origin_us + self.origin.elapsed().as_micros() as u64
    }
}
