use crate::error::{Error, Result};
use crate::rate::PiecewiseConstantRate;
use crate::sim::event::Queue;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServiceMode {
    Constant,
    Ramp,
}

/// Service-rate law during green. Service is always zero during red.
///
/// In ramp mode the rate after a green start follows a nondecreasing
/// staircase `b_i` indexed by elapsed green time.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceProfile {
    mode: ServiceMode,
    beta_max: [f64; 2],
    ramps: [Option<PiecewiseConstantRate>; 2],
}

impl ServiceProfile {
    pub fn constant(beta_max_1: f64, beta_max_2: f64) -> Result<Self> {
        for (i, b) in [beta_max_1, beta_max_2].into_iter().enumerate() {
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::InvalidService(format!(
                    "beta_max{} must be positive, got {b}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            mode: ServiceMode::Constant,
            beta_max: [beta_max_1, beta_max_2],
            ramps: [None, None],
        })
    }

    /// Staircase ramps; `beta_max_i` is taken as the final step of `b_i`.
    pub fn ramp(b1: PiecewiseConstantRate, b2: PiecewiseConstantRate) -> Result<Self> {
        let mut beta_max = [0.0; 2];
        for (i, b) in [&b1, &b2].into_iter().enumerate() {
            let segs = b.segments();
            if segs.windows(2).any(|w| w[1].rate < w[0].rate) {
                return Err(Error::InvalidService(format!(
                    "ramp b{} must be nondecreasing",
                    i + 1
                )));
            }
            beta_max[i] = segs.last().map(|s| s.rate).unwrap_or(0.0);
            if !(beta_max[i] > 0.0) {
                return Err(Error::InvalidService(format!(
                    "ramp b{} never reaches a positive rate",
                    i + 1
                )));
            }
        }
        Ok(Self {
            mode: ServiceMode::Ramp,
            beta_max,
            ramps: [Some(b1), Some(b2)],
        })
    }

    pub fn mode(&self) -> ServiceMode {
        self.mode
    }

    pub fn beta_max(&self, queue: Queue) -> f64 {
        self.beta_max[queue.index()]
    }

    /// Service rate `elapsed` time units into a green period.
    pub fn green_rate(&self, queue: Queue, elapsed: f64) -> f64 {
        match &self.ramps[queue.index()] {
            None => self.beta_max[queue.index()],
            Some(b) => b.rate_at(elapsed),
        }
    }

    /// Elapsed-green offset of the first rate step strictly after `elapsed`.
    pub fn next_step_after(&self, queue: Queue, elapsed: f64) -> Option<f64> {
        let b = self.ramps[queue.index()].as_ref()?;
        b.segments()
            .iter()
            .map(|s| s.start)
            .find(|&s| s > elapsed)
    }
}
