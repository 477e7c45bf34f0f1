use crate::error::{Error, Result};
use crate::sim::event::{EventKind, Queue};

/// Fixed-cycle signal plan: each cycle of queue `i` is red on
/// `[kC_i, kC_i + red_i)` and green on `[kC_i + red_i, (k+1)C_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePlan {
    pub cycle: [f64; 2],
    pub red: [f64; 2],
}

impl PhasePlan {
    pub fn new(cycle: [f64; 2], red: [f64; 2]) -> Result<Self> {
        let plan = Self { cycle, red };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..2 {
            let (c, r) = (self.cycle[i], self.red[i]);
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::InvalidCycle { queue: i + 1, cycle: c });
            }
            if !(r > 0.0 && r < c) {
                return Err(Error::InvalidRed { queue: i + 1, red: r, cycle: c });
            }
        }
        Ok(())
    }

    pub fn with_red(mut self, red: [f64; 2]) -> Result<Self> {
        self.red = red;
        self.validate()?;
        Ok(self)
    }

    pub fn is_red(&self, queue: Queue, t: f64) -> bool {
        let i = queue.index();
        let k = (t / self.cycle[i]).floor();
        t - k * self.cycle[i] < self.red[i]
    }
}

/// All red and green starts of both lights in `[0, horizon)`, sorted by
/// epoch with queue 1 first on ties.
pub fn build_switch_epochs(plan: &PhasePlan, horizon: f64) -> Result<Vec<(f64, EventKind)>> {
    plan.validate()?;
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidHorizon(horizon));
    }
    let mut out = Vec::new();
    for queue in Queue::BOTH {
        let i = queue.index();
        let mut k: u64 = 0;
        loop {
            let red_start = k as f64 * plan.cycle[i];
            if red_start >= horizon {
                break;
            }
            out.push((red_start, EventKind::RedStart(queue)));
            let green_start = red_start + plan.red[i];
            if green_start < horizon {
                out.push((green_start, EventKind::GreenStart(queue)));
            }
            k += 1;
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.priority().cmp(&b.1.priority())));
    Ok(out)
}
