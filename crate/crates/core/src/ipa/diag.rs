use crate::error::{Error, Result};
use crate::sim::{Event, EventKind, Queue, TandemTrajectory};

/// Running sensitivity of a queue's content to its own red duration.
///
/// Inside a busy period the value is the sum of service rates just before
/// each cycle start crossed, plus the current service rate, minus the rate
/// at the start of the busy period. Event form: every red-duration-dependent
/// service jump while busy adds its size, red starts cancel out, and busy or
/// empty starts reset to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagIpaAccumulator {
    queue: Queue,
    busy: bool,
    value: f64,
    integral: f64,
    last_epoch: f64,
}

impl DiagIpaAccumulator {
    /// Starts an accumulation window at `start`; the sensitivity of the
    /// window's initial content is zero.
    pub fn new(queue: Queue, start: f64, busy: bool) -> Self {
        Self {
            queue,
            busy,
            value: 0.0,
            integral: 0.0,
            last_epoch: start,
        }
    }

    pub fn queue(&self) -> Queue {
        self.queue
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }

    pub fn is_busy(&self) -> bool {
        self.busy
    }

    pub fn last_epoch(&self) -> f64 {
        self.last_epoch
    }

    /// Integrates the current value up to `t`.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        if t < self.last_epoch {
            return Err(Error::OutOfOrder { last: self.last_epoch, got: t });
        }
        self.integral += self.value * (t - self.last_epoch);
        self.last_epoch = t;
        Ok(())
    }

    pub fn on_event(&mut self, ev: &Event) -> Result<()> {
        self.advance_to(ev.epoch)?;
        let q = self.queue;
        match ev.kind {
            EventKind::EmptyStart(e) if e == q => {
                self.value = 0.0;
                self.busy = false;
            }
            EventKind::BusyStart(e) if e == q => {
                self.value = 0.0;
                self.busy = true;
            }
            kind if kind.is_moving_service_jump(q) && self.busy => {
                self.value += ev.right.beta(q) - ev.left.beta(q);
            }
            _ => {}
        }
        Ok(())
    }
}

/// Evaluates the busy-period sum formula for `d x_q / d red_q` at `t`
/// directly from the event log (right limit at event epochs).
pub fn diag_closed_form(traj: &TandemTrajectory, queue: Queue, t: f64) -> f64 {
    let events = traj.events();
    let upto = events.partition_point(|e| e.epoch <= t);
    let last_transition = events[..upto].iter().rposition(|e| {
        matches!(e.kind, EventKind::BusyStart(q) | EventKind::EmptyStart(q) if q == queue)
    });
    // A busy period inherited from before the window starts with zero
    // sensitivity at start-: cycle starts at the window start count and the
    // subtracted rate is the left limit. A busy period that begins inside
    // the window excludes a coincident cycle start and subtracts the right
    // limit.
    let (busy_start, first_idx, inherited) = match last_transition {
        Some(i) if matches!(events[i].kind, EventKind::EmptyStart(_)) => return 0.0,
        Some(i) => (events[i].epoch, i + 1, false),
        None if traj.initial_busy()[queue.index()] => (traj.start(), 0, true),
        None => return 0.0,
    };
    let mut sum = 0.0;
    for e in &events[first_idx..upto] {
        if e.kind == EventKind::RedStart(queue) && (inherited || e.epoch > busy_start) {
            sum += e.left.beta(queue);
        }
    }
    sum += traj.rates_at(t).beta(queue);
    let beta_at_start = if inherited {
        traj.initial_rates().beta(queue)
    } else {
        traj.rates_at(busy_start).beta(queue)
    };
    sum - beta_at_start
}
