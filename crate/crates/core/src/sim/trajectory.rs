use crate::error::{Error, Result};
use crate::sim::event::{Event, Queue, RateSnapshot};

/// Queue contents at one event epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub epoch: f64,
    pub x: [f64; 2],
}

/// Start of one linear piece of a queue-content path. The piece runs until
/// the next knot of the same queue (or the end of the trajectory).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    pub t: f64,
    pub x: f64,
    pub slope: f64,
}

impl Knot {
    pub fn value_at(&self, s: f64) -> f64 {
        (self.x + self.slope * (s - self.t)).max(0.0)
    }
}

/// Piecewise-linear queue paths over `[start, end]` with the event log that
/// generated them.
///
/// Each queue keeps its own knot list so that its path only depends on its
/// own slope changes.
#[derive(Debug, Clone, PartialEq)]
pub struct TandemTrajectory {
    pub(crate) start: f64,
    pub(crate) end: f64,
    pub(crate) phi: f64,
    pub(crate) breakpoints: Vec<Breakpoint>,
    pub(crate) events: Vec<Event>,
    pub(crate) paths: [Vec<Knot>; 2],
    pub(crate) initial_busy: [bool; 2],
    pub(crate) initial_green: [bool; 2],
    pub(crate) initial_rates: RateSnapshot,
}

impl TandemTrajectory {
    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn knots(&self, queue: Queue) -> &[Knot] {
        &self.paths[queue.index()]
    }

    /// Busy status of each queue just before `start`.
    pub fn initial_busy(&self) -> [bool; 2] {
        self.initial_busy
    }

    /// Whether each light shows green just before `start`.
    pub fn initial_green(&self) -> [bool; 2] {
        self.initial_green
    }

    /// Rates just before `start`.
    pub fn initial_rates(&self) -> RateSnapshot {
        self.initial_rates
    }

    /// Content of `queue` at time `t` (paths are continuous).
    pub fn content_at(&self, queue: Queue, t: f64) -> f64 {
        let path = &self.paths[queue.index()];
        let j = path.partition_point(|k| k.t <= t).saturating_sub(1);
        path[j].value_at(t)
    }

    /// Right-limit rates at `t`: those after the last epoch `<= t`.
    pub fn rates_at(&self, t: f64) -> RateSnapshot {
        let n = self.events.partition_point(|e| e.epoch <= t);
        if n == 0 {
            self.initial_rates
        } else {
            self.events[n - 1].right
        }
    }

    /// Integral of `queue`'s content over `[a, b)`.
    pub fn integral(&self, queue: Queue, a: f64, b: f64) -> f64 {
        let path = &self.paths[queue.index()];
        let mut area = 0.0;
        for (j, knot) in path.iter().enumerate() {
            let piece_end = path.get(j + 1).map_or(f64::INFINITY, |k| k.t);
            let lo = knot.t.max(a);
            let hi = piece_end.min(b);
            if hi > lo {
                area += 0.5 * (knot.value_at(lo) + knot.value_at(hi)) * (hi - lo);
            }
        }
        area
    }
}

/// Time-averaged queue contents over `[t_a, t_b)`.
pub fn queue_integral(traj: &TandemTrajectory, window: (f64, f64)) -> Result<(f64, f64)> {
    let (a, b) = window;
    if !(b > a) || a < traj.start || b > traj.end {
        return Err(Error::InvalidWindow {
            start: a,
            end: b,
            lo: traj.start,
            hi: traj.end,
        });
    }
    let len = b - a;
    Ok((
        traj.integral(Queue::Q1, a, b) / len,
        traj.integral(Queue::Q2, a, b) / len,
    ))
}
