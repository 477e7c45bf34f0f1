//! Sample-path derivatives of the queue contents with respect to the red
//! durations, computed online from the simulator's event stream.

pub mod cross;
pub mod diag;
pub mod jacobian;

pub use cross::CrossIpaAccumulator;
pub use diag::{diag_closed_form, DiagIpaAccumulator};
pub use jacobian::{assemble_jacobian, JacobianEstimate};

use crate::error::Result;
use crate::sim::{Event, Queue, TandemTrajectory};

/// The three accumulators for one measurement window, fed in one pass.
#[derive(Debug, Clone)]
pub struct IpaEstimator {
    start: f64,
    diag: [DiagIpaAccumulator; 2],
    cross: CrossIpaAccumulator,
}

impl IpaEstimator {
    /// `busy` is the status of both queues just before `start`; `q1_green`
    /// whether light 1 shows green just before `start`.
    pub fn new(phi: f64, start: f64, busy: [bool; 2], q1_green: bool) -> Self {
        Self {
            start,
            diag: [
                DiagIpaAccumulator::new(Queue::Q1, start, busy[0]),
                DiagIpaAccumulator::new(Queue::Q2, start, busy[1]),
            ],
            cross: CrossIpaAccumulator::new(phi, start, busy, q1_green),
        }
    }

    /// Accumulators primed with the initial state of `traj`.
    pub fn for_trajectory(traj: &TandemTrajectory) -> Self {
        Self::new(traj.phi(), traj.start(), traj.initial_busy(), traj.initial_green()[0])
    }

    #[doc(hidden)]
    pub fn disable_release_term(&mut self) {
        self.cross.disable_release_term();
    }

    pub fn on_event(&mut self, ev: &Event) -> Result<()> {
        self.cross.on_event(ev, &self.diag[0])?;
        self.diag[0].on_event(ev)?;
        self.diag[1].on_event(ev)
    }

    pub fn consume(&mut self, events: &[Event]) -> Result<()> {
        events.iter().try_for_each(|ev| self.on_event(ev))
    }

    pub fn diag(&self, queue: Queue) -> &DiagIpaAccumulator {
        &self.diag[queue.index()]
    }

    pub fn cross(&self) -> &CrossIpaAccumulator {
        &self.cross
    }

    /// Current sensitivities `(dx1/dred1, dx2/dred2, dx2/dred1)`.
    pub fn values(&self) -> (f64, f64, f64) {
        (self.diag[0].value(), self.diag[1].value(), self.cross.value())
    }

    /// Integrates to `end` and returns the window Jacobian.
    pub fn finish(&mut self, end: f64) -> Result<JacobianEstimate> {
        self.diag[0].advance_to(end)?;
        self.diag[1].advance_to(end)?;
        self.cross.advance_to(end)?;
        assemble_jacobian(&self.diag[0], &self.diag[1], &self.cross, end - self.start)
    }
}

/// IPA Jacobian over the full span of `traj`.
pub fn estimate_jacobian(traj: &TandemTrajectory) -> Result<JacobianEstimate> {
    let mut est = IpaEstimator::for_trajectory(traj);
    est.consume(traj.events())?;
    est.finish(traj.end())
}
