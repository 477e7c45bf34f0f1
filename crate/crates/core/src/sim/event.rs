use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Queue {
    Q1,
    Q2,
}

impl Queue {
    pub const BOTH: [Queue; 2] = [Queue::Q1, Queue::Q2];

    pub fn index(self) -> usize {
        match self {
            Queue::Q1 => 0,
            Queue::Q2 => 1,
        }
    }
}

impl fmt::Display for Queue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index() + 1)
    }
}

/// Exogenous inputs: arrivals to queue 1 and cross traffic into queue 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Process {
    Alpha1,
    Alpha2Tilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    RedStart(Queue),
    GreenStart(Queue),
    /// A step of a staircase service ramp inside a green period.
    ServiceStep(Queue),
    ExogenousRateJump(Process),
    /// Discontinuity of the queue-1 outflow caused by a busy/empty change.
    InternalRateJump,
    EmptyStart(Queue),
    BusyStart(Queue),
    ControlCycleBoundary,
}

impl EventKind {
    /// Processing order for events sharing an epoch.
    pub fn priority(self) -> u8 {
        use EventKind::*;
        match self {
            ControlCycleBoundary => 0,
            RedStart(Queue::Q1) | GreenStart(Queue::Q1) => 1,
            RedStart(Queue::Q2) | GreenStart(Queue::Q2) => 2,
            ServiceStep(Queue::Q1) => 3,
            ServiceStep(Queue::Q2) => 4,
            ExogenousRateJump(Process::Alpha1) => 5,
            ExogenousRateJump(Process::Alpha2Tilde) => 6,
            InternalRateJump => 7,
            EmptyStart(Queue::Q1) => 8,
            EmptyStart(Queue::Q2) => 9,
            BusyStart(Queue::Q1) => 10,
            BusyStart(Queue::Q2) => 11,
        }
    }

    /// True for service-rate changes whose epoch moves with the red
    /// duration of `queue` (green starts and ramp steps).
    pub fn is_moving_service_jump(self, queue: Queue) -> bool {
        matches!(self, EventKind::GreenStart(q) | EventKind::ServiceStep(q) if q == queue)
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use EventKind::*;
        match self {
            RedStart(q) => write!(f, "RedStart({q})"),
            GreenStart(q) => write!(f, "GreenStart({q})"),
            ServiceStep(q) => write!(f, "ServiceStep({q})"),
            ExogenousRateJump(Process::Alpha1) => write!(f, "ExogenousRateJump(alpha1)"),
            ExogenousRateJump(Process::Alpha2Tilde) => write!(f, "ExogenousRateJump(alpha2_tilde)"),
            InternalRateJump => write!(f, "InternalRateJump"),
            EmptyStart(q) => write!(f, "EmptyStart({q})"),
            BusyStart(q) => write!(f, "BusyStart({q})"),
            ControlCycleBoundary => write!(f, "ControlCycleBoundary"),
        }
    }
}

/// What made an empty queue start a busy period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trigger {
    /// Rates switched on at the start of the simulation.
    Initial,
    Event(EventKind),
}

/// All flow rates at one side of an epoch.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateSnapshot {
    pub alpha1: f64,
    pub alpha2_tilde: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub delta1: f64,
}

impl RateSnapshot {
    pub fn alpha(&self, queue: Queue) -> f64 {
        match queue {
            Queue::Q1 => self.alpha1,
            Queue::Q2 => self.alpha2,
        }
    }

    pub fn beta(&self, queue: Queue) -> f64 {
        match queue {
            Queue::Q1 => self.beta1,
            Queue::Q2 => self.beta2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub epoch: f64,
    pub kind: EventKind,
    /// Rates just before the epoch.
    pub left: RateSnapshot,
    /// Rates just after every event at this epoch has been applied.
    pub right: RateSnapshot,
    /// Set on `BusyStart` events only.
    pub trigger: Option<Trigger>,
}

impl Event {
    pub fn queue(&self) -> Option<Queue> {
        use EventKind::*;
        match self.kind {
            RedStart(q) | GreenStart(q) | ServiceStep(q) | EmptyStart(q) | BusyStart(q) => Some(q),
            _ => None,
        }
    }
}
