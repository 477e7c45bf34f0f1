//! Exact event-driven integration of the two fluid queues.
//!
//! All rates are piecewise constant, so queue contents are piecewise linear
//! and every emptying time is computed in closed form from the queue's last
//! slope change. Each queue is re-anchored only when its own slope changes,
//! which keeps queue 1's arithmetic independent of anything queue 2 does.

use crate::error::{Error, Result};
use crate::rate::{PiecewiseConstantRate, RateCursor};
use crate::sim::event::{Event, EventKind, Process, Queue, RateSnapshot, Trigger};
use crate::sim::plan::PhasePlan;
use crate::sim::service::ServiceProfile;
use crate::sim::trajectory::{Breakpoint, Knot, TandemTrajectory};

#[derive(Debug, Clone, Copy)]
struct QueueState {
    anchor: Knot,
    busy: bool,
}

impl QueueState {
    fn empty_time(&self, now: f64) -> Option<f64> {
        if self.busy && self.anchor.slope < 0.0 && self.anchor.x > 0.0 {
            // t + x / (beta - alpha)
            Some((self.anchor.t + self.anchor.x / (-self.anchor.slope)).max(now))
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Light {
    cycle: f64,
    red: f64,
    pending_red: f64,
    /// Index of the next cycle to start.
    k: u64,
    green: bool,
    next_switch: f64,
    next_is_red: bool,
    green_start: f64,
    /// Elapsed-green offset of the next ramp step, if it falls inside this green.
    next_step: Option<f64>,
}

impl Light {
    fn new(cycle: f64, red: f64) -> Self {
        Self {
            cycle,
            red,
            pending_red: red,
            k: 0,
            green: false,
            next_switch: 0.0,
            next_is_red: true,
            green_start: 0.0,
            next_step: None,
        }
    }

    fn next_step_time(&self) -> Option<f64> {
        self.next_step.map(|s| self.green_start + s)
    }
}

/// Counters for situations the event log resolves by convention.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Busy starts where more than one coincident event raised the net inflow.
    pub coincident_triggers: usize,
}

/// Streaming simulator. [`Simulator::advance`] returns consecutive
/// trajectory segments; pausing never perturbs the computation.
pub struct Simulator<'a> {
    alpha1: &'a PiecewiseConstantRate,
    alpha2_tilde: &'a PiecewiseConstantRate,
    service: ServiceProfile,
    phi: f64,
    now: f64,
    seg_start: f64,
    started: bool,
    queues: [QueueState; 2],
    lights: [Light; 2],
    cursors: [RateCursor; 2],
    rates: RateSnapshot,
    control_period: Option<f64>,
    next_boundary: u64,
    diagnostics: Diagnostics,
}

impl<'a> Simulator<'a> {
    pub fn new(
        alpha1: &'a PiecewiseConstantRate,
        alpha2_tilde: &'a PiecewiseConstantRate,
        plan: PhasePlan,
        service: ServiceProfile,
        phi: f64,
        x0: [f64; 2],
    ) -> Result<Self> {
        plan.validate()?;
        if !(0.0..=1.0).contains(&phi) {
            return Err(Error::InvalidPhi(phi));
        }
        if !(x0[0] >= 0.0 && x0[1] >= 0.0) || !x0[0].is_finite() || !x0[1].is_finite() {
            return Err(Error::InvalidInitialState(x0[0], x0[1]));
        }
        let queue = |x: f64| QueueState {
            anchor: Knot { t: 0.0, x, slope: 0.0 },
            busy: x > 0.0,
        };
        Ok(Self {
            alpha1,
            alpha2_tilde,
            service,
            phi,
            now: 0.0,
            seg_start: 0.0,
            started: false,
            queues: [queue(x0[0]), queue(x0[1])],
            lights: [
                Light::new(plan.cycle[0], plan.red[0]),
                Light::new(plan.cycle[1], plan.red[1]),
            ],
            cursors: [RateCursor::at(alpha1, 0.0), RateCursor::at(alpha2_tilde, 0.0)],
            rates: RateSnapshot::default(),
            control_period: None,
            next_boundary: 1,
            diagnostics: Diagnostics::default(),
        })
    }

    /// Emits a `ControlCycleBoundary` event at every positive multiple of `period`.
    pub fn set_control_period(&mut self, period: f64) {
        self.control_period = Some(period);
    }

    /// New red durations; each light adopts its value at its next red start.
    pub fn set_red(&mut self, red: [f64; 2]) -> Result<()> {
        for (i, light) in self.lights.iter().enumerate() {
            if !(red[i] > 0.0 && red[i] < light.cycle) {
                return Err(Error::InvalidRed { queue: i + 1, red: red[i], cycle: light.cycle });
            }
        }
        for (light, r) in self.lights.iter_mut().zip(red) {
            light.pending_red = r;
        }
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.seg_start.max(self.now)
    }

    pub fn content(&self, queue: Queue, t: f64) -> f64 {
        self.queues[queue.index()].anchor.value_at(t)
    }

    pub fn diagnostics(&self) -> Diagnostics {
        self.diagnostics
    }

    fn next_boundary_time(&self) -> Option<f64> {
        self.control_period.map(|p| self.next_boundary as f64 * p)
    }

    fn next_epoch(&self) -> f64 {
        let mut t = f64::INFINITY;
        if !self.started {
            return 0.0;
        }
        let mut take = |c: Option<f64>| {
            if let Some(c) = c {
                t = t.min(c);
            }
        };
        take(self.next_boundary_time());
        for light in &self.lights {
            take(Some(light.next_switch));
            take(light.next_step_time());
        }
        take(self.cursors[0].next_jump(self.alpha1));
        take(self.cursors[1].next_jump(self.alpha2_tilde));
        for q in &self.queues {
            take(q.empty_time(self.now));
        }
        t
    }

    fn scheduled_at(&self, t: f64) -> Vec<EventKind> {
        let mut items = Vec::new();
        if self.next_boundary_time() == Some(t) {
            items.push(EventKind::ControlCycleBoundary);
        }
        for q in Queue::BOTH {
            let light = &self.lights[q.index()];
            if light.next_switch == t {
                items.push(if light.next_is_red {
                    EventKind::RedStart(q)
                } else {
                    EventKind::GreenStart(q)
                });
            }
        }
        for q in Queue::BOTH {
            if self.lights[q.index()].next_step_time() == Some(t) {
                items.push(EventKind::ServiceStep(q));
            }
        }
        if self.cursors[0].next_jump(self.alpha1) == Some(t) {
            items.push(EventKind::ExogenousRateJump(Process::Alpha1));
        }
        if self.cursors[1].next_jump(self.alpha2_tilde) == Some(t) {
            items.push(EventKind::ExogenousRateJump(Process::Alpha2Tilde));
        }
        items
    }

    fn set_beta(&mut self, q: Queue, beta: f64) {
        match q {
            Queue::Q1 => self.rates.beta1 = beta,
            Queue::Q2 => self.rates.beta2 = beta,
        }
    }

    fn apply(&mut self, item: EventKind, t: f64) {
        match item {
            EventKind::ControlCycleBoundary => self.next_boundary += 1,
            EventKind::RedStart(q) => {
                let light = &mut self.lights[q.index()];
                light.red = light.pending_red;
                light.green = false;
                light.next_is_red = false;
                light.next_switch = light.k as f64 * light.cycle + light.red;
                light.next_step = None;
                self.set_beta(q, 0.0);
            }
            EventKind::GreenStart(q) => {
                let i = q.index();
                let light = &mut self.lights[i];
                light.k += 1;
                light.green = true;
                light.next_is_red = true;
                light.next_switch = light.k as f64 * light.cycle;
                light.green_start = t;
                let green_end = light.next_switch;
                light.next_step = self
                    .service
                    .next_step_after(q, 0.0)
                    .filter(|s| t + s < green_end);
                let beta = self.service.green_rate(q, 0.0);
                self.set_beta(q, beta);
            }
            EventKind::ServiceStep(q) => {
                let i = q.index();
                let light = &mut self.lights[i];
                let offset = light.next_step.expect("scheduled ramp step");
                let green_end = light.next_switch;
                let start = light.green_start;
                light.next_step = self
                    .service
                    .next_step_after(q, offset)
                    .filter(|s| start + s < green_end);
                let beta = self.service.green_rate(q, offset);
                self.set_beta(q, beta);
            }
            EventKind::ExogenousRateJump(Process::Alpha1) => {
                self.cursors[0].advance_to(self.alpha1, t);
                self.rates.alpha1 = self.cursors[0].current(self.alpha1);
            }
            EventKind::ExogenousRateJump(Process::Alpha2Tilde) => {
                self.cursors[1].advance_to(self.alpha2_tilde, t);
                self.rates.alpha2_tilde = self.cursors[1].current(self.alpha2_tilde);
            }
            EventKind::InternalRateJump | EventKind::EmptyStart(_) | EventKind::BusyStart(_) => {
                unreachable!("derived events are not scheduled")
            }
        }
    }

    /// Recomputes queue-1 outflow and queue-2 inflow for contents `x`.
    fn refresh_derived(&mut self, x: &[f64; 2]) {
        let r = &mut self.rates;
        // An empty queue whose inflow exceeds service is busy and serves at
        // full rate; otherwise arrivals pass straight through.
        let q1_busy = x[0] > 0.0 || r.alpha1 > r.beta1;
        r.delta1 = if q1_busy { r.beta1 } else { r.alpha1 };
        r.alpha2 = crate::sim::flow::merge_inflow(r.delta1, r.alpha2_tilde, self.phi);
    }

    fn net(&self, q: Queue) -> f64 {
        self.rates.alpha(q) - self.rates.beta(q)
    }

    /// Processes one epoch `t`, appending to the segment buffers.
    fn process_epoch(&mut self, t: f64, seg: &mut SegmentBuffers) {
        let left = self.rates;
        let was_busy = [self.queues[0].busy, self.queues[1].busy];
        let mut x = [0.0; 2];
        let mut reached_zero = [false; 2];
        for q in Queue::BOTH {
            let i = q.index();
            let state = &self.queues[i];
            x[i] = if state.empty_time(self.now) == Some(t) {
                0.0
            } else {
                state.anchor.value_at(t)
            };
            reached_zero[i] = was_busy[i] && x[i] == 0.0;
        }
        self.refresh_derived(&x);

        let positive = |sim: &Self, i: usize| x[i] > 0.0 || sim.net(Queue::BOTH[i]) > 0.0;
        let mut pos = [positive(self, 0), positive(self, 1)];
        let mut cause: [Option<Trigger>; 2] = [None, None];
        let mut raisers = [0usize; 2];

        let mut items = Vec::new();
        if !self.started {
            self.rates.alpha1 = self.cursors[0].current(self.alpha1);
            self.rates.alpha2_tilde = self.cursors[1].current(self.alpha2_tilde);
            self.refresh_derived(&x);
            for i in 0..2 {
                let now_pos = positive(self, i);
                if !pos[i] && now_pos {
                    cause[i] = Some(Trigger::Initial);
                    raisers[i] += 1;
                }
                pos[i] = now_pos;
            }
            self.started = true;
        }
        for item in self.scheduled_at(t) {
            let before = [self.net(Queue::Q1), self.net(Queue::Q2)];
            self.apply(item, t);
            self.refresh_derived(&x);
            for i in 0..2 {
                let q = Queue::BOTH[i];
                if x[i] == 0.0 && self.net(q) > before[i] {
                    raisers[i] += 1;
                }
                let now_pos = positive(self, i);
                if !pos[i] && now_pos {
                    cause[i] = Some(Trigger::Event(item));
                }
                pos[i] = now_pos;
            }
            items.push(item);
        }

        let busy_after = pos;
        let mut derived = Vec::new();
        if busy_after[0] != was_busy[0] && left.delta1 != self.rates.delta1 {
            derived.push((EventKind::InternalRateJump, None));
        }
        for i in 0..2 {
            let q = Queue::BOTH[i];
            if was_busy[i] && (!busy_after[i] || reached_zero[i]) {
                derived.push((EventKind::EmptyStart(q), None));
            }
        }
        for i in 0..2 {
            let q = Queue::BOTH[i];
            let starts = busy_after[i] && (!was_busy[i] || reached_zero[i]);
            if starts {
                if raisers[i] > 1 {
                    self.diagnostics.coincident_triggers += 1;
                }
                derived.push((EventKind::BusyStart(q), cause[i]));
            }
        }

        for i in 0..2 {
            let q = Queue::BOTH[i];
            let state = &mut self.queues[i];
            let slope = if busy_after[i] { self.rates.alpha(q) - self.rates.beta(q) } else { 0.0 };
            if busy_after[i] != was_busy[i] || reached_zero[i] || slope != state.anchor.slope {
                state.anchor = Knot { t, x: x[i], slope };
                seg.paths[i].push(state.anchor);
            }
            state.busy = busy_after[i];
        }

        let right = self.rates;
        for kind in items {
            seg.events.push(Event { epoch: t, kind, left, right, trigger: None });
        }
        for (kind, trigger) in derived {
            seg.events.push(Event { epoch: t, kind, left, right, trigger });
        }
        seg.push_breakpoint(Breakpoint { epoch: t, x });
        self.now = t;
    }

    /// Processes every epoch in `[current time, until)` and returns the
    /// trajectory segment covering `[current time, until]`.
    pub fn advance(&mut self, until: f64) -> Result<TandemTrajectory> {
        let start = self.time();
        if !(until > start) || !until.is_finite() {
            return Err(Error::InvalidHorizon(until));
        }
        let mut seg = SegmentBuffers {
            breakpoints: vec![Breakpoint {
                epoch: start,
                x: [self.content(Queue::Q1, start), self.content(Queue::Q2, start)],
            }],
            events: Vec::new(),
            paths: [vec![self.queues[0].anchor], vec![self.queues[1].anchor]],
        };
        let initial_busy = [self.queues[0].busy, self.queues[1].busy];
        let initial_rates = self.rates;
        let initial_green = [self.lights[0].green, self.lights[1].green];
        loop {
            let t = self.next_epoch();
            if !(t < until) {
                break;
            }
            self.process_epoch(t, &mut seg);
        }
        seg.push_breakpoint(Breakpoint {
            epoch: until,
            x: [self.content(Queue::Q1, until), self.content(Queue::Q2, until)],
        });
        self.seg_start = until;
        Ok(TandemTrajectory {
            start,
            end: until,
            phi: self.phi,
            breakpoints: seg.breakpoints,
            events: seg.events,
            paths: seg.paths,
            initial_busy,
            initial_green,
            initial_rates,
        })
    }
}

struct SegmentBuffers {
    breakpoints: Vec<Breakpoint>,
    events: Vec<Event>,
    paths: [Vec<Knot>; 2],
}

impl SegmentBuffers {
    fn push_breakpoint(&mut self, bp: Breakpoint) {
        match self.breakpoints.last_mut() {
            Some(last) if last.epoch == bp.epoch => *last = bp,
            _ => self.breakpoints.push(bp),
        }
    }
}

/// Simulates both queues over `[0, horizon]` from contents `x0`.
pub fn simulate(
    arrivals_1: &PiecewiseConstantRate,
    arrivals_2_tilde: &PiecewiseConstantRate,
    plan: &PhasePlan,
    service: &ServiceProfile,
    phi: f64,
    x0: [f64; 2],
    horizon: f64,
) -> Result<TandemTrajectory> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidHorizon(horizon));
    }
    Simulator::new(arrivals_1, arrivals_2_tilde, *plan, service.clone(), phi, x0)?.advance(horizon)
}
