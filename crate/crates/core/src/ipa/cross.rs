use crate::error::{Error, Result};
use crate::ipa::diag::DiagIpaAccumulator;
use crate::sim::{Event, EventKind, Queue, Trigger};

/// Which ramp term is currently accruing.
#[derive(Debug, Clone, Copy, PartialEq)]
enum RampTerm {
    /// Queue-1 busy period containing the latest queue-1 green start (or the
    /// queue-2 busy start when that falls inside a queue-1 green).
    SameBusyPeriod { beta1_anchor: f64 },
    /// A later queue-1 busy period that began inside the same green.
    LaterBusyPeriod { beta1_anchor: f64 },
}

/// Running sensitivity of queue 2's content to queue 1's red duration.
///
/// Within a queue-2 busy period the value is `base + g1 + g2`: `base` holds
/// the recursively updated red/green quantities, and `g1`, `g2` are the
/// service-ramp terms, identically zero under constant-rate service.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossIpaAccumulator {
    phi: f64,
    q1_busy: bool,
    q1_green: bool,
    q2_busy: bool,
    base: f64,
    g1: f64,
    g2: f64,
    ramp: Option<RampTerm>,
    integral: f64,
    last_epoch: f64,
    /// Queue-2 busy starts whose trigger did not move with the red duration
    /// but coincided with a queue-1 outflow drop.
    pub unusual_triggers: usize,
    release_term: bool,
}

impl CrossIpaAccumulator {
    pub fn new(phi: f64, start: f64, busy: [bool; 2], q1_green: bool) -> Self {
        Self {
            phi,
            q1_busy: busy[0],
            q1_green,
            q2_busy: busy[1],
            base: 0.0,
            g1: 0.0,
            g2: 0.0,
            ramp: None,
            integral: 0.0,
            last_epoch: start,
            unusual_triggers: 0,
            release_term: true,
        }
    }

    /// Drops the queue-1 emptying contribution. Only useful as a known-bad
    /// estimator for exercising the gradient checker.
    #[doc(hidden)]
    pub fn disable_release_term(&mut self) {
        self.release_term = false;
    }

    pub fn value(&self) -> f64 {
        self.base + self.g1 + self.g2
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }

    /// Pending ramp terms `(g1, g2)`.
    pub fn ramp_terms(&self) -> (f64, f64) {
        (self.g1, self.g2)
    }

    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        if t < self.last_epoch {
            return Err(Error::OutOfOrder { last: self.last_epoch, got: t });
        }
        self.integral += self.value() * (t - self.last_epoch);
        self.last_epoch = t;
        Ok(())
    }

    fn fold_ramp(&mut self) {
        self.base += self.g1 + self.g2;
        self.g1 = 0.0;
        self.g2 = 0.0;
        self.ramp = None;
    }

    fn reset(&mut self) {
        self.base = 0.0;
        self.g1 = 0.0;
        self.g2 = 0.0;
        self.ramp = None;
    }

    /// Applies `ev`. `diag1` must be queue 1's diagonal accumulator *before*
    /// it has seen `ev` (left limit at the epoch).
    pub fn on_event(&mut self, ev: &Event, diag1: &DiagIpaAccumulator) -> Result<()> {
        self.advance_to(ev.epoch)?;
        match ev.kind {
            EventKind::EmptyStart(Queue::Q2) => {
                self.reset();
                self.q2_busy = false;
            }
            EventKind::BusyStart(Queue::Q2) => {
                let trigger = ev.trigger.ok_or(Error::MissingTrigger(ev.epoch))?;
                let moves_with_red = matches!(
                    trigger,
                    Trigger::Event(k) if k.is_moving_service_jump(Queue::Q1)
                );
                if !moves_with_red && ev.right.delta1 < ev.left.delta1 {
                    self.unusual_triggers += 1;
                }
                self.reset();
                if moves_with_red {
                    self.base = -(ev.right.alpha2 - ev.right.beta2);
                }
                if self.q1_busy && self.q1_green {
                    self.ramp = Some(RampTerm::SameBusyPeriod { beta1_anchor: ev.right.beta1 });
                }
                self.q2_busy = true;
            }
            EventKind::GreenStart(Queue::Q1) => {
                self.q1_green = true;
                if self.q2_busy {
                    self.fold_ramp();
                    self.base += ev.left.alpha2 - ev.right.alpha2;
                    if self.q1_busy {
                        self.ramp = Some(RampTerm::SameBusyPeriod { beta1_anchor: ev.right.beta1 });
                    }
                }
            }
            EventKind::RedStart(Queue::Q1) => {
                self.q1_green = false;
                if self.q2_busy {
                    self.fold_ramp();
                }
            }
            EventKind::ServiceStep(Queue::Q1) => {
                if self.q2_busy && self.q1_busy {
                    match self.ramp {
                        Some(RampTerm::SameBusyPeriod { beta1_anchor }) => {
                            self.g1 = self.phi * (beta1_anchor - ev.right.beta1);
                        }
                        Some(RampTerm::LaterBusyPeriod { beta1_anchor }) => {
                            self.g2 = self.phi * (beta1_anchor - ev.right.beta1);
                        }
                        None => {}
                    }
                }
            }
            EventKind::EmptyStart(Queue::Q1) => {
                if self.q2_busy {
                    // Released perturbation: the emptying time moves with the
                    // red duration, shifting the drop in queue-1 outflow.
                    self.fold_ramp();
                    if self.release_term {
                        self.base += self.phi * diag1.value();
                    }
                }
                self.q1_busy = false;
            }
            EventKind::BusyStart(Queue::Q1) => {
                self.q1_busy = true;
                if self.q2_busy && self.q1_green {
                    self.fold_ramp();
                    self.ramp = Some(RampTerm::LaterBusyPeriod { beta1_anchor: ev.right.beta1 });
                }
            }
            _ => {}
        }
        Ok(())
    }
}
