//! Two fluid queues in tandem under fixed-cycle signals.

pub mod engine;
pub mod event;
pub mod flow;
pub mod plan;
pub mod service;
pub mod trajectory;

pub use engine::{simulate, Diagnostics, Simulator};
pub use event::{Event, EventKind, Process, Queue, RateSnapshot, Trigger};
pub use flow::{merge_inflow, outflow_rate};
pub use plan::{build_switch_epochs, PhasePlan};
pub use service::{ServiceMode, ServiceProfile};
pub use trajectory::{queue_integral, Breakpoint, Knot, TandemTrajectory};
