//! Fluid-queue model of two signalized intersections in tandem, with
//! sample-path (IPA) Jacobian estimation of the time-averaged queue lengths
//! and an adaptive-gain integral regulator driving them to setpoints.

pub mod error;
pub mod harness;
pub mod ipa;
pub mod oracle;
pub mod rate;
pub mod regulator;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
pub use harness::{RunSeries, SweepSummary};
pub use ipa::{estimate_jacobian, IpaEstimator, JacobianEstimate};
pub use oracle::{fd_jacobian, grad_check, GradCheckReport};
pub use rate::{PiecewiseConstantRate, Segment};
pub use regulator::{ControllerState, GuardConfig, Mat2, Mode};
pub use scenario::{default_paper_config, ExperimentConfig, OnOffSpec};
pub use sim::{simulate, Event, EventKind, PhasePlan, Queue, ServiceProfile, TandemTrajectory};
