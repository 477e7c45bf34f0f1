//! Integral regulator with a Newton-type gain refreshed every control cycle
//! from the estimated Jacobian.

pub mod controller;
pub mod gain;
pub mod plant;

pub use controller::{control_step, ControllerState, GuardConfig, Mode};
pub use gain::{invert_gain, Mat2};
pub use plant::{Plant, PlantResponse, StaticPlant, TrafficPlant};

use crate::error::Result;
use crate::ipa::JacobianEstimate;

/// Everything observed and decided in one control cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    /// 1-based control cycle index.
    pub k: usize,
    /// Red durations applied during the cycle.
    pub theta: [f64; 2],
    pub y: [f64; 2],
    pub error: [f64; 2],
    pub jacobian: JacobianEstimate,
    /// Gain computed from this cycle's Jacobian, used for the next update.
    pub gain: Mat2,
}

/// Runs `cycles` control cycles. Cycle 1 uses the initial red durations in
/// `state`; each later cycle first steps `theta` with the gain derived from
/// the previous cycle's Jacobian.
pub fn run_closed_loop<P: Plant>(plant: &mut P, state: &mut ControllerState, cycles: usize) -> Result<Vec<CycleRecord>> {
    let mut records = Vec::with_capacity(cycles);
    let mut last_error: Option<[f64; 2]> = None;
    for k in 1..=cycles {
        if let Some(e) = last_error {
            state.step(e);
        }
        let theta = state.theta;
        let resp = plant.respond(theta)?;
        let error = state.error(resp.y);
        state.refresh_gain(&resp.jacobian);
        records.push(CycleRecord {
            k,
            theta,
            y: resp.y,
            error,
            jacobian: resp.jacobian,
            gain: state.gain,
        });
        last_error = Some(error);
    }
    Ok(records)
}
