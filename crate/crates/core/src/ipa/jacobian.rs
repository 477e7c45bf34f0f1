use crate::error::{Error, Result};
use crate::ipa::cross::CrossIpaAccumulator;
use crate::ipa::diag::DiagIpaAccumulator;

/// Lower-triangular Jacobian of the window-averaged queue lengths with
/// respect to the two red durations. The upper-right entry is structurally
/// zero because queue 1 never sees queue 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianEstimate {
    pub j11: f64,
    pub j21: f64,
    pub j22: f64,
    pub window: f64,
}

impl JacobianEstimate {
    pub fn j12(&self) -> f64 {
        0.0
    }

    pub fn as_matrix(&self) -> [[f64; 2]; 2] {
        [[self.j11, 0.0], [self.j21, self.j22]]
    }
}

pub fn assemble_jacobian(
    diag1: &DiagIpaAccumulator,
    diag2: &DiagIpaAccumulator,
    cross: &CrossIpaAccumulator,
    window: f64,
) -> Result<JacobianEstimate> {
    if !(window > 0.0) {
        return Err(Error::InvalidWindowLength(window));
    }
    Ok(JacobianEstimate {
        j11: diag1.integral() / window,
        j21: cross.integral() / window,
        j22: diag2.integral() / window,
        window,
    })
}
