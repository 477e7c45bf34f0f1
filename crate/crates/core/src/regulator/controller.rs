use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ipa::JacobianEstimate;
use crate::regulator::gain::{invert_gain, Mat2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Full lower-triangular gain, including the cross term.
    Centralized,
    /// Each intersection uses only its own diagonal entry.
    Decentralized,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Centralized => "centralized",
            Mode::Decentralized => "decentralized",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "centralized" => Ok(Mode::Centralized),
            "decentralized" => Ok(Mode::Decentralized),
            other => Err(format!("expected `centralized` or `decentralized`, got `{other}`")),
        }
    }
}

/// Safeguards applied to every control update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardConfig {
    /// Pivots of the Jacobian smaller than this are treated as singular.
    pub epsilon_j: f64,
    /// Largest allowed change of each red duration per control cycle.
    pub step_cap: [f64; 2],
    pub theta_min: [f64; 2],
    pub theta_max: [f64; 2],
}

impl GuardConfig {
    /// Defaults for cycle lengths `c`: steps up to a quarter cycle, red
    /// durations kept within 2% and 98% of the cycle.
    pub fn for_cycles(c: [f64; 2]) -> Self {
        Self {
            epsilon_j: 1e-3,
            step_cap: [0.25 * c[0], 0.25 * c[1]],
            theta_min: [0.02 * c[0], 0.02 * c[1]],
            theta_max: [0.98 * c[0], 0.98 * c[1]],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_j > 0.0 && self.epsilon_j.is_finite()) {
            return Err(Error::InvalidGuards(format!("epsilon_j must be positive, got {}", self.epsilon_j)));
        }
        for i in 0..2 {
            if !(self.step_cap[i] > 0.0 && self.step_cap[i].is_finite()) {
                return Err(Error::InvalidGuards(format!(
                    "step cap {} must be positive, got {}",
                    i + 1,
                    self.step_cap[i]
                )));
            }
            if !(self.theta_min[i] < self.theta_max[i]) || !self.theta_min[i].is_finite() || !self.theta_max[i].is_finite() {
                return Err(Error::InvalidGuards(format!(
                    "bounds for queue {} are not ordered: [{}, {}]",
                    i + 1,
                    self.theta_min[i],
                    self.theta_max[i]
                )));
            }
        }
        Ok(())
    }
}

/// Regulator state between control cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    pub theta: [f64; 2],
    pub reference: [f64; 2],
    /// Gain used for the next update.
    pub gain: Mat2,
    pub mode: Mode,
    pub guards: GuardConfig,
}

impl ControllerState {
    pub fn new(theta_init: [f64; 2], reference: [f64; 2], initial_gain: Mat2, mode: Mode, guards: GuardConfig) -> Result<Self> {
        guards.validate()?;
        Ok(Self {
            theta: theta_init,
            reference,
            gain: initial_gain,
            mode,
            guards,
        })
    }

    pub fn error(&self, y: [f64; 2]) -> [f64; 2] {
        [self.reference[0] - y[0], self.reference[1] - y[1]]
    }

    /// Replaces the gain with the inverse of `jacobian`.
    pub fn refresh_gain(&mut self, jacobian: &JacobianEstimate) {
        self.gain = invert_gain(jacobian, &self.gain, self.mode, &self.guards);
    }

    /// `theta <- clamp(theta + sat(gain * e))`. Returns the new red durations.
    pub fn step(&mut self, e: [f64; 2]) -> [f64; 2] {
        self.theta = control_step(self.theta, &self.gain, e, &self.guards);
        self.theta
    }
}

/// One integral update. The raw step is scaled uniformly so no component
/// exceeds its cap (keeping its direction), then the result is clamped to
/// the box.
pub fn control_step(theta: [f64; 2], gain: &Mat2, e: [f64; 2], guards: &GuardConfig) -> [f64; 2] {
    let raw = gain.apply(e);
    let mut scale: f64 = 1.0;
    for i in 0..2 {
        if raw[i].is_finite() && raw[i].abs() > guards.step_cap[i] {
            scale = scale.min(guards.step_cap[i] / raw[i].abs());
        }
    }
    let mut out = theta;
    for i in 0..2 {
        let step = if raw[i].is_finite() { raw[i] * scale } else { 0.0 };
        out[i] = (theta[i] + step).clamp(guards.theta_min[i], guards.theta_max[i]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturation_preserves_direction() {
        let g = GuardConfig::for_cycles([1.0, 1.0]);
        let theta = control_step([0.5, 0.5], &Mat2::IDENTITY, [1.0, 0.5], &g);
        assert!((theta[0] - 0.75).abs() < 1e-15);
        assert!((theta[1] - 0.625).abs() < 1e-15);
    }

    #[test]
    fn box_clamp() {
        let g = GuardConfig::for_cycles([1.0, 1.0]);
        let theta = control_step([0.9, 0.1], &Mat2::IDENTITY, [0.2, -0.2], &g);
        assert_eq!(theta, [0.98, 0.02]);
    }

    #[test]
    fn small_steps_pass_through() {
        let g = GuardConfig::for_cycles([1.0, 1.0]);
        let theta = control_step([0.5, 0.5], &Mat2::diag(2.0, 1.0), [0.05, -0.1], &g);
        assert!((theta[0] - 0.6).abs() < 1e-15);
        assert!((theta[1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn mode_round_trip() {
        for m in [Mode::Centralized, Mode::Decentralized] {
            assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
        }
        assert!("both".parse::<Mode>().is_err());
    }

    #[test]
    fn guard_validation() {
        let mut g = GuardConfig::for_cycles([1.0, 1.0]);
        assert!(g.validate().is_ok());
        g.theta_min[1] = 0.99;
        assert!(g.validate().is_err());
        let mut g = GuardConfig::for_cycles([1.0, 1.0]);
        g.epsilon_j = 0.0;
        assert!(g.validate().is_err());
    }
}
