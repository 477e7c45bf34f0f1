use crate::error::Result;
use crate::ipa::{estimate_jacobian, JacobianEstimate};
use crate::rate::PiecewiseConstantRate;
use crate::sim::{queue_integral, PhasePlan, ServiceProfile, Simulator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantResponse {
    pub y: [f64; 2],
    pub jacobian: JacobianEstimate,
}

/// Something that, given red durations for one control cycle, reports the
/// measured outputs and their Jacobian.
pub trait Plant {
    fn respond(&mut self, theta: [f64; 2]) -> Result<PlantResponse>;
}

/// Memoryless plant defined by a closure, handy for checking the regulator
/// in isolation.
pub struct StaticPlant<F>(pub F);

impl<F> Plant for StaticPlant<F>
where
    F: FnMut([f64; 2]) -> PlantResponse,
{
    fn respond(&mut self, theta: [f64; 2]) -> Result<PlantResponse> {
        Ok((self.0)(theta))
    }
}

/// The tandem intersections: each response simulates one control cycle
/// (a whole number of light-1 cycles) and estimates the Jacobian over it.
pub struct TrafficPlant<'a> {
    sim: Simulator<'a>,
    period: f64,
    now: f64,
}

impl<'a> TrafficPlant<'a> {
    pub fn new(
        alpha1: &'a PiecewiseConstantRate,
        alpha2_tilde: &'a PiecewiseConstantRate,
        plan: PhasePlan,
        service: ServiceProfile,
        phi: f64,
        x0: [f64; 2],
        cycles_per_control: usize,
    ) -> Result<Self> {
        let period = cycles_per_control as f64 * plan.cycle[0];
        if !(period > 0.0) {
            return Err(crate::Error::InvalidHorizon(period));
        }
        let mut sim = Simulator::new(alpha1, alpha2_tilde, plan, service, phi, x0)?;
        sim.set_control_period(period);
        Ok(Self { sim, period, now: 0.0 })
    }

    pub fn control_period(&self) -> f64 {
        self.period
    }

    pub fn simulator(&self) -> &Simulator<'a> {
        &self.sim
    }
}

impl Plant for TrafficPlant<'_> {
    fn respond(&mut self, theta: [f64; 2]) -> Result<PlantResponse> {
        self.sim.set_red(theta)?;
        let end = self.now + self.period;
        let seg = self.sim.advance(end)?;
        let (g1, g2) = queue_integral(&seg, (self.now, end))?;
        let jacobian = estimate_jacobian(&seg)?;
        self.now = end;
        Ok(PlantResponse { y: [g1, g2], jacobian })
    }
}
