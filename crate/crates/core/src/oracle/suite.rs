use crate::error::Result;
use crate::oracle::{CheckCase, FrozenScenario};
use crate::rate::PiecewiseConstantRate;
use crate::scenario::{gen_onoff, ExperimentConfig, RampSpec, Substream};
use crate::sim::{Process, ServiceProfile};

/// Step for hand-built scenarios; paths are piecewise linear in the red
/// durations, so differences are exact away from event-order changes.
pub const DETERMINISTIC_H: f64 = 1e-3;
pub const DETERMINISTIC_TOL: f64 = 1e-6;
pub const STOCHASTIC_H: f64 = 1e-5;
pub const STOCHASTIC_TOL: f64 = 1e-3;

struct Builder {
    label: &'static str,
    alpha1: Vec<(f64, f64)>,
    alpha2: Vec<(f64, f64)>,
    cycle: [f64; 2],
    beta: [f64; 2],
    ramp: Option<RampSpec>,
    phi: f64,
    x0: [f64; 2],
    horizon: f64,
}

impl Builder {
    fn new(label: &'static str, alpha1: f64, horizon: f64) -> Self {
        Self {
            label,
            alpha1: vec![(0.0, alpha1)],
            alpha2: vec![(0.0, 0.0)],
            cycle: [1.0, 1.0],
            beta: [5.0, 5.0],
            ramp: None,
            phi: 1.0,
            x0: [0.0, 0.0],
            horizon,
        }
    }

    fn alpha1(mut self, pairs: &[(f64, f64)]) -> Self {
        self.alpha1 = pairs.to_vec();
        self
    }

    fn alpha2(mut self, pairs: &[(f64, f64)]) -> Self {
        self.alpha2 = pairs.to_vec();
        self
    }

    fn cross(self, rate: f64) -> Self {
        self.alpha2(&[(0.0, rate)])
    }

    fn cycle(mut self, c1: f64, c2: f64) -> Self {
        self.cycle = [c1, c2];
        self
    }

    fn beta(mut self, b1: f64, b2: f64) -> Self {
        self.beta = [b1, b2];
        self
    }

    fn ramp(mut self, b0_frac: f64, steps: usize, step_len: f64) -> Self {
        self.ramp = Some(RampSpec { b0_frac, steps, step_len });
        self
    }

    fn phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    fn x0(mut self, x1: f64, x2: f64) -> Self {
        self.x0 = [x1, x2];
        self
    }

    fn build(self) -> Result<FrozenScenario> {
        let service = match self.ramp {
            None => ServiceProfile::constant(self.beta[0], self.beta[1])?,
            Some(r) => ServiceProfile::ramp(r.staircase(self.beta[0])?, r.staircase(self.beta[1])?)?,
        };
        Ok(FrozenScenario {
            label: self.label.to_string(),
            alpha1: PiecewiseConstantRate::from_pairs(&self.alpha1, self.horizon)?,
            alpha2_tilde: PiecewiseConstantRate::from_pairs(&self.alpha2, self.horizon)?,
            cycle: self.cycle,
            service,
            phi: self.phi,
            x0: self.x0,
            horizon: self.horizon,
        })
    }

    fn case(self, thetas: &[[f64; 2]]) -> Result<CheckCase> {
        Ok(CheckCase {
            scenario: self.build()?,
            thetas: thetas.to_vec(),
            h: DETERMINISTIC_H,
            tolerance: DETERMINISTIC_TOL,
        })
    }
}

/// One light cycle of constant arrivals into queue 1 only, red 0.4 on both.
pub fn scenario_s0() -> FrozenScenario {
    Builder::new("s0", 2.0, 1.0).build().expect("valid scenario")
}

/// Like S0 with a longer red on light 2, so queue 2 fills from queue 1's
/// discharge.
pub fn scenario_s1() -> FrozenScenario {
    let mut s = scenario_s0();
    s.label = "s1".to_string();
    s
}

/// Hand-built scenarios with constant or stepwise rates.
pub fn deterministic_suite() -> Result<Vec<CheckCase>> {
    let steps1 = [(0.0, 1.0), (0.55, 4.5), (1.7, 0.5), (2.3, 3.2), (3.35, 1.25)];
    let pulses = [
        (0.0, 0.0),
        (0.2, 6.0),
        (0.35, 0.0),
        (0.7, 6.0),
        (0.8, 0.0),
        (1.15, 7.0),
        (1.4, 0.0),
        (1.9, 5.5),
        (2.05, 0.0),
        (2.6, 6.5),
        (2.95, 0.0),
    ];
    let cases = vec![
        CheckCase { scenario: scenario_s0(), thetas: vec![[0.4, 0.4]], h: DETERMINISTIC_H, tolerance: DETERMINISTIC_TOL },
        CheckCase { scenario: scenario_s1(), thetas: vec![[0.4, 0.6]], h: DETERMINISTIC_H, tolerance: DETERMINISTIC_TOL },
        Builder::new("s1_long", 2.0, 1.5).case(&[[0.4, 0.6], [0.37, 0.62], [0.43, 0.55]])?,
        Builder::new("multi_cycle", 2.0, 4.0).cross(0.5).phi(0.9).case(&[[0.31, 0.52], [0.42, 0.37], [0.27, 0.66]])?,
        Builder::new("overloaded_q1", 4.2, 5.0).x0(1.5, 0.7).phi(0.9).cross(0.3).case(&[[0.23, 0.41], [0.27, 0.33]])?,
        Builder::new("busy_q2", 3.0, 4.0).cross(1.5).phi(0.8).beta(5.0, 4.5).case(&[[0.33, 0.21], [0.29, 0.28]])?,
        Builder::new("short_c2", 2.5, 4.3).cycle(1.0, 0.8).cross(0.3).phi(0.9).case(&[[0.35, 0.3], [0.41, 0.22]])?,
        Builder::new("long_c1", 2.2, 5.1).cycle(1.3, 1.0).cross(0.4).phi(0.85).case(&[[0.47, 0.36], [0.52, 0.44]])?,
        Builder::new("stepped_arrivals", 1.0, 4.0).alpha1(&steps1).alpha2(&[(0.0, 0.2), (1.1, 1.4), (2.9, 0.0)]).phi(0.9).case(&[[0.36, 0.43], [0.24, 0.57]])?,
        Builder::new("light_load", 1.5, 3.0).cross(0.2).phi(0.9).case(&[[0.52, 0.61], [0.33, 0.47]])?,
        Builder::new("low_phi", 2.6, 4.0).cross(2.2).phi(0.6).beta(5.0, 3.5).case(&[[0.34, 0.19], [0.38, 0.27]])?,
        Builder::new("q2_initially_busy", 1.8, 3.5).x0(0.0, 3.0).cross(0.6).phi(0.9).case(&[[0.41, 0.29], [0.36, 0.34]])?,
        Builder::new("q1_initially_busy", 2.4, 3.5).x0(4.0, 0.0).cross(0.3).phi(0.9).case(&[[0.28, 0.46], [0.31, 0.39]])?,
        Builder::new("ramp_service", 2.0, 3.0).ramp(0.2, 4, 0.05).cross(0.3).phi(0.9).case(&[[0.37, 0.52], [0.29, 0.61]])?,
        Builder::new("ramp_from_zero", 1.8, 3.0).ramp(0.0, 3, 0.07).cross(0.2).phi(1.0).case(&[[0.33, 0.48], [0.41, 0.44]])?,
        Builder::new("ramp_stepped_arrivals", 1.0, 4.0).alpha1(&steps1).ramp(0.3, 5, 0.04).cross(0.4).phi(0.9).case(&[[0.31, 0.42], [0.26, 0.53]])?,
        Builder::new("ramp_overloaded", 3.9, 4.0).ramp(0.25, 4, 0.06).x0(1.0, 0.5).cross(0.3).phi(0.9).case(&[[0.21, 0.33], [0.24, 0.29]])?,
        Builder::new("q2_slower", 2.0, 3.0).beta(6.0, 4.0).phi(1.0).case(&[[0.41, 0.57], [0.36, 0.63]])?,
        Builder::new("short_reds", 2.0, 3.0).cross(0.3).phi(0.9).case(&[[0.05, 0.08], [0.07, 0.11]])?,
        Builder::new("long_reds", 1.0, 3.0).cross(0.1).phi(0.9).case(&[[0.7, 0.75], [0.66, 0.71]])?,
        Builder::new("pulsed_arrivals", 0.0, 3.0).alpha1(&pulses).cross(0.25).phi(0.9).case(&[[0.43, 0.51], [0.38, 0.62]])?,
        Builder::new("unequal_cycles", 2.3, 4.4).cycle(0.9, 1.1).cross(0.5).phi(0.9).case(&[[0.32, 0.47], [0.36, 0.41]])?,
        Builder::new("q2_overloaded", 2.5, 4.0).cross(2.5).phi(0.9).x0(0.5, 1.0).case(&[[0.31, 0.12], [0.34, 0.14]])?,
        Builder::new("cross_only", 0.5, 3.0).cross(2.1).phi(0.5).beta(4.0, 4.5).case(&[[0.44, 0.38], [0.51, 0.33]])?,
    ];
    Ok(cases)
}

/// `n` realizations of the on/off arrivals of `cfg` over one control
/// cycle, each checked at two random operating points.
pub fn stochastic_suite(cfg: &ExperimentConfig, n: usize) -> Result<Vec<CheckCase>> {
    let horizon = cfg.cycles_per_control as f64 * cfg.cycle[0];
    let mut cases = Vec::with_capacity(n);
    for i in 0..n as u64 {
        let mut s1 = Substream::for_process(cfg.seed, i, Process::Alpha1);
        let mut s2 = Substream::for_process(cfg.seed, i, Process::Alpha2Tilde);
        let mut points = Substream::new(cfg.seed.wrapping_add(1000), i);
        let thetas = (0..2)
            .map(|_| {
                [
                    points.uniform(0.12 * cfg.cycle[0], 0.3 * cfg.cycle[0]),
                    points.uniform(0.15 * cfg.cycle[1], 0.45 * cfg.cycle[1]),
                ]
            })
            .collect();
        cases.push(CheckCase {
            scenario: FrozenScenario {
                label: format!("onoff_{i}"),
                alpha1: gen_onoff(&cfg.alpha1, &mut s1, horizon)?,
                alpha2_tilde: gen_onoff(&cfg.alpha2_tilde, &mut s2, horizon)?,
                cycle: cfg.cycle,
                service: cfg.service_profile()?,
                phi: cfg.phi,
                x0: [0.0, 0.0],
                horizon,
            },
            thetas,
            h: STOCHASTIC_H,
            tolerance: STOCHASTIC_TOL,
        });
    }
    Ok(cases)
}
