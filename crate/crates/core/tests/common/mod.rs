#![allow(dead_code)]

use proptest::prelude::*;
use tandem_core::ipa::{diag_closed_form, IpaEstimator};
use tandem_core::regulator::{invert_gain, GuardConfig, Mat2, Mode};
use tandem_core::sim::{simulate, PhasePlan, Queue, ServiceProfile, Simulator, TandemTrajectory};
use tandem_core::{JacobianEstimate, PiecewiseConstantRate};

/// A randomly drawn simulation setup. Rates and service levels are
/// multiples of 0.25 so that sums of service jumps are exact.
#[derive(Debug, Clone)]
pub struct Setup {
    pub alpha1: PiecewiseConstantRate,
    pub alpha2: PiecewiseConstantRate,
    pub plan: PhasePlan,
    pub service: ServiceProfile,
    pub phi: f64,
    pub x0: [f64; 2],
    pub horizon: f64,
}

impl Setup {
    pub fn run(&self) -> TandemTrajectory {
        simulate(&self.alpha1, &self.alpha2, &self.plan, &self.service, self.phi, self.x0, self.horizon).unwrap()
    }

    pub fn beta_max(&self) -> [f64; 2] {
        [self.service.beta_max(Queue::Q1), self.service.beta_max(Queue::Q2)]
    }
}

fn quarter(n: u32) -> f64 {
    n as f64 * 0.25
}

fn rate_strategy(max_quarters: u32, horizon: f64) -> impl Strategy<Value = PiecewiseConstantRate> {
    prop::collection::vec((0.01f64..1.0, 0..=max_quarters), 1..12).prop_map(move |raw| {
        let mut t = 0.0;
        let mut pairs = Vec::new();
        for (i, (gap, q)) in raw.into_iter().enumerate() {
            if i > 0 {
                t += gap * horizon / 4.0;
            }
            pairs.push((t, quarter(q)));
        }
        PiecewiseConstantRate::from_pairs(&pairs, horizon).unwrap()
    })
}

pub fn setup_strategy() -> impl Strategy<Value = Setup> {
    (2.0f64..6.0).prop_flat_map(|horizon| {
        (
            rate_strategy(32, horizon),
            rate_strategy(12, horizon),
            (0.5f64..1.5, 0.5f64..1.5, 0.05f64..0.95, 0.05f64..0.95),
            (4u32..32, 4u32..32, any::<bool>(), 0u32..5, 0.02f64..0.2),
            0.0f64..=1.0,
            (0u32..16, 0u32..16),
            Just(horizon),
        )
            .prop_map(|(alpha1, alpha2, (c1, c2, f1, f2), (b1, b2, ramp, b0, len), phi, (x1, x2), horizon)| {
                let plan = PhasePlan::new([c1, c2], [f1 * c1, f2 * c2]).unwrap();
                let service = if ramp {
                    let stair = |b: u32| {
                        let lo = b0.min(b);
                        let pairs: Vec<(f64, f64)> = (0..=4u32).map(|j| (j as f64 * len, quarter(lo + (b - lo) * j / 4))).collect();
                        PiecewiseConstantRate::from_pairs(&pairs, 5.0 * len).unwrap()
                    };
                    ServiceProfile::ramp(stair(b1), stair(b2)).unwrap()
                } else {
                    ServiceProfile::constant(quarter(b1), quarter(b2)).unwrap()
                };
                Setup { alpha1, alpha2, plan, service, phi, x0: [quarter(x1), quarter(x2)], horizon }
            })
    })
}

/// Constant-service setups only.
pub fn constant_setup_strategy() -> impl Strategy<Value = Setup> {
    setup_strategy().prop_filter("constant service", |s| s.service.mode() == tandem_core::sim::ServiceMode::Constant)
}

pub type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Contents are nonnegative and every queue path is continuous at its knots.
pub fn check_nonnegative_continuous(traj: &TandemTrajectory) -> Check {
    for bp in traj.breakpoints() {
        ensure(bp.x[0] >= 0.0 && bp.x[1] >= 0.0, || format!("negative content at {bp:?}"))?;
    }
    for q in Queue::BOTH {
        let knots = traj.knots(q);
        for w in knots.windows(2) {
            let carried = w[0].value_at(w[1].t);
            let scale = 1.0 + carried.abs();
            ensure((carried - w[1].x).abs() <= 1e-12 * scale, || {
                format!("queue {q} jumps at {}: {} -> {}", w[1].t, carried, w[1].x)
            })?;
            ensure(w[1].x >= 0.0, || format!("negative knot {:?}", w[1]))?;
        }
    }
    Ok(())
}

/// `x(b) - x(a) = integral of inflow minus outflow`, with the flows read
/// from the event annotations.
pub fn check_conservation(traj: &TandemTrajectory) -> Check {
    let mut cuts: Vec<f64> = traj.events().iter().map(|e| e.epoch).collect();
    cuts.push(traj.start());
    cuts.push(traj.end());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut net = [0.0f64; 2];
    let mut scale = 1.0f64;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let r = traj.rates_at(a);
        let mid = 0.5 * (a + b);
        let out2 = if traj.content_at(Queue::Q2, mid) > 0.0 || r.alpha2 > r.beta2 { r.beta2 } else { r.alpha2 };
        net[0] += (r.alpha1 - r.delta1) * (b - a);
        net[1] += (r.alpha2 - out2) * (b - a);
        scale = scale.max((r.alpha1 + r.alpha2 + r.beta1 + r.beta2) * (b - a));
    }
    for q in Queue::BOTH {
        let i = q.index();
        let change = traj.content_at(q, traj.end()) - traj.content_at(q, traj.start());
        ensure((change - net[i]).abs() <= 1e-9 * scale.max(1.0), || {
            format!("queue {q}: content change {change} vs net flow {}", net[i])
        })?;
    }
    Ok(())
}

/// Between events each queue's slope is `alpha - beta` when it holds
/// content and zero when it is empty.
pub fn check_slopes(traj: &TandemTrajectory) -> Check {
    for q in Queue::BOTH {
        let knots = traj.knots(q);
        for (j, k) in knots.iter().enumerate() {
            let end = knots.get(j + 1).map_or(traj.end(), |n| n.t);
            if end <= k.t || k.t < traj.start() {
                continue;
            }
            let mid = 0.5 * (k.t + end);
            let r = traj.rates_at(mid);
            let x = k.value_at(mid);
            let want = if x > 0.0 { r.alpha(q) - r.beta(q) } else { 0.0 };
            let got = if x > 0.0 { k.slope } else { 0.0 };
            ensure((want - got).abs() <= 1e-12 * (1.0 + want.abs()), || {
                format!("queue {q} slope {got} on [{}, {end}) but rates give {want}", k.t)
            })?;
        }
    }
    Ok(())
}

/// Feeds the event stream through the estimator and checks, after every
/// epoch, the reset and quantization rules.
pub fn check_ipa_reset_and_quantization(traj: &TandemTrajectory, beta_max: [f64; 2], quantized: bool) -> Check {
    let mut est = IpaEstimator::for_trajectory(traj);
    let events = traj.events();
    let mut i = 0;
    while i < events.len() {
        let epoch = events[i].epoch;
        while i < events.len() && events[i].epoch == epoch {
            est.on_event(&events[i]).map_err(|e| e.to_string())?;
            i += 1;
        }
        for q in Queue::BOTH {
            let d = est.diag(q);
            if !d.is_busy() {
                ensure(d.value() == 0.0, || format!("diag {q} = {} while empty at {epoch}", d.value()))?;
            }
            if quantized {
                let m = d.value() / beta_max[q.index()];
                ensure(m >= 0.0 && m == m.round(), || format!("diag {q} = {} not a multiple of {}", d.value(), beta_max[q.index()]))?;
            }
        }
        if !est.diag(Queue::Q2).is_busy() {
            ensure(est.cross().value() == 0.0, || format!("cross = {} while queue 2 empty at {epoch}", est.cross().value()))?;
        }
    }
    Ok(())
}

/// The busy-period sum formula agrees exactly with the event rules at
/// `samples` times spread over the trajectory.
pub fn check_closed_form(traj: &TandemTrajectory, samples: usize) -> Check {
    let events = traj.events();
    let mut times: Vec<f64> = (0..samples)
        .map(|j| traj.start() + (traj.end() - traj.start()) * (j as f64 + 0.5) / samples as f64)
        .collect();
    times.extend(events.iter().map(|e| e.epoch));
    times.sort_by(f64::total_cmp);
    let mut est = IpaEstimator::for_trajectory(traj);
    let mut next = 0;
    for t in times {
        while next < events.len() && events[next].epoch <= t {
            est.on_event(&events[next]).map_err(|e| e.to_string())?;
            next += 1;
        }
        for q in Queue::BOTH {
            let closed = diag_closed_form(traj, q, t);
            let rule = est.diag(q).value();
            ensure(closed == rule, || format!("queue {q} at {t}: closed form {closed}, event rule {rule}"))?;
        }
    }
    Ok(())
}

/// Splitting the run at `cut` and concatenating reproduces the one-shot
/// breakpoints and events bit for bit.
pub fn check_split(setup: &Setup, cut_frac: f64) -> Check {
    let whole = setup.run();
    let cut = setup.horizon * cut_frac;
    let mut sim = Simulator::new(&setup.alpha1, &setup.alpha2, setup.plan, setup.service.clone(), setup.phi, setup.x0).map_err(|e| e.to_string())?;
    let a = sim.advance(cut).map_err(|e| e.to_string())?;
    let b = sim.advance(setup.horizon).map_err(|e| e.to_string())?;
    let mut events = a.events().to_vec();
    events.extend_from_slice(b.events());
    ensure(events == whole.events(), || "event logs differ after split".to_string())?;
    let cut_is_epoch = whole.events().iter().any(|e| e.epoch == cut);
    let mut bps: Vec<_> = a.breakpoints().to_vec();
    bps.extend(b.breakpoints().iter().copied().filter(|p| p.epoch != cut));
    if !cut_is_epoch {
        bps.retain(|p| p.epoch != cut);
    }
    ensure(bps == whole.breakpoints(), || "breakpoints differ after split".to_string())?;
    for q in Queue::BOTH {
        let x = whole.content_at(q, cut);
        ensure(a.content_at(q, cut) == x && b.content_at(q, cut) == x, || format!("content of queue {q} at cut differs"))?;
    }
    Ok(())
}

/// Integrals over `[a, c)` equal the sum over `[a, b)` and `[b, c)`, for
/// both the queue contents and the running sensitivity integrals.
pub fn check_additivity(traj: &TandemTrajectory, b_frac: f64) -> Check {
    let (a, c) = (traj.start(), traj.end());
    let b = a + (c - a) * b_frac;
    for q in Queue::BOTH {
        let whole = traj.integral(q, a, c);
        let parts = traj.integral(q, a, b) + traj.integral(q, b, c);
        ensure((whole - parts).abs() <= 1e-12 * (1.0 + whole.abs()), || format!("queue {q}: {whole} vs {parts}"))?;
    }
    let events = traj.events();
    let split = events.partition_point(|e| e.epoch < b);
    let mut est = IpaEstimator::for_trajectory(traj);
    est.consume(&events[..split]).map_err(|e| e.to_string())?;
    let mut head = est.clone();
    head.finish(b).map_err(|e| e.to_string())?;
    let head = integrals(&head);

    // Tail integral summed by hand from the piecewise-constant values.
    let mut tail = [0.0; 3];
    let mut last = b;
    for e in &events[split..] {
        let v = est.values();
        for (slot, val) in tail.iter_mut().zip([v.0, v.1, v.2]) {
            *slot += val * (e.epoch - last);
        }
        est.on_event(e).map_err(|e| e.to_string())?;
        last = e.epoch;
    }
    let v = est.values();
    for (slot, val) in tail.iter_mut().zip([v.0, v.1, v.2]) {
        *slot += val * (c - last);
    }

    let mut whole = IpaEstimator::for_trajectory(traj);
    whole.consume(events).map_err(|e| e.to_string())?;
    whole.finish(c).map_err(|e| e.to_string())?;
    let whole = integrals(&whole);
    for k in 0..3 {
        let parts = head[k] + tail[k];
        ensure((whole[k] - parts).abs() <= 1e-12 * (1.0 + whole[k].abs()), || format!("accumulator {k}: {} vs {parts}", whole[k]))?;
    }
    Ok(())
}

fn integrals(est: &IpaEstimator) -> [f64; 3] {
    [est.diag(Queue::Q1).integral(), est.diag(Queue::Q2).integral(), est.cross().integral()]
}

pub fn jacobian_strategy() -> impl Strategy<Value = JacobianEstimate> {
    let pivot = prop_oneof![0.01f64..100.0, -100.0f64..-0.01];
    (pivot.clone(), -100.0f64..100.0, pivot).prop_map(|(j11, j21, j22)| JacobianEstimate { j11, j21, j22, window: 1.0 })
}

/// Centralized gains invert the Jacobian; both modes agree on the diagonal.
pub fn check_gain(j: &JacobianEstimate) -> Check {
    let guards = GuardConfig::for_cycles([1.0, 1.0]);
    let a = invert_gain(j, &Mat2::IDENTITY, Mode::Centralized, &guards);
    let d = invert_gain(j, &Mat2::IDENTITY, Mode::Decentralized, &guards);
    let prod = a * Mat2::from(*j);
    let err = prod.max_abs_diff(&Mat2::IDENTITY);
    ensure(err <= 1e-12, || format!("A*J - I = {err} for {j:?}"))?;
    ensure(d.is_diagonal(), || "decentralized gain not diagonal".to_string())?;
    ensure(d.0[0][0] == a.0[0][0] && d.0[1][1] == a.0[1][1], || "diagonals differ between modes".to_string())
}

/// Arbitrary per-cycle outputs and Jacobians, including singular and
/// wrong-signed ones, replayed regardless of the red durations.
pub fn replay_strategy() -> impl Strategy<Value = Vec<([f64; 2], JacobianEstimate)>> {
    let jac = (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0, 0u8..4).prop_map(|(a, b, c, zero)| JacobianEstimate {
        j11: if zero == 1 { 0.0 } else { a },
        j21: b,
        j22: if zero == 2 { 1e-9 } else { c },
        window: 1.0,
    });
    prop::collection::vec(((0.0f64..50.0, 0.0f64..50.0), jac).prop_map(|((y1, y2), j)| ([y1, y2], j)), 1..40)
}

/// Red durations stay inside their box whatever the plant reports.
pub fn check_box(responses: &[([f64; 2], JacobianEstimate)], cycle: [f64; 2], theta_frac: [f64; 2]) -> Check {
    use tandem_core::regulator::{run_closed_loop, ControllerState, PlantResponse, StaticPlant};
    let guards = GuardConfig::for_cycles(cycle);
    let theta0 = [
        guards.theta_min[0] + theta_frac[0] * (guards.theta_max[0] - guards.theta_min[0]),
        guards.theta_min[1] + theta_frac[1] * (guards.theta_max[1] - guards.theta_min[1]),
    ];
    for mode in [Mode::Centralized, Mode::Decentralized] {
        let mut state = ControllerState::new(theta0, [0.1, 0.1], Mat2::IDENTITY, mode, guards).map_err(|e| e.to_string())?;
        let mut k = 0;
        let mut plant = StaticPlant(|_theta: [f64; 2]| {
            let (y, jacobian) = responses[k % responses.len()];
            k += 1;
            PlantResponse { y, jacobian }
        });
        let records = run_closed_loop(&mut plant, &mut state, responses.len() + 5).map_err(|e| e.to_string())?;
        for r in &records {
            for i in 0..2 {
                ensure(r.theta[i] >= guards.theta_min[i] && r.theta[i] <= guards.theta_max[i], || {
                    format!("theta {:?} left the box at cycle {}", r.theta, r.k)
                })?;
            }
            if mode == Mode::Decentralized {
                ensure(r.gain.is_diagonal(), || "decentralized gain not diagonal".to_string())?;
            }
        }
        for i in 0..2 {
            ensure(state.theta[i] >= guards.theta_min[i] && state.theta[i] <= guards.theta_max[i], || "final theta outside box".to_string())?;
        }
    }
    Ok(())
}

/// Two runs of the same seeded config give identical series and CSV text.
pub fn check_seeded_determinism(seed: u64, zeta: f64, decentralized: bool, replication: u64) -> Check {
    use tandem_core::harness::run_replication;
    let mut cfg = tandem_core::default_paper_config();
    cfg.seed = seed;
    cfg.alpha1.zeta = zeta;
    cfg.alpha2_tilde.zeta = zeta;
    cfg.mode = if decentralized { Mode::Decentralized } else { Mode::Centralized };
    cfg.cycles_per_control = 3;
    cfg.num_control_cycles = 4;
    let a = run_replication(&cfg, replication).map_err(|e| e.to_string())?;
    let b = run_replication(&cfg, replication).map_err(|e| e.to_string())?;
    ensure(a == b, || "seeded runs differ".to_string())?;
    ensure(a.to_csv() == b.to_csv(), || "seeded CSV output differs".to_string())
}

/// Smooth plant with a lower-triangular, nonsingular Jacobian.
fn newton_plant(u: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
    let y = [(0.5 * u[0]).exp() - 1.0 + 0.2 * u[0], 0.3 * u[0].sin() + u[1] + 0.1 * u[1].powi(3)];
    let j = [[0.5 * (0.5 * u[0]).exp() + 0.2, 0.0], [0.3 * u[0].cos(), 1.0 + 0.3 * u[1] * u[1]]];
    (y, j)
}

/// Plain Newton-Raphson with a general 2x2 solve.
fn direct_newton(u0: [f64; 2], r: [f64; 2], steps: usize) -> Vec<[f64; 2]> {
    let mut u = u0;
    let mut out = vec![u];
    for _ in 1..steps {
        let (g, j) = newton_plant(u);
        let e = [r[0] - g[0], r[1] - g[1]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let d0 = (e[0] * j[1][1] - j[0][1] * e[1]) / det;
        let d1 = (j[0][0] * e[1] - e[0] * j[1][0]) / det;
        u = [u[0] + d0, u[1] + d1];
        out.push(u);
    }
    out
}

/// The centralized regulator on a static plant retraces Newton's iterates.
pub fn check_newton_equivalence(steps: usize, tol: f64) -> Check {
    use tandem_core::regulator::{run_closed_loop, ControllerState, PlantResponse, StaticPlant};
    let r = [0.7, -0.4];
    let u0 = [1.5, 2.0];
    let guards = GuardConfig { epsilon_j: 1e-3, step_cap: [1e6, 1e6], theta_min: [-1e6, -1e6], theta_max: [1e6, 1e6] };
    let mut plant = StaticPlant(|u: [f64; 2]| {
        let (y, j) = newton_plant(u);
        PlantResponse { y, jacobian: JacobianEstimate { j11: j[0][0], j21: j[1][0], j22: j[1][1], window: 1.0 } }
    });
    let mut state = ControllerState::new(u0, r, Mat2::IDENTITY, Mode::Centralized, guards).map_err(|e| e.to_string())?;
    let records = run_closed_loop(&mut plant, &mut state, steps).map_err(|e| e.to_string())?;
    let reference = direct_newton(u0, r, steps);
    for (rec, u) in records.iter().zip(&reference) {
        let d = (rec.theta[0] - u[0]).abs().max((rec.theta[1] - u[1]).abs());
        ensure(d <= tol, || format!("step {}: regulator {:?} vs newton {:?}", rec.k, rec.theta, u))?;
    }
    ensure(records.len() == steps, || "wrong number of steps".to_string())
}
