//! Central finite differences over frozen input realizations, used to
//! check the IPA Jacobian.

pub mod suite;

pub use suite::{deterministic_suite, scenario_s0, scenario_s1, stochastic_suite};

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::harness::fmt_f64;
use crate::ipa::{IpaEstimator, JacobianEstimate};
use crate::rate::PiecewiseConstantRate;
use crate::sim::{queue_integral, simulate, EventKind, PhasePlan, ServiceProfile, TandemTrajectory};

/// Inputs held fixed while the red durations are perturbed. Outputs are
/// averaged over `[0, horizon)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenScenario {
    pub label: String,
    pub alpha1: PiecewiseConstantRate,
    pub alpha2_tilde: PiecewiseConstantRate,
    pub cycle: [f64; 2],
    pub service: ServiceProfile,
    pub phi: f64,
    pub x0: [f64; 2],
    pub horizon: f64,
}

impl FrozenScenario {
    pub fn simulate(&self, theta: [f64; 2]) -> Result<TandemTrajectory> {
        let plan = PhasePlan::new(self.cycle, theta)?;
        simulate(&self.alpha1, &self.alpha2_tilde, &plan, &self.service, self.phi, self.x0, self.horizon)
    }

    pub fn outputs(&self, theta: [f64; 2]) -> Result<[f64; 2]> {
        let traj = self.simulate(theta)?;
        let (g1, g2) = queue_integral(&traj, (0.0, self.horizon))?;
        Ok([g1, g2])
    }

    pub fn ipa_jacobian(&self, theta: [f64; 2], variant: IpaVariant) -> Result<JacobianEstimate> {
        let traj = self.simulate(theta)?;
        let mut est = IpaEstimator::for_trajectory(&traj);
        if variant == IpaVariant::WithoutReleaseTerm {
            est.disable_release_term();
        }
        est.consume(traj.events())?;
        est.finish(traj.end())
    }
}

/// Which estimator the checker compares against finite differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IpaVariant {
    #[default]
    Standard,
    /// Known-bad estimator missing the queue-1 emptying term.
    #[doc(hidden)]
    WithoutReleaseTerm,
}

fn perturbed(theta: [f64; 2], j: usize, delta: f64, cycle: [f64; 2]) -> Result<[f64; 2]> {
    let mut t = theta;
    t[j] += delta;
    if !(t[j] > 0.0 && t[j] < cycle[j]) {
        return Err(Error::PerturbationOutOfRange { queue: j + 1, value: t[j], cycle: cycle[j] });
    }
    Ok(t)
}

/// `d G_i / d theta_j` by central differences with step `h`, reusing the
/// same input realizations for every run.
pub fn fd_jacobian(sc: &FrozenScenario, theta: [f64; 2], h: f64) -> Result<[[f64; 2]; 2]> {
    Ok(fd_runs(sc, theta, h)?.0)
}

fn kinds(traj: &TandemTrajectory) -> Vec<EventKind> {
    traj.events().iter().map(|e| e.kind).collect()
}

/// Finite-difference matrix, plus for each column whether either perturbed
/// run has a different event sequence from the base run.
fn fd_runs(sc: &FrozenScenario, theta: [f64; 2], h: f64) -> Result<([[f64; 2]; 2], [bool; 2])> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidStep(h));
    }
    let base = kinds(&sc.simulate(theta)?);
    let mut m = [[0.0; 2]; 2];
    let mut changed = [false; 2];
    for j in 0..2 {
        let plus = sc.simulate(perturbed(theta, j, h, sc.cycle)?)?;
        let minus = sc.simulate(perturbed(theta, j, -h, sc.cycle)?)?;
        let gp = queue_integral(&plus, (0.0, sc.horizon))?;
        let gm = queue_integral(&minus, (0.0, sc.horizon))?;
        m[0][j] = (gp.0 - gm.0) / (2.0 * h);
        m[1][j] = (gp.1 - gm.1) / (2.0 * h);
        changed[j] = kinds(&plus) != base || kinds(&minus) != base;
    }
    Ok((m, changed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The event sequence changes within `theta +- h`; excluded from pass/fail.
    Flagged,
}

/// Comparison of one Jacobian entry at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub label: String,
    pub theta: [f64; 2],
    /// Zero-based `(row, column)`.
    pub entry: (usize, usize),
    pub ipa: f64,
    pub fd: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub status: CheckStatus,
}

/// Floor of the relative-error denominator.
pub const REL_FLOOR: f64 = 1e-9;

/// A scenario together with the points and tolerance to check it at.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckCase {
    pub scenario: FrozenScenario,
    pub thetas: Vec<[f64; 2]>,
    pub h: f64,
    pub tolerance: f64,
}

/// One report per case, operating point and Jacobian entry.
pub fn grad_check(cases: &[CheckCase], variant: IpaVariant) -> Result<Vec<GradCheckReport>> {
    let mut out = Vec::new();
    for case in cases {
        for &theta in &case.thetas {
            let ipa = case.scenario.ipa_jacobian(theta, variant)?.as_matrix();
            let (fd, changed) = fd_runs(&case.scenario, theta, case.h)?;
            for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let abs_err = (ipa[i][j] - fd[i][j]).abs();
                let rel_err = abs_err / fd[i][j].abs().max(REL_FLOOR);
                let status = if changed[j] {
                    CheckStatus::Flagged
                } else if rel_err <= case.tolerance {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail
                };
                out.push(GradCheckReport {
                    label: case.scenario.label.clone(),
                    theta,
                    entry: (i, j),
                    ipa: ipa[i][j],
                    fd: fd[i][j],
                    abs_err,
                    rel_err,
                    tolerance: case.tolerance,
                    status,
                });
            }
        }
    }
    Ok(out)
}

pub const REPORT_COLUMNS: &str = "scenario,theta1,theta2,entry,ipa,fd,abs_err,rel_err,tolerance,status";

pub fn reports_to_csv(reports: &[GradCheckReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{REPORT_COLUMNS}");
    for r in reports {
        let status = match r.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Flagged => "flagged",
        };
        let _ = writeln!(
            out,
            "{},{},{},j{}{},{},{},{},{},{},{}",
            r.label,
            fmt_f64(r.theta[0]),
            fmt_f64(r.theta[1]),
            r.entry.0 + 1,
            r.entry.1 + 1,
            fmt_f64(r.ipa),
            fmt_f64(r.fd),
            fmt_f64(r.abs_err),
            fmt_f64(r.rel_err),
            fmt_f64(r.tolerance),
            status
        );
    }
    out
}
