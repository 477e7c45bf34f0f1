use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rate::PiecewiseConstantRate;
use crate::regulator::{GuardConfig, Mat2, Mode};
use crate::scenario::onoff::OnOffSpec;
use crate::sim::{PhasePlan, Queue, ServiceMode, ServiceProfile};

/// Staircase ramp used when `service_mode = ramp`: the rate starts at
/// `b0_frac * beta_max` and rises to `beta_max` in `steps` equal increments,
/// one every `step_len` time units of green.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampSpec {
    pub b0_frac: f64,
    pub steps: usize,
    pub step_len: f64,
}

impl RampSpec {
    pub fn staircase(&self, beta_max: f64) -> Result<PiecewiseConstantRate> {
        let n = self.steps as f64;
        let pairs: Vec<(f64, f64)> = (0..=self.steps)
            .map(|j| {
                let j = j as f64;
                (j * self.step_len, beta_max * (self.b0_frac * (n - j) + j) / n)
            })
            .collect();
        PiecewiseConstantRate::from_pairs(&pairs, (n + 1.0) * self.step_len)
    }
}

/// Full description of a closed-loop experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub cycle: [f64; 2],
    pub cycles_per_control: usize,
    pub num_control_cycles: usize,
    pub alpha1: OnOffSpec,
    pub alpha2_tilde: OnOffSpec,
    pub phi: f64,
    pub beta_max: [f64; 2],
    pub service_mode: ServiceMode,
    pub ramp: RampSpec,
    pub reference: [f64; 2],
    pub theta_init: [f64; 2],
    pub mode: Mode,
    pub eps_j: f64,
    /// Step cap as a fraction of each cycle length.
    pub step_cap: f64,
    pub theta_min_frac: f64,
    pub theta_max_frac: f64,
    /// Diagonal of the gain used before any Jacobian is available.
    pub initial_gain: [f64; 2],
    pub seed: u64,
    pub replications: usize,
}

pub fn default_paper_config() -> ExperimentConfig {
    let alpha1 = OnOffSpec { mean: 4.1, zeta: 0.3, off_max: 0.02, on_max: 0.063 };
    ExperimentConfig {
        cycle: [1.0, 1.0],
        cycles_per_control: 20,
        num_control_cycles: 50,
        alpha1,
        alpha2_tilde: OnOffSpec { mean: 0.41, ..alpha1 },
        phi: 0.9,
        beta_max: [5.0, 5.0],
        service_mode: ServiceMode::Constant,
        ramp: RampSpec { b0_frac: 0.2, steps: 4, step_len: 0.05 },
        reference: [0.1, 0.1],
        theta_init: [0.8, 0.8],
        mode: Mode::Centralized,
        eps_j: 1e-3,
        step_cap: 0.25,
        theta_min_frac: 0.02,
        theta_max_frac: 0.98,
        initial_gain: [1.0, 1.0],
        seed: 1,
        replications: 10,
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        default_paper_config()
    }
}

/// Recognized keys, in echo order.
pub const CONFIG_KEYS: &[&str] = &[
    "c1",
    "c2",
    "cycles_per_control",
    "num_control_cycles",
    "alpha1_mean",
    "alpha1_zeta",
    "alpha1_off_max",
    "alpha1_on_max",
    "alpha2_mean",
    "alpha2_zeta",
    "alpha2_off_max",
    "alpha2_on_max",
    "phi",
    "beta_max1",
    "beta_max2",
    "service_mode",
    "ramp_b0_frac",
    "ramp_steps",
    "ramp_step_len",
    "r1",
    "r2",
    "theta1_init",
    "theta2_init",
    "mode",
    "eps_j",
    "step_cap",
    "theta_min_frac",
    "theta_max_frac",
    "initial_gain1",
    "initial_gain2",
    "seed",
    "replications",
];

type FieldResult = std::result::Result<(), String>;

fn positive(v: f64) -> FieldResult {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(format!("must be positive and finite, got {v}"))
    }
}

fn nonnegative(v: f64) -> FieldResult {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(format!("must be nonnegative and finite, got {v}"))
    }
}

fn in_range(v: f64, lo: f64, hi: f64, hi_inclusive: bool) -> FieldResult {
    let ok = v >= lo && (v < hi || (hi_inclusive && v == hi));
    if ok {
        Ok(())
    } else {
        let close = if hi_inclusive { ']' } else { ')' };
        Err(format!("must lie in [{lo}, {hi}{close}, got {v}"))
    }
}

fn parse_f64(raw: &str) -> std::result::Result<f64, String> {
    raw.parse::<f64>().map_err(|_| format!("cannot parse `{raw}` as a number"))
}

fn parse_usize(raw: &str) -> std::result::Result<usize, String> {
    raw.parse::<usize>().map_err(|_| format!("cannot parse `{raw}` as a nonnegative integer"))
}

impl ExperimentConfig {
    /// Sets one key from its textual value, checking the value's own range.
    pub fn set(&mut self, key: &str, raw: &str) -> FieldResult {
        let f = || parse_f64(raw);
        match key {
            "c1" => self.cycle[0] = f().and_then(|v| positive(v).map(|_| v))?,
            "c2" => self.cycle[1] = f().and_then(|v| positive(v).map(|_| v))?,
            "cycles_per_control" => {
                let v = parse_usize(raw)?;
                if v == 0 {
                    return Err("must be at least 1".into());
                }
                self.cycles_per_control = v;
            }
            "num_control_cycles" => self.num_control_cycles = parse_usize(raw)?,
            "alpha1_mean" => self.alpha1.mean = f().and_then(|v| positive(v).map(|_| v))?,
            "alpha1_zeta" => self.alpha1.zeta = f().and_then(|v| in_range(v, 0.0, 1.0, false).map(|_| v))?,
            "alpha1_off_max" => self.alpha1.off_max = f().and_then(|v| positive(v).map(|_| v))?,
            "alpha1_on_max" => self.alpha1.on_max = f().and_then(|v| positive(v).map(|_| v))?,
            "alpha2_mean" => self.alpha2_tilde.mean = f().and_then(|v| positive(v).map(|_| v))?,
            "alpha2_zeta" => self.alpha2_tilde.zeta = f().and_then(|v| in_range(v, 0.0, 1.0, false).map(|_| v))?,
            "alpha2_off_max" => self.alpha2_tilde.off_max = f().and_then(|v| positive(v).map(|_| v))?,
            "alpha2_on_max" => self.alpha2_tilde.on_max = f().and_then(|v| positive(v).map(|_| v))?,
            "phi" => self.phi = f().and_then(|v| in_range(v, 0.0, 1.0, true).map(|_| v))?,
            "beta_max1" => self.beta_max[0] = f().and_then(|v| positive(v).map(|_| v))?,
            "beta_max2" => self.beta_max[1] = f().and_then(|v| positive(v).map(|_| v))?,
            "service_mode" => {
                self.service_mode = match raw {
                    "constant" => ServiceMode::Constant,
                    "ramp" => ServiceMode::Ramp,
                    other => return Err(format!("expected `constant` or `ramp`, got `{other}`")),
                }
            }
            "ramp_b0_frac" => self.ramp.b0_frac = f().and_then(|v| in_range(v, 0.0, 1.0, true).map(|_| v))?,
            "ramp_steps" => {
                let v = parse_usize(raw)?;
                if v == 0 {
                    return Err("must be at least 1".into());
                }
                self.ramp.steps = v;
            }
            "ramp_step_len" => self.ramp.step_len = f().and_then(|v| positive(v).map(|_| v))?,
            "r1" => self.reference[0] = f().and_then(|v| nonnegative(v).map(|_| v))?,
            "r2" => self.reference[1] = f().and_then(|v| nonnegative(v).map(|_| v))?,
            "theta1_init" => self.theta_init[0] = f().and_then(|v| positive(v).map(|_| v))?,
            "theta2_init" => self.theta_init[1] = f().and_then(|v| positive(v).map(|_| v))?,
            "mode" => self.mode = raw.parse()?,
            "eps_j" => self.eps_j = f().and_then(|v| positive(v).map(|_| v))?,
            "step_cap" => self.step_cap = f().and_then(|v| positive(v).map(|_| v))?,
            "theta_min_frac" => self.theta_min_frac = f().and_then(|v| in_range(v, 0.0, 1.0, false).map(|_| v))?,
            "theta_max_frac" => self.theta_max_frac = f().and_then(|v| in_range(v, 0.0, 1.0, false).map(|_| v))?,
            "initial_gain1" => self.initial_gain[0] = f().and_then(|v| if v.is_finite() { Ok(v) } else { Err(format!("must be finite, got {v}")) })?,
            "initial_gain2" => self.initial_gain[1] = f().and_then(|v| if v.is_finite() { Ok(v) } else { Err(format!("must be finite, got {v}")) })?,
            "seed" => self.seed = raw.parse::<u64>().map_err(|_| format!("cannot parse `{raw}` as an unsigned 64-bit integer"))?,
            "replications" => {
                let v = parse_usize(raw)?;
                if v == 0 {
                    return Err("must be at least 1".into());
                }
                self.replications = v;
            }
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Textual value of `key`, as written by [`ExperimentConfig::to_text`].
    pub fn get(&self, key: &str) -> Option<String> {
        let v = match key {
            "c1" => self.cycle[0].to_string(),
            "c2" => self.cycle[1].to_string(),
            "cycles_per_control" => self.cycles_per_control.to_string(),
            "num_control_cycles" => self.num_control_cycles.to_string(),
            "alpha1_mean" => self.alpha1.mean.to_string(),
            "alpha1_zeta" => self.alpha1.zeta.to_string(),
            "alpha1_off_max" => self.alpha1.off_max.to_string(),
            "alpha1_on_max" => self.alpha1.on_max.to_string(),
            "alpha2_mean" => self.alpha2_tilde.mean.to_string(),
            "alpha2_zeta" => self.alpha2_tilde.zeta.to_string(),
            "alpha2_off_max" => self.alpha2_tilde.off_max.to_string(),
            "alpha2_on_max" => self.alpha2_tilde.on_max.to_string(),
            "phi" => self.phi.to_string(),
            "beta_max1" => self.beta_max[0].to_string(),
            "beta_max2" => self.beta_max[1].to_string(),
            "service_mode" => match self.service_mode {
                ServiceMode::Constant => "constant".to_string(),
                ServiceMode::Ramp => "ramp".to_string(),
            },
            "ramp_b0_frac" => self.ramp.b0_frac.to_string(),
            "ramp_steps" => self.ramp.steps.to_string(),
            "ramp_step_len" => self.ramp.step_len.to_string(),
            "r1" => self.reference[0].to_string(),
            "r2" => self.reference[1].to_string(),
            "theta1_init" => self.theta_init[0].to_string(),
            "theta2_init" => self.theta_init[1].to_string(),
            "mode" => self.mode.to_string(),
            "eps_j" => self.eps_j.to_string(),
            "step_cap" => self.step_cap.to_string(),
            "theta_min_frac" => self.theta_min_frac.to_string(),
            "theta_max_frac" => self.theta_max_frac.to_string(),
            "initial_gain1" => self.initial_gain[0].to_string(),
            "initial_gain2" => self.initial_gain[1].to_string(),
            "seed" => self.seed.to_string(),
            "replications" => self.replications.to_string(),
            _ => return None,
        };
        Some(v)
    }

    /// Every key as `key = value`, one per line. Parsing the output gives
    /// back an identical config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in CONFIG_KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key).unwrap_or_default());
        }
        out
    }

    /// Checks constraints that involve more than one key. Returns the key to
    /// blame and a message.
    pub fn check_consistency(&self) -> std::result::Result<(), (&'static str, String)> {
        if !(self.theta_min_frac < self.theta_max_frac) {
            return Err((
                "theta_max_frac",
                format!("must exceed theta_min_frac ({}), got {}", self.theta_min_frac, self.theta_max_frac),
            ));
        }
        for (i, key) in ["theta1_init", "theta2_init"].into_iter().enumerate() {
            let (lo, hi) = (self.theta_min_frac * self.cycle[i], self.theta_max_frac * self.cycle[i]);
            if !(self.theta_init[i] >= lo && self.theta_init[i] <= hi) {
                return Err((key, format!("must lie in [{lo}, {hi}], got {}", self.theta_init[i])));
            }
        }
        if self.service_mode == ServiceMode::Ramp {
            if let Err(e) = self.service_profile() {
                return Err(("service_mode", e.to_string()));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for key in CONFIG_KEYS {
            let raw = self.get(key).unwrap_or_default();
            let mut probe = self.clone();
            if let Err(message) = probe.set(key, &raw) {
                return Err(Error::Config { line: 0, key: Some((*key).to_string()), message: format!("`{key}` {message}") });
            }
        }
        self.check_consistency()
            .map_err(|(key, message)| Error::Config { line: 0, key: Some(key.to_string()), message: format!("`{key}` {message}") })
    }

    pub fn guards(&self) -> GuardConfig {
        GuardConfig {
            epsilon_j: self.eps_j,
            step_cap: [self.step_cap * self.cycle[0], self.step_cap * self.cycle[1]],
            theta_min: [self.theta_min_frac * self.cycle[0], self.theta_min_frac * self.cycle[1]],
            theta_max: [self.theta_max_frac * self.cycle[0], self.theta_max_frac * self.cycle[1]],
        }
    }

    pub fn initial_gain_matrix(&self) -> Mat2 {
        Mat2::diag(self.initial_gain[0], self.initial_gain[1])
    }

    pub fn plan(&self) -> Result<PhasePlan> {
        PhasePlan::new(self.cycle, self.theta_init)
    }

    pub fn service_profile(&self) -> Result<ServiceProfile> {
        match self.service_mode {
            ServiceMode::Constant => ServiceProfile::constant(self.beta_max[0], self.beta_max[1]),
            ServiceMode::Ramp => ServiceProfile::ramp(
                self.ramp.staircase(self.beta_max[Queue::Q1.index()])?,
                self.ramp.staircase(self.beta_max[Queue::Q2.index()])?,
            ),
        }
    }

    /// Length of one control cycle.
    pub fn control_period(&self) -> f64 {
        self.cycles_per_control as f64 * self.cycle[0]
    }

    /// Simulated time covered by all control cycles.
    pub fn horizon(&self) -> f64 {
        self.num_control_cycles as f64 * self.control_period()
    }
}

/// Parses `key = value` lines on top of [`default_paper_config`]. Blank
/// lines and `#` comments are ignored.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = default_paper_config();
    let mut seen: Vec<(String, usize)> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Config { line, key: None, message: format!("expected `key = value`, got `{content}`") });
        };
        let (key, value) = (key.trim(), value.trim());
        let err = |message: String| Error::Config { line, key: Some(key.to_string()), message: format!("`{key}` {message}") };
        if !CONFIG_KEYS.contains(&key) {
            return Err(err("is not a recognized key".into()));
        }
        if let Some((_, first)) = seen.iter().find(|(k, _)| k == key) {
            return Err(err(format!("is repeated (first set on line {first})")));
        }
        seen.push((key.to_string(), line));
        cfg.set(key, value).map_err(err)?;
    }
    cfg.check_consistency().map_err(|(key, message)| {
        let line = seen.iter().find(|(k, _)| k == key).map_or(0, |(_, l)| *l);
        Error::Config { line, key: Some(key.to_string()), message: format!("`{key}` {message}") }
    })?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        line: 0,
        key: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_config_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_default() {
        assert_eq!(parse_config_str("").unwrap(), default_paper_config());
        assert_eq!(parse_config_str("# nothing\n\n").unwrap(), default_paper_config());
    }

    #[test]
    fn single_override() {
        let cfg = parse_config_str("theta1_init = 0.5 # comment").unwrap();
        let mut want = default_paper_config();
        want.theta_init[0] = 0.5;
        assert_eq!(cfg, want);
    }

    #[test]
    fn echo_round_trip() {
        let mut cfg = default_paper_config();
        cfg.alpha1.zeta = 0.15;
        cfg.mode = Mode::Decentralized;
        cfg.service_mode = ServiceMode::Ramp;
        assert_eq!(parse_config_str(&cfg.to_text()).unwrap(), cfg);
    }

    fn config_err(text: &str) -> (usize, Option<String>, String) {
        match parse_config_str(text) {
            Err(Error::Config { line, key, message }) => (line, key, message),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_key_and_line() {
        let (line, key, msg) = config_err("seed = 3\nphi = 1.5\n");
        assert_eq!((line, key.as_deref()), (2, Some("phi")));
        assert!(msg.contains("phi"));

        let (line, key, _) = config_err("phi = 0.5\nphi = 0.6\n");
        assert_eq!((line, key.as_deref()), (2, Some("phi")));

        let (line, key, _) = config_err("\nbogus = 1\n");
        assert_eq!((line, key.as_deref()), (2, Some("bogus")));

        let (line, key, _) = config_err("r1 = abc");
        assert_eq!((line, key.as_deref()), (1, Some("r1")));

        let (line, key, _) = config_err("c1 = 2\ntheta1_init = 1.99");
        assert_eq!((line, key.as_deref()), (2, Some("theta1_init")));

        let (line, key, _) = config_err("no equals sign");
        assert_eq!((line, key), (1, None));
    }

    #[test]
    fn default_is_valid() {
        default_paper_config().validate().unwrap();
        let mut cfg = default_paper_config();
        cfg.phi = 2.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn ramp_staircase() {
        let r = RampSpec { b0_frac: 0.2, steps: 4, step_len: 0.05 }.staircase(5.0).unwrap();
        let rates: Vec<f64> = r.segments().iter().map(|s| s.rate).collect();
        assert_eq!(rates, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(r.rate_at(10.0), 5.0);
    }
}
