//! Seeded on/off arrival processes and experiment configuration.

pub mod config;
pub mod onoff;
pub mod rng;

pub use config::{default_paper_config, parse_config, parse_config_str, ExperimentConfig, RampSpec, CONFIG_KEYS};
pub use onoff::{gen_onoff, OnOffSpec};
pub use rng::{stream_id, Substream};

use crate::error::Result;
use crate::rate::PiecewiseConstantRate;
use crate::sim::Process;

/// Arrival realizations `(alpha1, alpha2_tilde)` for one replication,
/// covering `[0, horizon]`.
pub fn replication_inputs(cfg: &ExperimentConfig, replication: u64, horizon: f64) -> Result<(PiecewiseConstantRate, PiecewiseConstantRate)> {
    let mut s1 = Substream::for_process(cfg.seed, replication, Process::Alpha1);
    let mut s2 = Substream::for_process(cfg.seed, replication, Process::Alpha2Tilde);
    Ok((gen_onoff(&cfg.alpha1, &mut s1, horizon)?, gen_onoff(&cfg.alpha2_tilde, &mut s2, horizon)?))
}
