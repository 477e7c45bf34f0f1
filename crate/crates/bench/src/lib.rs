//! Shared inputs for the criterion benchmarks.

use tandem_core::scenario::replication_inputs;
use tandem_core::{default_paper_config, ExperimentConfig, PiecewiseConstantRate};

/// Default experiment with `cycles` control cycles.
pub fn config(cycles: usize) -> ExperimentConfig {
    let mut cfg = default_paper_config();
    cfg.num_control_cycles = cycles;
    cfg
}

/// Arrival and cross-traffic rates for replication 0 over `horizon`.
pub fn inputs(cfg: &ExperimentConfig, horizon: f64) -> (PiecewiseConstantRate, PiecewiseConstantRate) {
    replication_inputs(cfg, 0, horizon).expect("default config generates inputs")
}
