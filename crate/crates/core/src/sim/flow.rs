//! Instantaneous flow relations between the two queues.

/// Outflow of queue 1: its service rate while it holds content, otherwise
/// the arrivals pass straight through.
pub fn outflow_rate(x1: f64, alpha_1: f64, beta_1: f64) -> f64 {
    if x1 > 0.0 {
        beta_1
    } else {
        alpha_1
    }
}

/// Inflow of queue 2: the routed fraction of queue 1's outflow plus cross
/// traffic.
pub fn merge_inflow(delta_1: f64, alpha_2_tilde: f64, phi: f64) -> f64 {
    phi * delta_1 + alpha_2_tilde
}
