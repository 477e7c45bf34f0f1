use crate::error::{Error, Result};
use crate::rate::{PiecewiseConstantRate, Segment};
use crate::scenario::rng::Substream;

/// Alternating off/on arrival process. Off stages last `U[0, off_max)` with
/// rate 0; on stages last `U[0, on_max)` with rate
/// `U[(1 - zeta) mean, (1 + zeta) mean)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnOffSpec {
    pub mean: f64,
    pub zeta: f64,
    pub off_max: f64,
    pub on_max: f64,
}

impl OnOffSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidOnOff(m));
        if !(self.mean > 0.0 && self.mean.is_finite()) {
            return bad(format!("mean rate must be positive, got {}", self.mean));
        }
        if !(0.0..1.0).contains(&self.zeta) {
            return bad(format!("zeta must lie in [0, 1), got {}", self.zeta));
        }
        if !(self.off_max > 0.0 && self.off_max.is_finite()) {
            return bad(format!("off_max must be positive, got {}", self.off_max));
        }
        if !(self.on_max > 0.0 && self.on_max.is_finite()) {
            return bad(format!("on_max must be positive, got {}", self.on_max));
        }
        Ok(())
    }

    /// Long-run mean rate: on-fraction times the mean on-rate.
    pub fn long_run_rate(&self) -> f64 {
        self.mean * self.on_max / (self.on_max + self.off_max)
    }
}

/// Draws an on/off realization covering `[0, horizon]`, starting with an off
/// stage. Per stage the draws are: off duration, on duration, on rate.
/// Zero-length stages are merged away.
pub fn gen_onoff(spec: &OnOffSpec, rng: &mut Substream, horizon: f64) -> Result<PiecewiseConstantRate> {
    spec.validate()?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidHorizon(horizon));
    }
    let lo = (1.0 - spec.zeta) * spec.mean;
    let hi = (1.0 + spec.zeta) * spec.mean;
    let mut segments: Vec<Segment> = Vec::new();
    let mut push = |start: f64, rate: f64| match segments.last_mut() {
        Some(last) if last.start == start => last.rate = rate,
        Some(last) if last.rate == rate => {}
        _ => segments.push(Segment { start, rate }),
    };
    let mut t = 0.0;
    while t < horizon {
        push(t, 0.0);
        t += rng.uniform(0.0, spec.off_max);
        let on = rng.uniform(0.0, spec.on_max);
        let rate = rng.uniform(lo, hi);
        if t >= horizon {
            break;
        }
        push(t, rate);
        t += on;
    }
    PiecewiseConstantRate::new(segments, horizon)
}
