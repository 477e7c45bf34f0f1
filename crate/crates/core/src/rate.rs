//! Piecewise-constant flow-rate realizations.

use crate::error::{Error, Result};

/// One constant-rate stretch starting at `start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub rate: f64,
}

/// A realization of an exogenous rate process as `(epoch, rate)` segments.
///
/// The rate at `t` is the rate of the last segment whose start is `<= t`;
/// the last segment extends past `horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstantRate {
    segments: Vec<Segment>,
    horizon: f64,
}

impl PiecewiseConstantRate {
    pub fn new(segments: Vec<Segment>, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidHorizon(horizon));
        }
        let first = segments
            .first()
            .ok_or_else(|| Error::InvalidRate("no segments".into()))?;
        if first.start != 0.0 {
            return Err(Error::InvalidRate(format!(
                "first epoch must be 0, got {}",
                first.start
            )));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.rate >= 0.0) || !s.rate.is_finite() {
                return Err(Error::InvalidRate(format!(
                    "segment {i} has rate {}",
                    s.rate
                )));
            }
            if i > 0 && !(s.start > segments[i - 1].start) {
                return Err(Error::InvalidRate(format!(
                    "epochs not strictly increasing at segment {i}"
                )));
            }
        }
        Ok(Self { segments, horizon })
    }

    /// A single segment holding `rate` forever.
    pub fn constant(rate: f64, horizon: f64) -> Result<Self> {
        Self::new(vec![Segment { start: 0.0, rate }], horizon)
    }

    pub fn from_pairs(pairs: &[(f64, f64)], horizon: f64) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(start, rate)| Segment { start, rate })
                .collect(),
            horizon,
        )
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Index of the segment active at `t` (right-continuous).
    pub fn index_at(&self, t: f64) -> usize {
        self.segments
            .partition_point(|s| s.start <= t)
            .saturating_sub(1)
    }

    pub fn rate_at(&self, t: f64) -> f64 {
        self.segments[self.index_at(t)].rate
    }

    /// Integral of the rate over `[a, b)`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut total = 0.0;
        let mut i = self.index_at(a);
        let mut lo = a;
        while lo < b {
            let hi = self
                .segments
                .get(i + 1)
                .map_or(b, |s| s.start.min(b));
            total += self.segments[i].rate * (hi - lo);
            lo = hi;
            i += 1;
        }
        total
    }

    /// Time-weighted mean rate over `[0, horizon)`.
    pub fn mean_rate(&self) -> f64 {
        self.integral(0.0, self.horizon) / self.horizon
    }
}

/// Forward cursor over the jump epochs of a rate process.
#[derive(Debug, Clone)]
pub(crate) struct RateCursor {
    idx: usize,
}

impl RateCursor {
    pub(crate) fn at(process: &PiecewiseConstantRate, t: f64) -> Self {
        Self {
            idx: process.index_at(t),
        }
    }

    pub(crate) fn current(&self, process: &PiecewiseConstantRate) -> f64 {
        process.segments[self.idx].rate
    }

    /// Next epoch at which the rate actually changes value.
    pub(crate) fn next_jump(&self, process: &PiecewiseConstantRate) -> Option<f64> {
        let cur = process.segments[self.idx].rate;
        process.segments[self.idx + 1..]
            .iter()
            .find(|s| s.rate != cur)
            .map(|s| s.start)
    }

    /// Moves past every segment starting at or before `t`.
    pub(crate) fn advance_to(&mut self, process: &PiecewiseConstantRate, t: f64) {
        while self.idx + 1 < process.segments.len() && process.segments[self.idx + 1].start <= t {
            self.idx += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_segments() {
        assert!(PiecewiseConstantRate::from_pairs(&[(0.1, 1.0)], 1.0).is_err());
        assert!(PiecewiseConstantRate::from_pairs(&[(0.0, 1.0), (0.0, 2.0)], 1.0).is_err());
        assert!(PiecewiseConstantRate::from_pairs(&[(0.0, -1.0)], 1.0).is_err());
        assert!(PiecewiseConstantRate::from_pairs(&[], 1.0).is_err());
        assert!(PiecewiseConstantRate::constant(1.0, 0.0).is_err());
    }

    #[test]
    fn right_continuous_lookup() {
        let p = PiecewiseConstantRate::from_pairs(&[(0.0, 1.0), (0.5, 3.0), (0.7, 0.0)], 2.0)
            .unwrap();
        assert_eq!(p.rate_at(0.0), 1.0);
        assert_eq!(p.rate_at(0.4999), 1.0);
        assert_eq!(p.rate_at(0.5), 3.0);
        assert_eq!(p.rate_at(5.0), 0.0);
        assert!((p.integral(0.0, 1.0) - (0.5 + 0.6)).abs() < 1e-15);
        assert!((p.integral(0.6, 0.8) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn cursor_skips_equal_rates() {
        let p = PiecewiseConstantRate::from_pairs(&[(0.0, 1.0), (0.5, 1.0), (0.7, 2.0)], 2.0)
            .unwrap();
        let mut c = RateCursor::at(&p, 0.0);
        assert_eq!(c.next_jump(&p), Some(0.7));
        c.advance_to(&p, 0.7);
        assert_eq!(c.current(&p), 2.0);
        assert_eq!(c.next_jump(&p), None);
    }
}
