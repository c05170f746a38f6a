//! Cumulative-probability classifier for percentile extraction.
//!
//! This is the statistics stage of the flickermeter: instantaneous flicker
//! sensation samples are binned into a fixed logarithmic grid and the
//! "level exceeded p% of the time" percentiles are read back from the
//! cumulative occupancy, with linear interpolation inside a bin.

use crate::error::{Error, Result};

/// Default bin count; with the default span this keeps percentile error
/// below one part in a thousand of the value.
pub const DEFAULT_BINS: usize = 10_000;
/// Default span in instantaneous-flicker units.
pub const DEFAULT_RANGE: (f64, f64) = (1e-6, 1e4);

/// Log-spaced occupancy histogram with cumulative percentile queries.
#[derive(Debug, Clone)]
pub struct CumulativeClassifier {
    lo: f64,
    hi: f64,
    log_lo: f64,
    log_span: f64,
    counts: Vec<u64>,
    total: u64,
}

impl Default for CumulativeClassifier {
    fn default() -> Self {
        Self::new(DEFAULT_RANGE.0, DEFAULT_RANGE.1, DEFAULT_BINS)
    }
}

impl CumulativeClassifier {
    /// Classifier over `[lo, hi]` with `bins` log-spaced bins.
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        assert!(lo > 0.0 && hi > lo && bins >= 2, "invalid classifier grid");
        Self {
            lo,
            hi,
            log_lo: lo.ln(),
            log_span: (hi / lo).ln(),
            counts: vec![0; bins],
            total: 0,
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Lower edge of bin `i`.
    fn edge(&self, i: usize) -> f64 {
        (self.log_lo + self.log_span * i as f64 / self.counts.len() as f64).exp()
    }

    /// Record one observation. Values outside the span clamp to the
    /// extreme bins.
    pub fn add(&mut self, value: f64) {
        let bins = self.counts.len();
        let idx = if !(value > self.lo) {
            0
        } else if value >= self.hi {
            bins - 1
        } else {
            let frac = ((value.ln() - self.log_lo) / self.log_span) * bins as f64;
            (frac as usize).min(bins - 1)
        };
        self.counts[idx] += 1;
        self.total += 1;
    }

    pub fn add_all(&mut self, values: &[f64]) {
        for &v in values {
            self.add(v);
        }
    }

    /// Level exceeded `p` percent of the time (0 < p < 100).
    pub fn percentile(&self, p: f64) -> Result<f64> {
        if self.total == 0 {
            return Err(Error::EmptyClassifier);
        }
        if !(p > 0.0 && p < 100.0) {
            return Err(Error::InvalidParam(
                "percentile must lie strictly between 0 and 100".into(),
            ));
        }
        let target = self.total as f64 * p / 100.0;
        let mut cum = 0.0;
        for i in (0..self.counts.len()).rev() {
            let c = self.counts[i] as f64;
            if c == 0.0 {
                continue;
            }
            if cum + c >= target {
                let frac = (target - cum) / c;
                let upper = self.edge(i + 1);
                let lower = self.edge(i);
                return Ok(upper - frac * (upper - lower));
            }
            cum += c;
        }
        Ok(self.edge(0))
    }

    /// Width of the bin containing `value`; useful as a tolerance bound.
    pub fn bin_width_at(&self, value: f64) -> f64 {
        let bins = self.counts.len();
        let idx = if !(value > self.lo) {
            0
        } else if value >= self.hi {
            bins - 1
        } else {
            ((((value.ln() - self.log_lo) / self.log_span) * bins as f64) as usize).min(bins - 1)
        };
        self.edge(idx + 1) - self.edge(idx)
    }
}
