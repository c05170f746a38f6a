//! Reference measurement chain: the class-A analyzer stand-in.
//!
//! Computes the four indicators every simulated meter is judged against:
//! short-term flicker severity (IEC 61000-4-15), subgrouped THD
//! (IEC 61000-4-7), fundamental frequency by cycle counting and 10-cycle
//! rms (IEC 61000-4-30 basic interval).

pub mod flicker;
pub mod frequency;
pub mod harmonics;

pub use flicker::{calibrate_flickermeter, flicker_pst, pinst_series, FlickermeterConfig};
pub use frequency::fundamental_frequency;
pub use harmonics::{harmonic_groups, harmonic_groups_up_to, thd_subgrouped, GroupedSpectrum};

use crate::dsp::spectrum::dft_integer_cycles_at;
use crate::error::{Error, Result};
use crate::signal::Waveform;
use harmonics::available_harmonics;
use serde::{Deserialize, Serialize};

/// Evaluation-window descriptor attached to a reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowMeta {
    /// Flicker observation span (s).
    pub flicker_observation_s: f64,
    /// Margin trimmed before all indicators (s).
    pub settle_s: f64,
    /// Number of 10-cycle windows aggregated for THD and rms.
    pub aggregated_windows: usize,
    /// Zero-crossing measurement interval for frequency (s).
    pub frequency_interval_s: f64,
}

/// Indicator bundle produced by the reference chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceReadings {
    /// Short-term flicker severity (dimensionless).
    pub pst: f64,
    /// Subgrouped total harmonic distortion (ratio, not percent).
    pub thd: f64,
    /// Measured fundamental frequency (Hz).
    pub f_meas_hz: f64,
    /// Mean 10-cycle rms voltage (V).
    pub u_rms_v: f64,
    pub window_meta: WindowMeta,
}

/// Span over which THD and rms are aggregated (s).
pub const AGGREGATION_SPAN_S: f64 = 10.0;

/// Contiguous non-overlapping 10-cycle rms values as (time, volts) pairs;
/// timestamps mark each window's start.
pub fn rms_sliding(w: &Waveform, f_c: f64) -> Result<Vec<(f64, f64)>> {
    if !(f_c.is_finite() && f_c > 0.0) {
        return Err(Error::InvalidParam("f_c must be finite and > 0".into()));
    }
    let window = (10.0 * w.fs / f_c).round() as usize;
    if window == 0 || w.samples.len() < window {
        return Err(Error::WindowTooShort {
            needed_s: 10.0 / f_c,
            actual_s: w.duration_s(),
        });
    }
    let mut out = Vec::with_capacity(w.samples.len() / window);
    for (k, chunk) in w.samples.chunks_exact(window).enumerate() {
        let ms = chunk.iter().map(|x| x * x).sum::<f64>() / window as f64;
        out.push((w.start_time + (k * window) as f64 / w.fs, ms.sqrt()));
    }
    Ok(out)
}

/// Grouped spectrum aggregated over every complete 10-cycle window of `w`
/// (root mean square per subgroup across windows).
pub fn grouped_over_windows(
    w: &Waveform,
    f_c: f64,
    max_harmonic: usize,
) -> Result<GroupedSpectrum> {
    let window = (10.0 * w.fs / f_c).round() as usize;
    if window == 0 || w.samples.len() < window {
        return Err(Error::WindowTooShort {
            needed_s: 10.0 / f_c,
            actual_s: w.duration_s(),
        });
    }
    let count = w.samples.len() / window;
    let mut harm_sq = vec![0.0; max_harmonic];
    let mut inter_sq = vec![0.0; max_harmonic - 1];
    for k in 0..count {
        let spectrum = dft_integer_cycles_at(w, f_c, 10, k * window)?;
        let g = harmonic_groups_up_to(&spectrum, max_harmonic)?;
        for (acc, v) in harm_sq.iter_mut().zip(&g.harmonic_rms) {
            *acc += v * v;
        }
        for (acc, v) in inter_sq.iter_mut().zip(&g.interharmonic_rms) {
            *acc += v * v;
        }
    }
    let n = count as f64;
    Ok(GroupedSpectrum {
        harmonic_rms: harm_sq.iter().map(|v| (v / n).sqrt()).collect(),
        interharmonic_rms: inter_sq.iter().map(|v| (v / n).sqrt()).collect(),
        max_harmonic,
    })
}

/// Run the full reference chain on one waveform.
///
/// The waveform must span the flicker observation window plus the settle
/// margin; THD, rms and frequency are evaluated on the post-settle
/// portion, flicker on the full record with the settle skipped internally.
pub fn analyze(w: &Waveform, cfg: &FlickermeterConfig) -> Result<ReferenceReadings> {
    let pst = flicker_pst(w, cfg)?;
    let trimmed = w.trimmed(cfg.settle_s);
    let f_c = cfg.nominal_freq_hz;

    // THD and rms aggregate over a 10 s slice of the settled signal (50
    // basic windows); frequency uses the last 10 s
    let head = trimmed.head(AGGREGATION_SPAN_S);
    let rms_series = rms_sliding(&head, f_c)?;
    let u_rms =
        rms_series.iter().map(|(_, v)| v).sum::<f64>() / rms_series.len() as f64;

    // reference chain must cover all 40 harmonic orders
    let probe = dft_integer_cycles_at(&head, f_c, 10, 0)?;
    if available_harmonics(&probe) < harmonics::MAX_HARMONIC {
        return Err(Error::InvalidParam(format!(
            "reference rate {} Hz cannot resolve harmonic {}",
            w.fs,
            harmonics::MAX_HARMONIC
        )));
    }
    let groups = grouped_over_windows(&head, f_c, harmonics::MAX_HARMONIC)?;
    let thd = thd_subgrouped(&groups)?;

    let f_meas = fundamental_frequency(&trimmed, f_c)?;

    Ok(ReferenceReadings {
        pst,
        thd,
        f_meas_hz: f_meas,
        u_rms_v: u_rms,
        window_meta: WindowMeta {
            flicker_observation_s: cfg.observation_s,
            settle_s: cfg.settle_s,
            aggregated_windows: rms_series.len(),
            frequency_interval_s: frequency::MEASURE_INTERVAL_S,
        },
    })
}
