//! Fundamental frequency by cycle counting over zero crossings.
//!
//! The reference method band-passes the fundamental with a composite
//! Butterworth pair (4th-order high-pass at 0.7x nominal, 4th-order
//! low-pass at 1.3x nominal — 35..65 Hz around 50 Hz), then counts whole
//! cycles between the first and last positive-going crossings of a 10 s
//! interval, interpolating crossing instants linearly.

use crate::dsp::filter::{apply_filter, design_filter, AnalogFilterSpec, Warmup};
use crate::error::{Error, Result};
use crate::signal::Waveform;

/// Measurement interval used by the reference method (s).
pub const MEASURE_INTERVAL_S: f64 = 10.0;

/// Positive-going zero-crossing instants (in seconds from the first
/// sample), linearly interpolated between the bracketing samples.
pub fn positive_crossings(samples: &[f64], fs: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 1..samples.len() {
        let (a, b) = (samples[i - 1], samples[i]);
        if a < 0.0 && b >= 0.0 {
            let frac = -a / (b - a);
            out.push((i as f64 - 1.0 + frac) / fs);
        }
    }
    out
}

/// Frequency from cycle count between the first and last crossing of the
/// provided crossing list.
pub fn frequency_from_crossings(crossings: &[f64]) -> Result<f64> {
    if crossings.len() < 2 {
        return Err(Error::DegenerateCrossings);
    }
    let elapsed = crossings[crossings.len() - 1] - crossings[0];
    if elapsed <= 0.0 {
        return Err(Error::DegenerateCrossings);
    }
    Ok((crossings.len() - 1) as f64 / elapsed)
}

/// Reference fundamental-frequency measurement.
///
/// `f_nominal` must lie within [42.5, 57.5] Hz and the waveform must span
/// at least 10 s; the last 10 s are evaluated so upstream transients have
/// died out.
pub fn fundamental_frequency(w: &Waveform, f_nominal: f64) -> Result<f64> {
    if !(42.5..=57.5).contains(&f_nominal) {
        return Err(Error::InvalidParam(format!(
            "f_nominal {f_nominal} Hz outside [42.5, 57.5]"
        )));
    }
    if w.duration_s() + 0.5 / w.fs < MEASURE_INTERVAL_S {
        return Err(Error::WindowTooShort {
            needed_s: MEASURE_INTERVAL_S,
            actual_s: w.duration_s(),
        });
    }

    let hp = design_filter(
        &AnalogFilterSpec::ButterworthHighpass {
            order: 4,
            cutoff_hz: 0.7 * f_nominal,
        },
        w.fs,
    )?;
    let lp = design_filter(
        &AnalogFilterSpec::ButterworthLowpass {
            order: 4,
            cutoff_hz: 1.3 * f_nominal,
        },
        w.fs,
    )?;
    let banded = apply_filter(&lp, &apply_filter(&hp, w, Warmup::SteadyStatePrefill)?, Warmup::SteadyStatePrefill)?;

    let tail = (MEASURE_INTERVAL_S * w.fs).round() as usize;
    let offset = banded.samples.len().saturating_sub(tail);
    let crossings = positive_crossings(&banded.samples[offset..], w.fs);
    frequency_from_crossings(&crossings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{synth_two_tone, SamplingSpec, TestSignalParams};

    fn wave(params: TestSignalParams, fs: f64) -> Waveform {
        synth_two_tone(&params, &SamplingSpec::new(fs)).unwrap()
    }

    #[test]
    fn pure_nominal_tone() {
        let w = wave(TestSignalParams::carrier_only(12.0), 10_000.0);
        let f = fundamental_frequency(&w, 50.0).unwrap();
        assert!((f - 50.0).abs() < 0.001, "f = {f}");
    }

    #[test]
    fn off_nominal_carrier() {
        let mut p = TestSignalParams::carrier_only(12.0);
        p.f_c = 49.8;
        let w = wave(p, 10_000.0);
        let f = fundamental_frequency(&w, 50.0).unwrap();
        assert!((f - 49.8).abs() < 0.001, "f = {f}");
    }

    #[test]
    fn high_frequency_component_rejected_by_band_pass() {
        let w = wave(TestSignalParams::two_tone(0.05, 500.0, 12.0), 10_000.0);
        let f = fundamental_frequency(&w, 50.0).unwrap();
        assert!((f - 50.0).abs() < 0.005, "f = {f}");
    }

    #[test]
    fn components_outside_pass_band_leave_reading_tight() {
        for fi in [10.0, 100.0, 150.0, 1000.0, 2000.0] {
            let w = wave(TestSignalParams::two_tone(0.1, fi, 12.0), 10_000.0);
            let f = fundamental_frequency(&w, 50.0).unwrap();
            assert!((f - 50.0).abs() < 0.005, "f_i = {fi}: f = {f}");
        }
    }

    #[test]
    fn short_input_rejected() {
        let w = wave(TestSignalParams::carrier_only(5.0), 10_000.0);
        assert!(matches!(
            fundamental_frequency(&w, 50.0),
            Err(Error::WindowTooShort { .. })
        ));
    }

    #[test]
    fn degenerate_dc_input_rejected() {
        let w = Waveform::new(vec![1.0; 120_000], 10_000.0, 0.0);
        assert!(matches!(
            fundamental_frequency(&w, 50.0),
            Err(Error::DegenerateCrossings)
        ));
    }
}
