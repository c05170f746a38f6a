//! Rate conversion by pointwise re-evaluation at the target instants.
//!
//! The optional anti-alias stage runs at the source rate; after that the
//! signal is read off at `n / fs_new` using local cubic (Catmull-Rom)
//! interpolation. No band-limiting is added beyond the explicit filter:
//! components above the new Nyquist frequency that survive the filter fold
//! to `|f - k*fs_new|`, which is exactly the mechanism the meter models
//! rely on.

use crate::dsp::filter::{apply_filter, DigitalFilter, Warmup};
use crate::error::Result;
use crate::signal::Waveform;

/// Catmull-Rom evaluation of `samples` at fractional position `pos`
/// (in source-sample units). Edge indices clamp.
fn cubic_at(samples: &[f64], pos: f64) -> f64 {
    let n = samples.len();
    let i = pos.floor() as isize;
    let mu = pos - i as f64;
    let pick = |k: isize| -> f64 {
        let j = (i + k).clamp(0, n as isize - 1) as usize;
        samples[j]
    };
    let (p0, p1, p2, p3) = (pick(-1), pick(0), pick(1), pick(2));
    let a0 = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
    let a1 = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
    let a2 = -0.5 * p0 + 0.5 * p2;
    ((a0 * mu + a1) * mu + a2) * mu + p1
}

/// Sample `w` at instants `n / fs_actual` and label the result `fs_label`.
///
/// Separating the physical sampling rate from the label models a meter
/// whose sample clock deviates from its nominal rate: the signal is read at
/// the true instants but interpreted downstream at the nominal rate.
pub fn sample_at_rate(w: &Waveform, fs_actual: f64, fs_label: f64) -> Waveform {
    if fs_actual == w.fs {
        return Waveform::new(w.samples.clone(), fs_label, w.start_time);
    }
    let n_out = (w.samples.len() as f64 * fs_actual / w.fs).round() as usize;
    let ratio = w.fs / fs_actual;
    let samples = (0..n_out).map(|n| cubic_at(&w.samples, n as f64 * ratio)).collect();
    Waveform::new(samples, fs_label, w.start_time)
}

/// Resample `w` to `fs_new`, optionally applying `anti_alias` (designed at
/// the source rate) first. Aliasing of surviving out-of-band content is
/// deliberate, not an error.
pub fn resample(
    w: &Waveform,
    fs_new: f64,
    anti_alias: Option<&DigitalFilter>,
) -> Result<Waveform> {
    let filtered;
    let source = match anti_alias {
        Some(f) => {
            filtered = apply_filter(f, w, Warmup::SteadyStatePrefill)?;
            &filtered
        }
        None => w,
    };
    Ok(sample_at_rate(source, fs_new, fs_new))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::filter::{design_filter, AnalogFilterSpec};
    use crate::signal::Waveform;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn tone(f: f64, fs: f64, dur: f64) -> Waveform {
        let n = (dur * fs).round() as usize;
        Waveform::new(
            (0..n)
                .map(|i| (2.0 * PI * f * i as f64 / fs).cos())
                .collect(),
            fs,
            0.0,
        )
    }

    /// rms of the component at `f` measured by direct correlation over an
    /// integer number of periods.
    fn component_rms(w: &Waveform, f: f64) -> f64 {
        let period_samples = w.fs / f;
        let periods = ((w.samples.len() as f64 - 1.0) / period_samples).floor();
        let n = (periods * period_samples).round() as usize;
        let mut re = 0.0;
        let mut im = 0.0;
        for i in 0..n {
            let phi = 2.0 * PI * f * i as f64 / w.fs;
            re += w.samples[i] * phi.cos();
            im += w.samples[i] * phi.sin();
        }
        (re.hypot(im)) * std::f64::consts::SQRT_2 / n as f64
    }

    #[test]
    fn in_band_tone_passes_unchanged() {
        let w = tone(40.0, 10_000.0, 1.0);
        let y = resample(&w, 1_600.0, None).unwrap();
        assert_eq!(y.len(), 1_600);
        assert_relative_eq!(
            component_rms(&y, 40.0),
            1.0 / 2.0_f64.sqrt(),
            max_relative = 0.01
        );
    }

    #[test]
    fn tone_above_nyquist_folds() {
        // 1560 Hz sampled at 1600 Hz appears at 40 Hz.
        let w = tone(1_560.0, 10_000.0, 1.0);
        let y = resample(&w, 1_600.0, None).unwrap();
        assert_relative_eq!(
            component_rms(&y, 40.0),
            1.0 / 2.0_f64.sqrt(),
            max_relative = 0.02
        );
    }

    #[test]
    fn anti_alias_filter_attenuates_the_fold() {
        let w = tone(1_560.0, 10_000.0, 1.0);
        let aaf = design_filter(
            &AnalogFilterSpec::ButterworthLowpass {
                order: 6,
                cutoff_hz: 700.0,
            },
            10_000.0,
        )
        .unwrap();
        let expected = aaf.magnitude_at(1_560.0) / 2.0_f64.sqrt();
        let y = resample(&w, 1_600.0, Some(&aaf)).unwrap();
        assert_relative_eq!(component_rms(&y, 40.0), expected, max_relative = 0.10);
    }

    #[test]
    fn identity_rate_is_exact() {
        let w = tone(123.0, 10_000.0, 0.25);
        let y = resample(&w, 10_000.0, None).unwrap();
        assert_eq!(w.samples, y.samples);
    }

    #[test]
    fn rate_label_differs_from_physical_rate() {
        let w = tone(50.0, 10_000.0, 1.0);
        // sample 100 ppm fast but keep the nominal label: the content
        // appears slightly below 50 Hz in label units
        let y = sample_at_rate(&w, 1_600.0 * (1.0 + 1e-4), 1_600.0);
        let shifted = 50.0 / (1.0 + 1e-4);
        assert_relative_eq!(
            component_rms(&y, shifted),
            1.0 / 2.0_f64.sqrt(),
            max_relative = 0.02
        );
    }
}
