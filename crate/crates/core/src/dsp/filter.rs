//! IIR filter design and application.
//!
//! Analog prototypes (Butterworth, first-order, or explicit rational
//! sections) are discretized with the bilinear transform, prewarped so the
//! digital magnitude matches the analog one exactly at the section's
//! characteristic frequency. Filters run as cascaded second-order sections
//! in direct form II transposed, which keeps the sub-hertz flicker corners
//! well conditioned at 10 kHz sampling rates.

use crate::error::{Error, Result};
use crate::signal::Waveform;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// One continuous-time rational section
/// `H(s) = (b0 + b1 s + b2 s^2) / (a0 + a1 s + a2 s^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalogSection {
    /// Numerator coefficients in ascending powers of s.
    pub num: [f64; 3],
    /// Denominator coefficients in ascending powers of s.
    pub den: [f64; 3],
    /// Frequency (Hz) at which the bilinear transform is prewarped.
    pub prewarp_hz: f64,
}

/// Analog filter prototype.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalogFilterSpec {
    ButterworthLowpass { order: usize, cutoff_hz: f64 },
    ButterworthHighpass { order: usize, cutoff_hz: f64 },
    FirstOrderLowpass { cutoff_hz: f64 },
    FirstOrderHighpass { cutoff_hz: f64 },
    RationalSections { sections: Vec<AnalogSection> },
}

impl AnalogFilterSpec {
    /// Magnitude of the analog prototype at `f_hz`.
    pub fn analog_magnitude(&self, f_hz: f64) -> f64 {
        match self {
            AnalogFilterSpec::ButterworthLowpass { order, cutoff_hz } => {
                1.0 / (1.0 + (f_hz / cutoff_hz).powi(2 * *order as i32)).sqrt()
            }
            AnalogFilterSpec::ButterworthHighpass { order, cutoff_hz } => {
                if f_hz == 0.0 {
                    0.0
                } else {
                    1.0 / (1.0 + (cutoff_hz / f_hz).powi(2 * *order as i32)).sqrt()
                }
            }
            AnalogFilterSpec::FirstOrderLowpass { cutoff_hz } => {
                1.0 / (1.0 + (f_hz / cutoff_hz).powi(2)).sqrt()
            }
            AnalogFilterSpec::FirstOrderHighpass { cutoff_hz } => {
                if f_hz == 0.0 {
                    0.0
                } else {
                    1.0 / (1.0 + (cutoff_hz / f_hz).powi(2)).sqrt()
                }
            }
            AnalogFilterSpec::RationalSections { sections } => {
                let w = 2.0 * PI * f_hz;
                sections
                    .iter()
                    .map(|s| {
                        let num = rational_eval(&s.num, w);
                        let den = rational_eval(&s.den, w);
                        num / den
                    })
                    .product()
            }
        }
    }

    fn analog_sections(&self) -> Result<Vec<AnalogSection>> {
        match self {
            AnalogFilterSpec::ButterworthLowpass { order, cutoff_hz } => {
                check_order_cutoff(*order, *cutoff_hz)?;
                Ok(butterworth_sections(*order, *cutoff_hz, false))
            }
            AnalogFilterSpec::ButterworthHighpass { order, cutoff_hz } => {
                check_order_cutoff(*order, *cutoff_hz)?;
                Ok(butterworth_sections(*order, *cutoff_hz, true))
            }
            AnalogFilterSpec::FirstOrderLowpass { cutoff_hz } => {
                check_order_cutoff(1, *cutoff_hz)?;
                let w = 2.0 * PI * cutoff_hz;
                Ok(vec![AnalogSection {
                    num: [w, 0.0, 0.0],
                    den: [w, 1.0, 0.0],
                    prewarp_hz: *cutoff_hz,
                }])
            }
            AnalogFilterSpec::FirstOrderHighpass { cutoff_hz } => {
                check_order_cutoff(1, *cutoff_hz)?;
                let w = 2.0 * PI * cutoff_hz;
                Ok(vec![AnalogSection {
                    num: [0.0, 1.0, 0.0],
                    den: [w, 1.0, 0.0],
                    prewarp_hz: *cutoff_hz,
                }])
            }
            AnalogFilterSpec::RationalSections { sections } => {
                if sections.is_empty() {
                    return Err(Error::InvalidParam(
                        "rational_sections needs at least one section".into(),
                    ));
                }
                for s in sections {
                    if s.prewarp_hz <= 0.0 || !s.prewarp_hz.is_finite() {
                        return Err(Error::InvalidParam("prewarp_hz must be > 0".into()));
                    }
                }
                Ok(sections.clone())
            }
        }
    }
}

fn check_order_cutoff(order: usize, cutoff_hz: f64) -> Result<()> {
    if order < 1 {
        return Err(Error::InvalidParam("filter order must be >= 1".into()));
    }
    if !(cutoff_hz.is_finite() && cutoff_hz > 0.0) {
        return Err(Error::InvalidParam("cutoff must be finite and > 0".into()));
    }
    Ok(())
}

/// |b0 + b1*(jw) + b2*(jw)^2|
fn rational_eval(c: &[f64; 3], w: f64) -> f64 {
    let re = c[0] - c[2] * w * w;
    let im = c[1] * w;
    re.hypot(im)
}

/// Butterworth prototype split into unity-gain analog sections at the given
/// cutoff; `highpass` swaps the zeros from infinity to the origin.
fn butterworth_sections(order: usize, cutoff_hz: f64, highpass: bool) -> Vec<AnalogSection> {
    let wc = 2.0 * PI * cutoff_hz;
    let mut sections = Vec::new();
    let pairs = order / 2;
    for k in 0..pairs {
        // pole pair k of the normalized prototype: s^2 + 2 sin(theta) s + 1
        let theta = PI * (2.0 * (k as f64) + 1.0) / (2.0 * order as f64);
        let damping = 2.0 * theta.sin();
        let (num, den) = if highpass {
            ([0.0, 0.0, 1.0], [wc * wc, damping * wc, 1.0])
        } else {
            ([wc * wc, 0.0, 0.0], [wc * wc, damping * wc, 1.0])
        };
        sections.push(AnalogSection {
            num,
            den,
            prewarp_hz: cutoff_hz,
        });
    }
    if order % 2 == 1 {
        let (num, den) = if highpass {
            ([0.0, 1.0, 0.0], [wc, 1.0, 0.0])
        } else {
            ([wc, 0.0, 0.0], [wc, 1.0, 0.0])
        };
        sections.push(AnalogSection {
            num,
            den,
            prewarp_hz: cutoff_hz,
        });
    }
    sections
}

/// One digital biquad, normalized so a0 = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    /// DC gain H(z=1).
    fn dc_gain(&self) -> f64 {
        (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)
    }

    /// Jury stability test for a second-order denominator.
    fn is_stable(&self) -> bool {
        self.a2.abs() < 1.0 && self.a1.abs() < 1.0 + self.a2
    }

    fn magnitude_at(&self, w: f64) -> f64 {
        // evaluate at z = e^{jw}
        let (c1, s1) = (w.cos(), w.sin());
        let (c2, s2) = ((2.0 * w).cos(), (2.0 * w).sin());
        let num_re = self.b0 + self.b1 * c1 + self.b2 * c2;
        let num_im = -(self.b1 * s1 + self.b2 * s2);
        let den_re = 1.0 + self.a1 * c1 + self.a2 * c2;
        let den_im = -(self.a1 * s1 + self.a2 * s2);
        num_re.hypot(num_im) / den_re.hypot(den_im)
    }
}

/// Warmup policy for filter application.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Warmup {
    /// Delay registers start at zero.
    ZeroState,
    /// Registers are initialized as if the first sample had been applied
    /// since t = -inf, suppressing start-up transients on short windows.
    SteadyStatePrefill,
}

/// Digital filter as a biquad cascade bound to its design rate.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitalFilter {
    sections: Vec<Biquad>,
    fs: f64,
}

impl DigitalFilter {
    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    /// Magnitude response at `f_hz`.
    pub fn magnitude_at(&self, f_hz: f64) -> f64 {
        let w = 2.0 * PI * f_hz / self.fs;
        self.sections.iter().map(|s| s.magnitude_at(w)).product()
    }

    /// Run the cascade over raw samples with an explicit prefill value.
    ///
    /// Each section's registers start at the steady state they would hold
    /// for a constant input equal to `prefill` (propagated through the
    /// cascade by each section's DC gain).
    pub fn run_prefilled(&self, samples: &[f64], prefill: f64) -> Vec<f64> {
        let mut out = samples.to_vec();
        let mut level = prefill;
        for sec in &self.sections {
            let y0 = level * sec.dc_gain();
            let s2 = sec.b2 * level - sec.a2 * y0;
            let s1 = sec.b1 * level - sec.a1 * y0 + s2;
            run_section(sec, &mut out, s1, s2);
            level = y0;
        }
        out
    }

    fn run_zero_state(&self, samples: &[f64]) -> Vec<f64> {
        let mut out = samples.to_vec();
        for sec in &self.sections {
            run_section(sec, &mut out, 0.0, 0.0);
        }
        out
    }
}

fn run_section(sec: &Biquad, buf: &mut [f64], mut s1: f64, mut s2: f64) {
    for x in buf.iter_mut() {
        let input = *x;
        let y = sec.b0 * input + s1;
        s1 = sec.b1 * input - sec.a1 * y + s2;
        s2 = sec.b2 * input - sec.a2 * y;
        *x = y;
    }
}

/// Discretize an analog prototype at sampling rate `fs`.
///
/// Every section is prewarped at its own characteristic frequency, so the
/// digital magnitude at that frequency matches the analog prototype
/// exactly; sections whose corner would sit at or above Nyquist are
/// rejected. Each resulting biquad is checked for stability.
pub fn design_filter(spec: &AnalogFilterSpec, fs: f64) -> Result<DigitalFilter> {
    if !(fs.is_finite() && fs > 0.0) {
        return Err(Error::InvalidParam("fs must be finite and > 0".into()));
    }
    let sections = spec.analog_sections()?;
    let mut biquads = Vec::with_capacity(sections.len());
    for (i, sec) in sections.iter().enumerate() {
        if sec.prewarp_hz >= fs / 2.0 {
            return Err(Error::InvalidParam(format!(
                "section {i}: corner {} Hz is at or above Nyquist ({} Hz)",
                sec.prewarp_hz,
                fs / 2.0
            )));
        }
        let bq = bilinear_section(sec, fs)?;
        if !bq.is_stable() {
            return Err(Error::UnstableFilter(format!(
                "section {i} maps to poles outside the unit circle"
            )));
        }
        biquads.push(bq);
    }
    Ok(DigitalFilter {
        sections: biquads,
        fs,
    })
}

/// Bilinear transform of one section with prewarping:
/// s -> K (z - 1)/(z + 1), K = w0 / tan(w0 / (2 fs)).
fn bilinear_section(sec: &AnalogSection, fs: f64) -> Result<Biquad> {
    let w0 = 2.0 * PI * sec.prewarp_hz;
    let k = w0 / (w0 / (2.0 * fs)).tan();
    let [b0, b1, b2] = sec.num;
    let [a0, a1, a2] = sec.den;

    // a genuinely first-order section must map to a first-order biquad,
    // otherwise the padding factor parks a pole on the unit circle
    let (nb0, nb1, nb2, na0, na1, na2) = if a2 == 0.0 && b2 == 0.0 {
        (
            b1 * k + b0,
            b0 - b1 * k,
            0.0,
            a1 * k + a0,
            a0 - a1 * k,
            0.0,
        )
    } else {
        let k2 = k * k;
        (
            b2 * k2 + b1 * k + b0,
            2.0 * b0 - 2.0 * b2 * k2,
            b2 * k2 - b1 * k + b0,
            a2 * k2 + a1 * k + a0,
            2.0 * a0 - 2.0 * a2 * k2,
            a2 * k2 - a1 * k + a0,
        )
    };

    if na0 == 0.0 || !na0.is_finite() {
        return Err(Error::UnstableFilter(
            "degenerate denominator after bilinear transform".into(),
        ));
    }
    Ok(Biquad {
        b0: nb0 / na0,
        b1: nb1 / na0,
        b2: nb2 / na0,
        a1: na1 / na0,
        a2: na2 / na0,
    })
}

/// Filter a waveform, preserving its length, rate and start time.
pub fn apply_filter(filter: &DigitalFilter, w: &Waveform, warmup: Warmup) -> Result<Waveform> {
    if (filter.fs - w.fs).abs() > 1e-9 * filter.fs {
        return Err(Error::RateMismatch {
            design_fs: filter.fs,
            waveform_fs: w.fs,
        });
    }
    let samples = match warmup {
        Warmup::ZeroState => filter.run_zero_state(&w.samples),
        Warmup::SteadyStatePrefill => {
            let first = w.samples.first().copied().unwrap_or(0.0);
            filter.run_prefilled(&w.samples, first)
        }
    };
    Ok(Waveform::new(samples, w.fs, w.start_time))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{synth_two_tone, SamplingSpec, TestSignalParams};
    use approx::assert_relative_eq;

    fn sine(f: f64, fs: f64, dur: f64) -> Waveform {
        let n = (dur * fs).round() as usize;
        let w = 2.0 * PI * f;
        Waveform::new(
            (0..n).map(|i| (w * i as f64 / fs).sin()).collect(),
            fs,
            0.0,
        )
    }

    #[test]
    fn butterworth_minus_3db_at_cutoff() {
        let spec = AnalogFilterSpec::ButterworthLowpass {
            order: 6,
            cutoff_hz: 35.0,
        };
        let f = design_filter(&spec, 10_000.0).unwrap();
        let mag = f.magnitude_at(35.0);
        let db = 20.0 * (mag * std::f64::consts::SQRT_2).log10();
        assert!(db.abs() < 0.2, "cutoff deviates {db} dB from -3 dB");
    }

    #[test]
    fn first_order_lowpass_dc_gain_is_unity() {
        let spec = AnalogFilterSpec::FirstOrderLowpass { cutoff_hz: 70.0 };
        let f = design_filter(&spec, 1_600.0).unwrap();
        assert_relative_eq!(f.magnitude_at(0.0), 1.0, max_relative = 1e-6);
    }

    #[test]
    fn bilinear_matches_warped_analog_response() {
        // The bilinear transform maps the digital response at f onto the
        // analog prototype at fc*tan(pi f/fs)/tan(pi fc/fs). At twice the
        // cutoff this warping costs about 0.84 dB against the unwarped
        // analog curve, so the check against the plain analog formula uses
        // a 1 dB budget while the warped-frequency identity is tight.
        let spec = AnalogFilterSpec::ButterworthLowpass {
            order: 2,
            cutoff_hz: 700.0,
        };
        let fs = 10_000.0;
        let f = design_filter(&spec, fs).unwrap();

        let digital = f.magnitude_at(1_400.0);
        let analog = spec.analog_magnitude(1_400.0);
        let db = 20.0 * (digital / analog).log10();
        assert!(db.abs() < 1.0, "digital vs analog at 1400 Hz: {db} dB");

        let warped =
            700.0 * (PI * 1_400.0 / fs).tan() / (PI * 700.0 / fs).tan();
        let analog_warped = spec.analog_magnitude(warped);
        let db_warped = 20.0 * (digital / analog_warped).log10();
        assert!(
            db_warped.abs() < 0.01,
            "digital vs warped analog: {db_warped} dB"
        );
    }

    #[test]
    fn rejects_cutoff_at_or_above_nyquist() {
        let spec = AnalogFilterSpec::ButterworthLowpass {
            order: 2,
            cutoff_hz: 5_000.0,
        };
        assert!(design_filter(&spec, 10_000.0).is_err());
    }

    #[test]
    fn designed_sections_are_stable() {
        let specs = [
            AnalogFilterSpec::ButterworthLowpass {
                order: 6,
                cutoff_hz: 35.0,
            },
            AnalogFilterSpec::ButterworthHighpass {
                order: 4,
                cutoff_hz: 35.0,
            },
            AnalogFilterSpec::FirstOrderHighpass { cutoff_hz: 0.05 },
            AnalogFilterSpec::FirstOrderLowpass { cutoff_hz: 70.0 },
        ];
        for spec in &specs {
            let f = design_filter(spec, 10_000.0).unwrap();
            for s in f.sections() {
                assert!(s.is_stable());
            }
        }
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let spec = AnalogFilterSpec::ButterworthLowpass {
            order: 4,
            cutoff_hz: 100.0,
        };
        let f = design_filter(&spec, 10_000.0).unwrap();
        let w = Waveform::new(vec![0.0; 1000], 10_000.0, 0.0);
        let y = apply_filter(&f, &w, Warmup::ZeroState).unwrap();
        assert!(y.samples.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sine_at_cutoff_attenuated_3db() {
        let spec = AnalogFilterSpec::ButterworthLowpass {
            order: 6,
            cutoff_hz: 100.0,
        };
        let f = design_filter(&spec, 10_000.0).unwrap();
        let w = sine(100.0, 10_000.0, 2.0);
        let y = apply_filter(&f, &w, Warmup::ZeroState).unwrap();
        // peak after the transient has settled
        let peak = y.samples[10_000..]
            .iter()
            .fold(0.0_f64, |m, &v| m.max(v.abs()));
        assert_relative_eq!(peak, 1.0 / 2.0_f64.sqrt(), max_relative = 0.01);
    }

    #[test]
    fn steady_state_prefill_starts_settled() {
        let spec = AnalogFilterSpec::ButterworthLowpass {
            order: 6,
            cutoff_hz: 35.0,
        };
        let f = design_filter(&spec, 10_000.0).unwrap();
        let c = 3.7;
        let w = Waveform::new(vec![c; 4000], 10_000.0, 0.0);

        let prefilled = apply_filter(&f, &w, Warmup::SteadyStatePrefill).unwrap();
        let settled = apply_filter(
            &f,
            &Waveform::new(vec![c; 200_000], 10_000.0, 0.0),
            Warmup::ZeroState,
        )
        .unwrap();
        let settled_value = *settled.samples.last().unwrap();
        for &v in &prefilled.samples {
            assert_relative_eq!(v, settled_value, max_relative = 1e-6);
        }
        assert_relative_eq!(
            prefilled.samples[0],
            c * f.magnitude_at(0.0),
            max_relative = 1e-6
        );
    }

    #[test]
    fn rate_mismatch_rejected() {
        let spec = AnalogFilterSpec::FirstOrderLowpass { cutoff_hz: 70.0 };
        let f = design_filter(&spec, 1_600.0).unwrap();
        let w = sine(50.0, 10_000.0, 0.1);
        assert!(matches!(
            apply_filter(&f, &w, Warmup::ZeroState),
            Err(Error::RateMismatch { .. })
        ));
    }

    #[test]
    fn filtering_is_linear() {
        let spec = AnalogFilterSpec::ButterworthLowpass {
            order: 4,
            cutoff_hz: 500.0,
        };
        let f = design_filter(&spec, 10_000.0).unwrap();
        let x = synth_two_tone(
            &TestSignalParams::two_tone(0.2, 430.0, 0.3),
            &SamplingSpec::new(10_000.0),
        )
        .unwrap();
        let y = sine(77.0, 10_000.0, 0.3);

        let (a, b) = (1.7, -0.4);
        let combined = Waveform::new(
            x.samples
                .iter()
                .zip(&y.samples)
                .map(|(xv, yv)| a * xv + b * yv)
                .collect(),
            10_000.0,
            0.0,
        );
        let fx = apply_filter(&f, &x, Warmup::ZeroState).unwrap();
        let fy = apply_filter(&f, &y, Warmup::ZeroState).unwrap();
        let fc = apply_filter(&f, &combined, Warmup::ZeroState).unwrap();
        let scale = fc.rms().max(1.0);
        for i in 0..fc.len() {
            let expect = a * fx.samples[i] + b * fy.samples[i];
            assert!(
                (fc.samples[i] - expect).abs() <= 1e-9 * scale,
                "nonlinearity at sample {i}"
            );
        }
    }
}
