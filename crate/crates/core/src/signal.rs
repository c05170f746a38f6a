//! Two-tone test signal synthesis.
//!
//! The stimulus is a mains-frequency carrier plus one additional spectral
//! component whose frequency sweeps across the sub-/inter-/harmonic range:
//!
//! ```text
//! u(t) = sqrt(2)*U_c*cos(2*pi*f_c*t + phi_c) + u_i*sqrt(2)*U_c*cos(2*pi*f_i*t + phi_i)
//! ```
//!
//! `u_i` is the amplitude of the additional component relative to the
//! carrier, so its rms value is `u_i * U_c`. Synthesis is exact sample
//! evaluation; there is no noise model and the virtual amplifier is ideal.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Default carrier rms voltage: nominal low-voltage network level.
pub const DEFAULT_U_C: f64 = 230.0;
/// Default carrier frequency: European nominal mains frequency.
pub const DEFAULT_F_C: f64 = 50.0;
/// Default reference-chain sampling rate; covers harmonic 40 (2 kHz) with
/// 2.5x margin.
pub const DEFAULT_REFERENCE_FS: f64 = 10_000.0;

/// Parameters of the two-tone test stimulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSignalParams {
    /// Carrier rms voltage in volts.
    pub u_c: f64,
    /// Carrier frequency in Hz.
    pub f_c: f64,
    /// Amplitude of the additional component relative to the carrier.
    pub u_i_star: f64,
    /// Frequency of the additional component in Hz.
    pub f_i: f64,
    /// Signal duration in seconds.
    pub duration_s: f64,
    /// Carrier initial phase in radians.
    pub phi_c: f64,
    /// Additional-component initial phase in radians.
    pub phi_i: f64,
}

impl TestSignalParams {
    /// Carrier-only signal of the given duration with default level and
    /// frequency.
    pub fn carrier_only(duration_s: f64) -> Self {
        Self {
            u_c: DEFAULT_U_C,
            f_c: DEFAULT_F_C,
            u_i_star: 0.0,
            f_i: 0.0,
            duration_s,
            phi_c: 0.0,
            phi_i: 0.0,
        }
    }

    /// Carrier plus an additional component at `f_i` with relative
    /// amplitude `u_i_star`.
    pub fn two_tone(u_i_star: f64, f_i: f64, duration_s: f64) -> Self {
        Self {
            u_i_star,
            f_i,
            ..Self::carrier_only(duration_s)
        }
    }

    fn validate(&self) -> Result<()> {
        let fields = [
            ("u_c", self.u_c),
            ("f_c", self.f_c),
            ("u_i_star", self.u_i_star),
            ("f_i", self.f_i),
            ("duration_s", self.duration_s),
            ("phi_c", self.phi_c),
            ("phi_i", self.phi_i),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidParam(format!("{name} is not finite")));
            }
        }
        if self.u_c <= 0.0 {
            return Err(Error::InvalidParam("u_c must be > 0".into()));
        }
        if self.f_c <= 0.0 {
            return Err(Error::InvalidParam("f_c must be > 0".into()));
        }
        if self.f_i < 0.0 {
            return Err(Error::InvalidParam("f_i must be >= 0".into()));
        }
        if self.u_i_star < 0.0 {
            return Err(Error::InvalidParam("u_i_star must be >= 0".into()));
        }
        if self.u_i_star >= 1.0 {
            return Err(Error::InvalidParam(
                "u_i_star must be < 1 (additional component smaller than the carrier)".into(),
            ));
        }
        if self.duration_s <= 0.0 {
            return Err(Error::InvalidParam("duration_s must be > 0".into()));
        }
        Ok(())
    }
}

/// Acquisition description for synthesis: sampling rate plus an optional
/// ideal mid-tread quantizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    /// Sampling rate in samples per second.
    pub fs: f64,
    /// Optional quantizer bit depth; `None` keeps ideal real-valued samples.
    #[serde(default)]
    pub quantizer_bits: Option<u32>,
}

impl SamplingSpec {
    pub fn new(fs: f64) -> Self {
        Self {
            fs,
            quantizer_bits: None,
        }
    }

    fn validate(&self, params: &TestSignalParams) -> Result<()> {
        if !self.fs.is_finite() || self.fs <= 0.0 {
            return Err(Error::InvalidParam("fs must be finite and > 0".into()));
        }
        // Rejecting fs <= 2*f_i keeps the stimulus itself from aliasing at
        // synthesis time; deliberate aliasing belongs to the meter models.
        if self.fs <= 2.0 * params.f_i {
            return Err(Error::InvalidParam(format!(
                "fs = {} Hz must exceed 2*f_i = {} Hz",
                self.fs,
                2.0 * params.f_i
            )));
        }
        if self.fs <= 2.0 * params.f_c {
            return Err(Error::InvalidParam(format!(
                "fs = {} Hz must exceed 2*f_c = {} Hz",
                self.fs,
                2.0 * params.f_c
            )));
        }
        if let Some(bits) = self.quantizer_bits {
            if !(8..=24).contains(&bits) {
                return Err(Error::InvalidParam(
                    "quantizer_bits must be within [8, 24]".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Uniformly sampled real-valued signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    /// Sampling rate in samples per second.
    pub fs: f64,
    /// Time of the first sample in seconds.
    pub start_time: f64,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, fs: f64, start_time: f64) -> Self {
        Self {
            samples,
            fs,
            start_time,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Signal span in seconds.
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    /// Root mean square over all samples.
    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let sum_sq: f64 = self.samples.iter().map(|x| x * x).sum();
        (sum_sq / self.samples.len() as f64).sqrt()
    }

    /// Copy of the waveform starting `offset_s` seconds in.
    pub fn trimmed(&self, offset_s: f64) -> Waveform {
        let skip = ((offset_s * self.fs).round() as usize).min(self.samples.len());
        Waveform {
            samples: self.samples[skip..].to_vec(),
            fs: self.fs,
            start_time: self.start_time + skip as f64 / self.fs,
        }
    }

    /// Copy of the leading `span_s` seconds (the whole waveform if
    /// shorter).
    pub fn head(&self, span_s: f64) -> Waveform {
        let keep = ((span_s * self.fs).round() as usize).min(self.samples.len());
        Waveform {
            samples: self.samples[..keep].to_vec(),
            fs: self.fs,
            start_time: self.start_time,
        }
    }
}

/// Mid-tread uniform quantizer with full scale of +/- 4*sqrt(2)*U_c.
fn quantize(samples: &mut [f64], bits: u32, u_c: f64) {
    let full_scale = 4.0 * std::f64::consts::SQRT_2 * u_c;
    let step = 2.0 * full_scale / f64::from(2u32.pow(bits));
    for x in samples.iter_mut() {
        let q = (*x / step).round() * step;
        *x = q.clamp(-full_scale, full_scale);
    }
}

/// Synthesize the two-tone stimulus at the given sampling spec.
///
/// Samples are evaluated exactly at `t = start_time + n/fs`; the result is
/// deterministic and `round(duration*fs)` samples long.
pub fn synth_two_tone(params: &TestSignalParams, sampling: &SamplingSpec) -> Result<Waveform> {
    params.validate()?;
    sampling.validate(params)?;

    let n = (params.duration_s * sampling.fs).round() as usize;
    let carrier_amp = std::f64::consts::SQRT_2 * params.u_c;
    let extra_amp = params.u_i_star * carrier_amp;
    let w_c = 2.0 * std::f64::consts::PI * params.f_c;
    let w_i = 2.0 * std::f64::consts::PI * params.f_i;

    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / sampling.fs;
        let mut u = carrier_amp * (w_c * t + params.phi_c).cos();
        if extra_amp != 0.0 {
            u += extra_amp * (w_i * t + params.phi_i).cos();
        }
        samples.push(u);
    }
    if let Some(bits) = sampling.quantizer_bits {
        quantize(&mut samples, bits, params.u_c);
    }
    Ok(Waveform::new(samples, sampling.fs, 0.0))
}

/// Replicate the stimulus onto `n_phases` channels.
///
/// All phases carry the same signal sample-for-sample; there is no 120
/// degree displacement because the verification procedure drives every
/// phase input from one generator.
pub fn make_phases(
    params: &TestSignalParams,
    sampling: &SamplingSpec,
    n_phases: usize,
) -> Result<Vec<Waveform>> {
    if n_phases < 1 {
        return Err(Error::InvalidParam("n_phases must be >= 1".into()));
    }
    let w = synth_two_tone(params, sampling)?;
    Ok(vec![w; n_phases])
}
