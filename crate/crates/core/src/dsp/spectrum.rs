//! Rectangular-window DFT over an integer number of fundamental cycles.
//!
//! With a window of 10 cycles at 50 Hz the bins land on a 5 Hz raster, the
//! layout the IEC 61000-4-7 grouping stage expects. Bin values are reported
//! as single-sided rms amplitudes, so a coherent tone of rms `A` centered on
//! bin `k` reads exactly `A` there.

use crate::error::{Error, Result};
use crate::signal::Waveform;
use rustfft::{num_complex::Complex, Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Single-sided rms spectrum on a uniform bin raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// rms amplitude per bin; bin `k` maps to `k * bin_spacing_hz`.
    pub bin_rms: Vec<f64>,
    /// Frequency distance between bins, `f_c / window_cycles`.
    pub bin_spacing_hz: f64,
    /// Number of fundamental cycles in the analysis window.
    pub window_cycles: u32,
}

impl Spectrum {
    /// Frequency of bin `k`.
    pub fn bin_frequency(&self, k: usize) -> f64 {
        k as f64 * self.bin_spacing_hz
    }

    /// Index of the highest available bin.
    pub fn max_bin(&self) -> usize {
        self.bin_rms.len().saturating_sub(1)
    }
}

fn fft_for(n: usize) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| FftPlanner::new().plan_fft_forward(n))
        .clone()
}

/// DFT of the leading `window_cycles` fundamental cycles of `w`.
///
/// The window must be coherent: `window_cycles * fs / f_c` has to land
/// within half a sample of an integer (resample first otherwise), and the
/// waveform must span the whole window.
pub fn dft_integer_cycles(w: &Waveform, f_c: f64, window_cycles: u32) -> Result<Spectrum> {
    dft_integer_cycles_at(w, f_c, window_cycles, 0)
}

/// Same as [`dft_integer_cycles`] but starting at `offset` samples.
pub fn dft_integer_cycles_at(
    w: &Waveform,
    f_c: f64,
    window_cycles: u32,
    offset: usize,
) -> Result<Spectrum> {
    if window_cycles == 0 {
        return Err(Error::InvalidParam("window_cycles must be >= 1".into()));
    }
    if !(f_c.is_finite() && f_c > 0.0) {
        return Err(Error::InvalidParam("f_c must be finite and > 0".into()));
    }
    let exact = window_cycles as f64 * w.fs / f_c;
    let n = exact.round() as usize;
    if (exact - n as f64).abs() > 0.5 {
        return Err(Error::NonCoherentWindow(format!(
            "{window_cycles} cycles at fs {} / f_c {} is {exact} samples",
            w.fs, f_c
        )));
    }
    if n < 2 {
        return Err(Error::NonCoherentWindow(
            "window resolves to fewer than 2 samples".into(),
        ));
    }
    if w.samples.len() < offset + n {
        return Err(Error::WindowTooShort {
            needed_s: (offset + n) as f64 / w.fs,
            actual_s: w.duration_s(),
        });
    }

    let mut buf: Vec<Complex<f64>> = w.samples[offset..offset + n]
        .iter()
        .map(|&x| Complex::new(x, 0.0))
        .collect();
    fft_for(n).process(&mut buf);

    let half = n / 2;
    let scale = std::f64::consts::SQRT_2 / n as f64;
    let mut bin_rms = Vec::with_capacity(half + 1);
    bin_rms.push(buf[0].norm() / n as f64);
    for item in buf.iter().take(half).skip(1) {
        bin_rms.push(item.norm() * scale);
    }
    if n % 2 == 0 {
        // Nyquist bin carries no recoverable single-tone rms; report the
        // raw projection for completeness.
        bin_rms.push(buf[half].norm() / n as f64);
    } else {
        bin_rms.push(buf[half].norm() * scale);
    }

    Ok(Spectrum {
        bin_rms,
        bin_spacing_hz: f_c / window_cycles as f64,
        window_cycles,
    })
}
