//! C ABI for the meterbench toolkit.
//!
//! The surface follows the usual opaque-handle pattern: constructors hand
//! out pointers to boxed Rust objects, every fallible call returns an
//! [`MbStatus`] code and leaves a human-readable message retrievable with
//! [`mb_last_error_message`], and each handle type has a matching `_free`
//! function. The generated header lives at `include/meterbench.h`.
//!
//! All functions are thread-safe except that a handle must not be freed
//! while another thread is using it; the error message store is
//! thread-local.

use meterbench_core::campaign::DEFAULT_MASTER_SEED;
use meterbench_core::config::load_config;
use meterbench_core::error::Error;
use meterbench_core::meter::{preset_by_id, presets, read_meter};
use meterbench_core::reference::{analyze, calibrate_flickermeter, FlickermeterConfig};
use meterbench_core::report::write_report;
use meterbench_core::signal::{synth_two_tone, SamplingSpec, TestSignalParams, Waveform};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;

/// Result code of a C API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A parameter or configuration value was rejected.
    InvalidArgument = 2,
    /// The computation failed at runtime.
    RuntimeError = 3,
    /// A string argument was not valid UTF-8.
    Utf8Error = 4,
    /// A destination buffer was too small.
    BufferTooSmall = 5,
}

/// Indicator bundle in C layout.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbReadings {
    /// Short-term flicker severity.
    pub pst: f64,
    /// Total harmonic distortion as a ratio.
    pub thd: f64,
    /// Measured fundamental frequency in Hz.
    pub f_meas_hz: f64,
    /// Mean 10-cycle rms voltage in V.
    pub u_rms_v: f64,
}

/// Opaque sampled waveform.
pub struct MbWaveform {
    inner: Waveform,
}

/// Opaque calibrated analyzer (flickermeter configuration plus windows).
pub struct MbAnalyzer {
    cfg: FlickermeterConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> MbStatus {
    match err {
        Error::InvalidParam(_) | Error::Config(_) => MbStatus::InvalidArgument,
        _ => MbStatus::RuntimeError,
    }
}

fn fail(err: Error) -> MbStatus {
    set_error(&err.to_string());
    status_of(&err)
}

/// Copy the last error message of this thread into `buf` (truncating, NUL
/// terminated) and return the full message length in bytes excluding the
/// terminator. `buf` may be null to query the length.
///
/// # Safety
/// `buf` must point to at least `len` writable bytes when non-null.
#[no_mangle]
pub unsafe extern "C" fn mb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version string; static storage, do not free.
#[no_mangle]
pub extern "C" fn mb_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Master seed used when none is configured.
#[no_mangle]
pub extern "C" fn mb_default_seed() -> u64 {
    DEFAULT_MASTER_SEED
}

/// Synthesize the two-tone stimulus.
///
/// `quantizer_bits` of 0 keeps ideal real-valued samples. On success
/// `*out` owns the waveform; release it with [`mb_waveform_free`].
///
/// # Safety
/// `out` must be a valid pointer to a pointer.
#[no_mangle]
pub unsafe extern "C" fn mb_waveform_synth(
    u_c: f64,
    f_c: f64,
    u_i_star: f64,
    f_i: f64,
    phi_c: f64,
    phi_i: f64,
    duration_s: f64,
    fs: f64,
    quantizer_bits: u32,
    out: *mut *mut MbWaveform,
) -> MbStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return MbStatus::NullPointer;
    }
    let params = TestSignalParams {
        u_c,
        f_c,
        u_i_star,
        f_i,
        duration_s,
        phi_c,
        phi_i,
    };
    let sampling = SamplingSpec {
        fs,
        quantizer_bits: if quantizer_bits == 0 {
            None
        } else {
            Some(quantizer_bits)
        },
    };
    match synth_two_tone(&params, &sampling) {
        Ok(w) => {
            *out = Box::into_raw(Box::new(MbWaveform { inner: w }));
            MbStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Wrap caller-provided samples into a waveform (copied).
///
/// # Safety
/// `samples` must point to `len` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mb_waveform_from_samples(
    samples: *const f64,
    len: usize,
    fs: f64,
    out: *mut *mut MbWaveform,
) -> MbStatus {
    if samples.is_null() || out.is_null() {
        set_error("samples or out pointer is null");
        return MbStatus::NullPointer;
    }
    if !(fs.is_finite() && fs > 0.0) || len == 0 {
        set_error("fs must be positive and len nonzero");
        return MbStatus::InvalidArgument;
    }
    let data = std::slice::from_raw_parts(samples, len).to_vec();
    *out = Box::into_raw(Box::new(MbWaveform {
        inner: Waveform::new(data, fs, 0.0),
    }));
    MbStatus::Ok
}

/// Number of samples in the waveform; 0 for a null handle.
///
/// # Safety
/// `w` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn mb_waveform_len(w: *const MbWaveform) -> usize {
    if w.is_null() {
        return 0;
    }
    (*w).inner.len()
}

/// Sampling rate in Hz; 0 for a null handle.
///
/// # Safety
/// `w` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn mb_waveform_fs(w: *const MbWaveform) -> f64 {
    if w.is_null() {
        return 0.0;
    }
    (*w).inner.fs
}

/// Copy samples into a caller buffer of `len` doubles.
///
/// # Safety
/// `w` must be a live handle; `buf` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mb_waveform_copy_samples(
    w: *const MbWaveform,
    buf: *mut f64,
    len: usize,
) -> MbStatus {
    if w.is_null() || buf.is_null() {
        set_error("waveform or buffer pointer is null");
        return MbStatus::NullPointer;
    }
    let samples = &(*w).inner.samples;
    if len < samples.len() {
        set_error("destination buffer too small");
        return MbStatus::BufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(samples.as_ptr(), buf, samples.len());
    MbStatus::Ok
}

/// Release a waveform handle; null is a no-op.
///
/// # Safety
/// `w` must be a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mb_waveform_free(w: *mut MbWaveform) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Create a calibrated analyzer with the given flicker windows (seconds).
/// Pass 60/5 for the bench defaults or 600/5 for the standard window.
///
/// # Safety
/// `out` must be a valid pointer to a pointer.
#[no_mangle]
pub unsafe extern "C" fn mb_analyzer_new(
    observation_s: f64,
    settle_s: f64,
    out: *mut *mut MbAnalyzer,
) -> MbStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return MbStatus::NullPointer;
    }
    let cfg = FlickermeterConfig {
        observation_s,
        settle_s,
        ..FlickermeterConfig::default()
    };
    match calibrate_flickermeter(&cfg) {
        Ok(calibrated) => {
            *out = Box::into_raw(Box::new(MbAnalyzer { cfg: calibrated }));
            MbStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Release an analyzer handle; null is a no-op.
///
/// # Safety
/// `a` must be a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mb_analyzer_free(a: *mut MbAnalyzer) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Reference readings of a waveform.
///
/// # Safety
/// `a` and `w` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mb_analyze(
    a: *const MbAnalyzer,
    w: *const MbWaveform,
    out: *mut MbReadings,
) -> MbStatus {
    if a.is_null() || w.is_null() || out.is_null() {
        set_error("analyzer, waveform or out pointer is null");
        return MbStatus::NullPointer;
    }
    match analyze(&(*w).inner, &(*a).cfg) {
        Ok(r) => {
            *out = MbReadings {
                pst: r.pst,
                thd: r.thd,
                f_meas_hz: r.f_meas_hz,
                u_rms_v: r.u_rms_v,
            };
            MbStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Number of shipped meter presets.
#[no_mangle]
pub extern "C" fn mb_preset_count() -> usize {
    presets().len()
}

/// Copy the id of preset `index` into `buf` (NUL terminated); returns the
/// id length in bytes excluding the terminator, or 0 for a bad index.
///
/// # Safety
/// `buf` must point to `len` writable bytes when non-null.
#[no_mangle]
pub unsafe extern "C" fn mb_preset_name(index: usize, buf: *mut c_char, len: usize) -> usize {
    let all = presets();
    let Some(p) = all.get(index) else {
        return 0;
    };
    let bytes = p.model_id.as_bytes();
    if !buf.is_null() && len > 0 {
        let n = bytes.len().min(len - 1);
        std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
        *buf.add(n) = 0;
    }
    bytes.len()
}

/// Simulate one meter channel of a shipped preset on the waveform.
///
/// # Safety
/// `a` and `w` must be live handles, `preset` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mb_meter_read(
    a: *const MbAnalyzer,
    w: *const MbWaveform,
    preset: *const c_char,
    instance: u32,
    phase: u32,
    master_seed: u64,
    out: *mut MbReadings,
) -> MbStatus {
    if a.is_null() || w.is_null() || preset.is_null() || out.is_null() {
        set_error("analyzer, waveform, preset or out pointer is null");
        return MbStatus::NullPointer;
    }
    let Ok(name) = CStr::from_ptr(preset).to_str() else {
        set_error("preset id is not valid UTF-8");
        return MbStatus::Utf8Error;
    };
    let Some(spec) = preset_by_id(name) else {
        set_error(&format!("unknown preset {name:?}"));
        return MbStatus::InvalidArgument;
    };
    match read_meter(&(*w).inner, &spec, instance, phase, master_seed, &(*a).cfg) {
        Ok(r) => {
            *out = MbReadings {
                pst: r.pst,
                thd: r.thd,
                f_meas_hz: r.f_meas_hz,
                u_rms_v: r.u_rms_v,
            };
            MbStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Run a sweep campaign and write CSV, plots and summary into `out_dir`.
///
/// `config_path` may be null for the default campaign; `overrides` is an
/// optional array of `n_overrides` dotted-path `key=value` strings applied
/// on top of the file.
///
/// # Safety
/// Strings must be NUL terminated; `overrides` must hold `n_overrides`
/// valid pointers when non-null.
#[no_mangle]
pub unsafe extern "C" fn mb_sweep_run(
    config_path: *const c_char,
    out_dir: *const c_char,
    overrides: *const *const c_char,
    n_overrides: usize,
) -> MbStatus {
    if out_dir.is_null() {
        set_error("out_dir pointer is null");
        return MbStatus::NullPointer;
    }
    let Ok(out_dir) = CStr::from_ptr(out_dir).to_str() else {
        set_error("out_dir is not valid UTF-8");
        return MbStatus::Utf8Error;
    };
    let config = if config_path.is_null() {
        None
    } else {
        match CStr::from_ptr(config_path).to_str() {
            Ok(s) => Some(Path::new(s).to_path_buf()),
            Err(_) => {
                set_error("config_path is not valid UTF-8");
                return MbStatus::Utf8Error;
            }
        }
    };
    let mut override_vec = Vec::with_capacity(n_overrides);
    if n_overrides > 0 {
        if overrides.is_null() {
            set_error("overrides pointer is null");
            return MbStatus::NullPointer;
        }
        for i in 0..n_overrides {
            let p = *overrides.add(i);
            if p.is_null() {
                set_error("override entry is null");
                return MbStatus::NullPointer;
            }
            match CStr::from_ptr(p).to_str() {
                Ok(s) => override_vec.push(s.to_string()),
                Err(_) => {
                    set_error("override entry is not valid UTF-8");
                    return MbStatus::Utf8Error;
                }
            }
        }
    }

    let run = || -> Result<(), Error> {
        let cfg = load_config(config.as_deref(), &override_vec)?;
        let result = meterbench_core::campaign::run_sweep(&cfg)?;
        write_report(&result, Path::new(out_dir))?;
        Ok(())
    };
    match run() {
        Ok(()) => MbStatus::Ok,
        Err(e) => fail(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    unsafe fn synth(ui: f64, fi: f64, dur: f64, fs: f64) -> *mut MbWaveform {
        let mut w: *mut MbWaveform = std::ptr::null_mut();
        let status =
            mb_waveform_synth(230.0, 50.0, ui, fi, 0.0, 0.0, dur, fs, 0, &mut w);
        assert_eq!(status, MbStatus::Ok);
        w
    }

    #[test]
    fn waveform_lifecycle() {
        unsafe {
            let w = synth(0.1, 250.0, 1.0, 10_000.0);
            assert_eq!(mb_waveform_len(w), 10_000);
            assert_eq!(mb_waveform_fs(w), 10_000.0);
            let mut buf = vec![0.0; 10_000];
            assert_eq!(
                mb_waveform_copy_samples(w, buf.as_mut_ptr(), buf.len()),
                MbStatus::Ok
            );
            assert!(buf[0] != 0.0);
            let mut small = [0.0; 4];
            assert_eq!(
                mb_waveform_copy_samples(w, small.as_mut_ptr(), small.len()),
                MbStatus::BufferTooSmall
            );
            mb_waveform_free(w);
        }
    }

    #[test]
    fn invalid_params_set_an_error_message() {
        unsafe {
            let mut w: *mut MbWaveform = std::ptr::null_mut();
            let status = mb_waveform_synth(
                230.0, 50.0, 0.1, 6_000.0, 0.0, 0.0, 1.0, 10_000.0, 0, &mut w,
            );
            assert_eq!(status, MbStatus::InvalidArgument);
            let needed = mb_last_error_message(std::ptr::null_mut(), 0);
            assert!(needed > 0);
            let mut buf = vec![0i8; needed + 1];
            mb_last_error_message(buf.as_mut_ptr().cast(), buf.len());
            let msg = CStr::from_ptr(buf.as_ptr().cast()).to_str().unwrap();
            assert!(msg.contains("f_i"), "message: {msg}");
        }
    }

    #[test]
    fn analyze_round_trip_matches_core() {
        unsafe {
            let mut analyzer: *mut MbAnalyzer = std::ptr::null_mut();
            assert_eq!(mb_analyzer_new(12.0, 3.0, &mut analyzer), MbStatus::Ok);
            let w = synth(0.1, 250.0, 15.0, 10_000.0);
            let mut out = MbReadings {
                pst: 0.0,
                thd: 0.0,
                f_meas_hz: 0.0,
                u_rms_v: 0.0,
            };
            assert_eq!(mb_analyze(analyzer, w, &mut out), MbStatus::Ok);
            assert!((out.thd - 0.1).abs() < 1e-3);
            assert!((out.f_meas_hz - 50.0).abs() < 0.005);

            let core_readings =
                analyze(&(*w).inner, &(*analyzer).cfg).unwrap();
            assert_eq!(out.thd, core_readings.thd);
            assert_eq!(out.pst, core_readings.pst);

            mb_waveform_free(w);
            mb_analyzer_free(analyzer);
        }
    }

    #[test]
    fn meter_read_through_the_abi() {
        unsafe {
            let mut analyzer: *mut MbAnalyzer = std::ptr::null_mut();
            assert_eq!(mb_analyzer_new(12.0, 3.0, &mut analyzer), MbStatus::Ok);
            let w = synth(0.05, 250.0, 15.0, 10_000.0);
            let mut out = MbReadings {
                pst: 0.0,
                thd: 0.0,
                f_meas_hz: 0.0,
                u_rms_v: 0.0,
            };
            let preset = CString::new("EM-B").unwrap();
            assert_eq!(
                mb_meter_read(analyzer, w, preset.as_ptr(), 0, 0, 42, &mut out),
                MbStatus::Ok
            );
            assert!((out.thd - 0.05).abs() < 0.01);

            let bogus = CString::new("EM-X").unwrap();
            assert_eq!(
                mb_meter_read(analyzer, w, bogus.as_ptr(), 0, 0, 42, &mut out),
                MbStatus::InvalidArgument
            );
            mb_waveform_free(w);
            mb_analyzer_free(analyzer);
        }
    }

    #[test]
    fn preset_enumeration() {
        unsafe {
            let count = mb_preset_count();
            assert!(count >= 4);
            for i in 0..count {
                let needed = mb_preset_name(i, std::ptr::null_mut(), 0);
                assert!(needed > 0);
                let mut buf = vec![0i8; needed + 1];
                mb_preset_name(i, buf.as_mut_ptr().cast(), buf.len());
                let name = CStr::from_ptr(buf.as_ptr().cast()).to_str().unwrap();
                assert!(!name.is_empty());
            }
            assert_eq!(mb_preset_name(usize::MAX, std::ptr::null_mut(), 0), 0);
        }
    }

    #[test]
    fn null_pointers_are_rejected() {
        unsafe {
            assert_eq!(
                mb_waveform_synth(
                    230.0,
                    50.0,
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                    1.0,
                    10_000.0,
                    0,
                    std::ptr::null_mut()
                ),
                MbStatus::NullPointer
            );
            let mut out = MbReadings {
                pst: 0.0,
                thd: 0.0,
                f_meas_hz: 0.0,
                u_rms_v: 0.0,
            };
            assert_eq!(
                mb_analyze(std::ptr::null(), std::ptr::null(), &mut out),
                MbStatus::NullPointer
            );
            mb_waveform_free(std::ptr::null_mut());
            mb_analyzer_free(std::ptr::null_mut());
        }
    }
}
