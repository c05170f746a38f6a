//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by signal synthesis, DSP primitives, analysis chains and
/// campaign execution.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated its documented range or was non-finite.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A filter was asked to process a waveform sampled at a different rate
    /// than the one it was designed for.
    #[error("sampling rate mismatch: filter designed at {design_fs} Hz, waveform sampled at {waveform_fs} Hz")]
    RateMismatch { design_fs: f64, waveform_fs: f64 },

    /// A requested analog section would map to an unstable digital section.
    #[error("unstable filter section: {0}")]
    UnstableFilter(String),

    /// The input waveform is shorter than the analysis window requires.
    #[error("window too short: need {needed_s} s, waveform spans {actual_s} s")]
    WindowTooShort { needed_s: f64, actual_s: f64 },

    /// A DFT window that is not an integer number of fundamental cycles.
    #[error("non-coherent window: {0}")]
    NonCoherentWindow(String),

    /// Spectrum handed to the grouping stage has the wrong bin layout.
    #[error("wrong bin spacing: expected about {expected_hz} Hz, got {actual_hz} Hz")]
    WrongBinSpacing { expected_hz: f64, actual_hz: f64 },

    /// Percentile queried on a classifier that has seen no samples.
    #[error("empty classifier")]
    EmptyClassifier,

    /// Flicker evaluation attempted before the block-4 gain was fixed.
    #[error("flickermeter is not calibrated; run the calibration first")]
    UncalibratedFlickermeter,

    /// The calibration gain search failed to settle, which indicates a
    /// defective filter design rather than a bad stimulus.
    #[error("flickermeter calibration did not converge: {0}")]
    CalibrationFailed(String),

    /// Fewer than two zero crossings were found, so no period is defined.
    #[error("degenerate signal: fewer than two zero crossings")]
    DegenerateCrossings,

    /// The spectral fundamental vanished; ratio indicators are undefined.
    #[error("zero fundamental component")]
    ZeroFundamental,

    /// Source waveform is not dense enough to model a meter front end.
    #[error("insufficient source rate: source {source_fs} Hz must be at least 4x the meter rate {meter_fs} Hz (or equal to it)")]
    InsufficientSourceRate { source_fs: f64, meter_fs: f64 },

    /// Configuration file or override rejected.
    #[error("config error: {0}")]
    Config(String),

    /// Aggregation over an empty reading set.
    #[error("empty reading sequence")]
    EmptyReadings,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
