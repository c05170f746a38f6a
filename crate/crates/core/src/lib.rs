//! Bench-scale metrological verification toolkit for the power-quality
//! functions of smart energy meters.
//!
//! The crate synthesizes a two-tone test stimulus (mains carrier plus one
//! swept component), measures it with reference implementations of the IEC
//! measurement chains (61000-4-15 flicker, 61000-4-7 harmonic subgrouping,
//! 61000-4-30 rms and frequency), pushes the same stimulus through
//! simulated meter signal chains with deliberate imperfections, and runs
//! frequency-sweep campaigns that report per-model min/max envelopes,
//! limit verdicts, CSV tables and SVG characteristics.
//!
//! Modules map onto the processing stages:
//!
//! - [`signal`]: stimulus synthesis and multi-phase replication
//! - [`dsp`]: filters, coherent DFT, resampling, percentile classifier
//! - [`reference`]: the class-A analyzer stand-in
//! - [`meter`]: imperfect meter models and shipped presets
//! - [`campaign`]: sweep execution, envelopes and verdicts
//! - [`report`]: CSV, SVG plots, verdict summary
//! - [`config`]: campaign file schema and CLI overrides

pub mod campaign;
pub mod config;
pub mod dsp;
pub mod error;
pub mod meter;
pub mod reference;
pub mod report;
pub mod signal;
pub mod wavefile;

pub use error::{Error, Result};
