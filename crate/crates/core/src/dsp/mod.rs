//! Shared numerical machinery: filter design and application, coherent
//! DFT, rate conversion and the percentile classifier.

pub mod classifier;
pub mod filter;
pub mod resample;
pub mod spectrum;

pub use classifier::CumulativeClassifier;
pub use filter::{apply_filter, design_filter, AnalogFilterSpec, AnalogSection, Biquad, DigitalFilter, Warmup};
pub use resample::{resample, sample_at_rate};
pub use spectrum::{dft_integer_cycles, dft_integer_cycles_at, Spectrum};
