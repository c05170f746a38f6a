//! Harmonic subgrouping and THD per IEC 61000-4-7.
//!
//! On the 5 Hz raster of a 10-cycle window, harmonic subgroup `h` gathers
//! bins `10h-1 ..= 10h+1` (root sum square) and the interharmonic centered
//! subgroup between harmonics `h` and `h+1` gathers bins `10h+2 ..= 10h+8`.
//! THD is the root sum square of harmonic subgroups 2..=40 relative to the
//! fundamental subgroup.

use crate::dsp::Spectrum;
use crate::error::{Error, Result};

/// Highest harmonic order evaluated by the reference chain.
pub const MAX_HARMONIC: usize = 40;

/// Spectrum regrouped into harmonic and interharmonic subgroups.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSpectrum {
    /// `harmonic_rms[h - 1]` is subgroup `h` for `h = 1..=max_harmonic`;
    /// index 0 is the fundamental subgroup G1.
    pub harmonic_rms: Vec<f64>,
    /// `interharmonic_rms[h - 1]` is the centered subgroup between
    /// harmonics `h` and `h + 1`.
    pub interharmonic_rms: Vec<f64>,
    /// Highest harmonic order contained in `harmonic_rms`.
    pub max_harmonic: usize,
}

impl GroupedSpectrum {
    /// Fundamental subgroup rms G1.
    pub fn fundamental(&self) -> f64 {
        self.harmonic_rms[0]
    }

    /// Harmonic subgroup rms for order `h` (1-based).
    pub fn harmonic(&self, h: usize) -> f64 {
        self.harmonic_rms[h - 1]
    }

    /// Interharmonic centered subgroup rms between `h` and `h + 1`.
    pub fn interharmonic(&self, h: usize) -> f64 {
        self.interharmonic_rms[h - 1]
    }
}

fn check_spacing(s: &Spectrum) -> Result<()> {
    // grouping arithmetic assumes the 10-cycle layout where harmonic h sits
    // on bin 10h; the spacing is f_c/10, i.e. about 5 Hz near nominal
    if s.window_cycles != 10 || (s.bin_spacing_hz - 5.0).abs() > 0.75 {
        return Err(Error::WrongBinSpacing {
            expected_hz: 5.0,
            actual_hz: s.bin_spacing_hz,
        });
    }
    Ok(())
}

/// Group a spectrum up to `max_harmonic`, which is capped by bin
/// availability on the meter side.
pub fn harmonic_groups_up_to(s: &Spectrum, max_harmonic: usize) -> Result<GroupedSpectrum> {
    check_spacing(s)?;
    if max_harmonic < 2 {
        return Err(Error::InvalidParam("max_harmonic must be >= 2".into()));
    }
    if s.max_bin() < 10 * max_harmonic + 1 {
        return Err(Error::InvalidParam(format!(
            "spectrum covers only bin {}, need bin {} for harmonic {max_harmonic}",
            s.max_bin(),
            10 * max_harmonic + 1
        )));
    }
    let rss = |lo: usize, hi: usize| -> f64 {
        s.bin_rms[lo..=hi].iter().map(|v| v * v).sum::<f64>().sqrt()
    };
    let mut harmonic_rms = Vec::with_capacity(max_harmonic);
    for h in 1..=max_harmonic {
        harmonic_rms.push(rss(10 * h - 1, 10 * h + 1));
    }
    let mut interharmonic_rms = Vec::with_capacity(max_harmonic - 1);
    for h in 1..max_harmonic {
        interharmonic_rms.push(rss(10 * h + 2, 10 * h + 8));
    }
    Ok(GroupedSpectrum {
        harmonic_rms,
        interharmonic_rms,
        max_harmonic,
    })
}

/// Group a reference-chain spectrum; requires coverage up to bin 408 so
/// every order through 40 is available.
pub fn harmonic_groups(s: &Spectrum) -> Result<GroupedSpectrum> {
    if s.max_bin() < 408 {
        return Err(Error::InvalidParam(format!(
            "spectrum covers only bin {}, need at least bin 408",
            s.max_bin()
        )));
    }
    harmonic_groups_up_to(s, MAX_HARMONIC)
}

/// Largest harmonic order a spectrum can support, capped at
/// [`MAX_HARMONIC`].
pub fn available_harmonics(s: &Spectrum) -> usize {
    ((s.max_bin().saturating_sub(1)) / 10).min(MAX_HARMONIC)
}

/// Subgrouped total harmonic distortion:
/// `sqrt(sum_h (G_h / G_1)^2)` for `h = 2..=max_harmonic`.
pub fn thd_subgrouped(g: &GroupedSpectrum) -> Result<f64> {
    let g1 = g.fundamental();
    if !(g1 > 0.0) {
        return Err(Error::ZeroFundamental);
    }
    let sum: f64 = g.harmonic_rms[1..]
        .iter()
        .map(|gh| (gh / g1) * (gh / g1))
        .sum();
    Ok(sum.sqrt())
}
