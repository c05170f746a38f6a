//! Plain-text waveform files.
//!
//! Format: a four-line header (`meterbench-waveform v1`, `fs <rate>`,
//! `samples <count>`, `start_time <t>`) followed by one sample per line in
//! shortest round-trip decimal form.

use crate::error::{Error, Result};
use crate::signal::Waveform;
use std::fmt::Write as _;
use std::path::Path;

const MAGIC: &str = "meterbench-waveform v1";

pub fn write_waveform(w: &Waveform, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(w.samples.len() * 20 + 80);
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "fs {}", w.fs).unwrap();
    writeln!(out, "samples {}", w.samples.len()).unwrap();
    writeln!(out, "start_time {}", w.start_time).unwrap();
    for s in &w.samples {
        writeln!(out, "{s}").unwrap();
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_waveform(path: &Path) -> Result<Waveform> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let magic = lines.next().unwrap_or_default();
    if magic != MAGIC {
        return Err(Error::Config(format!(
            "{}: not a waveform file (header {magic:?})",
            path.display()
        )));
    }
    let mut field = |name: &str| -> Result<f64> {
        let line = lines
            .next()
            .ok_or_else(|| Error::Config(format!("missing {name} header line")))?;
        let (key, value) = line
            .split_once(' ')
            .ok_or_else(|| Error::Config(format!("malformed header line {line:?}")))?;
        if key != name {
            return Err(Error::Config(format!("expected {name}, found {key}")));
        }
        value
            .parse()
            .map_err(|_| Error::Config(format!("bad {name} value {value:?}")))
    };
    let fs = field("fs")?;
    let count = field("samples")? as usize;
    let start_time = field("start_time")?;
    let mut samples = Vec::with_capacity(count);
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::Config(format!("bad sample on line {}", i + 5)))?;
        samples.push(v);
    }
    if samples.len() != count {
        return Err(Error::Config(format!(
            "header says {count} samples, file holds {}",
            samples.len()
        )));
    }
    Ok(Waveform::new(samples, fs, start_time))
}
