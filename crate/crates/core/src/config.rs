//! Campaign configuration file (TOML) and dotted-path overrides.
//!
//! Every section is optional and falls back to the built-in defaults, so
//! an empty file is a valid full-default campaign. Unknown keys are
//! rejected. Meter entries either reference a shipped preset by id (and
//! may override individual fields) or define a complete model inline.
//!
//! ```toml
//! schema_version = 1
//! seed = 1000003
//!
//! [signal]
//! u_c = 230.0
//! u_i_star = 0.05
//!
//! [grid]
//! start = 10.0
//! stop = 2000.0
//! step = 5.0
//!
//! [[meters]]
//! preset = "EM-A"
//! ```

use crate::campaign::{
    FrequencyGrid, IndicatorHalfwidths, LimitSet, SweepConfig, TolerancePolicy,
    DEFAULT_MASTER_SEED,
};
use crate::dsp::AnalogFilterSpec;
use crate::error::{Error, Result};
use crate::meter::{
    preset_by_id, FlickerMethod, FreqMethod, InstanceSpread, MeterModelSpec, ThdMethod,
};
use crate::reference::FlickermeterConfig;
use crate::signal::SamplingSpec;
use serde::Deserialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SignalSection {
    u_c: Option<f64>,
    f_c: Option<f64>,
    u_i_star: Option<f64>,
    phi_c: Option<f64>,
    phi_i: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct GridSection {
    start: Option<f64>,
    stop: Option<f64>,
    step: Option<f64>,
    list: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ReferenceSection {
    fs: Option<f64>,
    quantizer_bits: Option<u32>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FlickerSection {
    observation_s: Option<f64>,
    settle_s: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct LimitsSection {
    pst: Option<f64>,
    f_band: Option<(f64, f64)>,
    thd: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct HalfwidthSection {
    pst: Option<f64>,
    thd: Option<f64>,
    f: Option<f64>,
    rms_rel: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ToleranceSection {
    reference: Option<HalfwidthSection>,
    meter: Option<HalfwidthSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeterEntry {
    preset: Option<String>,
    model_id: Option<String>,
    fs: Option<f64>,
    aaf: Option<AnalogFilterSpec>,
    /// Drop the preset's anti-alias stage.
    no_aaf: Option<bool>,
    thd_method: Option<ThdMethod>,
    freq_method: Option<FreqMethod>,
    freq_filter: Option<AnalogFilterSpec>,
    instance_spread: Option<InstanceSpread>,
    n_instances: Option<u32>,
    n_phases: Option<u32>,
}

/// Top-level campaign file.
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    schema_version: Option<u32>,
    seed: Option<u64>,
    duration_s: Option<f64>,
    parallelism: Option<usize>,
    #[serde(default)]
    signal: SignalSection,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    reference: ReferenceSection,
    #[serde(default)]
    flicker: FlickerSection,
    #[serde(default)]
    limits: LimitsSection,
    #[serde(default)]
    tolerance: ToleranceSection,
    meters: Option<Vec<MeterEntry>>,
}

fn resolve_meter(entry: &MeterEntry, index: usize) -> Result<MeterModelSpec> {
    let mut spec = match &entry.preset {
        Some(id) => preset_by_id(id).ok_or_else(|| {
            Error::Config(format!("meters[{index}]: unknown preset {id:?}"))
        })?,
        None => {
            let model_id = entry.model_id.clone().ok_or_else(|| {
                Error::Config(format!(
                    "meters[{index}]: model_id is required without a preset"
                ))
            })?;
            let fs = entry.fs.ok_or_else(|| {
                Error::Config(format!("meters[{index}]: fs is required without a preset"))
            })?;
            MeterModelSpec {
                model_id,
                fs_meter: fs,
                aaf: None,
                thd_method: ThdMethod::Subgrouped,
                freq_method: FreqMethod::Reference,
                freq_filter: AnalogFilterSpec::FirstOrderLowpass { cutoff_hz: 70.0 },
                flicker_method: FlickerMethod::ReferenceAtMeterRate,
                instance_spread: InstanceSpread::default(),
                n_instances: 3,
                n_phases: 3,
            }
        }
    };
    if let Some(id) = &entry.model_id {
        spec.model_id = id.clone();
    }
    if let Some(fs) = entry.fs {
        spec.fs_meter = fs;
    }
    if let Some(aaf) = &entry.aaf {
        spec.aaf = Some(aaf.clone());
    }
    if entry.no_aaf == Some(true) {
        spec.aaf = None;
    }
    if let Some(m) = entry.thd_method {
        spec.thd_method = m;
    }
    if let Some(m) = entry.freq_method {
        spec.freq_method = m;
    }
    if let Some(f) = &entry.freq_filter {
        spec.freq_filter = f.clone();
    }
    if let Some(s) = entry.instance_spread {
        spec.instance_spread = s;
    }
    if let Some(n) = entry.n_instances {
        spec.n_instances = n;
    }
    if let Some(n) = entry.n_phases {
        spec.n_phases = n;
    }
    Ok(spec)
}

impl FileConfig {
    /// Materialize the sweep configuration, applying defaults.
    pub fn into_sweep(self) -> Result<SweepConfig> {
        if let Some(v) = self.schema_version {
            if v != SCHEMA_VERSION {
                return Err(Error::Config(format!(
                    "unsupported schema_version {v}, expected {SCHEMA_VERSION}"
                )));
            }
        }
        let defaults = SweepConfig::default();

        let grid = match (&self.grid.list, self.grid.start, self.grid.stop, self.grid.step) {
            (Some(list), None, None, None) => FrequencyGrid::List { list: list.clone() },
            (None, None, None, None) => defaults.grid.clone(),
            (None, start, stop, step) => {
                let d = match defaults.grid {
                    FrequencyGrid::Range { start, stop, step } => (start, stop, step),
                    _ => (10.0, 2_000.0, 5.0),
                };
                FrequencyGrid::Range {
                    start: start.unwrap_or(d.0),
                    stop: stop.unwrap_or(d.1),
                    step: step.unwrap_or(d.2),
                }
            }
            _ => {
                return Err(Error::Config(
                    "grid: use either list or start/stop/step, not both".into(),
                ))
            }
        };

        let flicker = FlickermeterConfig {
            observation_s: self
                .flicker
                .observation_s
                .unwrap_or(defaults.flicker.observation_s),
            settle_s: self.flicker.settle_s.unwrap_or(defaults.flicker.settle_s),
            ..FlickermeterConfig::default()
        };

        let meters = match &self.meters {
            Some(entries) => entries
                .iter()
                .enumerate()
                .map(|(i, e)| resolve_meter(e, i))
                .collect::<Result<Vec<_>>>()?,
            None => defaults.meters.clone(),
        };

        let tol_default = TolerancePolicy::default();
        let merge_hw = |section: &Option<HalfwidthSection>, d: IndicatorHalfwidths| {
            let s = section.clone().unwrap_or_default();
            IndicatorHalfwidths {
                pst: s.pst.unwrap_or(d.pst),
                thd: s.thd.unwrap_or(d.thd),
                f_hz: s.f.unwrap_or(d.f_hz),
                rms_rel: s.rms_rel.unwrap_or(d.rms_rel),
            }
        };

        Ok(SweepConfig {
            u_c: self.signal.u_c.unwrap_or(defaults.u_c),
            f_c: self.signal.f_c.unwrap_or(defaults.f_c),
            u_i_star: self.signal.u_i_star.unwrap_or(defaults.u_i_star),
            phi_c: self.signal.phi_c.unwrap_or(defaults.phi_c),
            phi_i: self.signal.phi_i.unwrap_or(defaults.phi_i),
            grid,
            duration_s: self
                .duration_s
                .unwrap_or(flicker.observation_s + flicker.settle_s),
            reference_sampling: SamplingSpec {
                fs: self.reference.fs.unwrap_or(defaults.reference_sampling.fs),
                quantizer_bits: self.reference.quantizer_bits,
            },
            meters,
            master_seed: self.seed.unwrap_or(DEFAULT_MASTER_SEED),
            limits: LimitSet {
                pst_limit: self.limits.pst.unwrap_or(defaults.limits.pst_limit),
                f_band: self.limits.f_band.unwrap_or(defaults.limits.f_band),
                thd_limit: self.limits.thd.unwrap_or(defaults.limits.thd_limit),
            },
            tolerance: TolerancePolicy {
                reference: merge_hw(&self.tolerance.reference, tol_default.reference),
                meter: merge_hw(&self.tolerance.meter, tol_default.meter),
            },
            flicker,
            parallelism: self.parallelism,
        })
    }
}

/// Interpret the right-hand side of an override as a TOML scalar, array or
/// inline table; anything that does not parse is taken as a bare string.
fn parse_override_value(raw: &str) -> toml::Value {
    let trimmed = raw.trim();
    match format!("v = {trimmed}").parse::<toml::Table>() {
        Ok(doc) => doc["v"].clone(),
        Err(_) => toml::Value::String(trimmed.to_string()),
    }
}

/// Apply one `path.to.key=value` override onto a parsed TOML document.
/// Numeric path segments index arrays.
fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (path, raw_value) = assignment.split_once('=').ok_or_else(|| {
        Error::Config(format!("override {assignment:?} is not of the form key=value"))
    })?;
    let path = path.trim();
    if path.is_empty() {
        return Err(Error::Config("override path is empty".into()));
    }
    let value = parse_override_value(raw_value);

    let segments: Vec<&str> = path.split('.').collect();
    let mut current = doc;
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        if last {
            current.insert(seg.to_string(), value);
            return Ok(());
        }
        // arrays are addressed as meters.0.fs
        if let Ok(index) = segments[i + 1].parse::<usize>() {
            let arr = current
                .entry(seg.to_string())
                .or_insert(toml::Value::Array(Vec::new()))
                .as_array_mut()
                .ok_or_else(|| Error::Config(format!("{seg} is not an array")))?;
            if index >= arr.len() {
                return Err(Error::Config(format!(
                    "{seg}.{index} is out of bounds (len {})",
                    arr.len()
                )));
            }
            let mut inner = arr[index]
                .as_table_mut()
                .ok_or_else(|| Error::Config(format!("{seg}.{index} is not a table")))?;
            let rest = &segments[i + 2..];
            if rest.is_empty() {
                return Err(Error::Config(format!(
                    "override {path:?} must address a field inside {seg}.{index}"
                )));
            }
            for (j, s) in rest.iter().enumerate() {
                if j + 1 == rest.len() {
                    inner.insert(s.to_string(), value);
                    return Ok(());
                }
                inner = inner
                    .entry(s.to_string())
                    .or_insert(toml::Value::Table(toml::Table::new()))
                    .as_table_mut()
                    .ok_or_else(|| Error::Config(format!("{s} is not a table")))?;
            }
        }
        current = current
            .entry(seg.to_string())
            .or_insert(toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("{seg} is not a table")))?;
    }
    Ok(())
}

/// Parse config text plus `key=value` overrides into a [`FileConfig`].
/// Unknown keys are rejected with the offending key named.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<FileConfig> {
    let mut doc: toml::Table = text
        .parse()
        .map_err(|e| Error::Config(format!("parse error: {e}")))?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let merged =
        toml::to_string(&doc).map_err(|e| Error::Config(format!("re-serialize: {e}")))?;
    toml::from_str(&merged).map_err(|e| Error::Config(format!("{e}")))
}

/// Load a campaign config file with overrides; a missing `path` with
/// `allow_missing` yields the default campaign.
pub fn load_config(path: Option<&std::path::Path>, overrides: &[String]) -> Result<SweepConfig> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?,
        None => String::new(),
    };
    parse_config(&text, overrides)?.into_sweep()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_default_campaign() {
        let cfg = parse_config("", &[]).unwrap().into_sweep().unwrap();
        let d = SweepConfig::default();
        assert_eq!(cfg.u_c, d.u_c);
        assert_eq!(cfg.grid, d.grid);
        assert_eq!(cfg.master_seed, DEFAULT_MASTER_SEED);
        assert_eq!(cfg.meters.len(), 3);
    }

    #[test]
    fn full_config_round_trips() {
        let text = r#"
schema_version = 1
seed = 7
duration_s = 30.0

[signal]
u_c = 231.0
u_i_star = 0.1

[grid]
start = 100.0
stop = 200.0
step = 50.0

[reference]
fs = 12000.0

[flicker]
observation_s = 20.0
settle_s = 4.0

[limits]
pst = 1.2
f_band = [49.0, 51.0]

[tolerance.meter]
pst = 0.2

[[meters]]
preset = "EM-A"
fs = 2500.0

[[meters]]
model_id = "inline"
fs = 2000.0
thd_method = "residual_ratio"
aaf = { kind = "butterworth_lowpass", order = 2, cutoff_hz = 900.0 }
"#;
        let cfg = parse_config(text, &[]).unwrap().into_sweep().unwrap();
        assert_eq!(cfg.u_c, 231.0);
        assert_eq!(cfg.master_seed, 7);
        assert_eq!(cfg.duration_s, 30.0);
        assert_eq!(cfg.limits.pst_limit, 1.2);
        assert_eq!(cfg.tolerance.meter.pst, 0.2);
        assert_eq!(cfg.tolerance.meter.thd, 0.01); // default retained
        assert_eq!(cfg.meters.len(), 2);
        assert_eq!(cfg.meters[0].model_id, "EM-A");
        assert_eq!(cfg.meters[0].fs_meter, 2500.0);
        assert_eq!(cfg.meters[1].model_id, "inline");
        assert!(matches!(cfg.meters[1].thd_method, ThdMethod::ResidualRatio));
    }

    #[test]
    fn unknown_key_is_rejected_by_name() {
        let err = parse_config("[signal]\nu_x = 3.0\n", &[]).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("u_x"), "message should name the key: {msg}");
    }

    #[test]
    fn overrides_take_precedence() {
        let text = "[signal]\nu_i_star = 0.05\n";
        let cfg = parse_config(
            text,
            &[
                "signal.u_i_star=0.1".to_string(),
                "grid.step=2.5".to_string(),
                "seed=99".to_string(),
            ],
        )
        .unwrap()
        .into_sweep()
        .unwrap();
        assert_eq!(cfg.u_i_star, 0.1);
        assert_eq!(cfg.master_seed, 99);
        match cfg.grid {
            FrequencyGrid::Range { step, .. } => assert_eq!(step, 2.5),
            _ => panic!("expected range grid"),
        }
    }

    #[test]
    fn override_into_meter_array() {
        let text = "[[meters]]\npreset = \"EM-A\"\n";
        let cfg = parse_config(text, &["meters.0.fs=2500.0".to_string()])
            .unwrap()
            .into_sweep()
            .unwrap();
        assert_eq!(cfg.meters[0].fs_meter, 2500.0);
    }

    #[test]
    fn override_with_unknown_key_is_rejected() {
        let err = parse_config("", &["signal.bogus=1".to_string()])
            .unwrap_err();
        assert!(format!("{err}").contains("bogus"));
    }

    #[test]
    fn bad_schema_version_rejected() {
        let err = parse_config("schema_version = 99\n", &[])
            .unwrap()
            .into_sweep()
            .unwrap_err();
        assert!(format!("{err}").contains("schema_version"));
    }

    #[test]
    fn grid_list_and_range_conflict() {
        let err = parse_config("[grid]\nstep = 5.0\nlist = [1.0]\n", &[])
            .unwrap()
            .into_sweep()
            .unwrap_err();
        assert!(format!("{err}").contains("grid"));
    }

    #[test]
    fn unknown_preset_named_in_error() {
        let err = parse_config("[[meters]]\npreset = \"EM-X\"\n", &[])
            .unwrap()
            .into_sweep()
            .unwrap_err();
        assert!(format!("{err}").contains("EM-X"));
    }
}
