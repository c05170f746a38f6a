//! Frequency-sweep verification campaign.
//!
//! For every grid frequency the stimulus is synthesized once at the
//! reference rate, analyzed by the reference chain, then read by every
//! meter model instance on every phase. Per model the
//! `n_instances x n_phases` readings collapse into min/max envelopes and a
//! consistency verdict per indicator: readings are accepted when the
//! uncertainty intervals of meter and reference overlap, and limit
//! violations on one side only are flagged as false or missed alarms.

use crate::error::{Error, Result};
use crate::meter::{read_meter, MeterModelSpec, MeterReadings};
use crate::reference::{analyze, FlickermeterConfig, ReferenceReadings};
use crate::signal::{synth_two_tone, SamplingSpec, TestSignalParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Fixed default master seed so campaigns reproduce byte-for-byte unless
/// a seed is chosen explicitly.
pub const DEFAULT_MASTER_SEED: u64 = 1_000_003;

/// Network limits the verdicts are checked against: Pst <= 1, frequency
/// within +/-1% of nominal and THD <= 8%.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitSet {
    pub pst_limit: f64,
    /// Permitted fundamental-frequency band (Hz).
    pub f_band: (f64, f64),
    /// THD limit as a ratio.
    pub thd_limit: f64,
}

impl Default for LimitSet {
    fn default() -> Self {
        Self {
            pst_limit: 1.0,
            f_band: (49.5, 50.5),
            thd_limit: 0.08,
        }
    }
}

impl LimitSet {
    fn validate(&self, f_nominal: f64) -> Result<()> {
        if !(self.f_band.0 < f_nominal && f_nominal < self.f_band.1) {
            return Err(Error::Config(format!(
                "frequency band {:?} must bracket the nominal {f_nominal} Hz",
                self.f_band
            )));
        }
        if self.pst_limit <= 0.0 || self.thd_limit <= 0.0 {
            return Err(Error::Config("limits must be positive".into()));
        }
        Ok(())
    }
}

/// Half-width of the uncertainty interval assigned to each indicator.
/// `rms_rel` is relative to the reading, the others are absolute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndicatorHalfwidths {
    pub pst: f64,
    pub thd: f64,
    pub f_hz: f64,
    pub rms_rel: f64,
}

/// Uncertainty stand-ins for the overlap test, one set per side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancePolicy {
    pub reference: IndicatorHalfwidths,
    pub meter: IndicatorHalfwidths,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            reference: IndicatorHalfwidths {
                pst: 0.05,
                thd: 0.002,
                f_hz: 0.01,
                rms_rel: 0.001,
            },
            meter: IndicatorHalfwidths {
                pst: 0.1,
                thd: 0.01,
                f_hz: 0.05,
                rms_rel: 0.005,
            },
        }
    }
}

/// The four indicators a verdict is issued for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    Pst,
    Thd,
    Freq,
    Rms,
}

pub const INDICATORS: [Indicator; 4] =
    [Indicator::Pst, Indicator::Thd, Indicator::Freq, Indicator::Rms];

impl Indicator {
    pub fn label(&self) -> &'static str {
        match self {
            Indicator::Pst => "pst",
            Indicator::Thd => "thd",
            Indicator::Freq => "f",
            Indicator::Rms => "rms",
        }
    }
}

/// Outcome of comparing one meter value against the reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    /// Uncertainty intervals overlap.
    Consistent,
    /// No overlap, but both sides agree about the limit.
    Inconsistent,
    /// Reference violates the limit while the meter reads inside it.
    MissedLimitViolation,
    /// Meter violates the limit while the reference reads inside it.
    FalseLimitViolation,
}

impl VerdictStatus {
    pub fn code(&self) -> &'static str {
        match self {
            VerdictStatus::Consistent => "consistent",
            VerdictStatus::Inconsistent => "inconsistent",
            VerdictStatus::MissedLimitViolation => "missed_limit_violation",
            VerdictStatus::FalseLimitViolation => "false_limit_violation",
        }
    }
}

/// Verdict for one indicator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub indicator: Indicator,
    pub status: VerdictStatus,
}

fn beyond_limit(value: f64, indicator: Indicator, limits: &LimitSet) -> bool {
    match indicator {
        Indicator::Pst => value > limits.pst_limit,
        Indicator::Thd => value > limits.thd_limit,
        Indicator::Freq => value < limits.f_band.0 || value > limits.f_band.1,
        Indicator::Rms => false,
    }
}

fn halfwidth(value: f64, indicator: Indicator, hw: &IndicatorHalfwidths) -> f64 {
    match indicator {
        Indicator::Pst => hw.pst,
        Indicator::Thd => hw.thd,
        Indicator::Freq => hw.f_hz,
        Indicator::Rms => hw.rms_rel * value.abs(),
    }
}

/// Judge one meter value against the reference value.
///
/// Readings are consistent when `|meter - ref|` does not exceed the sum of
/// the two half-widths. Limit statuses dominate plain inconsistency: a
/// meter beyond the limit with the reference inside is a false violation,
/// the converse a missed one. When both sides agree about the limit the
/// overlap test decides.
pub fn verdict(
    ref_value: f64,
    meter_value: f64,
    indicator: Indicator,
    limits: &LimitSet,
    tolerance: &TolerancePolicy,
) -> Verdict {
    let meter_beyond = beyond_limit(meter_value, indicator, limits);
    let ref_beyond = beyond_limit(ref_value, indicator, limits);
    let status = if meter_beyond && !ref_beyond {
        VerdictStatus::FalseLimitViolation
    } else if !meter_beyond && ref_beyond {
        VerdictStatus::MissedLimitViolation
    } else {
        let span = halfwidth(ref_value, indicator, &tolerance.reference)
            + halfwidth(meter_value, indicator, &tolerance.meter);
        if (meter_value - ref_value).abs() <= span {
            VerdictStatus::Consistent
        } else {
            VerdictStatus::Inconsistent
        }
    };
    Verdict { indicator, status }
}

/// Componentwise extrema of a reading set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorEnvelope {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub pst: IndicatorEnvelope,
    pub thd: IndicatorEnvelope,
    pub f_hz: IndicatorEnvelope,
    pub rms: IndicatorEnvelope,
}

impl Envelope {
    pub fn get(&self, indicator: Indicator) -> IndicatorEnvelope {
        match indicator {
            Indicator::Pst => self.pst,
            Indicator::Thd => self.thd,
            Indicator::Freq => self.f_hz,
            Indicator::Rms => self.rms,
        }
    }
}

/// Exact min/max per indicator over a non-empty reading sequence.
pub fn envelope(readings: &[MeterReadings]) -> Result<Envelope> {
    if readings.is_empty() {
        return Err(Error::EmptyReadings);
    }
    let fold = |pick: fn(&MeterReadings) -> f64| {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for r in readings {
            let v = pick(r);
            min = min.min(v);
            max = max.max(v);
        }
        IndicatorEnvelope { min, max }
    };
    Ok(Envelope {
        pst: fold(|r| r.pst),
        thd: fold(|r| r.thd),
        f_hz: fold(|r| r.f_meas_hz),
        rms: fold(|r| r.u_rms_v),
    })
}

/// Worst-case verdict over both envelope endpoints, ranked
/// consistent < inconsistent < missed < false.
pub fn envelope_verdict(
    ref_value: f64,
    env: IndicatorEnvelope,
    indicator: Indicator,
    limits: &LimitSet,
    tolerance: &TolerancePolicy,
) -> Verdict {
    let lo = verdict(ref_value, env.min, indicator, limits, tolerance);
    let hi = verdict(ref_value, env.max, indicator, limits, tolerance);
    Verdict {
        indicator,
        status: lo.status.max(hi.status),
    }
}

/// Frequency grid of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrequencyGrid {
    Range { start: f64, stop: f64, step: f64 },
    List { list: Vec<f64> },
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        // 5 Hz steps stay aligned with the 61000-4-7 bin raster
        FrequencyGrid::Range {
            start: 10.0,
            stop: 2_000.0,
            step: 5.0,
        }
    }
}

impl FrequencyGrid {
    /// Materialize the grid; must be non-empty and strictly increasing.
    pub fn values(&self) -> Result<Vec<f64>> {
        let vals = match self {
            FrequencyGrid::Range { start, stop, step } => {
                if !(step > &0.0) || stop < start {
                    return Err(Error::Config(
                        "grid range needs step > 0 and stop >= start".into(),
                    ));
                }
                let n = ((stop - start) / step).floor() as usize + 1;
                (0..n).map(|i| start + i as f64 * step).collect()
            }
            FrequencyGrid::List { list } => list.clone(),
        };
        if vals.is_empty() {
            return Err(Error::Config("frequency grid is empty".into()));
        }
        if vals.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "frequency grid must be strictly increasing".into(),
            ));
        }
        Ok(vals)
    }
}

/// Everything one sweep needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Carrier rms voltage (V).
    pub u_c: f64,
    /// Carrier frequency (Hz).
    pub f_c: f64,
    /// Relative amplitude of the swept component.
    pub u_i_star: f64,
    pub phi_c: f64,
    pub phi_i: f64,
    pub grid: FrequencyGrid,
    /// Signal duration per sweep point (s), settle included.
    pub duration_s: f64,
    pub reference_sampling: SamplingSpec,
    pub meters: Vec<MeterModelSpec>,
    pub master_seed: u64,
    pub limits: LimitSet,
    pub tolerance: TolerancePolicy,
    pub flicker: FlickermeterConfig,
    /// Worker threads; `None` uses the global pool.
    pub parallelism: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let flicker = FlickermeterConfig::default();
        Self {
            u_c: crate::signal::DEFAULT_U_C,
            f_c: crate::signal::DEFAULT_F_C,
            u_i_star: 0.05,
            phi_c: 0.0,
            phi_i: 0.0,
            grid: FrequencyGrid::default(),
            duration_s: flicker.observation_s + flicker.settle_s,
            reference_sampling: SamplingSpec::new(crate::signal::DEFAULT_REFERENCE_FS),
            meters: ["EM-A", "EM-B", "EM-C"]
                .iter()
                .filter_map(|id| crate::meter::preset_by_id(id))
                .collect(),
            master_seed: DEFAULT_MASTER_SEED,
            limits: LimitSet::default(),
            tolerance: TolerancePolicy::default(),
            flicker,
            parallelism: None,
        }
    }
}

impl SweepConfig {
    pub fn signal_params(&self, f_i: f64) -> TestSignalParams {
        TestSignalParams {
            u_c: self.u_c,
            f_c: self.f_c,
            u_i_star: self.u_i_star,
            f_i,
            duration_s: self.duration_s,
            phi_c: self.phi_c,
            phi_i: self.phi_i,
        }
    }

    fn validate(&self) -> Result<Vec<f64>> {
        let grid = self.grid.values()?;
        let needed = self.flicker.observation_s + self.flicker.settle_s;
        if self.duration_s + 1e-9 < needed {
            return Err(Error::Config(format!(
                "duration_s = {} shorter than observation + settle = {needed}",
                self.duration_s
            )));
        }
        let fs = self.reference_sampling.fs;
        let max_fi = grid.last().copied().unwrap_or(0.0);
        if fs <= 2.0 * max_fi {
            return Err(Error::Config(format!(
                "reference rate {fs} Hz cannot carry f_i up to {max_fi} Hz"
            )));
        }
        self.limits.validate(self.f_c)?;
        for m in &self.meters {
            m.validate(self.f_c).map_err(|e| {
                Error::Config(format!("meter model {}: {e}", m.model_id))
            })?;
            if m.fs_meter * 4.0 > fs && (m.fs_meter - fs).abs() > 1e-9 {
                return Err(Error::Config(format!(
                    "meter model {}: fs_meter {} Hz needs a reference rate of at least {} Hz",
                    m.model_id,
                    m.fs_meter,
                    4.0 * m.fs_meter
                )));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for m in &self.meters {
            if !seen.insert(m.model_id.clone()) {
                return Err(Error::Config(format!(
                    "duplicate meter model id {}",
                    m.model_id
                )));
            }
        }
        Ok(grid)
    }
}

/// Per-model data of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub model_id: String,
    /// `None` when the model failed on this point (see the point
    /// diagnostics).
    pub envelope: Option<Envelope>,
    pub verdicts: Vec<Verdict>,
    pub readings: u32,
}

/// One grid frequency with the reference readings and every model's
/// envelope and verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub f_i: f64,
    pub reference: ReferenceReadings,
    pub models: Vec<ModelPoint>,
    /// Per-model failure records as `code: message` lines; an empty list
    /// means the point is fully populated.
    pub diagnostics: Vec<String>,
}

/// Ordered sweep output plus the configuration echo reports need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub model_ids: Vec<String>,
    pub limits: LimitSet,
    pub master_seed: u64,
    pub points: Vec<SweepPoint>,
}

fn evaluate_point(
    cfg: &SweepConfig,
    flicker: &FlickermeterConfig,
    f_i: f64,
) -> Result<SweepPoint> {
    let params = cfg.signal_params(f_i);
    let source = synth_two_tone(&params, &cfg.reference_sampling)?;
    let reference = analyze(&source, flicker)?;

    let mut models = Vec::with_capacity(cfg.meters.len());
    let mut diagnostics = Vec::new();
    for spec in &cfg.meters {
        let mut readings = Vec::with_capacity((spec.n_instances * spec.n_phases) as usize);
        let mut failure: Option<String> = None;
        'outer: for instance in 0..spec.n_instances {
            for phase in 0..spec.n_phases {
                match read_meter(&source, spec, instance, phase, cfg.master_seed, flicker) {
                    Ok(r) => readings.push(r),
                    Err(e) => {
                        failure = Some(format!("meter_read_failed: {e}"));
                        break 'outer;
                    }
                }
            }
        }
        match failure {
            Some(msg) => {
                diagnostics.push(format!("{} @ {f_i} Hz: {msg}", spec.model_id));
                models.push(ModelPoint {
                    model_id: spec.model_id.clone(),
                    envelope: None,
                    verdicts: Vec::new(),
                    readings: readings.len() as u32,
                });
            }
            None => {
                let env = envelope(&readings)?;
                let verdicts = INDICATORS
                    .iter()
                    .map(|&ind| {
                        let ref_value = match ind {
                            Indicator::Pst => reference.pst,
                            Indicator::Thd => reference.thd,
                            Indicator::Freq => reference.f_meas_hz,
                            Indicator::Rms => reference.u_rms_v,
                        };
                        envelope_verdict(ref_value, env.get(ind), ind, &cfg.limits, &cfg.tolerance)
                    })
                    .collect();
                models.push(ModelPoint {
                    model_id: spec.model_id.clone(),
                    envelope: Some(env),
                    verdicts,
                    readings: readings.len() as u32,
                });
            }
        }
    }
    Ok(SweepPoint {
        f_i,
        reference,
        models,
        diagnostics,
    })
}

/// Run the sweep. Points are independent and evaluated in parallel; the
/// output preserves grid order and reproduces byte-for-byte for a fixed
/// configuration and master seed.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    let grid = cfg.validate()?;
    let flicker = match cfg.flicker.calibration_gain {
        Some(_) => cfg.flicker.clone(),
        None => crate::reference::calibrate_flickermeter(&cfg.flicker)?,
    };

    let evaluate = |f_i: &f64| evaluate_point(cfg, &flicker, *f_i);
    let points: Result<Vec<SweepPoint>> = match cfg.parallelism {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(|| grid.par_iter().map(evaluate).collect())
        }
        None => grid.par_iter().map(evaluate).collect(),
    };

    Ok(SweepResult {
        model_ids: cfg.meters.iter().map(|m| m.model_id.clone()).collect(),
        limits: cfg.limits,
        master_seed: cfg.master_seed,
        points: points?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meter::{preset_by_id, InstanceSpread, MeterModelSpec};

    fn bench_config(grid: FrequencyGrid, meters: Vec<MeterModelSpec>) -> SweepConfig {
        let flicker = FlickermeterConfig {
            observation_s: 12.0,
            settle_s: 3.0,
            ..FlickermeterConfig::default()
        };
        SweepConfig {
            grid,
            duration_s: 15.0,
            meters,
            flicker,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn verdict_examples() {
        let limits = LimitSet::default();
        let tol = TolerancePolicy {
            reference: IndicatorHalfwidths {
                pst: 0.05,
                thd: 0.002,
                f_hz: 0.01,
                rms_rel: 0.001,
            },
            meter: IndicatorHalfwidths {
                pst: 0.1,
                thd: 0.002,
                f_hz: 0.05,
                rms_rel: 0.005,
            },
        };
        // meter flags flicker the reference does not see
        let v = verdict(0.05, 1.3, Indicator::Pst, &limits, &tol);
        assert_eq!(v.status, VerdictStatus::FalseLimitViolation);
        // overlapping THD readings
        let v = verdict(0.100, 0.101, Indicator::Thd, &limits, &tol);
        assert_eq!(v.status, VerdictStatus::Consistent);
        // frequency outside the band on the meter side only
        let v = verdict(50.00, 49.2, Indicator::Freq, &limits, &tol);
        assert_eq!(v.status, VerdictStatus::FalseLimitViolation);
    }

    #[test]
    fn verdict_covers_all_four_limit_cells() {
        let limits = LimitSet::default();
        let tol = TolerancePolicy::default();
        // (meter within, ref within) far apart -> inconsistent
        assert_eq!(
            verdict(0.1, 0.9, Indicator::Pst, &limits, &tol).status,
            VerdictStatus::Inconsistent
        );
        // (meter within, ref within) close -> consistent
        assert_eq!(
            verdict(0.1, 0.2, Indicator::Pst, &limits, &tol).status,
            VerdictStatus::Consistent
        );
        // (meter beyond, ref within) -> false violation
        assert_eq!(
            verdict(0.1, 1.5, Indicator::Pst, &limits, &tol).status,
            VerdictStatus::FalseLimitViolation
        );
        // (meter within, ref beyond) -> missed violation
        assert_eq!(
            verdict(1.5, 0.1, Indicator::Pst, &limits, &tol).status,
            VerdictStatus::MissedLimitViolation
        );
        // (meter beyond, ref beyond) close together -> consistent
        assert_eq!(
            verdict(1.5, 1.55, Indicator::Pst, &limits, &tol).status,
            VerdictStatus::Consistent
        );
        // (meter beyond, ref beyond) far apart -> inconsistent
        assert_eq!(
            verdict(1.5, 4.0, Indicator::Pst, &limits, &tol).status,
            VerdictStatus::Inconsistent
        );
    }

    #[test]
    fn rms_has_no_limit_status() {
        let limits = LimitSet::default();
        let tol = TolerancePolicy::default();
        let v = verdict(230.0, 400.0, Indicator::Rms, &limits, &tol);
        assert_eq!(v.status, VerdictStatus::Inconsistent);
    }

    #[test]
    fn envelope_of_single_reading_is_degenerate() {
        let r = MeterReadings {
            pst: 0.3,
            thd: 0.01,
            f_meas_hz: 50.0,
            u_rms_v: 230.0,
            instance_id: 0,
            phase_id: 0,
        };
        let env = envelope(std::slice::from_ref(&r)).unwrap();
        assert_eq!(env.pst.min, env.pst.max);
        assert_eq!(env.rms.min, 230.0);
    }

    #[test]
    fn envelope_matches_sort_oracle() {
        let readings: Vec<MeterReadings> = (0..9)
            .map(|i| MeterReadings {
                pst: 0.1 * ((i * 7 % 9) as f64),
                thd: 0.01 * ((i * 4 % 9) as f64),
                f_meas_hz: 50.0 + 0.001 * ((i * 5 % 9) as f64),
                u_rms_v: 230.0 - 0.05 * (i as f64),
                instance_id: i / 3,
                phase_id: i % 3,
            })
            .collect();
        let env = envelope(&readings).unwrap();
        let mut psts: Vec<f64> = readings.iter().map(|r| r.pst).collect();
        psts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(env.pst.min, psts[0]);
        assert_eq!(env.pst.max, *psts.last().unwrap());
        let median = psts[psts.len() / 2];
        assert!(env.pst.min <= median && median <= env.pst.max);
    }

    #[test]
    fn empty_envelope_rejected() {
        assert!(matches!(envelope(&[]), Err(Error::EmptyReadings)));
    }

    #[test]
    fn grid_materialization() {
        let g = FrequencyGrid::Range {
            start: 10.0,
            stop: 2_000.0,
            step: 5.0,
        };
        let v = g.values().unwrap();
        assert_eq!(v.len(), 399);
        assert_eq!(v[0], 10.0);
        assert_eq!(*v.last().unwrap(), 2_000.0);

        assert!(FrequencyGrid::List { list: vec![] }.values().is_err());
        assert!(FrequencyGrid::List {
            list: vec![10.0, 10.0]
        }
        .values()
        .is_err());
    }

    #[test]
    fn single_point_sweep_with_ideal_meter() {
        let mut ideal = MeterModelSpec::ideal(10_000.0);
        ideal.instance_spread = InstanceSpread::ZERO;
        let cfg = bench_config(
            FrequencyGrid::List { list: vec![250.0] },
            vec![ideal],
        );
        let mut cfg = cfg;
        cfg.u_i_star = 0.1;
        let result = run_sweep(&cfg).unwrap();
        assert_eq!(result.points.len(), 1);
        let point = &result.points[0];
        assert!((point.reference.thd - 0.100).abs() < 1e-3);
        assert!(point.diagnostics.is_empty());
        let model = &point.models[0];
        assert_eq!(model.readings, 9);
        for v in &model.verdicts {
            assert_eq!(v.status, VerdictStatus::Consistent, "{:?}", v.indicator);
        }
        // zero spread collapses the envelope
        let env = model.envelope.unwrap();
        assert_eq!(env.pst.min, env.pst.max);
        assert_eq!(env.rms.min, env.rms.max);
    }

    #[test]
    fn reference_only_sweep_is_valid() {
        let cfg = bench_config(FrequencyGrid::List { list: vec![120.0] }, Vec::new());
        let result = run_sweep(&cfg).unwrap();
        assert_eq!(result.points.len(), 1);
        assert!(result.points[0].models.is_empty());
    }

    #[test]
    fn grid_permutation_permutes_points() {
        let mut em_b = preset_by_id("EM-B").unwrap();
        em_b.n_instances = 1;
        em_b.n_phases = 1;
        let make = |grid: Vec<f64>| {
            let mut cfg = bench_config(FrequencyGrid::List { list: grid }, vec![em_b.clone()]);
            cfg.parallelism = Some(2);
            run_sweep(&cfg).unwrap()
        };
        let ab = make(vec![250.0, 275.0]);
        let a = make(vec![250.0]);
        let b = make(vec![275.0]);
        assert_eq!(ab.points[0], a.points[0]);
        assert_eq!(ab.points[1], b.points[0]);
    }

    #[test]
    fn phases_share_the_reference() {
        // identical stimulus on each phase: phase-scoped readings of a
        // spread-free model coincide
        let mut em = preset_by_id("EM-A").unwrap();
        em.instance_spread = InstanceSpread::ZERO;
        let cfg = bench_config(FrequencyGrid::List { list: vec![250.0] }, vec![em]);
        let result = run_sweep(&cfg).unwrap();
        let env = result.points[0].models[0].envelope.unwrap();
        assert_eq!(env.thd.min, env.thd.max);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = bench_config(FrequencyGrid::default(), Vec::new());
        cfg.duration_s = 5.0;
        assert!(matches!(run_sweep(&cfg), Err(Error::Config(_))));

        let mut cfg = bench_config(FrequencyGrid::default(), vec![preset_by_id("EM-B").unwrap()]);
        cfg.reference_sampling = SamplingSpec::new(3_000.0);
        assert!(matches!(run_sweep(&cfg), Err(Error::Config(_))));
    }
}
