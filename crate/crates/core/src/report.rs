//! Sweep result serialization: CSV table, one SVG characteristic per
//! indicator and a plain-text verdict summary.
//!
//! The CSV holds one row per grid frequency with the reference readings
//! followed by each model's min/max envelope and verdict codes. Numbers
//! are written in Rust's shortest round-trip form so a parse-back
//! reproduces the in-memory values exactly; rows end with `\n` and no
//! cell ever needs quoting. Plots are self-contained SVG with the
//! reference as a line, each model as a shaded min-max band and the
//! network limits as dashed lines.

use crate::campaign::{
    Indicator, IndicatorEnvelope, LimitSet, SweepPoint, SweepResult, Verdict, VerdictStatus,
    INDICATORS,
};
use crate::error::{Error, Result};
use crate::reference::{ReferenceReadings, WindowMeta};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Paths produced by a full report emission.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub csv: PathBuf,
    pub plots: Vec<PathBuf>,
    pub summary: PathBuf,
}

/// Verdict-code column value for a model that failed on a point.
const ERROR_CODE: &str = "error";

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

fn csv_header(model_ids: &[String]) -> String {
    let mut h = String::from("f_i,ref_pst,ref_thd,ref_f,ref_rms");
    for id in model_ids {
        for ind in ["pst", "thd", "f", "rms"] {
            write!(h, ",{id}_{ind}_min,{id}_{ind}_max").unwrap();
        }
        for ind in ["pst", "thd", "f", "rms"] {
            write!(h, ",{id}_{ind}_verdict").unwrap();
        }
    }
    h
}

fn csv_row(point: &SweepPoint, model_ids: &[String]) -> String {
    let r = &point.reference;
    let mut row = format!(
        "{},{},{},{},{}",
        fmt_num(point.f_i),
        fmt_num(r.pst),
        fmt_num(r.thd),
        fmt_num(r.f_meas_hz),
        fmt_num(r.u_rms_v)
    );
    for id in model_ids {
        let model = point.models.iter().find(|m| &m.model_id == id);
        match model.and_then(|m| m.envelope.map(|e| (m, e))) {
            Some((m, env)) => {
                for ind in INDICATORS {
                    let e = env.get(ind);
                    write!(row, ",{},{}", fmt_num(e.min), fmt_num(e.max)).unwrap();
                }
                for ind in INDICATORS {
                    let code = m
                        .verdicts
                        .iter()
                        .find(|v| v.indicator == ind)
                        .map(|v| v.status.code())
                        .unwrap_or(ERROR_CODE);
                    write!(row, ",{code}").unwrap();
                }
            }
            None => {
                for _ in 0..8 {
                    row.push_str(",NaN");
                }
                for _ in 0..4 {
                    write!(row, ",{ERROR_CODE}").unwrap();
                }
            }
        }
    }
    row
}

/// Render the whole result as CSV text.
pub fn csv_string(result: &SweepResult) -> String {
    let mut out = csv_header(&result.model_ids);
    out.push('\n');
    for p in &result.points {
        out.push_str(&csv_row(p, &result.model_ids));
        out.push('\n');
    }
    out
}

/// Write the CSV file.
pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(result))?;
    Ok(())
}

fn parse_code(code: &str) -> Option<VerdictStatus> {
    match code {
        "consistent" => Some(VerdictStatus::Consistent),
        "inconsistent" => Some(VerdictStatus::Inconsistent),
        "missed_limit_violation" => Some(VerdictStatus::MissedLimitViolation),
        "false_limit_violation" => Some(VerdictStatus::FalseLimitViolation),
        _ => None,
    }
}

fn parse_num(cell: &str, line: usize) -> Result<f64> {
    cell.parse::<f64>()
        .map_err(|_| Error::Config(format!("line {line}: bad number {cell:?}")))
}

/// Parse a CSV written by [`write_csv`] back into a result.
///
/// Window metadata and the limit set are not stored in the CSV; the
/// caller supplies the limits (for plot annotation) and the metadata is
/// zeroed.
pub fn read_csv(path: &Path, limits: LimitSet) -> Result<SweepResult> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty CSV".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 5 || (cols.len() - 5) % 12 != 0 {
        return Err(Error::Config(format!(
            "unexpected column count {}",
            cols.len()
        )));
    }
    let n_models = (cols.len() - 5) / 12;
    let mut model_ids = Vec::with_capacity(n_models);
    for m in 0..n_models {
        let name = cols[5 + 12 * m]
            .strip_suffix("_pst_min")
            .ok_or_else(|| Error::Config(format!("bad model column {}", cols[5 + 12 * m])))?;
        model_ids.push(name.to_string());
    }

    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let lineno = i + 2;
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != cols.len() {
            return Err(Error::Config(format!(
                "line {lineno}: expected {} cells, found {}",
                cols.len(),
                cells.len()
            )));
        }
        let reference = ReferenceReadings {
            pst: parse_num(cells[1], lineno)?,
            thd: parse_num(cells[2], lineno)?,
            f_meas_hz: parse_num(cells[3], lineno)?,
            u_rms_v: parse_num(cells[4], lineno)?,
            window_meta: WindowMeta {
                flicker_observation_s: 0.0,
                settle_s: 0.0,
                aggregated_windows: 0,
                frequency_interval_s: 0.0,
            },
        };
        let mut models = Vec::with_capacity(n_models);
        for (m, id) in model_ids.iter().enumerate() {
            let base = 5 + 12 * m;
            let nums: Vec<f64> = (0..8)
                .map(|k| parse_num(cells[base + k], lineno))
                .collect::<Result<_>>()?;
            let envelope_cells = crate::campaign::Envelope {
                pst: IndicatorEnvelope {
                    min: nums[0],
                    max: nums[1],
                },
                thd: IndicatorEnvelope {
                    min: nums[2],
                    max: nums[3],
                },
                f_hz: IndicatorEnvelope {
                    min: nums[4],
                    max: nums[5],
                },
                rms: IndicatorEnvelope {
                    min: nums[6],
                    max: nums[7],
                },
            };
            let mut verdicts = Vec::new();
            let mut failed = false;
            for (k, ind) in INDICATORS.iter().enumerate() {
                match parse_code(cells[base + 8 + k]) {
                    Some(status) => verdicts.push(Verdict {
                        indicator: *ind,
                        status,
                    }),
                    None => failed = true,
                }
            }
            models.push(crate::campaign::ModelPoint {
                model_id: id.clone(),
                envelope: if failed { None } else { Some(envelope_cells) },
                verdicts: if failed { Vec::new() } else { verdicts },
                readings: 0,
            });
        }
        points.push(SweepPoint {
            f_i: parse_num(cells[0], lineno)?,
            reference,
            models,
            diagnostics: Vec::new(),
        });
    }
    if points.is_empty() {
        return Err(Error::Config("CSV has no data rows".into()));
    }
    Ok(SweepResult {
        model_ids,
        limits,
        master_seed: 0,
        points,
    })
}

// ---------------------------------------------------------------------------
// SVG emission
// ---------------------------------------------------------------------------

const PLOT_W: f64 = 960.0;
const PLOT_H: f64 = 560.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 42.0;
const MARGIN_B: f64 = 54.0;
const MODEL_COLORS: [&str; 6] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

struct Axis {
    min: f64,
    max: f64,
}

impl Axis {
    fn with_padding(min: f64, max: f64) -> Axis {
        let span = (max - min).abs().max(1e-12);
        Axis {
            min: min - 0.05 * span,
            max: max + 0.05 * span,
        }
    }

    fn ticks(&self) -> Vec<f64> {
        let span = self.max - self.min;
        let raw = span / 6.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 2.5, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| span / s <= 7.0)
            .unwrap_or(mag * 10.0);
        let first = (self.min / step).ceil() * step;
        let mut t = Vec::new();
        let mut v = first;
        while v <= self.max + 1e-9 * step {
            t.push(v);
            v += step;
        }
        t
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if a >= 1000.0 {
        format!("{v:.0}")
    } else if a >= 1.0 {
        let s = format!("{v:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.4}")
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    }
}

struct PlotData<'a> {
    title: &'a str,
    y_label: &'a str,
    reference: Vec<(f64, f64)>,
    // per model: (id, points (f_i, min, max))
    bands: Vec<(&'a str, Vec<(f64, f64, f64)>)>,
    limit_lines: Vec<f64>,
}

fn render_svg(data: &PlotData) -> String {
    let xs: Vec<f64> = data.reference.iter().map(|p| p.0).collect();
    let x_axis = Axis::with_padding(
        xs.iter().cloned().fold(f64::INFINITY, f64::min),
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for &(_, y) in &data.reference {
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    for (_, pts) in &data.bands {
        for &(_, lo, hi) in pts {
            y_min = y_min.min(lo);
            y_max = y_max.max(hi);
        }
    }
    for &l in &data.limit_lines {
        y_min = y_min.min(l);
        y_max = y_max.max(l);
    }
    if !y_min.is_finite() || !y_max.is_finite() {
        y_min = 0.0;
        y_max = 1.0;
    }
    let y_axis = Axis::with_padding(y_min, y_max);

    let x_of = |v: f64| {
        MARGIN_L + (v - x_axis.min) / (x_axis.max - x_axis.min) * (PLOT_W - MARGIN_L - MARGIN_R)
    };
    let y_of = |v: f64| {
        PLOT_H - MARGIN_B
            - (v - y_axis.min) / (y_axis.max - y_axis.min) * (PLOT_H - MARGIN_T - MARGIN_B)
    };

    let mut svg = String::new();
    write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PLOT_W}\" height=\"{PLOT_H}\" viewBox=\"0 0 {PLOT_W} {PLOT_H}\">\n"
    )
    .unwrap();
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    write!(
        svg,
        "<text x=\"{:.2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        PLOT_W / 2.0,
        data.title
    )
    .unwrap();

    // grid and ticks
    for t in x_axis.ticks() {
        let x = x_of(t);
        write!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            MARGIN_T,
            PLOT_H - MARGIN_B
        )
        .unwrap();
        write!(
            svg,
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            PLOT_H - MARGIN_B + 16.0,
            tick_label(t)
        )
        .unwrap();
    }
    for t in y_axis.ticks() {
        let y = y_of(t);
        write!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            MARGIN_L,
            PLOT_W - MARGIN_R
        )
        .unwrap();
        write!(
            svg,
            "<text x=\"{:.2}\" y=\"{y:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\" dominant-baseline=\"middle\">{}</text>\n",
            MARGIN_L - 6.0,
            tick_label(t)
        )
        .unwrap();
    }
    // axes
    write!(
        svg,
        "<rect x=\"{MARGIN_L:.2}\" y=\"{MARGIN_T:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n",
        PLOT_W - MARGIN_L - MARGIN_R,
        PLOT_H - MARGIN_T - MARGIN_B
    )
    .unwrap();
    write!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">f_i (Hz)</text>\n",
        MARGIN_L + (PLOT_W - MARGIN_L - MARGIN_R) / 2.0,
        PLOT_H - 14.0
    )
    .unwrap();
    write!(
        svg,
        "<text x=\"18\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">{}</text>\n",
        MARGIN_T + (PLOT_H - MARGIN_T - MARGIN_B) / 2.0,
        MARGIN_T + (PLOT_H - MARGIN_T - MARGIN_B) / 2.0,
        data.y_label
    )
    .unwrap();

    // model bands
    for (idx, (id, pts)) in data.bands.iter().enumerate() {
        if pts.is_empty() {
            continue;
        }
        let color = MODEL_COLORS[idx % MODEL_COLORS.len()];
        let mut path = String::new();
        for (i, &(x, _, hi)) in pts.iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            write!(path, "{cmd}{:.2},{:.2} ", x_of(x), y_of(hi)).unwrap();
        }
        for &(x, lo, _) in pts.iter().rev() {
            write!(path, "L{:.2},{:.2} ", x_of(x), y_of(lo)).unwrap();
        }
        path.push('Z');
        write!(
            svg,
            "<path d=\"{path}\" fill=\"{color}\" fill-opacity=\"0.25\" stroke=\"none\"/>\n"
        )
        .unwrap();
        for extract in [1usize, 2usize] {
            let mut line = String::new();
            for (i, &(x, lo, hi)) in pts.iter().enumerate() {
                let v = if extract == 1 { lo } else { hi };
                let cmd = if i == 0 { 'M' } else { 'L' };
                write!(line, "{cmd}{:.2},{:.2} ", x_of(x), y_of(v)).unwrap();
            }
            write!(
                svg,
                "<path d=\"{line}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1\"/>\n"
            )
            .unwrap();
        }
        // legend entry
        let ly = MARGIN_T + 16.0 + 16.0 * idx as f64;
        write!(
            svg,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"12\" height=\"12\" fill=\"{color}\" fill-opacity=\"0.5\"/>\n",
            MARGIN_L + 8.0,
            ly - 10.0
        )
        .unwrap();
        write!(
            svg,
            "<text x=\"{:.2}\" y=\"{ly:.2}\" font-family=\"sans-serif\" font-size=\"12\">{id} min/max</text>\n",
            MARGIN_L + 24.0
        )
        .unwrap();
    }

    // limit lines
    for &limit in &data.limit_lines {
        let y = y_of(limit);
        write!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#aa0000\" stroke-width=\"1.5\" stroke-dasharray=\"7,4\"/>\n",
            MARGIN_L,
            PLOT_W - MARGIN_R
        )
        .unwrap();
        write!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#aa0000\" text-anchor=\"end\">limit {}</text>\n",
            PLOT_W - MARGIN_R - 4.0,
            y - 4.0,
            tick_label(limit)
        )
        .unwrap();
    }

    // reference trace
    let mut line = String::new();
    for (i, &(x, y)) in data.reference.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        write!(line, "{cmd}{:.2},{:.2} ", x_of(x), y_of(y)).unwrap();
    }
    write!(
        svg,
        "<path d=\"{line}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.8\"/>\n"
    )
    .unwrap();
    let ly = MARGIN_T + 16.0 + 16.0 * data.bands.len() as f64;
    write!(
        svg,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1.8\"/>\n",
        MARGIN_L + 8.0,
        ly - 5.0,
        MARGIN_L + 20.0,
        ly - 5.0
    )
    .unwrap();
    write!(
        svg,
        "<text x=\"{:.2}\" y=\"{ly:.2}\" font-family=\"sans-serif\" font-size=\"12\">reference</text>\n",
        MARGIN_L + 24.0
    )
    .unwrap();

    svg.push_str("</svg>\n");
    svg
}

fn indicator_value(r: &ReferenceReadings, ind: Indicator) -> f64 {
    match ind {
        Indicator::Pst => r.pst,
        Indicator::Thd => r.thd,
        Indicator::Freq => r.f_meas_hz,
        Indicator::Rms => r.u_rms_v,
    }
}

fn plot_for(result: &SweepResult, ind: Indicator) -> String {
    let (title, y_label, limits): (&str, &str, Vec<f64>) = match ind {
        Indicator::Pst => (
            "Short-term flicker severity vs f_i",
            "Pst",
            vec![result.limits.pst_limit],
        ),
        Indicator::Thd => (
            "Total harmonic distortion vs f_i",
            "THD (ratio)",
            vec![result.limits.thd_limit],
        ),
        Indicator::Freq => (
            "Measured fundamental frequency vs f_i",
            "f_c (Hz)",
            vec![result.limits.f_band.0, result.limits.f_band.1],
        ),
        Indicator::Rms => ("Voltage rms vs f_i", "U rms (V)", vec![]),
    };
    let reference = result
        .points
        .iter()
        .map(|p| (p.f_i, indicator_value(&p.reference, ind)))
        .collect();
    let bands = result
        .model_ids
        .iter()
        .map(|id| {
            let pts = result
                .points
                .iter()
                .filter_map(|p| {
                    p.models
                        .iter()
                        .find(|m| &m.model_id == id)
                        .and_then(|m| m.envelope)
                        .map(|e| {
                            let env = e.get(ind);
                            (p.f_i, env.min, env.max)
                        })
                })
                .collect();
            (id.as_str(), pts)
        })
        .collect();
    render_svg(&PlotData {
        title,
        y_label,
        reference,
        bands,
        limit_lines: limits,
    })
}

/// Emit the four indicator characteristics as SVG files named
/// `pst_vs_fi.svg`, `thd_vs_fi.svg`, `fc_vs_fi.svg` and `rms_vs_fi.svg`.
pub fn emit_plots(result: &SweepResult, dir: &Path) -> Result<Vec<PathBuf>> {
    if result.points.is_empty() {
        return Err(Error::Config("cannot plot an empty sweep result".into()));
    }
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    for (ind, name) in [
        (Indicator::Pst, "pst_vs_fi.svg"),
        (Indicator::Thd, "thd_vs_fi.svg"),
        (Indicator::Freq, "fc_vs_fi.svg"),
        (Indicator::Rms, "rms_vs_fi.svg"),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, plot_for(result, ind))?;
        out.push(path);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Summary
// ---------------------------------------------------------------------------

/// Contiguous f_i sub-ranges (by grid adjacency) where a predicate holds.
fn ranges_where(points: &[SweepPoint], mut hit: impl FnMut(&SweepPoint) -> bool) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    let mut last_hit_index: Option<usize> = None;
    for (i, p) in points.iter().enumerate() {
        if hit(p) {
            match (&mut open, last_hit_index) {
                (Some(range), Some(prev)) if prev + 1 == i => range.1 = p.f_i,
                _ => {
                    if let Some(range) = open.take() {
                        out.push(range);
                    }
                    open = Some((p.f_i, p.f_i));
                }
            }
            last_hit_index = Some(i);
        }
    }
    if let Some(range) = open {
        out.push(range);
    }
    out
}

/// Render the verdict summary.
pub fn summary_string(result: &SweepResult) -> String {
    let n_points = result.points.len();
    let mut s = String::new();
    writeln!(s, "verification summary").unwrap();
    writeln!(s, "====================").unwrap();
    writeln!(
        s,
        "points: {n_points}  models: {}  indicators: {}  master_seed: {}",
        result.model_ids.len(),
        INDICATORS.len(),
        result.master_seed
    )
    .unwrap();
    writeln!(
        s,
        "limits: Pst <= {}, f in [{}, {}] Hz, THD <= {}",
        result.limits.pst_limit,
        result.limits.f_band.0,
        result.limits.f_band.1,
        result.limits.thd_limit
    )
    .unwrap();

    for id in &result.model_ids {
        writeln!(s).unwrap();
        writeln!(s, "model {id}:").unwrap();
        let mut counts = [0usize; 4];
        let mut errors = 0usize;
        for p in &result.points {
            let model = p.models.iter().find(|m| &m.model_id == id);
            match model {
                Some(m) if m.envelope.is_some() => {
                    for v in &m.verdicts {
                        counts[match v.status {
                            VerdictStatus::Consistent => 0,
                            VerdictStatus::Inconsistent => 1,
                            VerdictStatus::MissedLimitViolation => 2,
                            VerdictStatus::FalseLimitViolation => 3,
                        }] += 1;
                    }
                }
                _ => errors += INDICATORS.len(),
            }
        }
        writeln!(
            s,
            "  consistent {}, inconsistent {}, missed_limit_violation {}, false_limit_violation {}{}",
            counts[0],
            counts[1],
            counts[2],
            counts[3],
            if errors > 0 {
                format!(", errors {errors}")
            } else {
                String::new()
            }
        )
        .unwrap();
        let total: usize = counts.iter().sum::<usize>() + errors;
        debug_assert_eq!(total, n_points * INDICATORS.len());

        for ind in INDICATORS {
            let ranges = ranges_where(&result.points, |p| {
                p.models
                    .iter()
                    .find(|m| &m.model_id == id)
                    .map(|m| {
                        m.verdicts.iter().any(|v| {
                            v.indicator == ind
                                && v.status == VerdictStatus::FalseLimitViolation
                        })
                    })
                    .unwrap_or(false)
            });
            if !ranges.is_empty() {
                let list = ranges
                    .iter()
                    .map(|(a, b)| {
                        if a == b {
                            format!("{a}")
                        } else {
                            format!("{a}..{b}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(", ");
                writeln!(s, "  false_limit_violation [{}]: {list} Hz", ind.label()).unwrap();
            }
        }
    }
    s
}

/// Write CSV, plots and summary into `dir`.
pub fn write_report(result: &SweepResult, dir: &Path) -> Result<ReportBundle> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join("results.csv");
    write_csv(result, &csv)?;
    let plots = emit_plots(result, dir)?;
    let summary = dir.join("summary.txt");
    std::fs::write(&summary, summary_string(result))?;
    Ok(ReportBundle {
        csv,
        plots,
        summary,
    })
}
