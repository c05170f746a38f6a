//! Command-line front end: synthesize stimuli, run reference analyses,
//! simulate meter readings, execute sweep campaigns and regenerate
//! reports.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 runtime
//! failure. Diagnostics go to stderr, results to files or stdout.

use clap::{Args, Parser, Subcommand};
use meterbench_core::campaign::{run_sweep, DEFAULT_MASTER_SEED};
use meterbench_core::config::load_config;
use meterbench_core::error::Error;
use meterbench_core::meter::{preset_by_id, presets, read_meter};
use meterbench_core::reference::{analyze, calibrate_flickermeter, FlickermeterConfig};
use meterbench_core::report::{emit_plots, read_csv, summary_string, write_report};
use meterbench_core::signal::{synth_two_tone, SamplingSpec, TestSignalParams};
use meterbench_core::wavefile::{read_waveform, write_waveform};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "meterbench",
    version,
    about = "Bench-scale verification of power-quality functions in energy meters",
    long_about = None
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Stimulus parameters shared by synth/analyze/simulate.
#[derive(Args, Clone)]
struct SignalArgs {
    /// Carrier rms voltage in volts
    #[arg(long, default_value_t = 230.0)]
    uc: f64,
    /// Carrier frequency in Hz
    #[arg(long, default_value_t = 50.0)]
    fc: f64,
    /// Relative amplitude of the additional component
    #[arg(long, default_value_t = 0.0)]
    ui: f64,
    /// Frequency of the additional component in Hz
    #[arg(long, default_value_t = 0.0)]
    fi: f64,
    /// Carrier initial phase in radians
    #[arg(long, default_value_t = 0.0)]
    phi_c: f64,
    /// Additional-component initial phase in radians
    #[arg(long, default_value_t = 0.0)]
    phi_i: f64,
    /// Sampling rate in Hz
    #[arg(long, default_value_t = 10_000.0)]
    fs: f64,
    /// Mid-tread quantizer bit depth (8..=24); omit for ideal samples
    #[arg(long)]
    bits: Option<u32>,
}

impl SignalArgs {
    fn params(&self, duration_s: f64) -> TestSignalParams {
        TestSignalParams {
            u_c: self.uc,
            f_c: self.fc,
            u_i_star: self.ui,
            f_i: self.fi,
            duration_s,
            phi_c: self.phi_c,
            phi_i: self.phi_i,
        }
    }

    fn sampling(&self) -> SamplingSpec {
        SamplingSpec {
            fs: self.fs,
            quantizer_bits: self.bits,
        }
    }
}

/// Flicker window options shared by analyze/simulate.
#[derive(Args, Clone)]
struct WindowArgs {
    /// Flicker observation window in seconds
    #[arg(long, default_value_t = 60.0)]
    observation: f64,
    /// Settle margin trimmed before analysis, in seconds
    #[arg(long, default_value_t = 5.0)]
    settle: f64,
    /// Use the standard 600 s flicker window instead of the bench window
    #[arg(long, default_value_t = false)]
    strict_600s: bool,
}

impl WindowArgs {
    fn flicker_config(&self) -> FlickermeterConfig {
        FlickermeterConfig {
            observation_s: if self.strict_600s {
                600.0
            } else {
                self.observation
            },
            settle_s: self.settle,
            ..FlickermeterConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the two-tone stimulus into a waveform file
    Synth {
        #[command(flatten)]
        signal: SignalArgs,
        /// Signal duration in seconds
        #[arg(long, default_value_t = 65.0)]
        duration: f64,
        /// Output waveform file
        #[arg(long)]
        out: PathBuf,
    },
    /// Print reference readings for a waveform file or synthesized params
    Analyze {
        /// Analyze this waveform file instead of synthesizing
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        signal: SignalArgs,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Print simulated meter readings for a shipped preset
    Simulate {
        /// Preset id (see `presets`)
        #[arg(long)]
        preset: String,
        #[command(flatten)]
        signal: SignalArgs,
        #[command(flatten)]
        window: WindowArgs,
        /// Master seed for instance perturbations
        #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
        seed: u64,
        /// Only this instance (default: all)
        #[arg(long)]
        instance: Option<u32>,
        /// Only this phase (default: all)
        #[arg(long)]
        phase: Option<u32>,
    },
    /// Run a sweep campaign and write CSV, plots and summary
    Sweep {
        /// Campaign config file (TOML); omit for the default campaign
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
        /// Override a config value by dotted path, e.g. grid.step=2.5
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Master seed override
        #[arg(long)]
        seed: Option<u64>,
        /// Use the standard 600 s flicker window
        #[arg(long, default_value_t = false)]
        strict_600s: bool,
        /// Worker threads for sweep points
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Regenerate plots and summary from a results CSV
    Report {
        /// Results CSV produced by `sweep`
        #[arg(long)]
        csv: PathBuf,
        /// Output directory for plots and summary
        #[arg(long)]
        out: PathBuf,
        /// Campaign config the CSV came from (for limit lines)
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override a config value by dotted path
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// List shipped meter model presets
    Presets,
}

fn print_reference(r: &meterbench_core::reference::ReferenceReadings) {
    println!("pst {}", r.pst);
    println!("thd {}", r.thd);
    println!("f_meas_hz {}", r.f_meas_hz);
    println!("u_rms_v {}", r.u_rms_v);
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Synth {
            signal,
            duration,
            out,
        } => {
            let w = synth_two_tone(&signal.params(duration), &signal.sampling())?;
            write_waveform(&w, &out)?;
            eprintln!(
                "wrote {} samples at {} Hz to {}",
                w.len(),
                w.fs,
                out.display()
            );
        }
        Command::Analyze {
            input,
            signal,
            window,
        } => {
            let cfg = calibrate_flickermeter(&window.flicker_config())?;
            let w = match input {
                Some(path) => read_waveform(&path)?,
                None => {
                    let duration = cfg.observation_s + cfg.settle_s;
                    synth_two_tone(&signal.params(duration), &signal.sampling())?
                }
            };
            let readings = analyze(&w, &cfg)?;
            print_reference(&readings);
        }
        Command::Simulate {
            preset,
            signal,
            window,
            seed,
            instance,
            phase,
        } => {
            let spec = preset_by_id(&preset).ok_or_else(|| {
                Error::Config(format!(
                    "unknown preset {preset:?}; run `meterbench presets`"
                ))
            })?;
            let cfg = calibrate_flickermeter(&window.flicker_config())?;
            let duration = cfg.observation_s + cfg.settle_s;
            let w = synth_two_tone(&signal.params(duration), &signal.sampling())?;
            let instances: Vec<u32> = match instance {
                Some(i) => vec![i],
                None => (0..spec.n_instances).collect(),
            };
            let phases: Vec<u32> = match phase {
                Some(p) => vec![p],
                None => (0..spec.n_phases).collect(),
            };
            println!("instance phase pst thd f_meas_hz u_rms_v");
            for &i in &instances {
                for &p in &phases {
                    let r = read_meter(&w, &spec, i, p, seed, &cfg)?;
                    println!(
                        "{i} {p} {} {} {} {}",
                        r.pst, r.thd, r.f_meas_hz, r.u_rms_v
                    );
                }
            }
        }
        Command::Sweep {
            config,
            out,
            set,
            seed,
            strict_600s,
            jobs,
        } => {
            let mut cfg = load_config(config.as_deref(), &set)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if strict_600s {
                cfg.flicker.observation_s = 600.0;
                cfg.duration_s = cfg
                    .duration_s
                    .max(cfg.flicker.observation_s + cfg.flicker.settle_s);
            }
            if let Some(j) = jobs {
                cfg.parallelism = Some(j);
            }
            let result = run_sweep(&cfg)?;
            let bundle = write_report(&result, &out)?;
            for d in result.points.iter().flat_map(|p| &p.diagnostics) {
                eprintln!("warning: {d}");
            }
            eprintln!(
                "wrote {}, {} plots, {}",
                bundle.csv.display(),
                bundle.plots.len(),
                bundle.summary.display()
            );
        }
        Command::Report {
            csv,
            out,
            config,
            set,
        } => {
            let cfg = load_config(config.as_deref(), &set)?;
            let result = read_csv(&csv, cfg.limits)?;
            std::fs::create_dir_all(&out)?;
            let plots = emit_plots(&result, &out)?;
            std::fs::write(out.join("summary.txt"), summary_string(&result))?;
            eprintln!("wrote {} plots and summary to {}", plots.len(), out.display());
        }
        Command::Presets => {
            for p in presets() {
                println!("{}:", p.model_id);
                println!("  fs_meter {} Hz", p.fs_meter);
                match &p.aaf {
                    Some(aaf) => println!("  aaf {aaf:?}"),
                    None => println!("  aaf none"),
                }
                println!("  thd_method {:?}", p.thd_method);
                println!("  freq_method {:?}", p.freq_method);
                println!("  freq_filter {:?}", p.freq_filter);
                println!(
                    "  instance_spread gain {} rate {}",
                    p.instance_spread.gain, p.instance_spread.rate
                );
                println!("  instances {} phases {}", p.n_instances, p.n_phases);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version print to stdout and succeed
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::InvalidParam(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
