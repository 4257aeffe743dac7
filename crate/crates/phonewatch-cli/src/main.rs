//! phonewatch: detects hand-held phone use from frontal driver frames.
//!
//! Frames come in as PPM images listed in a manifest CSV together with
//! externally detected face boxes. Exit codes: 0 on success, 1 on fatal
//! input errors, 2 on solver infeasibility or non-convergence.

mod commands;
mod config;
mod ingest;
mod manifest;
mod stream;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use phonewatch_core::error::{Error, Result};
use phonewatch_core::svm::{KernelKind, SvmModel};

use config::{KernelChoice, RunConfig};

#[derive(Parser)]
#[command(
    name = "phonewatch",
    about = "Phone-use detection from frontal driver images",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options every pipeline command shares.
#[derive(Args)]
struct CommonOpts {
    /// Flat key=value config file; CLI flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Manifest CSV: path,face_x,face_y,face_w,face_h,label,timestamp.
    #[arg(long)]
    manifest: PathBuf,
    /// Skin color-bin threshold as a fraction of the sample.
    #[arg(long)]
    seg_fraction: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct KernelOpts {
    /// linear, polynomial, rbf, or sigmoid.
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    coef0: Option<f64>,
    #[arg(long)]
    degree: Option<f64>,
}

#[derive(Args)]
struct GaOpts {
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    crossover: Option<f64>,
    #[arg(long)]
    mutation: Option<f64>,
    #[arg(long)]
    tournament: Option<usize>,
    /// Independent GA runs; the best result wins.
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract features, cross-validate, and train a model.
    Train {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        kernel: KernelOpts,
        /// Output model file.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        folds: Option<usize>,
        /// Cross-validation report CSV.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Feature CSV (frame_id,timestamp,ph,mi,label).
        #[arg(long)]
        features_csv: Option<PathBuf>,
    },
    /// Search kernel hyperparameters with the genetic algorithm.
    Tune {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        ga: GaOpts,
        /// Kernel family to tune.
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        folds: Option<usize>,
        /// Per-generation GA log CSV.
        #[arg(long)]
        ga_log: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Classify a labeled manifest and report frame and period results.
    Eval {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        window: Option<f64>,
        #[arg(long)]
        threshold: Option<f64>,
        /// Period verdict CSV (stdout when omitted).
        #[arg(long)]
        verdicts: Option<PathBuf>,
        #[arg(long)]
        features_csv: Option<PathBuf>,
    },
    /// Accuracy of the period vote rule across thresholds.
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        window: Option<f64>,
        /// Comma-separated threshold grid, e.g. 0.6,0.65,0.7.
        #[arg(long)]
        thresholds: Option<String>,
        /// Sweep CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate real-time processing with a bounded worker pipeline.
    Stream {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        /// Frame rate cap for the simulation.
        #[arg(long)]
        fps: Option<f64>,
        #[arg(long)]
        window: Option<f64>,
        #[arg(long)]
        green_upper: Option<f64>,
        #[arg(long)]
        red_lower: Option<f64>,
        /// Write the verdict stream here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic frame sequence plus manifest.
    Synth {
        /// Output directory for frames and manifest.csv.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 160)]
        width: usize,
        #[arg(long, default_value_t = 120)]
        height: usize,
        #[arg(long, default_value_t = 6.0)]
        fps: f64,
        /// Per-channel noise amplitude.
        #[arg(long, default_value_t = 0)]
        noise: u8,
        /// Seconds per alternating phone-use block.
        #[arg(long, default_value_t = 3.0)]
        block_seconds: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also write ground-truth masks as PBM.
        #[arg(long, default_value_t = false)]
        masks: bool,
    },
}

fn build_config(common: &CommonOpts) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {path:?}: {e}")))?;
        cfg.apply_file(&text)?;
    }
    if let Some(v) = common.seg_fraction {
        cfg.seg_fraction = v;
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    Ok(cfg)
}

fn apply_kernel_opts(cfg: &mut RunConfig, opts: &KernelOpts) -> Result<()> {
    if let Some(k) = &opts.kernel {
        cfg.kernel = if k == "tune" {
            KernelChoice::Tune
        } else {
            KernelChoice::Fixed(KernelKind::parse(k)?)
        };
    }
    if let Some(v) = opts.nu {
        cfg.nu = v;
    }
    if let Some(v) = opts.gamma {
        cfg.gamma = v;
    }
    if let Some(v) = opts.coef0 {
        cfg.coef0 = v;
    }
    if let Some(v) = opts.degree {
        cfg.degree = v;
    }
    Ok(())
}

fn apply_ga_opts(cfg: &mut RunConfig, opts: &GaOpts) {
    if let Some(v) = opts.population {
        cfg.ga_population = v;
    }
    if let Some(v) = opts.generations {
        cfg.ga_generations = v;
    }
    if let Some(v) = opts.crossover {
        cfg.ga_crossover = v;
    }
    if let Some(v) = opts.mutation {
        cfg.ga_mutation = v;
    }
    if let Some(v) = opts.tournament {
        cfg.ga_tournament = v;
    }
    if let Some(v) = opts.restarts {
        cfg.ga_restarts = v;
    }
}

fn parse_thresholds(arg: Option<&str>) -> Result<Vec<f64>> {
    match arg {
        None => Ok(phonewatch_core::eval::DEFAULT_SWEEP_THRESHOLDS.to_vec()),
        Some(list) => list
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad threshold {t:?}")))
            })
            .collect(),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train {
            common,
            kernel,
            model,
            folds,
            report,
            features_csv,
        } => {
            let mut cfg = build_config(&common)?;
            apply_kernel_opts(&mut cfg, &kernel)?;
            if let Some(v) = folds {
                cfg.folds = v;
            }
            cfg.validate()?;
            commands::cmd_train(
                &cfg,
                &common.manifest,
                &model,
                report.as_deref(),
                features_csv.as_deref(),
            )
        }
        Command::Tune {
            common,
            ga,
            kernel,
            model,
            folds,
            ga_log,
            report,
        } => {
            let mut cfg = build_config(&common)?;
            apply_ga_opts(&mut cfg, &ga);
            if let Some(v) = folds {
                cfg.folds = v;
            }
            cfg.validate()?;
            let kind = KernelKind::parse(&kernel)?;
            commands::cmd_tune(
                &cfg,
                &common.manifest,
                kind,
                &model,
                ga_log.as_deref(),
                report.as_deref(),
            )
        }
        Command::Eval {
            common,
            model,
            window,
            threshold,
            verdicts,
            features_csv,
        } => {
            let mut cfg = build_config(&common)?;
            if let Some(v) = window {
                cfg.period_window = v;
            }
            if let Some(v) = threshold {
                cfg.period_threshold = v;
            }
            cfg.validate()?;
            commands::cmd_eval(
                &cfg,
                &common.manifest,
                &model,
                verdicts.as_deref(),
                features_csv.as_deref(),
            )
        }
        Command::Sweep {
            common,
            model,
            window,
            thresholds,
            out,
        } => {
            let mut cfg = build_config(&common)?;
            if let Some(v) = window {
                cfg.period_window = v;
            }
            cfg.validate()?;
            let grid = parse_thresholds(thresholds.as_deref())?;
            commands::cmd_sweep(&cfg, &common.manifest, &model, out.as_deref(), &grid)
        }
        Command::Stream {
            common,
            model,
            workers,
            fps,
            window,
            green_upper,
            red_lower,
            out,
        } => {
            let mut cfg = build_config(&common)?;
            if let Some(v) = workers {
                cfg.workers = v;
            }
            if let Some(v) = fps {
                cfg.fps_cap = v;
            }
            if let Some(v) = window {
                cfg.period_window = v;
            }
            if let Some(v) = green_upper {
                cfg.status_green_upper = v;
            }
            if let Some(v) = red_lower {
                cfg.status_red_lower = v;
            }
            cfg.validate()?;
            let entries = manifest::load_manifest(&common.manifest)?;
            let model = SvmModel::load(&model)?;
            let summary = match out {
                Some(path) => {
                    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
                    let s = stream::run_stream(&entries, &model, &cfg, &mut w)?;
                    use std::io::Write as _;
                    w.flush()?;
                    s
                }
                None => stream::run_stream(&entries, &model, &cfg, &mut std::io::stdout().lock())?,
            };
            eprintln!(
                "stream done: {} frames, {} usable, {} windows, {} alarms",
                summary.frames, summary.usable, summary.windows, summary.alarms
            );
            Ok(())
        }
        Command::Synth {
            out,
            count,
            width,
            height,
            fps,
            noise,
            block_seconds,
            seed,
            masks,
        } => commands::cmd_synth(&commands::SynthArgs {
            out_dir: out,
            count,
            frame_w: width,
            frame_h: height,
            fps,
            noise,
            block_seconds,
            seed,
            write_masks: masks,
        }),
    }
}

fn main() -> ExitCode {
    // die quietly when stdout closes early, e.g. piped into head
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InfeasibleNu { .. } | Error::NoConvergence { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
