//! Subcommand implementations on top of the core library.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use phonewatch_core::error::{Error, Result};
use phonewatch_core::eval::{
    self, synth, threshold_sweep, write_sweep_csv, write_verdict_csv, FrameVerdict,
    LabeledDataset,
};
use phonewatch_core::ga::{self, GaConfig, GaOutcome};
use phonewatch_core::pnm::{write_pbm_file, write_ppm_file};
use phonewatch_core::svm::{self, KernelKind, KernelSpec, SvmModel, TrainingSet};

use crate::config::{KernelChoice, RunConfig};
use crate::ingest::{ingest, write_features_csv, IngestReport};
use crate::manifest::{load_manifest, manifest_row, ManifestEntry, MANIFEST_HEADER};

fn load_and_ingest(manifest: &Path, config: &RunConfig) -> Result<(Vec<ManifestEntry>, IngestReport)> {
    let entries = load_manifest(manifest)?;
    let report = ingest(&entries, config.seg_fraction, config.fps_cap);
    println!(
        "ingested {} frames: {} usable, {} without face, {} failed",
        report.frames.len(),
        report.usable().count(),
        report.not_found,
        report.failed
    );
    Ok((entries, report))
}

fn training_set(dataset: &LabeledDataset) -> Result<TrainingSet> {
    TrainingSet::new(
        dataset.items().iter().map(|i| i.features.as_point()).collect(),
        dataset.items().iter().map(|i| i.label.value()).collect(),
    )
}

fn ga_config(config: &RunConfig) -> GaConfig {
    GaConfig {
        population: config.ga_population,
        generations: config.ga_generations,
        crossover_rate: config.ga_crossover,
        mutation_rate: config.ga_mutation,
        tournament_size: config.ga_tournament,
        seed: config.seed,
        folds: config.folds,
        ..GaConfig::default()
    }
}

/// GA search with restarts; returns the best outcome across runs.
fn run_ga(config: &RunConfig, dataset: &LabeledDataset, kind: KernelKind) -> Result<GaOutcome> {
    let mut best: Option<GaOutcome> = None;
    for restart in 0..config.ga_restarts.max(1) {
        let ga_cfg = GaConfig {
            seed: config.seed.wrapping_add(restart as u64),
            ..ga_config(config)
        };
        let outcome = ga::evolve(&ga_cfg, dataset, kind)?;
        println!(
            "ga restart {restart}: best fitness {:.4} (nu={:.4} coef0={:.2} degree={:.3} gamma={:.3})",
            outcome.best_fitness,
            outcome.best_params.nu,
            outcome.best_params.coef0,
            outcome.best_params.degree,
            outcome.best_params.gamma
        );
        if best.as_ref().is_none_or(|b| outcome.best_fitness > b.best_fitness) {
            best = Some(outcome);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn write_ga_log(path: &Path, outcome: &GaOutcome, kind: KernelKind, config: &RunConfig) -> Result<()> {
    let ranges = ga_config(config).ranges;
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "generation,best_fitness,mean_fitness,nu,coef0,degree,gamma")?;
    for g in &outcome.history {
        let d = ga::decode(&g.best, kind, &ranges);
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            g.generation, g.best_fitness, g.mean_fitness, d.nu, d.coef0, d.degree, d.gamma
        )?;
    }
    w.flush()?;
    Ok(())
}

fn cv_and_report(
    dataset: &LabeledDataset,
    spec: &KernelSpec,
    nu: f64,
    config: &RunConfig,
    report_path: Option<&Path>,
) -> Result<()> {
    let report = eval::cross_validate(dataset, spec, nu, config.folds, config.seed)?;
    println!(
        "{}-fold cross-validation: mean {:.2}% (stddev {:.2})",
        config.folds,
        report.mean_accuracy * 100.0,
        report.stddev * 100.0
    );
    for (i, acc) in report.per_fold.iter().enumerate() {
        let mark = if report.failures[i] { " (failed)" } else { "" };
        println!("  fold {i}: {:.2}%{mark}", acc * 100.0);
    }
    if let Some(path) = report_path {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "kernel,nu,mean_accuracy,stddev")?;
        writeln!(
            w,
            "{},{},{},{}",
            spec.kind().name(),
            nu,
            report.mean_accuracy,
            report.stddev
        )?;
        w.flush()?;
    }
    Ok(())
}

fn maybe_write_features(report: &IngestReport, path: Option<&Path>) -> Result<()> {
    if let Some(path) = path {
        let mut w = BufWriter::new(File::create(path)?);
        write_features_csv(&mut w, report)?;
        w.flush()?;
    }
    Ok(())
}

/// `train`: features from the manifest, cross-validation report, final
/// model trained on everything, model file out.
pub fn cmd_train(
    config: &RunConfig,
    manifest: &Path,
    model_out: &Path,
    report_out: Option<&Path>,
    features_out: Option<&Path>,
) -> Result<()> {
    let (_, report) = load_and_ingest(manifest, config)?;
    maybe_write_features(&report, features_out)?;
    let dataset = report.dataset()?;

    let (spec, nu) = match config.kernel {
        KernelChoice::Fixed(_) => (config.kernel_spec()?, config.nu),
        KernelChoice::Tune => {
            let outcome = run_ga(config, &dataset, config.ga_kernel)?;
            (outcome.best_params.kernel, outcome.best_params.nu)
        }
    };
    cv_and_report(&dataset, &spec, nu, config, report_out)?;

    let model = svm::train(&training_set(&dataset)?, &spec, nu)?;
    model.save(model_out)?;
    println!(
        "trained {} model (nu={}) with {} support vectors -> {}",
        spec.kind().name(),
        nu,
        model.support_vectors.len(),
        model_out.display()
    );
    Ok(())
}

/// `tune`: GA hyperparameter search for one kernel family, then train and
/// save the winner.
pub fn cmd_tune(
    config: &RunConfig,
    manifest: &Path,
    kind: KernelKind,
    model_out: &Path,
    ga_log: Option<&Path>,
    report_out: Option<&Path>,
) -> Result<()> {
    let (_, report) = load_and_ingest(manifest, config)?;
    let dataset = report.dataset()?;
    let outcome = run_ga(config, &dataset, kind)?;
    if let Some(path) = ga_log {
        write_ga_log(path, &outcome, kind, config)?;
    }
    let (spec, nu) = (outcome.best_params.kernel, outcome.best_params.nu);
    cv_and_report(&dataset, &spec, nu, config, report_out)?;
    let model = svm::train(&training_set(&dataset)?, &spec, nu)?;
    model.save(model_out)?;
    println!(
        "tuned {} model (nu={}) -> {}",
        spec.kind().name(),
        nu,
        model_out.display()
    );
    Ok(())
}

/// Frame verdict stream for the usable, labeled frames, in stream order.
fn predicted_verdicts(
    report: &IngestReport,
    model: &SvmModel,
) -> Result<(Vec<FrameVerdict>, Vec<FrameVerdict>, usize, usize)> {
    let mut predicted = Vec::new();
    let mut truth = Vec::new();
    let mut correct = 0usize;
    let mut labeled = 0usize;
    for f in report.usable() {
        let features = f.features.expect("usable");
        let pred = model.predict(&features.as_point())?;
        if let Some(label) = f.label {
            labeled += 1;
            if pred == label.value() {
                correct += 1;
            }
            predicted.push(FrameVerdict {
                timestamp: f.timestamp,
                positive: pred > 0,
            });
            truth.push(FrameVerdict {
                timestamp: f.timestamp,
                positive: label == eval::Label::WithPhone,
            });
        }
    }
    Ok((predicted, truth, correct, labeled))
}

/// `eval`: frame accuracy plus period verdicts at the configured window
/// and vote threshold.
pub fn cmd_eval(
    config: &RunConfig,
    manifest: &Path,
    model_path: &Path,
    verdicts_out: Option<&Path>,
    features_out: Option<&Path>,
) -> Result<()> {
    let model = SvmModel::load(model_path)?;
    let (_, report) = load_and_ingest(manifest, config)?;
    maybe_write_features(&report, features_out)?;
    let (predicted, _, correct, labeled) = predicted_verdicts(&report, &model)?;
    if labeled == 0 {
        return Err(Error::InvalidInput(
            "no usable labeled frames to evaluate".into(),
        ));
    }
    println!(
        "frame accuracy: {:.2}% ({correct}/{labeled})",
        correct as f64 / labeled as f64 * 100.0
    );

    let periods = eval::classify_period(&predicted, config.period_window, config.period_threshold)?;
    // artifacts land before any more terminal output
    match verdicts_out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_verdict_csv(&mut w, &periods)?;
            w.flush()?;
        }
        None => write_verdict_csv(&mut std::io::stdout().lock(), &periods)?,
    }
    let with = periods
        .iter()
        .filter(|p| p.decision == eval::Label::WithPhone)
        .count();
    println!(
        "{} periods of {}s at threshold {}: {} withPhone, {} noPhone",
        periods.len(),
        config.period_window,
        config.period_threshold,
        with,
        periods.len() - with
    );
    Ok(())
}

/// `sweep`: accuracy of the period vote rule across thresholds, against
/// majority ground truth per period.
pub fn cmd_sweep(
    config: &RunConfig,
    manifest: &Path,
    model_path: &Path,
    out: Option<&Path>,
    thresholds: &[f64],
) -> Result<()> {
    let model = SvmModel::load(model_path)?;
    let (_, report) = load_and_ingest(manifest, config)?;
    let (predicted, truth, _, labeled) = predicted_verdicts(&report, &model)?;
    if labeled == 0 {
        return Err(Error::InvalidInput("no usable labeled frames to sweep".into()));
    }
    let truth_periods = eval::period_truth_majority(&truth, config.period_window)?;
    let rows = threshold_sweep(&predicted, &truth_periods, config.period_window, thresholds)?;
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_sweep_csv(&mut w, &rows)?;
            w.flush()?;
        }
        None => write_sweep_csv(&mut std::io::stdout().lock(), &rows)?,
    }
    for r in &rows {
        println!(
            "threshold {:.2}: withPhone {:.2}% noPhone {:.2}% general {:.2}%",
            r.threshold,
            r.acc_with * 100.0,
            r.acc_without * 100.0,
            r.acc_general * 100.0
        );
    }
    Ok(())
}

/// Arguments of the `synth` command.
pub struct SynthArgs {
    pub out_dir: PathBuf,
    pub count: usize,
    pub frame_w: usize,
    pub frame_h: usize,
    pub fps: f64,
    pub noise: u8,
    pub block_seconds: f64,
    pub seed: u64,
    pub write_masks: bool,
}

/// `synth`: renders a synthetic image sequence with phone-use blocks and
/// writes frames plus a manifest (and optionally ground-truth masks).
pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out_dir)?;
    let base = synth::SynthParams {
        noise_level: args.noise,
        frame_w: args.frame_w,
        frame_h: args.frame_h,
        face: phonewatch_core::roi::Rect::new(
            args.frame_w * 7 / 20,
            args.frame_h / 6,
            args.frame_w * 5 / 16,
            args.frame_h / 2,
        ),
        ..synth::SynthParams::default()
    };
    let block_frames = (args.block_seconds * args.fps).max(1.0) as usize;
    let frames = synth::generate_frames(args.count, &base, args.fps, args.seed, |i| {
        (i / block_frames) % 2 == 1
    })?;

    let manifest_path = args.out_dir.join("manifest.csv");
    let mut manifest = BufWriter::new(File::create(&manifest_path)?);
    writeln!(manifest, "{MANIFEST_HEADER}")?;
    for f in &frames {
        let name = format!("{}.ppm", f.frame_id);
        write_ppm_file(args.out_dir.join(&name), &f.scene.frame)?;
        if args.write_masks {
            write_pbm_file(
                args.out_dir.join(format!("{}_mask.pbm", f.frame_id)),
                &f.scene.truth_mask,
            )?;
        }
        writeln!(
            manifest,
            "{}",
            manifest_row(
                &name,
                Some(f.scene.face),
                Some(f.scene.label),
                Some(f.timestamp)
            )
        )?;
    }
    manifest.flush()?;
    let positives = frames
        .iter()
        .filter(|f| f.scene.label == eval::Label::WithPhone)
        .count();
    println!(
        "wrote {} frames ({} withPhone) and {}",
        frames.len(),
        positives,
        manifest_path.display()
    );
    Ok(())
}
