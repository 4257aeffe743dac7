//! Evaluation harness: stratified k-fold cross-validation, period voting
//! over timestamped frame verdicts, threshold sweeps, and a synthetic
//! scene generator for end-to-end runs without a real dataset.

pub mod synth;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::svm::{self, KernelSpec, SolverOptions, TrainingSet};

/// Binary frame/period label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    WithPhone,
    NoPhone,
}

impl Label {
    pub fn value(self) -> i8 {
        match self {
            Label::WithPhone => 1,
            Label::NoPhone => -1,
        }
    }

    pub fn from_value(v: i8) -> Result<Label> {
        match v {
            1 => Ok(Label::WithPhone),
            -1 => Ok(Label::NoPhone),
            other => Err(Error::InvalidInput(format!("label must be +1 or -1, got {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::WithPhone => "withPhone",
            Label::NoPhone => "noPhone",
        }
    }
}

/// One labeled frame: its feature pair, class, id, and optional capture
/// time in seconds.
#[derive(Debug, Clone)]
pub struct LabeledItem {
    pub features: FeatureVector,
    pub label: Label,
    pub frame_id: String,
    pub timestamp: Option<f64>,
}

/// A labeled feature dataset with both classes present.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    items: Vec<LabeledItem>,
}

impl LabeledDataset {
    pub fn new(items: Vec<LabeledItem>) -> Result<LabeledDataset> {
        let has = |l: Label| items.iter().any(|it| it.label == l);
        if !has(Label::WithPhone) || !has(Label::NoPhone) {
            return Err(Error::InvalidInput(
                "dataset needs at least one item of each class".into(),
            ));
        }
        Ok(LabeledDataset { items })
    }

    pub fn items(&self) -> &[LabeledItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn training_set(&self, indices: &[usize]) -> Result<TrainingSet> {
        TrainingSet::new(
            indices
                .iter()
                .map(|&i| self.items[i].features.as_point())
                .collect(),
            indices.iter().map(|&i| self.items[i].label.value()).collect(),
        )
    }
}

/// Splits the dataset into k disjoint stratified folds of index lists.
///
/// Per class, indices are shuffled by the seed and dealt round-robin; the
/// dealing cursor continues across classes so leftover items land in
/// different folds. Fold sizes per class differ by at most one.
pub fn kfold_split(dataset: &LabeledDataset, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "cross-validation needs at least 2 folds, got {k}"
        )));
    }
    if dataset.len() < k {
        return Err(Error::InvalidInput(format!(
            "dataset of {} items cannot fill {k} folds",
            dataset.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut cursor = 0usize;
    for class in [Label::WithPhone, Label::NoPhone] {
        let mut idx: Vec<usize> = (0..dataset.len())
            .filter(|&i| dataset.items[i].label == class)
            .collect();
        if idx.len() < k {
            return Err(Error::InvalidInput(format!(
                "class {} has {} items, fewer than {k} folds",
                class.name(),
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        for i in idx {
            folds[cursor % k].push(i);
            cursor += 1;
        }
    }
    Ok(folds)
}

/// Per-fold outcome of a cross-validation run.
#[derive(Debug, Clone)]
pub struct CvReport {
    pub mean_accuracy: f64,
    pub per_fold: Vec<f64>,
    /// Sample standard deviation of the fold accuracies.
    pub stddev: f64,
    /// True for folds where training (or prediction) failed; such folds
    /// score zero.
    pub failures: Vec<bool>,
}

/// Trains on k-1 folds and tests on the held-out one, for every fold.
pub fn cross_validate(
    dataset: &LabeledDataset,
    kernel: &KernelSpec,
    nu: f64,
    k: usize,
    seed: u64,
) -> Result<CvReport> {
    let folds = kfold_split(dataset, k, seed)?;
    Ok(cross_validate_with_folds(
        dataset,
        &folds,
        kernel,
        nu,
        &SolverOptions::default(),
    ))
}

/// Cross-validation over a fixed fold split; training failures fold into
/// zero-accuracy folds instead of aborting.
pub fn cross_validate_with_folds(
    dataset: &LabeledDataset,
    folds: &[Vec<usize>],
    kernel: &KernelSpec,
    nu: f64,
    opts: &SolverOptions,
) -> CvReport {
    let results: Vec<(f64, bool)> = folds
        .par_iter()
        .enumerate()
        .map(|(fi, test_fold)| {
            let train_idx: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|&(other, _)| other != fi)
                .flat_map(|(_, f)| f.iter().copied())
                .collect();
            fold_accuracy(dataset, &train_idx, test_fold, kernel, nu, opts)
                .map_or((0.0, true), |acc| (acc, false))
        })
        .collect();

    let per_fold: Vec<f64> = results.iter().map(|&(a, _)| a).collect();
    let failures: Vec<bool> = results.iter().map(|&(_, f)| f).collect();
    let mean = per_fold.iter().sum::<f64>() / per_fold.len() as f64;
    let var = if per_fold.len() > 1 {
        per_fold.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (per_fold.len() - 1) as f64
    } else {
        0.0
    };
    CvReport {
        mean_accuracy: mean,
        per_fold,
        stddev: var.sqrt(),
        failures,
    }
}

fn fold_accuracy(
    dataset: &LabeledDataset,
    train_idx: &[usize],
    test_idx: &[usize],
    kernel: &KernelSpec,
    nu: f64,
    opts: &SolverOptions,
) -> Result<f64> {
    let train = dataset.training_set(train_idx)?;
    let model = svm::train_with(&train, kernel, nu, opts)?;
    let mut correct = 0usize;
    for &i in test_idx {
        let item = &dataset.items[i];
        if model.predict(&item.features.as_point())? == item.label.value() {
            correct += 1;
        }
    }
    Ok(correct as f64 / test_idx.len() as f64)
}

/// One classified frame in a time-ordered stream.
#[derive(Debug, Clone, Copy)]
pub struct FrameVerdict {
    pub timestamp: f64,
    pub positive: bool,
}

/// Decision for one fixed-length window of the stream. A window that
/// received no usable frames has `frames_in_period == 0` and decides
/// noPhone by convention.
#[derive(Debug, Clone, Copy)]
pub struct PeriodVerdict {
    pub period_index: usize,
    pub frames_in_period: usize,
    pub positive_fraction: f64,
    pub decision: Label,
    pub threshold: f64,
}

impl PeriodVerdict {
    pub fn has_data(&self) -> bool {
        self.frames_in_period > 0
    }
}

/// Upper bound on the number of periods one stream may span (a month of
/// 3-second windows).
pub const MAX_PERIODS: usize = 1_000_000;

/// Groups frame verdicts into consecutive `window`-second buckets from
/// the first timestamp and applies the vote rule: a period is withPhone
/// when its positive fraction is at least `threshold`.
pub fn classify_period(
    frames: &[FrameVerdict],
    window: f64,
    threshold: f64,
) -> Result<Vec<PeriodVerdict>> {
    if window.is_nan() || window <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "period window must be positive, got {window}"
        )));
    }
    if frames.windows(2).any(|w| w[1].timestamp < w[0].timestamp) {
        return Err(Error::InvalidInput(
            "frame timestamps must be non-decreasing".into(),
        ));
    }
    let Some(first) = frames.first() else {
        return Ok(Vec::new());
    };
    let t0 = first.timestamp;
    let bucket_of = |t: f64| ((t - t0) / window).floor() as usize;
    let n_buckets = bucket_of(frames.last().unwrap().timestamp) + 1;
    // a window far smaller than the stream's time span is a caller error,
    // not a reason to allocate millions of empty verdicts
    if n_buckets > MAX_PERIODS {
        return Err(Error::InvalidInput(format!(
            "{n_buckets} periods of {window}s would cover the stream; \
             the cap is {MAX_PERIODS}"
        )));
    }

    let mut counts = vec![(0usize, 0usize); n_buckets];
    for f in frames {
        let b = bucket_of(f.timestamp);
        counts[b].0 += 1;
        if f.positive {
            counts[b].1 += 1;
        }
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(period_index, (total, positives))| {
            let positive_fraction = if total > 0 {
                positives as f64 / total as f64
            } else {
                0.0
            };
            PeriodVerdict {
                period_index,
                frames_in_period: total,
                positive_fraction,
                decision: if positive_fraction >= threshold {
                    Label::WithPhone
                } else {
                    Label::NoPhone
                },
                threshold,
            }
        })
        .collect())
}

/// Majority ground-truth label per period from true frame labels: a
/// period counts as withPhone when at least half its frames are.
pub fn period_truth_majority(
    frames: &[FrameVerdict],
    window: f64,
) -> Result<Vec<Label>> {
    Ok(classify_period(frames, window, 0.5)?
        .into_iter()
        .map(|p| p.decision)
        .collect())
}

/// The grid of vote thresholds swept by default.
pub const DEFAULT_SWEEP_THRESHOLDS: [f64; 7] = [0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90];

/// Per-threshold accuracies of the period classifier.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub threshold: f64,
    /// Accuracy over periods whose ground truth is withPhone.
    pub acc_with: f64,
    /// Accuracy over periods whose ground truth is noPhone.
    pub acc_without: f64,
    /// Accuracy over all periods.
    pub acc_general: f64,
}

/// Evaluates the vote rule at each threshold against per-period ground
/// truth. A class with no ground-truth periods scores a vacuous 1.0.
pub fn threshold_sweep(
    frames: &[FrameVerdict],
    ground_truth: &[Label],
    window: f64,
    thresholds: &[f64],
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(thresholds.len());
    for &threshold in thresholds {
        let periods = classify_period(frames, window, threshold)?;
        if periods.len() != ground_truth.len() {
            return Err(Error::InvalidInput(format!(
                "ground truth covers {} periods but the stream has {}",
                ground_truth.len(),
                periods.len()
            )));
        }
        let mut correct = [0usize; 2];
        let mut total = [0usize; 2];
        for (p, &truth) in periods.iter().zip(ground_truth) {
            let c = if truth == Label::WithPhone { 0 } else { 1 };
            total[c] += 1;
            if p.decision == truth {
                correct[c] += 1;
            }
        }
        let acc = |c: usize| {
            if total[c] > 0 {
                correct[c] as f64 / total[c] as f64
            } else {
                1.0
            }
        };
        rows.push(SweepRow {
            threshold,
            acc_with: acc(0),
            acc_without: acc(1),
            acc_general: (correct[0] + correct[1]) as f64
                / (total[0] + total[1]).max(1) as f64,
        });
    }
    Ok(rows)
}

/// Writes the feature CSV: `frame_id,timestamp,ph,mi,label`.
pub fn write_feature_csv(w: &mut impl std::io::Write, items: &[LabeledItem]) -> Result<()> {
    writeln!(w, "frame_id,timestamp,ph,mi,label")?;
    for it in items {
        let ts = it.timestamp.map_or(String::new(), |t| t.to_string());
        writeln!(
            w,
            "{},{},{},{},{}",
            it.frame_id,
            ts,
            it.features.ph,
            it.features.mi,
            it.label.value()
        )?;
    }
    Ok(())
}

/// Writes the verdict CSV: `period_index,frames,positive_fraction,decision`.
pub fn write_verdict_csv(w: &mut impl std::io::Write, periods: &[PeriodVerdict]) -> Result<()> {
    writeln!(w, "period_index,frames,positive_fraction,decision")?;
    for p in periods {
        writeln!(
            w,
            "{},{},{},{}",
            p.period_index,
            p.frames_in_period,
            p.positive_fraction,
            p.decision.name()
        )?;
    }
    Ok(())
}

/// Writes the sweep CSV: `threshold,acc_with,acc_without,acc_general`.
pub fn write_sweep_csv(w: &mut impl std::io::Write, rows: &[SweepRow]) -> Result<()> {
    writeln!(w, "threshold,acc_with,acc_without,acc_general")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.threshold, r.acc_with, r.acc_without, r.acc_general
        )?;
    }
    Ok(())
}
