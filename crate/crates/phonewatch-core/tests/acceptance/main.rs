//! Acceptance suite: one test per release criterion, each printing a
//! pass line with its runtime (visible with --nocapture).

mod qp_oracle;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use phonewatch_core::eval::synth::{
    dataset_from_frames, generate_frames, separable_points, SynthParams,
};
use phonewatch_core::eval::{
    classify_period, cross_validate, FrameVerdict, Label,
};
use phonewatch_core::features::moment_of_inertia;
use phonewatch_core::ga::{self, Chromosome, GaConfig, ParameterRanges};
use phonewatch_core::imaging::{quantize, rgb_to_hsv, rgb_to_ycrcb, ImageBuffer};
use phonewatch_core::roi::{layout_for_crop, Rect};
use phonewatch_core::segmentation::{segment_skin, SkinMask, DEFAULT_SKIN_FRACTION};
use phonewatch_core::svm::{
    self, max_feasible_nu, KernelKind, KernelSpec, SolverOptions, TrainingSet,
};

fn finish(name: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    println!("ACCEPTANCE {name}: pass ({elapsed:.2?})");
    assert!(
        elapsed < budget,
        "{name} exceeded its runtime budget: {elapsed:?} >= {budget:?}"
    );
}

fn solid_block(w: usize, h: usize, r: Rect) -> SkinMask {
    let mut m = SkinMask::new(w, h);
    for y in r.y..r.y + r.h {
        for x in r.x..r.x + r.w {
            m.set(x, y, true);
        }
    }
    m
}

#[test]
fn criterion_moment_oracle() {
    let t0 = Instant::now();

    // solid square tends to the continuous value 1/6
    let square = solid_block(200, 200, Rect::new(0, 0, 200, 200));
    let mi = moment_of_inertia(&square).unwrap();
    assert!((mi - 1.0 / 6.0).abs() < 1e-3, "square MI {mi}");

    // translation invariance is exact
    let shape = solid_block(96, 96, Rect::new(3, 5, 20, 13));
    let moved = solid_block(96, 96, Rect::new(41, 60, 20, 13));
    assert_eq!(
        moment_of_inertia(&shape).unwrap(),
        moment_of_inertia(&moved).unwrap()
    );

    // doubling the scale drifts MI by less than 1e-2
    let small = solid_block(64, 64, Rect::new(10, 6, 28, 18));
    let big = solid_block(128, 128, Rect::new(20, 12, 56, 36));
    let drift =
        (moment_of_inertia(&small).unwrap() - moment_of_inertia(&big).unwrap()).abs();
    assert!(drift < 1e-2, "scale drift {drift}");

    finish("moment-oracle", t0, Duration::from_secs(1));
}

/// Naive per-pixel segmentation: recounts the sample histogram from
/// scratch for every pixel in both color spaces.
fn segment_naive(crop: &ImageBuffer, frac: f64) -> SkinMask {
    let layout = layout_for_crop(crop.width(), crop.height()).unwrap();
    let s = layout.skin_sample;
    let spaces = [quantize(&rgb_to_hsv(crop)), quantize(&rgb_to_ycrcb(crop))];
    let mut mask = SkinMask::new(crop.width(), crop.height());
    for y in 0..crop.height() {
        for x in 0..crop.width() {
            let all = spaces.iter().all(|q| {
                let mut count = 0u32;
                for sy in s.y..s.y + s.h {
                    for sx in s.x..s.x + s.w {
                        if q.get(sx, sy) == q.get(x, y) {
                            count += 1;
                        }
                    }
                }
                count as f64 / s.area() as f64 >= frac
            });
            mask.set(x, y, all);
        }
    }
    mask
}

#[test]
fn criterion_segmentation_oracle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let layout = layout_for_crop(16, 16).unwrap();
    for round in 0..50 {
        let pixels = (0..256).map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect();
        let crop = ImageBuffer::from_pixels(16, 16, pixels).unwrap();
        let fast = segment_skin(&crop, &layout).unwrap();
        let naive = segment_naive(&crop, DEFAULT_SKIN_FRACTION);
        assert_eq!(fast, naive, "round {round}: masks differ");
    }
    finish("segmentation-oracle", t0, Duration::from_secs(5));
}

#[test]
fn criterion_qp_oracle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let kernels = [
        KernelSpec::Linear,
        KernelSpec::Polynomial {
            gamma: 1.5,
            coef0: 1.0,
            degree: 2.0,
        },
        KernelSpec::Rbf { gamma: 1.2 },
        KernelSpec::Sigmoid {
            gamma: 0.3,
            coef0: 0.1,
        },
    ];
    let opts = SolverOptions {
        tol: 1e-5,
        max_updates: 10_000_000,
    };
    for instance in 0..100 {
        // random set with both classes present
        let n = rng.gen_range(4..=16);
        let points: Vec<Vec<f64>> =
            (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let mut labels: Vec<i8> = (0..n).map(|_| if rng.gen() { 1 } else { -1 }).collect();
        labels[0] = 1;
        labels[1] = -1;
        let nu = rng.gen_range(0.1..=0.9) * max_feasible_nu(&labels);

        for spec in &kernels {
            let sol = svm::solve(&points, &labels, spec, nu, &opts)
                .unwrap_or_else(|e| panic!("instance {instance} {spec:?}: {e}"));
            let (eq, box_viol) = sol.constraint_residuals(&labels);
            assert!(eq < 1e-6, "instance {instance}: sum y a = {eq}");
            assert!(box_viol < 1e-9, "instance {instance}: box violation {box_viol}");
            assert!(sol.kkt_violation < opts.tol);

            let oracle = qp_oracle::solve_reference(&points, &labels, spec, nu);
            assert!(oracle
                .alphas
                .iter()
                .all(|&a| (-1e-12..=1.0 + 1e-12).contains(&a)));
            let denom = oracle.objective.abs().max(1.0);
            let gap = (sol.objective - oracle.objective).abs() / denom;
            assert!(
                gap < 1e-3,
                "instance {instance} {spec:?}: solver {} vs oracle {} (gap {gap})",
                sol.objective,
                oracle.objective
            );
        }
    }
    finish("qp-oracle", t0, Duration::from_secs(60));
}

#[test]
fn criterion_separability() {
    let t0 = Instant::now();
    let ds = separable_points(200, 404);
    let train_set = TrainingSet::new(
        ds.items().iter().map(|i| i.features.as_point()).collect(),
        ds.items().iter().map(|i| i.label.value()).collect(),
    )
    .unwrap();
    let kernels = [
        KernelSpec::Linear,
        KernelSpec::Polynomial {
            gamma: 1.0,
            coef0: 1.0,
            degree: 2.0,
        },
        KernelSpec::Rbf { gamma: 2.0 },
        KernelSpec::Sigmoid {
            gamma: 0.5,
            coef0: 0.0,
        },
    ];
    for spec in &kernels {
        let model = svm::train(&train_set, spec, 0.2).unwrap();
        for it in ds.items() {
            assert_eq!(
                model.predict(&it.features.as_point()).unwrap(),
                it.label.value(),
                "{spec:?} misclassified a training point"
            );
        }
        let report = cross_validate(&ds, spec, 0.2, 9, 17).unwrap();
        assert!(
            report.mean_accuracy >= 0.95,
            "{spec:?}: cv accuracy {}",
            report.mean_accuracy
        );
    }
    finish("separability", t0, Duration::from_secs(30));
}

#[test]
fn criterion_end_to_end_synthetic_pipeline() {
    let t0 = Instant::now();
    let frames = generate_frames(
        200,
        &SynthParams {
            noise_level: 4,
            ..SynthParams::default()
        },
        6.0,
        2025,
        |i| i % 2 == 0,
    )
    .unwrap();
    let positives = frames
        .iter()
        .filter(|f| f.scene.label == Label::WithPhone)
        .count();
    assert_eq!(positives, 100);

    let dataset = dataset_from_frames(&frames, DEFAULT_SKIN_FRACTION).unwrap();
    let config = GaConfig {
        population: 20,
        generations: 50,
        folds: 9,
        seed: 99,
        ..GaConfig::default()
    };
    let outcome = ga::evolve(&config, &dataset, KernelKind::Polynomial).unwrap();
    let report = cross_validate(
        &dataset,
        &outcome.best_params.kernel,
        outcome.best_params.nu,
        9,
        99,
    )
    .unwrap();
    assert!(
        report.mean_accuracy >= 0.95,
        "tuned polynomial CV accuracy {} (ga best fitness {})",
        report.mean_accuracy,
        outcome.best_fitness
    );
    finish(
        "end-to-end-synthetic-pipeline",
        t0,
        Duration::from_secs(600),
    );
}

#[test]
fn criterion_period_logic() {
    let t0 = Instant::now();
    let stream = |positives: usize, total: usize| -> Vec<FrameVerdict> {
        (0..total)
            .map(|i| FrameVerdict {
                timestamp: i as f64 * (2.9 / total as f64),
                positive: i < positives,
            })
            .collect()
    };

    let p = classify_period(&stream(7, 10), 3.0, 0.65).unwrap();
    assert_eq!(p.len(), 1);
    assert_eq!(p[0].decision, Label::WithPhone);

    let p = classify_period(&stream(6, 10), 3.0, 0.65).unwrap();
    assert_eq!(p[0].decision, Label::NoPhone);

    // positive fraction exactly at the threshold decides withPhone
    let p = classify_period(&stream(13, 20), 3.0, 0.65).unwrap();
    assert!((p[0].positive_fraction - 0.65).abs() < 1e-12);
    assert_eq!(p[0].decision, Label::WithPhone);

    finish("period-logic", t0, Duration::from_secs(1));
}

#[test]
fn criterion_ga_properties() {
    let t0 = Instant::now();

    // decoded endpoints hit the configured range ends exactly
    let ranges = ParameterRanges::default();
    let lo = ga::decode(&Chromosome::zeros(), KernelKind::Polynomial, &ranges);
    let hi = ga::decode(&Chromosome::ones(), KernelKind::Polynomial, &ranges);
    assert_eq!(
        (lo.nu, lo.coef0, lo.degree, lo.gamma),
        (ranges.nu.0, ranges.coef0.0, ranges.degree.0, ranges.gamma.0)
    );
    assert_eq!(
        (hi.nu, hi.coef0, hi.degree, hi.gamma),
        (ranges.nu.1, ranges.coef0.1, ranges.degree.1, ranges.gamma.1)
    );

    // random chromosomes decode inside the ranges
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..500 {
        let d = ga::decode(&Chromosome::random(&mut rng), KernelKind::Sigmoid, &ranges);
        assert!(d.nu >= ranges.nu.0 && d.nu <= ranges.nu.1);
        assert!(d.coef0 >= ranges.coef0.0 && d.coef0 <= ranges.coef0.1);
        assert!(d.degree >= ranges.degree.0 && d.degree <= ranges.degree.1);
        assert!(d.gamma >= ranges.gamma.0 && d.gamma <= ranges.gamma.1);
    }

    // elitist best fitness is monotone over 50 generations, and the
    // separable set is solved well before the end (seed pinned)
    let ds = separable_points(80, 6);
    let config = GaConfig {
        population: 10,
        generations: 50,
        folds: 3,
        seed: 1234,
        ..GaConfig::default()
    };
    let out = ga::evolve(&config, &ds, KernelKind::Rbf).unwrap();
    assert_eq!(out.history.len(), 50);
    for w in out.history.windows(2) {
        assert!(
            w[1].best_fitness >= w[0].best_fitness,
            "best fitness regressed: {} -> {}",
            w[0].best_fitness,
            w[1].best_fitness
        );
    }
    assert!(
        out.best_fitness >= 0.95,
        "separable set should tune past 0.95, got {}",
        out.best_fitness
    );

    finish("ga-properties", t0, Duration::from_secs(120));
}
