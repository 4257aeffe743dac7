//! Binary-encoded genetic algorithm over kernel hyperparameters.
//!
//! A chromosome is 116 bits split into four 29-bit fields (nu, coef0,
//! degree, gamma), each mapped linearly onto its configured range.
//! Selection is by tournament, crossover is single point, mutation flips
//! individual bits, and the generation's best individual is carried over
//! unchanged. Fitness is mean k-fold cross-validation accuracy; any
//! training failure (infeasible nu, kernel domain error, non-convergence)
//! scores zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::eval::{cross_validate_with_folds, kfold_split, LabeledDataset};
use crate::svm::{KernelKind, KernelSpec, SolverOptions};

/// Bits per chromosome.
pub const CHROMOSOME_BITS: usize = 116;
/// Bits per encoded parameter field.
pub const FIELD_BITS: usize = 29;
const FIELD_MAX: u64 = (1 << FIELD_BITS) - 1;

/// Fixed-length bit string encoding (nu, coef0, degree, gamma).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Chromosome {
    bits: u128,
}

impl Chromosome {
    const MASK: u128 = (1u128 << CHROMOSOME_BITS) - 1;

    pub fn zeros() -> Chromosome {
        Chromosome { bits: 0 }
    }

    pub fn ones() -> Chromosome {
        Chromosome { bits: Self::MASK }
    }

    pub fn random(rng: &mut impl Rng) -> Chromosome {
        Chromosome {
            bits: rng.gen::<u128>() & Self::MASK,
        }
    }

    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < CHROMOSOME_BITS);
        (self.bits >> i) & 1 == 1
    }

    pub fn flip_bit(&mut self, i: usize) {
        debug_assert!(i < CHROMOSOME_BITS);
        self.bits ^= 1u128 << i;
    }

    /// 29-bit field value, field 0 in the lowest bits.
    fn field(&self, idx: usize) -> u64 {
        ((self.bits >> (idx * FIELD_BITS)) as u64) & FIELD_MAX
    }

    /// Swaps everything from bit `point` upward with the other parent,
    /// producing two children.
    pub fn crossover(&self, other: &Chromosome, point: usize) -> (Chromosome, Chromosome) {
        debug_assert!(point < CHROMOSOME_BITS);
        let low = (1u128 << point) - 1;
        let high = Self::MASK ^ low;
        (
            Chromosome {
                bits: (self.bits & low) | (other.bits & high),
            },
            Chromosome {
                bits: (other.bits & low) | (self.bits & high),
            },
        )
    }
}

/// Inclusive [min, max] decode range for one parameter.
pub type Range = (f64, f64);

/// Decode ranges per parameter; wide enough by default to reach tuned
/// values in the thousands for coef0 and gamma.
#[derive(Debug, Clone, Copy)]
pub struct ParameterRanges {
    pub nu: Range,
    pub coef0: Range,
    pub degree: Range,
    pub gamma: Range,
}

impl Default for ParameterRanges {
    fn default() -> Self {
        ParameterRanges {
            nu: (0.001, 0.999),
            coef0: (0.0, 10_000.0),
            degree: (0.01, 10.0),
            gamma: (0.0001, 10_000.0),
        }
    }
}

/// GA run configuration.
#[derive(Debug, Clone)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub seed: u64,
    pub ranges: ParameterRanges,
    /// Cross-validation folds used for fitness.
    pub folds: usize,
    /// Solver budget per fitness training; smaller than the final
    /// training cap so hopeless parameter regions fail fast.
    pub solver: SolverOptions,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 20,
            generations: 10_000,
            crossover_rate: 0.80,
            mutation_rate: 0.05,
            tournament_size: 2,
            seed: 0,
            ranges: ParameterRanges::default(),
            folds: 9,
            solver: SolverOptions {
                tol: 1e-3,
                max_updates: 100_000,
            },
        }
    }
}

/// Decoded kernel parameters plus nu.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodedParams {
    pub kernel: KernelSpec,
    pub nu: f64,
    pub coef0: f64,
    pub degree: f64,
    pub gamma: f64,
}

#[inline]
fn lerp(range: Range, raw: u64) -> f64 {
    range.0 + (range.1 - range.0) * (raw as f64 / FIELD_MAX as f64)
}

/// Maps the four bit fields onto their ranges; kernels that take fewer
/// parameters ignore the surplus fields.
pub fn decode(c: &Chromosome, kind: KernelKind, ranges: &ParameterRanges) -> DecodedParams {
    let nu = lerp(ranges.nu, c.field(0));
    let coef0 = lerp(ranges.coef0, c.field(1));
    let degree = lerp(ranges.degree, c.field(2));
    let gamma = lerp(ranges.gamma, c.field(3));
    let kernel = match kind {
        KernelKind::Linear => KernelSpec::Linear,
        KernelKind::Polynomial => KernelSpec::Polynomial {
            gamma,
            coef0,
            degree,
        },
        KernelKind::Rbf => KernelSpec::Rbf { gamma },
        KernelKind::Sigmoid => KernelSpec::Sigmoid { gamma, coef0 },
    };
    DecodedParams {
        kernel,
        nu,
        coef0,
        degree,
        gamma,
    }
}

/// Mean cross-validation accuracy of the decoded parameters over a fixed
/// fold split; training failures score zero.
pub fn fitness_with_folds(
    c: &Chromosome,
    dataset: &LabeledDataset,
    folds: &[Vec<usize>],
    kind: KernelKind,
    config: &GaConfig,
) -> f64 {
    let params = decode(c, kind, &config.ranges);
    let report =
        cross_validate_with_folds(dataset, folds, &params.kernel, params.nu, &config.solver);
    if report.failures.iter().any(|&f| f) {
        0.0
    } else {
        report.mean_accuracy
    }
}

/// Standalone fitness with folds derived from the config seed.
pub fn fitness(
    c: &Chromosome,
    dataset: &LabeledDataset,
    kind: KernelKind,
    config: &GaConfig,
) -> Result<f64> {
    let folds = kfold_split(dataset, config.folds, config.seed)?;
    Ok(fitness_with_folds(c, dataset, &folds, kind, config))
}

/// Best fitness and population mean for one generation.
#[derive(Debug, Clone, Copy)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    /// Best-ever chromosome as of this generation.
    pub best: Chromosome,
}

/// Result of an evolution run.
#[derive(Debug, Clone)]
pub struct GaOutcome {
    pub best: Chromosome,
    pub best_fitness: f64,
    pub best_params: DecodedParams,
    pub history: Vec<GenerationStats>,
}

/// Runs the GA: random initial population, then per generation tournament
/// selection, single-point crossover, bit mutation, and elitist carry-over
/// of the best individual. Returns the best-ever chromosome and the
/// per-generation fitness history.
pub fn evolve(config: &GaConfig, dataset: &LabeledDataset, kind: KernelKind) -> Result<GaOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let initial = (0..config.population)
        .map(|_| Chromosome::random(&mut rng))
        .collect();
    evolve_from(config, dataset, kind, initial)
}

/// [`evolve`] with a caller-supplied initial population.
pub fn evolve_from(
    config: &GaConfig,
    dataset: &LabeledDataset,
    kind: KernelKind,
    initial: Vec<Chromosome>,
) -> Result<GaOutcome> {
    assert!(config.population >= 2, "population must be at least 2");
    assert!(config.generations >= 1, "need at least one generation");
    assert_eq!(initial.len(), config.population, "initial population size");
    let folds = kfold_split(dataset, config.folds, config.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));

    let mut population = initial;
    // fitness is deterministic per chromosome, so carried-over elites and
    // untouched clones skip re-evaluation
    let mut fitnesses: Vec<Option<f64>> = vec![None; config.population];

    let mut best: Option<(Chromosome, f64)> = None;
    let mut history = Vec::with_capacity(config.generations);

    for generation in 0..config.generations {
        let scores: Vec<f64> = population
            .par_iter()
            .zip(fitnesses.par_iter())
            .map(|(c, cached)| {
                cached.unwrap_or_else(|| fitness_with_folds(c, dataset, &folds, kind, config))
            })
            .collect();

        let (gen_best_idx, &gen_best_fit) = scores
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty population");
        let mean_fitness = scores.iter().sum::<f64>() / scores.len() as f64;
        if best.as_ref().is_none_or(|&(_, f)| gen_best_fit > f) {
            best = Some((population[gen_best_idx], gen_best_fit));
        }
        let (best_c, best_f) = *best.as_ref().unwrap();
        history.push(GenerationStats {
            generation,
            best_fitness: best_f,
            mean_fitness,
            best: best_c,
        });

        if generation + 1 == config.generations {
            break;
        }

        // next generation: elite first, then offspring
        let mut next_pop = vec![population[gen_best_idx]];
        let mut next_fit = vec![Some(gen_best_fit)];
        let tournament = |rng: &mut ChaCha8Rng| -> Chromosome {
            let mut best_i = rng.gen_range(0..config.population);
            for _ in 1..config.tournament_size.max(1) {
                let i = rng.gen_range(0..config.population);
                if scores[i] > scores[best_i] {
                    best_i = i;
                }
            }
            population[best_i]
        };
        while next_pop.len() < config.population {
            let p1 = tournament(&mut rng);
            let p2 = tournament(&mut rng);
            let (mut c1, mut c2) = if rng.gen_bool(config.crossover_rate) {
                p1.crossover(&p2, rng.gen_range(1..CHROMOSOME_BITS))
            } else {
                (p1, p2)
            };
            for child in [&mut c1, &mut c2] {
                for bit in 0..CHROMOSOME_BITS {
                    if rng.gen_bool(config.mutation_rate) {
                        child.flip_bit(bit);
                    }
                }
                if next_pop.len() < config.population {
                    next_pop.push(*child);
                    next_fit.push(None);
                }
            }
        }
        // clones of current individuals keep their scores
        for (c, f) in next_pop.iter().zip(next_fit.iter_mut()).skip(1) {
            if f.is_none() {
                if let Some(i) = population.iter().position(|p| p == c) {
                    *f = Some(scores[i]);
                }
            }
        }
        debug_assert_eq!(next_pop.len(), config.population);
        population = next_pop;
        fitnesses = next_fit;
    }

    let (best, best_fitness) = best.expect("at least one generation ran");
    Ok(GaOutcome {
        best,
        best_fitness,
        best_params: decode(&best, kind, &config.ranges),
        history,
    })
}
