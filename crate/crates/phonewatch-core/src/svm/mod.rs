//! From-scratch nu-SVM binary classifier: kernels, dual training, bias,
//! and sign prediction.

pub mod kernel;
pub mod scale;
pub mod solver;

mod model_io;

pub use kernel::{kernel_eval, KernelKind, KernelSpec};
pub use scale::MinMaxScaler;
pub use solver::{max_feasible_nu, solve, DualSolution, SolverOptions};

use crate::error::{Error, Result};

/// Labeled points for binary training; labels are +1 / -1 and both
/// classes must be present.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    points: Vec<Vec<f64>>,
    labels: Vec<i8>,
}

impl TrainingSet {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<i8>) -> Result<TrainingSet> {
        if points.len() != labels.len() {
            return Err(Error::InvalidInput(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::InvalidInput("empty training set".into()));
        }
        let dims = points[0].len();
        if dims == 0 || points.iter().any(|p| p.len() != dims) {
            return Err(Error::InvalidInput(
                "points must share one positive dimension".into(),
            ));
        }
        if labels.iter().any(|&y| y != 1 && y != -1) {
            return Err(Error::InvalidInput("labels must be +1 or -1".into()));
        }
        if !labels.contains(&1) || !labels.contains(&-1) {
            return Err(Error::InvalidInput(
                "training set needs at least one point of each class".into(),
            ));
        }
        Ok(TrainingSet { points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }
}

/// A trained classifier: kernel, scaling, support vectors with their
/// signed coefficients, and the bias.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub kernel: KernelSpec,
    pub nu: f64,
    pub scaler: MinMaxScaler,
    /// Support vectors in scaled feature space.
    pub support_vectors: Vec<Vec<f64>>,
    /// lambda_i = y_i * alpha_i for each support vector.
    pub lambdas: Vec<f64>,
    pub bias: f64,
}

/// Multipliers below this are treated as zero when extracting support
/// vectors.
pub const SUPPORT_VECTOR_EPS: f64 = 1e-8;

/// Bias as the average over all support vectors x_j of
/// y_j - sum_i y_i alpha_i K(x_i, x_j).
pub fn compute_bias(
    kmat: &[f64],
    labels: &[i8],
    alphas: &[f64],
    sv_indices: &[usize],
) -> Result<f64> {
    if sv_indices.is_empty() {
        return Err(Error::DegenerateModel);
    }
    let n = labels.len();
    let mut sum = 0.0;
    for &j in sv_indices {
        let decision: f64 = (0..n)
            .map(|i| labels[i] as f64 * alphas[i] * kmat[i * n + j])
            .sum();
        sum += labels[j] as f64 - decision;
    }
    Ok(sum / sv_indices.len() as f64)
}

/// Trains a nu-SVM with the solver defaults.
pub fn train(data: &TrainingSet, kernel: &KernelSpec, nu: f64) -> Result<SvmModel> {
    train_with(data, kernel, nu, &SolverOptions::default())
}

/// Trains a nu-SVM: min-max scale, solve the dual, keep the points with
/// nonzero multipliers, and compute the bias.
pub fn train_with(
    data: &TrainingSet,
    kernel: &KernelSpec,
    nu: f64,
    opts: &SolverOptions,
) -> Result<SvmModel> {
    kernel.validate()?;
    let scaler = MinMaxScaler::fit(data.points());
    let scaled = scaler.transform_all(data.points());
    let kmat = solver::kernel_matrix(&scaled, kernel)?;
    let sol = solver::solve_with_matrix(&kmat, data.labels(), nu, opts)?;

    if cfg!(debug_assertions) {
        let (eq, box_viol) = sol.constraint_residuals(data.labels());
        debug_assert!(eq < 1e-6, "dual equality constraint violated: {eq}");
        debug_assert!(box_viol < 1e-9, "dual box constraint violated: {box_viol}");
    }

    let sv_indices: Vec<usize> = (0..data.len())
        .filter(|&i| sol.alphas[i] > SUPPORT_VECTOR_EPS)
        .collect();
    let bias = compute_bias(&kmat, data.labels(), &sol.alphas, &sv_indices)?;

    Ok(SvmModel {
        kernel: *kernel,
        nu,
        scaler,
        support_vectors: sv_indices.iter().map(|&i| scaled[i].clone()).collect(),
        lambdas: sv_indices
            .iter()
            .map(|&i| data.labels()[i] as f64 * sol.alphas[i])
            .collect(),
        bias,
    })
}

impl SvmModel {
    /// Decision function sum_i lambda_i K(x, x_i) + b on an unscaled input.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        let xs = self.scaler.transform(x);
        let mut sum = self.bias;
        for (sv, lambda) in self.support_vectors.iter().zip(&self.lambdas) {
            sum += lambda * kernel_eval(&self.kernel, &xs, sv)?;
        }
        Ok(sum)
    }

    /// Sign of the decision value: -1, 0, or +1.
    pub fn predict(&self, x: &[f64]) -> Result<i8> {
        let v = self.decision_value(x)?;
        Ok(if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point_set() -> TrainingSet {
        TrainingSet::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![-1, 1]).unwrap()
    }

    #[test]
    fn training_set_validation() {
        assert!(TrainingSet::new(vec![], vec![]).is_err());
        assert!(TrainingSet::new(vec![vec![1.0]], vec![1]).is_err());
        assert!(TrainingSet::new(vec![vec![1.0], vec![2.0]], vec![1, 2]).is_err());
        assert!(TrainingSet::new(vec![vec![1.0], vec![2.0, 3.0]], vec![1, -1]).is_err());
        assert!(TrainingSet::new(vec![vec![1.0], vec![2.0]], vec![1, -1]).is_ok());
    }

    #[test]
    fn two_point_boundary_is_the_perpendicular_bisector() {
        let model = train(&two_point_set(), &KernelSpec::Linear, 0.5).unwrap();
        assert_eq!(model.support_vectors.len(), 2);
        assert!(model.decision_value(&[0.5, 0.0]).unwrap().abs() < 1e-6);
        assert_eq!(model.predict(&[0.0, 0.0]).unwrap(), -1);
        assert_eq!(model.predict(&[1.0, 0.0]).unwrap(), 1);
        assert_eq!(model.predict(&[0.9, 0.0]).unwrap(), 1);
    }

    #[test]
    fn exact_boundary_point_predicts_zero() {
        let model = train(&two_point_set(), &KernelSpec::Linear, 0.5).unwrap();
        let v = model.decision_value(&[0.5, 0.0]).unwrap();
        // by symmetry the midpoint sits exactly on the boundary
        assert_eq!(v, 0.0);
        assert_eq!(model.predict(&[0.5, 0.0]).unwrap(), 0);
    }

    #[test]
    fn linear_decision_values_are_monotone_along_the_normal() {
        let model = train(&two_point_set(), &KernelSpec::Linear, 0.5).unwrap();
        let values: Vec<f64> = (0..=10)
            .map(|i| model.decision_value(&[i as f64 / 10.0, 0.0]).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]), "{values:?}");
    }

    #[test]
    fn bias_matches_hand_computation_on_two_points() {
        // alphas are 0.5 each; scaled points are 0 and 1 on the first axis.
        // f0(x) = 0.5*x*1 - 0.5*x*0 = 0.5x, so Eq-style bias averages
        // (+1 - 0.5) and (-1 - 0) to -0.25.
        let model = train(&two_point_set(), &KernelSpec::Linear, 0.5).unwrap();
        assert!((model.bias - (-0.25)).abs() < 1e-9);
    }

    #[test]
    fn separable_sets_reach_full_training_accuracy() {
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            points.push(vec![0.1 * i as f64, 0.0]);
            labels.push(-1);
            points.push(vec![0.1 * i as f64 + 3.0, 0.1]);
            labels.push(1);
        }
        let data = TrainingSet::new(points.clone(), labels.clone()).unwrap();
        for kernel in [
            KernelSpec::Linear,
            KernelSpec::Rbf { gamma: 1.0 },
            KernelSpec::Polynomial {
                gamma: 1.0,
                coef0: 1.0,
                degree: 2.0,
            },
        ] {
            let model = train(&data, &kernel, 0.3).unwrap();
            for (p, &y) in points.iter().zip(&labels) {
                assert_eq!(
                    model.predict(p).unwrap(),
                    y,
                    "kernel {:?} misclassified {p:?}",
                    kernel.kind()
                );
            }
        }
    }

    #[test]
    fn translating_inputs_translates_the_boundary() {
        let data = two_point_set();
        let model = train(&data, &KernelSpec::Linear, 0.5).unwrap();
        let shifted = TrainingSet::new(
            vec![vec![10.0, -3.0], vec![11.0, -3.0]],
            vec![-1, 1],
        )
        .unwrap();
        let model2 = train(&shifted, &KernelSpec::Linear, 0.5).unwrap();
        for t in [0.0, 0.25, 0.5, 0.8, 1.0] {
            let a = model.decision_value(&[t, 0.0]).unwrap();
            let b = model2.decision_value(&[10.0 + t, -3.0]).unwrap();
            assert!((a - b).abs() < 1e-9, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn flipping_labels_negates_decisions() {
        let points = vec![
            vec![0.0, 0.3],
            vec![0.2, 0.1],
            vec![0.9, 0.8],
            vec![1.0, 0.6],
            vec![0.4, 0.45],
            vec![0.6, 0.55],
        ];
        let labels = vec![-1, -1, 1, 1, -1, 1];
        let flipped: Vec<i8> = labels.iter().map(|&y| -y).collect();
        for kernel in [
            KernelSpec::Linear,
            KernelSpec::Rbf { gamma: 2.0 },
            KernelSpec::Sigmoid {
                gamma: 0.4,
                coef0: 0.0,
            },
        ] {
            let m1 = train(
                &TrainingSet::new(points.clone(), labels.clone()).unwrap(),
                &kernel,
                0.4,
            )
            .unwrap();
            let m2 = train(
                &TrainingSet::new(points.clone(), flipped.clone()).unwrap(),
                &kernel,
                0.4,
            )
            .unwrap();
            for p in &points {
                let a = m1.decision_value(p).unwrap();
                let b = m2.decision_value(p).unwrap();
                assert_eq!(a, -b, "kernel {:?} at {p:?}", kernel.kind());
                assert_eq!(m1.predict(p).unwrap(), -m2.predict(p).unwrap());
            }
        }
    }

    #[test]
    fn prediction_is_independent_of_support_vector_order() {
        let points = vec![
            vec![0.0, 0.0],
            vec![0.1, 0.4],
            vec![1.0, 1.0],
            vec![0.8, 0.9],
        ];
        let data = TrainingSet::new(points, vec![-1, -1, 1, 1]).unwrap();
        let model = train(&data, &KernelSpec::Rbf { gamma: 1.5 }, 0.5).unwrap();
        let mut reversed = model.clone();
        reversed.support_vectors.reverse();
        reversed.lambdas.reverse();
        for p in [[0.3, 0.3], [0.7, 0.2], [0.5, 0.5]] {
            let a = model.decision_value(&p).unwrap();
            let b = reversed.decision_value(&p).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }
}
