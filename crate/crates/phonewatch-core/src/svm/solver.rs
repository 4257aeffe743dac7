//! Sequential two-variable solver for the nu-SVC dual problem.
//!
//! The dual maximizes W(alpha) = sum(alpha) - 1/2 alpha' Q alpha with
//! Q_ij = y_i y_j K(x_i, x_j), subject to
//!
//!   0 <= alpha_i <= 1,
//!   sum over positives of alpha_i = nu * n / 2,
//!   sum over negatives of alpha_i = nu * n / 2.
//!
//! On that feasible set sum(alpha) is the constant nu * n, so maximizing
//! W is the same as minimizing the quadratic term. Both per-class sums
//! are invariants of every update, which forces working pairs to share a
//! label: each step picks the most violating same-class pair (second
//! order selection, LIBSVM style) and solves the two-variable subproblem
//! exactly. Stops when the worst KKT violation across both classes drops
//! below the tolerance.

use crate::error::{Error, Result};
use crate::svm::kernel::{kernel_eval, KernelSpec};

/// Knobs for the dual solver.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Stopping tolerance on the KKT violation.
    pub tol: f64,
    /// Cap on two-variable updates before giving up.
    pub max_updates: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-3,
            max_updates: 10_000_000,
        }
    }
}

/// Result of a dual solve.
#[derive(Debug, Clone)]
pub struct DualSolution {
    /// One multiplier per training point, inside [0, box_bound].
    pub alphas: Vec<f64>,
    /// Dual objective W(alpha) at the returned point.
    pub objective: f64,
    /// KKT violation at exit (below tolerance on success).
    pub kkt_violation: f64,
    /// Two-variable updates performed.
    pub updates: u64,
    /// Upper box bound on each alpha (1 in this parameterization).
    pub box_bound: f64,
}

impl DualSolution {
    /// Returns (|sum y_i alpha_i|, worst box violation) for checking the
    /// dual constraints on a finished solve.
    pub fn constraint_residuals(&self, labels: &[i8]) -> (f64, f64) {
        let eq: f64 = self
            .alphas
            .iter()
            .zip(labels)
            .map(|(&a, &y)| a * y as f64)
            .sum();
        let box_viol = self
            .alphas
            .iter()
            .map(|&a| (-a).max(a - self.box_bound).max(0.0))
            .fold(0.0, f64::max);
        (eq.abs(), box_viol)
    }
}

/// Largest feasible nu for a label set: 2 * min(n+, n-) / n.
pub fn max_feasible_nu(labels: &[i8]) -> f64 {
    let n_pos = labels.iter().filter(|&&y| y > 0).count();
    let n_neg = labels.len() - n_pos;
    2.0 * n_pos.min(n_neg) as f64 / labels.len() as f64
}

/// Dense symmetric kernel matrix of a point set, row-major.
pub fn kernel_matrix(points: &[Vec<f64>], spec: &KernelSpec) -> Result<Vec<f64>> {
    let n = points.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = kernel_eval(spec, &points[i], &points[j])?;
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    Ok(k)
}

/// Solves the nu-SVC dual for a precomputed kernel matrix.
pub fn solve_with_matrix(
    kmat: &[f64],
    labels: &[i8],
    nu: f64,
    opts: &SolverOptions,
) -> Result<DualSolution> {
    let n = labels.len();
    assert_eq!(kmat.len(), n * n, "kernel matrix size mismatch");
    if n < 2 {
        return Err(Error::InvalidInput(
            "training needs at least two points".into(),
        ));
    }
    let max_nu = max_feasible_nu(labels);
    if nu.is_nan() || nu <= 0.0 || nu > max_nu + 1e-12 {
        return Err(Error::InfeasibleNu {
            nu,
            max_feasible: max_nu,
        });
    }

    const BOX: f64 = 1.0;
    const TAU: f64 = 1e-12;

    // Spread nu*n/2 over each class in index order, LIBSVM style.
    let per_class = nu * n as f64 / 2.0;
    let mut alphas = vec![0.0; n];
    for class in [1i8, -1i8] {
        let mut remaining = per_class;
        for (i, &y) in labels.iter().enumerate() {
            if y == class {
                let a = remaining.min(BOX);
                alphas[i] = a;
                remaining -= a;
            }
        }
    }

    // Gradient of the quadratic term: G_i = sum_j Q_ij alpha_j.
    let q = |i: usize, j: usize| (labels[i] * labels[j]) as f64 * kmat[i * n + j];
    let mut grad = vec![0.0; n];
    for (j, &aj) in alphas.iter().enumerate() {
        if aj > 0.0 {
            for (i, g) in grad.iter_mut().enumerate() {
                *g += q(i, j) * aj;
            }
        }
    }

    let mut updates = 0u64;
    let violation;
    loop {
        // Per class: the best up-movable index (alpha < BOX) by -G, and
        // the largest G among down-movable ones (alpha > 0).
        let mut up_idx = [usize::MAX; 2];
        let mut up_gmax = [f64::NEG_INFINITY; 2];
        let mut down_gmax = [f64::NEG_INFINITY; 2];
        for i in 0..n {
            let c = if labels[i] > 0 { 0 } else { 1 };
            if alphas[i] < BOX && -grad[i] > up_gmax[c] {
                up_gmax[c] = -grad[i];
                up_idx[c] = i;
            }
            if alphas[i] > 0.0 && grad[i] > down_gmax[c] {
                down_gmax[c] = grad[i];
            }
        }
        let viol_pos = up_gmax[0] + down_gmax[0];
        let viol_neg = up_gmax[1] + down_gmax[1];
        let viol = viol_pos.max(viol_neg);
        if viol < opts.tol {
            violation = viol.max(0.0);
            break;
        }
        if updates >= opts.max_updates {
            return Err(Error::NoConvergence {
                violation: viol,
                updates,
            });
        }

        // Second-order pick of the partner j: largest objective decrease
        // for the two-variable subproblem against its class leader.
        let mut best_j = usize::MAX;
        let mut best_obj = f64::INFINITY;
        for j in 0..n {
            if alphas[j] <= 0.0 {
                continue;
            }
            let c = if labels[j] > 0 { 0 } else { 1 };
            let i = up_idx[c];
            if i == usize::MAX || i == j {
                continue;
            }
            let grad_diff = up_gmax[c] + grad[j];
            if grad_diff <= 0.0 {
                continue;
            }
            // same-class pair: Q_ii + Q_jj - 2 Q_ij = K_ii + K_jj - 2 K_ij
            let quad = (kmat[i * n + i] + kmat[j * n + j] - 2.0 * kmat[i * n + j]).max(TAU);
            let obj = -(grad_diff * grad_diff) / quad;
            if obj < best_obj {
                best_obj = obj;
                best_j = j;
            }
        }
        if best_j == usize::MAX {
            // violating pair exists only through the stopping metric;
            // nothing movable pairwise means we are at a stationary point
            violation = viol.max(0.0);
            break;
        }

        let j = best_j;
        let c = if labels[j] > 0 { 0 } else { 1 };
        let i = up_idx[c];
        let quad = (kmat[i * n + i] + kmat[j * n + j] - 2.0 * kmat[i * n + j]).max(TAU);
        // move t from alpha_j to alpha_i, clipped to the box
        let t = ((grad[j] - grad[i]) / quad).min(BOX - alphas[i]).min(alphas[j]);
        alphas[i] += t;
        alphas[j] -= t;
        for (k, g) in grad.iter_mut().enumerate() {
            *g += t * (q(k, i) - q(k, j));
        }
        updates += 1;
    }

    let sum_alpha: f64 = alphas.iter().sum();
    let quad_term: f64 = alphas.iter().zip(&grad).map(|(&a, &g)| a * g).sum();
    Ok(DualSolution {
        objective: sum_alpha - 0.5 * quad_term,
        alphas,
        kkt_violation: violation,
        updates,
        box_bound: BOX,
    })
}

/// Builds the kernel matrix for the points and solves the dual.
pub fn solve(
    points: &[Vec<f64>],
    labels: &[i8],
    spec: &KernelSpec,
    nu: f64,
    opts: &SolverOptions,
) -> Result<DualSolution> {
    let kmat = kernel_matrix(points, spec)?;
    solve_with_matrix(&kmat, labels, nu, opts)
}
