//! Brute-force reference for the dual solver: projected gradient ascent
//! on W(alpha) = sum(alpha) - 1/2 alpha' Q alpha over the same feasible
//! set (per-class capped simplexes). Momentum with a monotone restart
//! (FISTA style) tames the sublinear tail of plain projected gradient on
//! near-singular kernels; every accepted step is still a plain projected
//! gradient step or better. Shares no code with the production solver.

use phonewatch_core::svm::solver::kernel_matrix;
use phonewatch_core::svm::KernelSpec;

/// In-place projection onto { 0 <= x_i <= 1, sum x_i = s } by bisecting
/// the shift tau in x_i = clip(v_i - tau, 0, 1).
fn project_capped_simplex(v: &mut [f64], s: f64) {
    let sum_at = |v: &[f64], tau: f64| -> f64 {
        v.iter().map(|&x| (x - tau).clamp(0.0, 1.0)).sum()
    };
    let mut lo = v.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0;
    let mut hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if sum_at(v, mid) >= s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - lo).clamp(0.0, 1.0);
    }
}

pub struct OracleSolution {
    pub alphas: Vec<f64>,
    pub objective: f64,
}

struct Workspace {
    n: usize,
    q: Vec<f64>,
    pos: Vec<usize>,
    neg: Vec<usize>,
    per_class: f64,
    step: f64,
}

impl Workspace {
    fn objective(&self, x: &[f64]) -> f64 {
        let sum: f64 = x.iter().sum();
        let quad: f64 = (0..self.n)
            .map(|i| {
                x[i] * self.q[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(qij, xj)| qij * xj)
                    .sum::<f64>()
            })
            .sum();
        sum - 0.5 * quad
    }

    /// One projected ascent step from `y` into `out`.
    fn pg_step(&self, y: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let dot: f64 = self.q[i * self.n..(i + 1) * self.n]
                .iter()
                .zip(y)
                .map(|(qij, yj)| qij * yj)
                .sum();
            *o = y[i] + self.step * (1.0 - dot);
        }
        for idx in [&self.pos, &self.neg] {
            let m = &mut scratch[..idx.len()];
            for (k, &i) in idx.iter().enumerate() {
                m[k] = out[i];
            }
            project_capped_simplex(m, self.per_class);
            for (k, &i) in idx.iter().enumerate() {
                out[i] = m[k];
            }
        }
    }
}

/// Maximizes the dual objective by accelerated projected gradient ascent
/// run to a tight fixed point, returning the best iterate seen.
pub fn solve_reference(
    points: &[Vec<f64>],
    labels: &[i8],
    spec: &KernelSpec,
    nu: f64,
) -> OracleSolution {
    let n = labels.len();
    let kmat = kernel_matrix(points, spec).expect("kernel matrix");
    let q: Vec<f64> = (0..n * n)
        .map(|ij| (labels[ij / n] * labels[ij % n]) as f64 * kmat[ij])
        .collect();

    let lipschitz = q
        .chunks_exact(n)
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    let ws = Workspace {
        n,
        q,
        pos: (0..n).filter(|&i| labels[i] > 0).collect(),
        neg: (0..n).filter(|&i| labels[i] < 0).collect(),
        per_class: nu * n as f64 / 2.0,
        step: 1.0 / lipschitz,
    };

    // feasible start: class mass spread uniformly
    let mut x = vec![0.0; n];
    for idx in [&ws.pos, &ws.neg] {
        for &i in idx.iter() {
            x[i] = ws.per_class / idx.len() as f64;
        }
    }
    let mut w_x = ws.objective(&x);
    let mut best = (x.clone(), w_x);

    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut x_new = vec![0.0; n];
    let mut scratch = vec![0.0; n.max(1)];

    for _ in 0..100_000 {
        ws.pg_step(&y, &mut x_new, &mut scratch);
        let mut w_new = ws.objective(&x_new);
        if w_new < w_x {
            // momentum overshot: restart with a plain step from x, which
            // cannot decrease the objective at step 1/L
            y.copy_from_slice(&x);
            t = 1.0;
            ws.pg_step(&y, &mut x_new, &mut scratch);
            w_new = ws.objective(&x_new);
        }
        let shift = x
            .iter()
            .zip(&x_new)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        for i in 0..n {
            y[i] = x_new[i] + momentum * (x_new[i] - x[i]);
        }
        x.copy_from_slice(&x_new);
        w_x = w_new;
        t = t_next;
        if w_x > best.1 {
            best = (x.clone(), w_x);
        }
        if shift < 1e-12 {
            break;
        }
    }

    OracleSolution {
        alphas: best.0,
        objective: best.1,
    }
}
