use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{require_classes, LinearKind, LinearModel};
use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng::RngSeed;

/// Curvature floor for non-positive-definite working pairs.
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Hinge-loss weight `C`.
    pub c: f64,
    /// Stop when the maximal KKT violation falls below this.
    pub tolerance: f64,
    pub max_iter: usize,
}

impl SvmParams {
    pub fn with_c(c: f64) -> Self {
        Self { c, ..Self::default() }
    }
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tolerance: 1e-5,
            max_iter: 10_000_000,
        }
    }
}

/// One-vs-rest linear SVM: per class, `min ½‖w‖² + C Σ max(0, 1 − y (wᵀx + b))`
/// with an unpenalised bias, solved in the dual by SMO.
///
/// The solver is deterministic; `_seed` keeps the signature shared with the
/// other learners.
pub fn train_svm(train: &LabeledDataset, params: &SvmParams, _seed: &RngSeed) -> Result<LinearModel> {
    if !(params.c > 0.0) || !params.c.is_finite() {
        return Err(Error::Learner(format!("SVM needs C > 0, got {}", params.c)));
    }
    require_classes(train)?;
    let x = train.features();
    let (n, d) = x.shape();
    let classes = train.class_count();
    let kernel = x * x.transpose();

    let mut weights = DMatrix::zeros(classes, d + 1);
    for k in 0..classes {
        let y: Vec<f64> = train.labels().iter().map(|&l| if l == k { 1.0 } else { -1.0 }).collect();
        if y.iter().all(|&v| v < 0.0) {
            // class absent from the training data: never the argmax
            weights[(k, d)] = -1e6;
            continue;
        }
        let (alpha, rho) = smo(&kernel, &y, params);
        for i in 0..n {
            let coef = alpha[i] * y[i];
            if coef != 0.0 {
                for j in 0..d {
                    weights[(k, j)] += coef * x[(i, j)];
                }
            }
        }
        weights[(k, d)] = -rho;
    }
    LinearModel::new(weights, LinearKind::Svm, params.c)
}

fn is_upper(a: f64, c: f64) -> bool {
    a >= c
}

fn is_lower(a: f64) -> bool {
    a <= 0.0
}

/// SMO with second-order working-set selection. Returns `(α, ρ)` where the
/// decision function is `Σ αᵢ yᵢ K(xᵢ, x) − ρ`.
fn smo(kernel: &DMatrix<f64>, y: &[f64], params: &SvmParams) -> (Vec<f64>, f64) {
    let n = y.len();
    let c = params.c;
    let mut alpha = vec![0.0; n];
    // gradient of ½αᵀQα − eᵀα with Q_ij = y_i y_j K_ij
    let mut grad = vec![-1.0; n];
    let q = |i: usize, j: usize| y[i] * y[j] * kernel[(i, j)];

    for _ in 0..params.max_iter {
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            let in_up = if y[t] > 0.0 { !is_upper(alpha[t], c) } else { !is_lower(alpha[t]) };
            if in_up && -y[t] * grad[t] >= gmax {
                gmax = -y[t] * grad[t];
                i_sel = Some(t);
            }
        }
        let Some(i) = i_sel else { break };

        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut obj_min = f64::INFINITY;
        for t in 0..n {
            let in_low = if y[t] > 0.0 { !is_lower(alpha[t]) } else { !is_upper(alpha[t], c) };
            if !in_low {
                continue;
            }
            let yg = y[t] * grad[t];
            gmax2 = gmax2.max(yg);
            let grad_diff = gmax + yg;
            if grad_diff > 0.0 {
                let mut quad = kernel[(i, i)] + kernel[(t, t)] - 2.0 * kernel[(i, t)];
                if quad <= 0.0 {
                    quad = TAU;
                }
                let obj = -(grad_diff * grad_diff) / quad;
                if obj <= obj_min {
                    obj_min = obj;
                    j_sel = Some(t);
                }
            }
        }
        let Some(j) = j_sel else { break };
        if gmax + gmax2 < params.tolerance {
            break;
        }

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let mut quad = kernel[(i, i)] + kernel[(j, j)] - 2.0 * kernel[(i, j)];
        if quad <= 0.0 {
            quad = TAU;
        }
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
    }

    (alpha.clone(), compute_rho(&alpha, &grad, y, c))
}

fn compute_rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free = 0usize;
    let mut free_sum = 0.0;
    for t in 0..y.len() {
        let yg = y[t] * grad[t];
        if is_upper(alpha[t], c) {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if is_lower(alpha[t]) {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    if free > 0 {
        free_sum / free as f64
    } else if ub.is_finite() && lb.is_finite() {
        (ub + lb) / 2.0
    } else if ub.is_finite() {
        ub
    } else {
        lb
    }
}
