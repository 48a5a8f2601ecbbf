// Copyright 2026 The lqrlr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! The `K`-minimization of the augmented Lagrangian over stabilizing gains,
//!
//! `J(K) + ⟨Λ, K⟩ + (ρ/2)‖K − T‖_F²`,  `T = K_diag + K_low`,
//!
//! by the Anderson-Moore fixed point: freeze `P(K)`, `L(K)` and solve the
//! stationarity condition, which is linear in the new gain,
//!
//! `2R·K̂·L + ρ·K̂ = 2B1ᵀ·P·L − Λ + ρ·T`,
//!
//! then move toward `K̂` with step halving so the iterate stays stabilizing
//! and the objective does not increase.

use crate::admm::config::Backtrack;
use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, SymEigen};
use crate::lqr::{lqr_cost_value, CostEval};
use crate::lyapunov::Precision;
use crate::matrix::Matrix;
use crate::model::StateSpaceModel;

/// Inner-loop settings, a projection of `AdmmConfig`.
#[derive(Debug, Clone, Copy)]
pub struct InnerOptions {
    pub max_inner: usize,
    pub inner_tol: f64,
    pub backtrack: Backtrack,
}

#[derive(Debug, Clone)]
pub struct KStep {
    pub k: Matrix,
    pub eval: CostEval,
    /// `‖∇J(K) + Λ + ρ(K − T)‖_F` at the returned gain.
    pub grad_norm: f64,
    pub iterations: usize,
    /// Trial gains whose cost was evaluated.
    pub evaluations: usize,
    /// The cap was hit before the gradient tolerance; `k` is the last
    /// (and best) accepted iterate.
    pub hit_max_inner: bool,
}

/// Solves `2R·X·L + ρ·X = rhs` for symmetric `R ≻ 0`, `L ⪰ 0` by
/// diagonalizing both: with `R = U·diag(r)·Uᵀ`, `L = V·diag(l)·Vᵀ`,
/// `(2 r_i l_j + ρ)·(UᵀXV)_ij = (Uᵀ·rhs·V)_ij`.
pub fn solve_gain_equation(r: &SymEigen, l: &Matrix, rho: f64, rhs: &Matrix) -> Result<Matrix> {
    let le = sym_eigen(l)?;
    let u = &r.vectors;
    let v = &le.vectors;
    let mut y = u.tr_matmul(rhs).matmul(v);
    let scale = rho.abs() + 2.0 * r.values.last().copied().unwrap_or(0.0) * le.values.last().copied().unwrap_or(0.0).abs();
    for i in 0..y.rows() {
        for j in 0..y.cols() {
            let d = 2.0 * r.values[i] * le.values[j] + rho;
            if d.abs() <= f64::EPSILON * scale {
                return Err(Error::Singular("gain equation"));
            }
            y[(i, j)] /= d;
        }
    }
    Ok(u.matmul(&y).matmul_tr(v))
}

struct Objective<'a> {
    model: &'a StateSpaceModel,
    target: &'a Matrix,
    dual: &'a Matrix,
    rho: f64,
}

impl Objective<'_> {
    fn penalty(&self, k: &Matrix, cost: f64) -> f64 {
        let gap = k - self.target;
        cost + self.dual.inner(k) + 0.5 * self.rho * gap.inner(&gap)
    }

    fn gradient(&self, k: &Matrix, eval: &CostEval) -> Matrix {
        let mut g = eval.gradient(self.model, k);
        g += self.dual;
        g.axpy(self.rho, k);
        g.axpy(-self.rho, self.target);
        g
    }
}

/// Runs the Anderson-Moore iteration from the stabilizing `k_init`.
/// `init_eval`, when given, must be `lqr_cost(model, k_init)`; it saves
/// the first pair of Lyapunov solves.
#[allow(clippy::too_many_arguments)]
pub fn k_step(
    model: &StateSpaceModel,
    k_diag: &Matrix,
    k_low: &Matrix,
    dual: &Matrix,
    rho: f64,
    k_init: &Matrix,
    init_eval: Option<CostEval>,
    r_eigen: &SymEigen,
    opts: &InnerOptions,
) -> Result<KStep> {
    let target = k_diag + k_low;
    let obj = Objective {
        model,
        target: &target,
        dual,
        rho,
    };
    let b2_gram = model.b2().matmul_tr(model.b2());

    let mut k = k_init.clone();
    let mut eval = match init_eval {
        Some(eval) => eval,
        None => {
            let (j, solver, p) = lqr_cost_value(model, &k, Precision::Working)?;
            CostEval {
                j,
                l: solver.solve_dual(&b2_gram)?,
                p,
            }
        }
    };
    let mut value = obj.penalty(&k, eval.j);
    let mut evaluations = 0;
    // Once the full step has been cut back it tends to stay cut back, so
    // each search starts from the last accepted length.
    let mut step = 1.0f64;

    for iteration in 0..opts.max_inner {
        let grad = obj.gradient(&k, &eval);
        let grad_norm = grad.frobenius_norm();
        if grad_norm <= opts.inner_tol * (1.0 + k.frobenius_norm()) {
            return Ok(KStep {
                k,
                eval,
                grad_norm,
                iterations: iteration,
                evaluations,
                hit_max_inner: false,
            });
        }

        let mut rhs = model.b1().tr_matmul(&eval.p).matmul(&eval.l).scale(2.0);
        rhs -= dual;
        rhs.axpy(rho, &target);
        let direction = &solve_gain_equation(r_eigen, &eval.l, rho, &rhs)? - &k;

        loop {
            let mut candidate = k.clone();
            candidate.axpy(step, &direction);
            evaluations += 1;
            if let Ok((cost, solver, p)) = lqr_cost_value(model, &candidate, Precision::Working) {
                let cand_value = obj.penalty(&candidate, cost);
                if cand_value <= value + opts.backtrack.slack * value.abs() {
                    eval = CostEval {
                        j: cost,
                        l: solver.solve_dual(&b2_gram)?,
                        p,
                    };
                    k = candidate;
                    value = cand_value;
                    break;
                }
            }
            step *= opts.backtrack.shrink;
            if step < opts.backtrack.min_step {
                return Err(Error::InnerStall {
                    iterations: iteration,
                    grad_norm,
                });
            }
        }
    }

    let grad_norm = obj.gradient(&k, &eval).frobenius_norm();
    Ok(KStep {
        k,
        eval,
        grad_norm,
        iterations: opts.max_inner,
        evaluations,
        hit_max_inner: true,
    })
}
