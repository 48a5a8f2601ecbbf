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

//! LQR cost `J(K) = Tr(B2ᵀ·P(K)·B2)`, its gradient, and the unstructured
//! optimum from the algebraic Riccati equation.

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, lstsq, Lu};
use crate::lyapunov::{LyapunovSolver, Precision};
use crate::matrix::Matrix;
use crate::model::StateSpaceModel;

/// Cost of a stabilizing gain together with the two Lyapunov solutions it
/// is built from.
#[derive(Debug, Clone)]
pub struct CostEval {
    pub j: f64,
    /// Solves `(A−B1K)ᵀP + P(A−B1K) + Q + KᵀRK = 0`.
    pub p: Matrix,
    /// Solves `(A−B1K)L + L(A−B1K)ᵀ + B2B2ᵀ = 0`.
    pub l: Matrix,
}

impl CostEval {
    /// `∇J(K) = 2(R·K − B1ᵀ·P)·L`.
    pub fn gradient(&self, model: &StateSpaceModel, k: &Matrix) -> Matrix {
        let mut g = model.r().matmul(k);
        g -= &model.b1().tr_matmul(&self.p);
        g.matmul(&self.l).scale(2.0)
    }
}

/// Value of `J` only, skipping the dual Lyapunov solve.
pub fn lqr_cost_value(
    model: &StateSpaceModel,
    k: &Matrix,
    precision: Precision,
) -> Result<(f64, LyapunovSolver, Matrix)> {
    let solver = LyapunovSolver::new(&model.closed_loop(k)?)?.with_precision(precision);
    let p = solver.solve(&state_weight(model, k))?;
    let j = model.b2().tr_matmul(&p.matmul(model.b2())).trace();
    Ok((j, solver, p))
}

/// `Q + KᵀRK`
fn state_weight(model: &StateSpaceModel, k: &Matrix) -> Matrix {
    let mut w = k.tr_matmul(&model.r().matmul(k));
    w += model.q();
    w
}

/// Cost, `P` and `L` with extended-precision refinement, so `J` is smooth
/// enough in `K` for finite differences.
pub fn lqr_cost(model: &StateSpaceModel, k: &Matrix) -> Result<CostEval> {
    let (j, solver, p) = lqr_cost_value(model, k, Precision::Extended)?;
    let l = solver.solve_dual(&model.b2().matmul_tr(model.b2()))?;
    Ok(CostEval { j, p, l })
}

pub fn lqr_gradient(model: &StateSpaceModel, k: &Matrix) -> Result<Matrix> {
    Ok(lqr_cost(model, k)?.gradient(model, k))
}

/// Unstructured LQR optimum `K* = R⁻¹B1ᵀP*`.
#[derive(Debug, Clone)]
pub struct LqrSolution {
    pub k: Matrix,
    pub p: Matrix,
    pub cost: f64,
}

/// Hamiltonian eigenvalues closer than this to the imaginary axis mean no
/// stabilizing Riccati solution.
pub const IMAGINARY_AXIS_TOL: f64 = 1e-9;

const SIGN_MAX_ITER: usize = 100;
const SIGN_TOL: f64 = 1e-13;
const POLISH_STEPS: usize = 3;

/// Solves `AᵀP + PA − P·B1R⁻¹B1ᵀ·P + Q = 0` through the stable invariant
/// subspace of the Hamiltonian `[[A, −G], [−Q, −Aᵀ]]`, `G = B1R⁻¹B1ᵀ`.
///
/// The subspace is extracted with the scaled Newton iteration for the matrix
/// sign function, then polished with Newton-Kleinman steps.
pub fn solve_standard_lqr(model: &StateSpaceModel) -> Result<LqrSolution> {
    let n = model.n();
    let r_inv = Lu::new(model.r())?.inverse();
    let g = model.b1().matmul(&r_inv).matmul_tr(model.b1());

    let mut h = Matrix::zeros(2 * n, 2 * n);
    h.set_submatrix(0, 0, model.a());
    h.set_submatrix(0, n, &g.scale(-1.0));
    h.set_submatrix(n, 0, &model.q().scale(-1.0));
    h.set_submatrix(n, n, &model.a().transpose().scale(-1.0));

    if eigenvalues(&h)?.iter().any(|e| e.re.abs() < IMAGINARY_AXIS_TOL) {
        return Err(Error::NotStabilizable);
    }

    let sign = matrix_sign(&h)?;
    // (S + I)·[I; P] = 0 on the stable subspace.
    let mut lhs = Matrix::zeros(2 * n, n);
    lhs.set_submatrix(0, 0, &sign.submatrix(0, n, n, n));
    lhs.set_submatrix(n, 0, &(&sign.submatrix(n, n, n, n) + &Matrix::identity(n)));
    let mut rhs = Matrix::zeros(2 * n, n);
    rhs.set_submatrix(0, 0, &(&sign.submatrix(0, 0, n, n) + &Matrix::identity(n)).scale(-1.0));
    rhs.set_submatrix(n, 0, &sign.submatrix(n, 0, n, n).scale(-1.0));
    let mut p = lstsq(&lhs, &rhs)
        .map_err(|_| Error::Riccati("stable subspace basis is singular"))?
        .symmetrize();

    let gain = |p: &Matrix| r_inv.matmul(&model.b1().tr_matmul(p));
    for _ in 0..POLISH_STEPS {
        let k = gain(&p);
        let solver = LyapunovSolver::new(&model.closed_loop(&k)?)
            .map_err(|_| Error::Riccati("sign-function gain is not stabilizing"))?;
        let next = solver.solve(&state_weight(model, &k))?;
        let step = (&next - &p).frobenius_norm();
        p = next;
        if step <= 1e-14 * p.frobenius_norm() {
            break;
        }
    }
    let k = gain(&p);
    let (cost, _, p_k) = lqr_cost_value(model, &k, Precision::Extended)
        .map_err(|_| Error::Riccati("Riccati gain is not stabilizing"))?;
    Ok(LqrSolution { k, p: p_k, cost })
}

/// Newton iteration `Z ← (cZ + (cZ)⁻¹)/2` with determinant scaling.
fn matrix_sign(h: &Matrix) -> Result<Matrix> {
    let dim = h.rows() as f64;
    let mut z = h.clone();
    let mut scaling = true;
    for _ in 0..SIGN_MAX_ITER {
        let lu = Lu::new(&z).map_err(|_| Error::Riccati("sign iteration hit a singular iterate"))?;
        let c = if scaling {
            libm::exp(-lu.log_abs_det() / dim)
        } else {
            1.0
        };
        let mut next = z.scale(0.5 * c);
        next.axpy(0.5 / c, &lu.inverse());
        let change = (&next - &z).frobenius_norm();
        let size = next.frobenius_norm();
        z = next;
        if change <= SIGN_TOL * size {
            return Ok(z);
        }
        if change <= 1e-2 * size {
            scaling = false;
        }
    }
    Err(Error::Riccati("sign iteration did not converge"))
}
