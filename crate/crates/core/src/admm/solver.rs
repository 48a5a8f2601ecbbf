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

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::admm::config::{AdmmConfig, Variant};
use crate::admm::kstep::{k_step, InnerOptions};
use crate::admm::steps::{dual_step, kdiag_step, klow_step_hard, klow_step_soft, ksparse_step};
use crate::admm::structure::BlockStructure;
use crate::error::{Error, Result};
use crate::linalg::sym_eigen;
use crate::lqr::{lqr_cost, solve_standard_lqr, LqrSolution};
use crate::matrix::Matrix;
use crate::model::{is_stabilizing, StateSpaceModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIter,
    /// `K_diag + K_low` is not stabilizing at exit.
    Infeasible,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIter => "max_iter",
            Termination::Infeasible => "infeasible",
        }
    }
}

/// Residuals after one outer iteration: `‖K − K_diag − K_low‖_F` and
/// `‖(K_diag + K_low) − previous‖_F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
}

#[derive(Debug, Clone)]
pub struct DesignResult {
    /// Last `K`-step iterate (always stabilizing).
    pub k: Matrix,
    pub k_diag: Matrix,
    pub k_low: Matrix,
    /// Dual variable `Λ`.
    pub dual: Matrix,
    /// LQR cost of `K_diag + K_low`; infinite when that gain is not
    /// stabilizing.
    pub cost: f64,
    pub standard_cost: f64,
    pub iterations: usize,
    pub residual_history: Vec<Residuals>,
    pub termination: Termination,
    /// Outer iterations whose K-step hit `max_inner`.
    pub inner_cap_hits: usize,
    /// Anderson-Moore iterations summed over all K-steps.
    pub inner_iterations: usize,
    /// Trial gains whose cost was evaluated, backtracking included.
    pub cost_evaluations: usize,
}

impl DesignResult {
    /// The structured feedback gain `K_diag + K_low`.
    pub fn gain(&self) -> Matrix {
        &self.k_diag + &self.k_low
    }

    /// `J / J_stand`.
    pub fn cost_ratio(&self) -> f64 {
        self.cost / self.standard_cost
    }

    pub fn is_feasible(&self) -> bool {
        self.termination != Termination::Infeasible
    }

    /// Wraps the unstructured optimum, split by block trimming.
    pub fn standard(solution: &LqrSolution, structure: &BlockStructure) -> Self {
        let k_diag = structure.block_trim(&solution.k);
        let k_low = &solution.k - &k_diag;
        Self {
            k: solution.k.clone(),
            k_diag,
            k_low,
            dual: Matrix::zeros(solution.k.rows(), solution.k.cols()),
            cost: solution.cost,
            standard_cost: solution.cost,
            iterations: 0,
            residual_history: Vec::new(),
            termination: Termination::Converged,
            inner_cap_hits: 0,
            inner_iterations: 0,
            cost_evaluations: 0,
        }
    }
}

/// Snapshot handed to an observer after every outer iteration.
#[derive(Debug)]
pub struct IterationState<'a> {
    pub iteration: usize,
    pub k: &'a Matrix,
    pub k_diag: &'a Matrix,
    pub k_low: &'a Matrix,
    pub dual: &'a Matrix,
    pub residuals: Residuals,
}

/// Runs ADMM from the standard LQR gain.
pub fn admm_solve(model: &StateSpaceModel, structure: &BlockStructure, config: &AdmmConfig) -> Result<DesignResult> {
    let standard = solve_standard_lqr(model)?;
    admm_solve_from(model, structure, config, &standard, |_| {})
}

/// Runs ADMM from a precomputed standard LQR solution, calling `observe`
/// after every outer iteration.
pub fn admm_solve_from(
    model: &StateSpaceModel,
    structure: &BlockStructure,
    config: &AdmmConfig,
    standard: &LqrSolution,
    mut observe: impl FnMut(&IterationState<'_>),
) -> Result<DesignResult> {
    let (m, n) = (model.m(), model.n());
    config.validate(m, n)?;
    structure.check_gain(&standard.k)?;
    let rho = config.rho;
    let r_eigen = sym_eigen(model.r())?;
    let inner = InnerOptions {
        max_inner: config.max_inner,
        inner_tol: config.inner_tol,
        backtrack: config.backtrack,
    };

    let mut k = standard.k.clone();
    let mut k_diag = structure.block_trim(&k);
    let mut k_low = &k - &k_diag;
    let mut dual = Matrix::zeros(m, n);
    let mut history = Vec::new();
    let mut inner_cap_hits = 0;
    let mut inner_iterations = 0;
    let mut cost_evaluations = 0;
    let mut termination = Termination::MaxIter;
    let mut last_eval = None;

    for outer in 0..config.max_outer {
        let wrap = |e: Error| Error::Outer {
            outer,
            source: Box::new(e),
        };
        let step = k_step(model, &k_diag, &k_low, &dual, rho, &k, last_eval.take(), &r_eigen, &inner)
            .map_err(wrap)?;
        if step.hit_max_inner {
            inner_cap_hits += 1;
        }
        inner_iterations += step.iterations;
        cost_evaluations += step.evaluations;
        k = step.k;
        last_eval = Some(step.eval);
        let previous = &k_diag + &k_low;

        let next_diag = kdiag_step(&k, &k_low, &dual, rho, structure).map_err(wrap)?;
        let next_low = match config.variant {
            Variant::LowRankSoft => klow_step_soft(&k, &next_diag, &dual, rho, config.gamma),
            Variant::LowRankHard => {
                klow_step_hard(&k, &next_diag, &dual, rho, config.rank.expect("validated"))
            }
            Variant::Sparse => ksparse_step(&k, &next_diag, &dual, rho, config.gamma, structure),
        }
        .map_err(wrap)?;
        dual = dual_step(&dual, rho, &k, &next_diag, &next_low);
        k_diag = next_diag;
        k_low = next_low;

        let gain = &k_diag + &k_low;
        let residuals = Residuals {
            primal: (&k - &gain).frobenius_norm(),
            dual: (&gain - &previous).frobenius_norm(),
        };
        history.push(residuals);
        observe(&IterationState {
            iteration: outer,
            k: &k,
            k_diag: &k_diag,
            k_low: &k_low,
            dual: &dual,
            residuals,
        });
        if residuals.primal <= config.eps_pri
            && residuals.dual <= config.eps_dual
            && is_stabilizing(model, &gain).map_err(wrap)?
        {
            termination = Termination::Converged;
            break;
        }
    }

    let gain = &k_diag + &k_low;
    let cost = match lqr_cost(model, &gain) {
        Ok(eval) => eval.j,
        Err(Error::Unstable { .. }) => {
            termination = Termination::Infeasible;
            f64::INFINITY
        }
        Err(e) => return Err(e),
    };
    Ok(DesignResult {
        k,
        k_diag,
        k_low,
        dual,
        cost,
        standard_cost: standard.cost,
        iterations: history.len(),
        residual_history: history,
        termination,
        inner_cap_hits,
        inner_iterations,
        cost_evaluations,
    })
}
