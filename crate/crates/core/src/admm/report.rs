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

use crate::admm::config::AdmmConfig;
use crate::admm::solver::DesignResult;
use crate::error::Result;
use crate::lqr::lqr_gradient;
use crate::model::StateSpaceModel;

/// Final first-order diagnostics of an ADMM run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalityReport {
    /// `‖K − K_diag − K_low‖_F`
    pub primal_residual: f64,
    /// `ρ‖(K_diag + K_low) − previous‖_F` from the last iteration.
    pub dual_residual: f64,
    /// `‖∇J(K) + Λ‖_F`
    pub stationarity: f64,
    pub primal_ok: bool,
    pub dual_ok: bool,
    /// Compared against `ρ·eps_dual + inner_tol·(1 + ‖K‖_F)`, the bound the
    /// K-step and dual residual jointly imply.
    pub stationarity_ok: bool,
}

pub fn optimality_report(model: &StateSpaceModel, result: &DesignResult, config: &AdmmConfig) -> Result<OptimalityReport> {
    let primal_residual = (&result.k - &result.gain()).frobenius_norm();
    let dual_residual = config.rho * result.residual_history.last().map_or(0.0, |r| r.dual);
    let mut g = lqr_gradient(model, &result.k)?;
    g += &result.dual;
    let stationarity = g.frobenius_norm();
    let stationarity_tol = config.rho * config.eps_dual + config.inner_tol * (1.0 + result.k.frobenius_norm());
    Ok(OptimalityReport {
        primal_residual,
        dual_residual,
        stationarity,
        primal_ok: primal_residual <= config.eps_pri,
        dual_ok: dual_residual <= config.rho * config.eps_dual,
        stationarity_ok: stationarity <= stationarity_tol,
    })
}
