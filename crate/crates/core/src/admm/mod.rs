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

//! ADMM for structured LQR design: `K = K_diag + K_low` with `K_diag`
//! block-diagonal (local feedback) and `K_low` penalized by a nuclear norm,
//! a rank constraint or an element-wise ℓ1 norm.

mod config;
mod kstep;
mod report;
mod solver;
mod steps;
mod structure;

pub use config::{AdmmConfig, Backtrack, Variant};
pub use kstep::{k_step, solve_gain_equation, InnerOptions, KStep};
pub use report::{optimality_report, OptimalityReport};
pub use solver::{admm_solve, admm_solve_from, DesignResult, IterationState, Residuals, Termination};
pub use steps::{
    dual_step, kdiag_step, klow_step_hard, klow_step_soft, ksparse_step, singular_value_threshold, soft_threshold,
    truncate_rank,
};
pub use structure::BlockStructure;
