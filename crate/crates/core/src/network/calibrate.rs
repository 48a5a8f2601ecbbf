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

use crate::admm::{admm_solve_from, AdmmConfig, BlockStructure, DesignResult, Variant};
use crate::error::{Error, Result};
use crate::lqr::LqrSolution;
use crate::model::StateSpaceModel;
use crate::network::links::{count_links, relative_link_tol, LinkCounts};

/// Bracket searched for the sparsity weight.
pub const GAMMA_RANGE: (f64, f64) = (1e-6, 1e4);
const MAX_EVALUATIONS: usize = 40;
/// Stop once the log-γ bracket is this narrow.
const LOG_WIDTH_TOL: f64 = 1e-4;
const LINK_TOL_REL: f64 = 1e-6;

/// Quantity matched against the calibration target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkMetric {
    /// Non-zero off-block-diagonal entries.
    OffBlockEntries,
    /// Ordered agent pairs with a link.
    AgentLinks,
    /// Largest per-agent out-degree.
    CriticalNode,
}

impl LinkMetric {
    pub fn measure(self, counts: &LinkCounts) -> usize {
        match self {
            LinkMetric::OffBlockEntries => counts.off_block_entries,
            LinkMetric::AgentLinks => counts.total_links,
            LinkMetric::CriticalNode => counts.critical_node_links(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Calibration {
    pub gamma: f64,
    pub design: DesignResult,
    pub links: LinkCounts,
    pub metric: usize,
    /// `(γ, metric)` per ADMM run; `None` when the design was infeasible
    /// or the solver failed.
    pub trajectory: alloc::vec::Vec<(f64, Option<usize>)>,
}

/// Bisects `log γ` over [`GAMMA_RANGE`] for the sparse design whose link
/// metric is closest to `target`, preferring designs at or under the target
/// on ties. Larger `γ` means fewer links; an infeasible design is treated
/// as too sparse.
pub fn calibrate_sparse_gamma(
    model: &StateSpaceModel,
    structure: &BlockStructure,
    target: usize,
    metric: LinkMetric,
    base: &AdmmConfig,
    standard: &LqrSolution,
) -> Result<Calibration> {
    let mut lo = libm::log(GAMMA_RANGE.0);
    let mut hi = libm::log(GAMMA_RANGE.1);
    let mut best: Option<Calibration> = None;
    let mut trajectory = alloc::vec::Vec::new();

    for _ in 0..MAX_EVALUATIONS {
        let mid = 0.5 * (lo + hi);
        let gamma = libm::exp(mid);
        let config = AdmmConfig {
            variant: Variant::Sparse,
            gamma,
            ..base.clone()
        };
        let design = admm_solve_from(model, structure, &config, standard, |_| {})
            .ok()
            .filter(DesignResult::is_feasible);
        let Some(design) = design else {
            trajectory.push((gamma, None));
            hi = mid;
            continue;
        };
        let gain = design.gain();
        let links = count_links(&gain, structure, relative_link_tol(&gain, LINK_TOL_REL));
        let value = metric.measure(&links);
        trajectory.push((gamma, Some(value)));
        if value > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if best.as_ref().is_none_or(|b| better(value, b.metric, target)) {
            best = Some(Calibration {
                gamma,
                design,
                links,
                metric: value,
                trajectory: alloc::vec::Vec::new(),
            });
        }
        if value == target || hi - lo < LOG_WIDTH_TOL {
            break;
        }
    }
    let mut best = best.ok_or(Error::Calibration)?;
    best.trajectory = trajectory;
    Ok(best)
}

/// Closer to the target wins; on equal distance the side at or below it.
fn better(candidate: usize, incumbent: usize, target: usize) -> bool {
    let key = |v: usize| (v.abs_diff(target), v > target);
    key(candidate) < key(incumbent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_break_prefers_under_target() {
        assert!(better(9, 11, 10));
        assert!(!better(11, 9, 10));
        assert!(better(10, 9, 10));
        assert!(!better(12, 11, 10));
    }
}
