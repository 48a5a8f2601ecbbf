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


use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use lqrlr_core::admm::{admm_solve_from, AdmmConfig, BlockStructure, DesignResult, Termination, Variant};
use lqrlr_core::lqr::{solve_standard_lqr, LqrSolution};
use lqrlr_core::network::{
    build_coupled_model, calibrate_sparse_gamma, count_links, generate_layout, relative_link_tol, transmission_count,
    AgentLayout, Communication, CouplingSign, LinkCounts, LinkMetric, STATES_PER_AGENT,
};
use lqrlr_core::{Matrix, Result, StateSpaceModel};

use crate::experiments::config::DesignSettings;

const LAYOUT_TAG: u64 = 0x4c41_594f_5554;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one trial, derived from the master seed and the trial's
/// coordinates only, so results do not depend on scheduling.
pub fn sub_seed(master: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(mix(master), |acc, &t| mix(acc ^ mix(t)))
}

pub fn layout_seed(master: u64, agents: usize, trial: usize) -> u64 {
    sub_seed(master, &[LAYOUT_TAG, agents as u64, trial as u64])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DesignSpec {
    Standard,
    /// Hard-thresholded low-rank design.
    LowRank { rank: usize },
    /// Sparse design with γ calibrated so `metric` hits `target`.
    Sparse { metric: LinkMetric, target: usize },
    /// Unregularized soft low-rank run; should reproduce the standard cost.
    Control,
}

impl DesignSpec {
    pub fn family(self) -> Family {
        match self {
            DesignSpec::Standard => Family::Standard,
            DesignSpec::LowRank { .. } => Family::LowRank,
            DesignSpec::Sparse { .. } => Family::Sparse,
            DesignSpec::Control => Family::Control,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Standard,
    LowRank,
    Sparse,
    Control,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Standard => "standard",
            Family::LowRank => "lowrank",
            Family::Sparse => "sparse",
            Family::Control => "control",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignStatus {
    Converged,
    MaxIter,
    /// The returned gain is not stabilizing.
    Infeasible,
    /// The solver or the calibration raised an error.
    Failed,
}

impl DesignStatus {
    pub fn name(self) -> &'static str {
        match self {
            DesignStatus::Converged => "converged",
            DesignStatus::MaxIter => "max_iter",
            DesignStatus::Infeasible => "infeasible",
            DesignStatus::Failed => "failed",
        }
    }
}

/// One layout: the plant it induces and its unstructured optimum.
#[derive(Debug)]
pub struct Instance {
    pub agents: usize,
    pub trial: usize,
    pub layout_seed: u64,
    pub layout: AgentLayout,
    pub model: StateSpaceModel,
    pub structure: BlockStructure,
    pub standard: LqrSolution,
}

#[derive(Debug, Clone)]
pub struct Design {
    pub spec: DesignSpec,
    pub status: DesignStatus,
    /// Structured gain `K_diag + K_low`; zero when the design failed.
    pub gain: Matrix,
    pub cost: f64,
    pub standard_cost: f64,
    pub iterations: usize,
    pub gamma: Option<f64>,
    /// Absolute magnitude above which an entry counts as a link.
    pub link_tol: f64,
    pub links: LinkCounts,
    /// Largest per-agent transmission count.
    pub transmissions: usize,
    pub error: Option<String>,
}

impl Design {
    /// Gains that can be perturbed and compared: a stabilizing result,
    /// converged or not.
    pub fn usable(&self) -> bool {
        matches!(self.status, DesignStatus::Converged | DesignStatus::MaxIter)
    }

    pub fn cost_ratio(&self) -> f64 {
        self.cost / self.standard_cost
    }

    fn from_result(
        spec: DesignSpec,
        result: &DesignResult,
        gamma: Option<f64>,
        structure: &BlockStructure,
        link_rel: f64,
    ) -> Result<Self> {
        let gain = result.gain();
        let link_tol = relative_link_tol(&gain, link_rel);
        let links = count_links(&gain, structure, link_tol);
        let mode = match spec {
            DesignSpec::LowRank { .. } | DesignSpec::Control => Communication::Broadcast,
            DesignSpec::Standard | DesignSpec::Sparse { .. } => Communication::PointToPoint,
        };
        let transmissions = transmission_count(&result.k_low, structure, STATES_PER_AGENT, mode, link_tol)?
            .into_iter()
            .max()
            .unwrap_or(0);
        let status = match result.termination {
            Termination::Converged => DesignStatus::Converged,
            Termination::MaxIter => DesignStatus::MaxIter,
            Termination::Infeasible => DesignStatus::Infeasible,
        };
        Ok(Self {
            spec,
            status,
            gain,
            cost: result.cost,
            standard_cost: result.standard_cost,
            iterations: result.iterations,
            gamma,
            link_tol,
            links,
            transmissions,
            error: None,
        })
    }

    fn failed(spec: DesignSpec, instance: &Instance, error: String) -> Self {
        let (m, n) = (instance.model.m(), instance.model.n());
        Self {
            spec,
            status: DesignStatus::Failed,
            gain: Matrix::zeros(m, n),
            cost: f64::INFINITY,
            standard_cost: instance.standard.cost,
            iterations: 0,
            gamma: None,
            link_tol: 0.0,
            links: LinkCounts {
                per_agent_outgoing: vec![0; instance.structure.agent_count()],
                total_links: 0,
                off_block_entries: 0,
            },
            transmissions: 0,
            error: Some(error),
        }
    }
}

type InstanceKey = (usize, usize);
type DesignKey = (usize, usize, DesignSpec);

/// Memoizes layouts and designs by `(agents, trial, spec)` so scenarios run
/// against the same settings share work.
#[derive(Debug)]
pub struct Harness {
    settings: DesignSettings,
    instances: Mutex<HashMap<InstanceKey, Arc<Instance>>>,
    designs: Mutex<HashMap<DesignKey, Arc<Design>>>,
}

impl Harness {
    pub fn new(settings: DesignSettings) -> Self {
        Self {
            settings,
            instances: Mutex::new(HashMap::new()),
            designs: Mutex::new(HashMap::new()),
        }
    }

    pub fn settings(&self) -> &DesignSettings {
        &self.settings
    }

    pub fn instance(&self, agents: usize, trial: usize) -> Result<Arc<Instance>> {
        if let Some(hit) = self.instances.lock().expect("poisoned").get(&(agents, trial)) {
            return Ok(Arc::clone(hit));
        }
        let s = &self.settings;
        let seed = layout_seed(s.seed, agents, trial);
        let layout = generate_layout(agents, s.extent, seed)?;
        let (model, structure) = build_coupled_model(&layout, CouplingSign::from_exponent(s.coupling_sign)?)?;
        let standard = solve_standard_lqr(&model)?;
        let instance = Arc::new(Instance {
            agents,
            trial,
            layout_seed: seed,
            layout,
            model,
            structure,
            standard,
        });
        // Computed outside the lock; a racing duplicate is identical.
        let mut map = self.instances.lock().expect("poisoned");
        Ok(Arc::clone(map.entry((agents, trial)).or_insert(instance)))
    }

    pub fn design(&self, agents: usize, trial: usize, spec: DesignSpec) -> Result<Arc<Design>> {
        if let Some(hit) = self.designs.lock().expect("poisoned").get(&(agents, trial, spec)) {
            return Ok(Arc::clone(hit));
        }
        let instance = self.instance(agents, trial)?;
        let design = Arc::new(self.compute(&instance, spec)?);
        let mut map = self.designs.lock().expect("poisoned");
        Ok(Arc::clone(map.entry((agents, trial, spec)).or_insert(design)))
    }

    fn compute(&self, inst: &Instance, spec: DesignSpec) -> Result<Design> {
        let base = self.settings.admm.base_config();
        let link_rel = self.settings.link_tol;
        let run = |config: AdmmConfig| admm_solve_from(&inst.model, &inst.structure, &config, &inst.standard, |_| {});
        let outcome = match spec {
            DesignSpec::Standard => Ok((DesignResult::standard(&inst.standard, &inst.structure), None)),
            DesignSpec::LowRank { rank } => run(AdmmConfig {
                variant: Variant::LowRankHard,
                rank: Some(rank),
                ..base
            })
            .map(|r| (r, None)),
            DesignSpec::Control => run(AdmmConfig {
                variant: Variant::LowRankSoft,
                gamma: 0.0,
                ..base
            })
            .map(|r| (r, None)),
            DesignSpec::Sparse { metric, target } => {
                calibrate_sparse_gamma(&inst.model, &inst.structure, target, metric, &base, &inst.standard)
                    .map(|c| (c.design, Some(c.gamma)))
            }
        };
        match outcome {
            Ok((result, gamma)) => Design::from_result(spec, &result, gamma, &inst.structure, link_rel),
            Err(e) => Ok(Design::failed(spec, inst, e.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_seeds_separate_coordinates() {
        assert_ne!(sub_seed(1, &[2, 3]), sub_seed(1, &[3, 2]));
        assert_ne!(sub_seed(1, &[2]), sub_seed(2, &[2]));
        assert_eq!(layout_seed(9, 10, 4), layout_seed(9, 10, 4));
        assert_ne!(layout_seed(9, 10, 4), layout_seed(9, 11, 4));
    }
}
