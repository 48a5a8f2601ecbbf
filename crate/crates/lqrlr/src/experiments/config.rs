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


use lqrlr_core::admm::{AdmmConfig, Backtrack};
use lqrlr_core::network::{CouplingSign, NoiseTargets};
use serde::{Deserialize, Serialize};

use crate::modelfile::FieldError;

/// ADMM parameters shared by every design of a run; variant, γ and rank are
/// chosen per design family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmmSettings {
    pub rho: f64,
    pub eps_pri: f64,
    pub eps_dual: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub inner_tol: f64,
    pub backtrack_shrink: f64,
    pub backtrack_min_step: f64,
    pub backtrack_slack: f64,
}

impl Default for AdmmSettings {
    fn default() -> Self {
        Self::from(&AdmmConfig::default())
    }
}

impl From<&AdmmConfig> for AdmmSettings {
    fn from(c: &AdmmConfig) -> Self {
        Self {
            rho: c.rho,
            eps_pri: c.eps_pri,
            eps_dual: c.eps_dual,
            max_outer: c.max_outer,
            max_inner: c.max_inner,
            inner_tol: c.inner_tol,
            backtrack_shrink: c.backtrack.shrink,
            backtrack_min_step: c.backtrack.min_step,
            backtrack_slack: c.backtrack.slack,
        }
    }
}

impl AdmmSettings {
    pub fn base_config(&self) -> AdmmConfig {
        AdmmConfig {
            rho: self.rho,
            eps_pri: self.eps_pri,
            eps_dual: self.eps_dual,
            max_outer: self.max_outer,
            max_inner: self.max_inner,
            inner_tol: self.inner_tol,
            backtrack: Backtrack {
                shrink: self.backtrack_shrink,
                min_step: self.backtrack_min_step,
                slack: self.backtrack_slack,
            },
            ..AdmmConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// Every off-block-diagonal entry, zero or not.
    AllOffBlock,
    /// Only entries above the link tolerance.
    NonzeroOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: u8,
    pub agent_counts: Vec<usize>,
    /// Layouts (and designs) per sweep point.
    pub trials_outer: usize,
    /// Perturbations per design in scenarios 2 and 3.
    pub trials_inner: usize,
    pub noise_variances: Vec<f64>,
    pub attack_counts: Vec<usize>,
    pub rank_sweep: Vec<usize>,
    pub seed: u64,
    /// `-1` for `exp(−d)` coupling, `+1` for `exp(+d)`.
    pub coupling_sign: i32,
    pub extent: f64,
    /// Entries above `link_tol · max|K|` count as links.
    pub link_tol: f64,
    pub noise_mode: NoiseMode,
    /// Adds an unregularized low-rank run per trial in scenario 1.
    pub control_row: bool,
    pub admm: AdmmSettings,
}

impl ScenarioConfig {
    /// The sweep ranges of the original study for scenario `id`.
    pub fn defaults(id: u8) -> Self {
        Self {
            scenario: id,
            agent_counts: (10..=20).collect(),
            trials_outer: 100,
            trials_inner: 100,
            noise_variances: (1..=9).map(|i| f64::from(i) / 10.0).collect(),
            attack_counts: (1..=10).collect(),
            rank_sweep: (1..=5).collect(),
            seed: 0,
            coupling_sign: -1,
            extent: lqrlr_core::network::DEFAULT_EXTENT,
            link_tol: 1e-6,
            noise_mode: NoiseMode::AllOffBlock,
            control_row: false,
            admm: AdmmSettings::default(),
        }
    }

    pub fn coupling(&self) -> CouplingSign {
        CouplingSign::from_exponent(self.coupling_sign).expect("validated")
    }

    pub fn noise_targets(&self, link_tol: f64) -> NoiseTargets {
        match self.noise_mode {
            NoiseMode::AllOffBlock => NoiseTargets::AllOffBlock,
            NoiseMode::NonzeroOnly => NoiseTargets::NonzeroOnly { link_tol },
        }
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        let fail = |field: &str, msg: &str| Err(FieldError::new(field, msg));
        if !(1..=4).contains(&self.scenario) {
            return fail("scenario", "must be 1, 2, 3 or 4");
        }
        if self.agent_counts.is_empty() || self.agent_counts.iter().any(|&n| n < 2) {
            return fail("agent_counts", "needs at least one entry, each at least 2");
        }
        if self.trials_outer == 0 {
            return fail("trials_outer", "must be positive");
        }
        if matches!(self.scenario, 2 | 3) && self.trials_inner == 0 {
            return fail("trials_inner", "must be positive");
        }
        if self.scenario == 2
            && (self.noise_variances.is_empty() || self.noise_variances.iter().any(|v| !(v.is_finite() && *v >= 0.0)))
        {
            return fail("noise_variances", "needs finite non-negative entries");
        }
        if self.scenario == 3 && self.attack_counts.is_empty() {
            return fail("attack_counts", "needs at least one entry");
        }
        if self.scenario == 4 {
            let smallest = *self.agent_counts.iter().min().expect("non-empty");
            if self.rank_sweep.is_empty() || self.rank_sweep.iter().any(|&r| r == 0 || r > smallest) {
                return fail("rank_sweep", "ranks must lie in 1..=smallest agent count");
            }
        }
        if CouplingSign::from_exponent(self.coupling_sign).is_err() {
            return fail("coupling_sign", "must be +1 or -1");
        }
        if !(self.extent > 0.0 && self.extent.is_finite()) {
            return fail("extent", "must be positive");
        }
        if !(self.link_tol > 0.0 && self.link_tol.is_finite()) {
            return fail("link_tol", "must be positive");
        }
        let mut base = self.admm.base_config();
        base.variant = lqrlr_core::admm::Variant::LowRankSoft;
        base.validate(1, 1).map_err(|e| FieldError::new("admm", e.to_string()))?;
        Ok(())
    }

    /// The fields every design depends on; two configs with equal settings
    /// produce identical designs for the same `(agents, trial)`.
    pub fn design_settings(&self) -> DesignSettings {
        DesignSettings {
            seed: self.seed,
            coupling_sign: self.coupling_sign,
            extent: self.extent,
            link_tol: self.link_tol,
            admm: self.admm.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignSettings {
    pub seed: u64,
    pub coupling_sign: i32,
    pub extent: f64,
    pub link_tol: f64,
    pub admm: AdmmSettings,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_configs_validate() {
        for id in 1..=4 {
            ScenarioConfig::defaults(id).validate().unwrap();
        }
        let mut c = ScenarioConfig::defaults(4);
        c.rank_sweep = vec![11];
        assert_eq!(c.validate().unwrap_err().field, "rank_sweep");
        let mut c = ScenarioConfig::defaults(1);
        c.coupling_sign = 0;
        assert_eq!(c.validate().unwrap_err().field, "coupling_sign");
    }

    #[test]
    fn json_round_trip() {
        let c = ScenarioConfig::defaults(2);
        let text = crate::format::to_json(&c);
        assert_eq!(serde_json::from_str::<ScenarioConfig>(&text).unwrap(), c);
    }
}
