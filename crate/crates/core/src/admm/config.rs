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

use crate::error::{Error, Result};

/// Penalty on the communication part `K_low` of the gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Nuclear norm, solved with singular value soft thresholding.
    LowRankSoft,
    /// Rank constraint, solved with truncated SVD.
    LowRankHard,
    /// Element-wise ℓ1 on off-block-diagonal entries.
    Sparse,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::LowRankSoft => "lowrank-soft",
            Variant::LowRankHard => "lowrank-hard",
            Variant::Sparse => "sparse",
        }
    }
}

impl core::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowrank-soft" => Ok(Variant::LowRankSoft),
            "lowrank-hard" => Ok(Variant::LowRankHard),
            "sparse" => Ok(Variant::Sparse),
            _ => Err(Error::InvalidConfig("unknown variant")),
        }
    }
}

/// Step-halving line search for the K-step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Backtrack {
    pub shrink: f64,
    /// Smallest step tried before declaring a stall.
    pub min_step: f64,
    /// Relative increase of the augmented Lagrangian still accepted.
    pub slack: f64,
}

impl Default for Backtrack {
    fn default() -> Self {
        Self {
            shrink: 0.5,
            min_step: 1.0 / (1u64 << 20) as f64,
            slack: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmmConfig {
    pub rho: f64,
    pub gamma: f64,
    pub rank: Option<usize>,
    pub variant: Variant,
    pub eps_pri: f64,
    pub eps_dual: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// K-step stops when `‖∇L_a‖_F ≤ inner_tol·(1 + ‖K‖_F)`.
    pub inner_tol: f64,
    pub backtrack: Backtrack,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            rho: 0.1,
            gamma: 0.0,
            rank: None,
            variant: Variant::LowRankSoft,
            eps_pri: 1e-4,
            eps_dual: 1e-4,
            max_outer: 2000,
            max_inner: 50,
            inner_tol: 1e-6,
            backtrack: Backtrack::default(),
        }
    }
}

impl AdmmConfig {
    pub fn lowrank_hard(rank: usize) -> Self {
        Self {
            variant: Variant::LowRankHard,
            rank: Some(rank),
            ..Self::default()
        }
    }

    pub fn lowrank_soft(gamma: f64) -> Self {
        Self {
            variant: Variant::LowRankSoft,
            gamma,
            ..Self::default()
        }
    }

    pub fn sparse(gamma: f64) -> Self {
        Self {
            variant: Variant::Sparse,
            gamma,
            ..Self::default()
        }
    }

    /// Checks the configuration against a gain of shape `m × n`.
    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidConfig("rho must be positive"));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidConfig("gamma must be non-negative"));
        }
        if !(self.eps_pri > 0.0 && self.eps_dual > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive"));
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::InvalidConfig("iteration caps must be at least 1"));
        }
        if !(self.inner_tol > 0.0) {
            return Err(Error::InvalidConfig("inner tolerance must be positive"));
        }
        let b = &self.backtrack;
        if !(b.shrink > 0.0 && b.shrink < 1.0 && b.min_step > 0.0 && b.slack >= 0.0) {
            return Err(Error::InvalidConfig("invalid backtracking parameters"));
        }
        if self.variant == Variant::LowRankHard {
            match self.rank {
                None => return Err(Error::InvalidConfig("lowrank-hard requires a rank")),
                Some(r) if r == 0 || r > m.min(n) => {
                    return Err(Error::InvalidConfig("rank must lie in 1..=min(m, n)"))
                }
                _ => {}
            }
        }
        Ok(())
    }
}
