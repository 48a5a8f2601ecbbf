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

//! Multi-agent test networks: random agent placement, the coupled
//! second-order plant, and communication accounting for designed gains.

mod calibrate;
mod links;

pub use calibrate::{calibrate_sparse_gamma, Calibration, LinkMetric, GAMMA_RANGE};
pub use links::{
    count_links, perturb_offdiag_noise, relative_link_tol, remove_links, transmission_count, Communication,
    LinkCounts, NoiseTargets, Removal,
};

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::admm::BlockStructure;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::StateSpaceModel;

/// Side length of the square the agents are placed on.
pub const DEFAULT_EXTENT: f64 = 10.0;

pub const STATES_PER_AGENT: usize = 2;

/// Agent coordinates on `[0, extent]²`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentLayout {
    pub positions: Vec<(f64, f64)>,
    pub extent: f64,
}

impl AgentLayout {
    pub fn new(positions: Vec<(f64, f64)>, extent: f64) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::InvalidConfig("layout needs at least two agents"));
        }
        let inside = |v: f64| (0.0..=extent).contains(&v);
        if !positions.iter().all(|&(x, y)| inside(x) && inside(y)) {
            return Err(Error::InvalidConfig("agent outside the placement square"));
        }
        Ok(Self { positions, extent })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.positions[i], self.positions[j]);
        libm::hypot(a.0 - b.0, a.1 - b.1)
    }
}

/// Places agents i.i.d. uniformly on `[0, extent]²` using ChaCha8 seeded
/// from `seed`.
pub fn generate_layout(n_agents: usize, extent: f64, seed: u64) -> Result<AgentLayout> {
    if !(extent > 0.0 && extent.is_finite()) {
        return Err(Error::InvalidConfig("extent must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = (0..n_agents)
        .map(|_| (rng.random::<f64>() * extent, rng.random::<f64>() * extent))
        .collect();
    AgentLayout::new(positions, extent)
}

/// Sign of the distance exponent in the inter-agent coupling `exp(±d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingSign {
    /// `exp(−d)`: coupling decays with distance.
    Decaying,
    /// `exp(+d)`: coupling grows with distance.
    Growing,
}

impl CouplingSign {
    pub fn exponent(self) -> f64 {
        match self {
            CouplingSign::Decaying => -1.0,
            CouplingSign::Growing => 1.0,
        }
    }

    pub fn from_exponent(sign: i32) -> Result<Self> {
        match sign {
            -1 => Ok(CouplingSign::Decaying),
            1 => Ok(CouplingSign::Growing),
            _ => Err(Error::InvalidConfig("coupling sign must be +1 or -1")),
        }
    }
}

/// Local dynamics of every agent.
pub const LOCAL_BLOCK: [[f64; 2]; 2] = [[1.0, 1.0], [1.0, 3.0]];

/// Builds the coupled second-order network: agent `i` owns states `2i`,
/// `2i+1` and input `i`; its local block is [`LOCAL_BLOCK`]; agent `j` feeds
/// agent `i` through `exp(±d(i,j))·I₂`; input and disturbance both enter
/// through `[0; 1]`; `Q = I`, `R = I`.
pub fn build_coupled_model(layout: &AgentLayout, sign: CouplingSign) -> Result<(StateSpaceModel, BlockStructure)> {
    let agents = layout.len();
    let n = STATES_PER_AGENT * agents;
    let mut a = Matrix::zeros(n, n);
    let mut b = Matrix::zeros(n, agents);
    for i in 0..agents {
        for (r, row) in LOCAL_BLOCK.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                a[(2 * i + r, 2 * i + c)] = v;
            }
        }
        b[(2 * i + 1, i)] = 1.0;
        for j in 0..agents {
            if i != j {
                let w = libm::exp(sign.exponent() * layout.distance(i, j));
                a[(2 * i, 2 * j)] = w;
                a[(2 * i + 1, 2 * j + 1)] = w;
            }
        }
    }
    if !a.is_finite() {
        return Err(Error::InvalidModel("coupling overflowed"));
    }
    let model = StateSpaceModel::new(a, b.clone(), b, Matrix::identity(n), Matrix::identity(agents))?;
    Ok((model, BlockStructure::uniform(agents, 1, STATES_PER_AGENT)))
}
