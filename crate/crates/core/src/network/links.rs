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

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::admm::BlockStructure;
use crate::error::{Error, Result};
use crate::linalg::svd;
use crate::matrix::Matrix;

/// `rel · max|K|`, the magnitude above which an entry counts as a link.
pub fn relative_link_tol(k: &Matrix, rel: f64) -> f64 {
    rel * k.max_abs()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkCounts {
    /// Distinct receiving agents per sending agent.
    pub per_agent_outgoing: Vec<usize>,
    /// Ordered agent pairs `(sender, receiver)` with a link.
    pub total_links: usize,
    /// Off-block-diagonal entries above the tolerance.
    pub off_block_entries: usize,
}

impl LinkCounts {
    /// Largest out-degree: the critical node's link count.
    pub fn critical_node_links(&self) -> usize {
        self.per_agent_outgoing.iter().copied().max().unwrap_or(0)
    }
}

/// Agent `j` sends to agent `i ≠ j` iff some entry of `K` in (inputs of
/// `i`) × (states of `j`) exceeds `link_tol` in magnitude.
pub fn count_links(k: &Matrix, structure: &BlockStructure, link_tol: f64) -> LinkCounts {
    let agents = structure.agent_count();
    let mut pairs = vec![false; agents * agents];
    let mut off_block_entries = 0;
    for i in 0..k.rows() {
        for j in 0..k.cols() {
            if structure.is_block_diagonal(i, j) || k[(i, j)].abs() <= link_tol {
                continue;
            }
            off_block_entries += 1;
            let receiver = structure.input_groups()[i];
            let sender = structure.state_groups()[j];
            pairs[sender * agents + receiver] = true;
        }
    }
    let per_agent_outgoing: Vec<usize> = (0..agents)
        .map(|s| pairs[s * agents..(s + 1) * agents].iter().filter(|&&p| p).count())
        .collect();
    LinkCounts {
        total_links: per_agent_outgoing.iter().sum(),
        per_agent_outgoing,
        off_block_entries,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Communication {
    /// Each agent broadcasts `rank` scaled copies of each of its states.
    Broadcast,
    /// Each agent unicasts its states to every receiving agent.
    PointToPoint,
}

/// Per-agent transmissions needed to realize the communication part of a
/// gain: `states_per_agent × rank` for broadcast designs and
/// `states_per_agent × receivers` for point-to-point designs.
pub fn transmission_count(
    k_low: &Matrix,
    structure: &BlockStructure,
    states_per_agent: usize,
    mode: Communication,
    link_tol: f64,
) -> Result<Vec<usize>> {
    Ok(match mode {
        Communication::Broadcast => {
            let rank = if k_low.max_abs() == 0.0 {
                0
            } else {
                svd(k_low)?.numerical_rank(1e-9)
            };
            vec![states_per_agent * rank; structure.agent_count()]
        }
        Communication::PointToPoint => count_links(k_low, structure, link_tol)
            .per_agent_outgoing
            .into_iter()
            .map(|r| r * states_per_agent)
            .collect(),
    })
}

/// Which off-block entries receive channel noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseTargets {
    AllOffBlock,
    /// Only entries whose magnitude exceeds the tolerance.
    NonzeroOnly { link_tol: f64 },
}

/// Adds i.i.d. `N(0, σ²)` to the targeted off-block-diagonal entries.
pub fn perturb_offdiag_noise<R: Rng + ?Sized>(
    k: &Matrix,
    structure: &BlockStructure,
    sigma: f64,
    targets: NoiseTargets,
    rng: &mut R,
) -> Result<Matrix> {
    let normal = Normal::new(0.0, sigma).map_err(|_| Error::InvalidConfig("noise deviation must be finite and >= 0"))?;
    let mut out = k.clone();
    for (i, j) in structure.off_block_positions() {
        let hit = match targets {
            NoiseTargets::AllOffBlock => true,
            NoiseTargets::NonzeroOnly { link_tol } => k[(i, j)].abs() > link_tol,
        };
        if hit {
            out[(i, j)] += normal.sample(rng);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Removal {
    pub k: Matrix,
    pub removed: usize,
    /// Requested removals that found no remaining link.
    pub shortfall: usize,
}

/// Zeroes `count` entries drawn uniformly without replacement from the
/// off-block-diagonal entries whose magnitude exceeds `link_tol`.
pub fn remove_links<R: Rng + ?Sized>(
    k: &Matrix,
    structure: &BlockStructure,
    count: usize,
    link_tol: f64,
    rng: &mut R,
) -> Removal {
    let live: Vec<(usize, usize)> = structure
        .off_block_positions()
        .into_iter()
        .filter(|&(i, j)| k[(i, j)].abs() > link_tol)
        .collect();
    let mut out = k.clone();
    let removed = count.min(live.len());
    if removed == live.len() {
        for &(i, j) in &live {
            out[(i, j)] = 0.0;
        }
    } else {
        for idx in sample(rng, live.len(), removed).iter() {
            let (i, j) = live[idx];
            out[(i, j)] = 0.0;
        }
    }
    Removal {
        k: out,
        removed,
        shortfall: count - removed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn structure(agents: usize) -> BlockStructure {
        BlockStructure::uniform(agents, 1, 2)
    }

    #[test]
    fn block_diagonal_gain_has_no_links() {
        let s = structure(3);
        let k = s.block_trim(&Matrix::from_fn(3, 6, |i, j| 1.0 + (i + j) as f64));
        let c = count_links(&k, &s, 1e-9);
        assert_eq!(c.total_links, 0);
        assert_eq!(c.per_agent_outgoing, [0, 0, 0]);
    }

    #[test]
    fn dense_gain_links_everyone() {
        let s = structure(4);
        let k = Matrix::from_fn(4, 8, |_, _| 1.0);
        let c = count_links(&k, &s, 1e-9);
        assert_eq!(c.per_agent_outgoing, [3; 4]);
        assert_eq!(c.total_links, 12);
        assert_eq!(c.off_block_entries, 4 * 8 - 8);
        // Only the support matters.
        assert_eq!(count_links(&k.scale(1e3), &s, 1e-9), c);
    }

    #[test]
    fn rank_one_outer_product_links_everyone() {
        let s = structure(3);
        let a = [1.0, -2.0, 0.5];
        let b = [0.3, 1.0, -1.0, 2.0, 0.7, 0.1];
        let k = Matrix::from_fn(3, 6, |i, j| a[i] * b[j]);
        assert_eq!(count_links(&k, &s, 1e-12).per_agent_outgoing, [2, 2, 2]);
    }

    #[test]
    fn transmissions() {
        let s = structure(3);
        let k = Matrix::from_fn(3, 6, |i, j| (i + 1) as f64 * (j + 1) as f64);
        assert_eq!(transmission_count(&k, &s, 2, Communication::Broadcast, 0.0).unwrap(), [2; 3]);
        let zero = Matrix::zeros(3, 6);
        assert_eq!(transmission_count(&zero, &s, 2, Communication::Broadcast, 0.0).unwrap(), [0; 3]);
        // Agent 0 sends to 1 and 2; nobody else sends.
        let mut sparse = Matrix::zeros(4, 8);
        sparse[(1, 0)] = 1.0;
        sparse[(2, 1)] = 1.0;
        sparse[(3, 0)] = 1.0;
        let s4 = structure(4);
        assert_eq!(
            transmission_count(&sparse, &s4, 2, Communication::PointToPoint, 1e-9).unwrap(),
            [6, 0, 0, 0]
        );
    }

    #[test]
    fn noise_leaves_block_diagonal_untouched() {
        let s = structure(3);
        let k = Matrix::from_fn(3, 6, |i, j| (i * 6 + j) as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(perturb_offdiag_noise(&k, &s, 0.0, NoiseTargets::AllOffBlock, &mut rng).unwrap(), k);
        let noisy = perturb_offdiag_noise(&k, &s, 1.0, NoiseTargets::AllOffBlock, &mut rng).unwrap();
        assert_eq!(s.block_trim(&noisy), s.block_trim(&k));
        assert!(s.off_block_positions().iter().all(|&(i, j)| noisy[(i, j)] != k[(i, j)]));

        let mut sparse = Matrix::zeros(3, 6);
        sparse[(0, 3)] = 1.0;
        let noisy = perturb_offdiag_noise(&sparse, &s, 1.0, NoiseTargets::NonzeroOnly { link_tol: 1e-9 }, &mut rng)
            .unwrap();
        assert_eq!(count_links(&noisy, &s, 0.0).off_block_entries, 1);
    }

    #[test]
    fn noise_variance() {
        let s = BlockStructure::uniform(2, 1, 1);
        let k = Matrix::zeros(2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let sigma = 0.7;
        let draws = 100_000 / 2;
        let mut sum_sq = 0.0;
        for _ in 0..draws {
            let n = perturb_offdiag_noise(&k, &s, sigma, NoiseTargets::AllOffBlock, &mut rng).unwrap();
            sum_sq += n[(0, 1)] * n[(0, 1)] + n[(1, 0)] * n[(1, 0)];
        }
        let var = sum_sq / (2 * draws) as f64;
        assert!((var / (sigma * sigma) - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn removal_counts() {
        let s = structure(3);
        let k = Matrix::from_fn(3, 6, |i, j| 1.0 + (i * 6 + j) as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let live = count_links(&k, &s, 1e-9).off_block_entries;
        assert_eq!(remove_links(&k, &s, 0, 1e-9, &mut rng).k, k);
        let mut current = k.clone();
        for step in 1..=live {
            current = remove_links(&current, &s, 1, 1e-9, &mut rng).k;
            assert_eq!(count_links(&current, &s, 1e-9).off_block_entries, live - step);
        }
        let all = remove_links(&k, &s, live + 3, 1e-9, &mut rng);
        assert_eq!(all.k, s.block_trim(&k));
        assert_eq!((all.removed, all.shortfall), (live, 3));
    }
}
