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

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Assignment of inputs and states to agents. Entry `(i, j)` of a gain is
/// block-diagonal (internal feedback) iff input `i` and state `j` belong to
/// the same agent; every other entry needs a communication link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStructure {
    input_groups: Vec<usize>,
    state_groups: Vec<usize>,
    agent_count: usize,
}

impl BlockStructure {
    pub fn new(input_groups: Vec<usize>, state_groups: Vec<usize>, agent_count: usize) -> Result<Self> {
        if input_groups
            .iter()
            .chain(&state_groups)
            .any(|&g| g >= agent_count)
        {
            return Err(Error::InvalidConfig("agent index out of range"));
        }
        let mut owns = vec![false; agent_count];
        for &g in input_groups.iter().chain(&state_groups) {
            owns[g] = true;
        }
        if owns.iter().any(|o| !o) {
            return Err(Error::InvalidConfig("agent owns no input and no state"));
        }
        Ok(Self {
            input_groups,
            state_groups,
            agent_count,
        })
    }

    /// Every input and state in one agent: everything is block-diagonal.
    pub fn single_agent(m: usize, n: usize) -> Self {
        Self::new(vec![0; m], vec![0; n], 1).expect("one agent owns everything")
    }

    /// `agents` agents with contiguous, equally sized input and state groups.
    pub fn uniform(agents: usize, inputs_per_agent: usize, states_per_agent: usize) -> Self {
        let inputs = (0..agents * inputs_per_agent).map(|i| i / inputs_per_agent).collect();
        let states = (0..agents * states_per_agent).map(|j| j / states_per_agent).collect();
        Self::new(inputs, states, agents).expect("uniform groups are valid")
    }

    pub fn agent_count(&self) -> usize {
        self.agent_count
    }

    pub fn input_groups(&self) -> &[usize] {
        &self.input_groups
    }

    pub fn state_groups(&self) -> &[usize] {
        &self.state_groups
    }

    pub fn m(&self) -> usize {
        self.input_groups.len()
    }

    pub fn n(&self) -> usize {
        self.state_groups.len()
    }

    #[inline]
    pub fn is_block_diagonal(&self, input: usize, state: usize) -> bool {
        self.input_groups[input] == self.state_groups[state]
    }

    pub fn inputs_of(&self, agent: usize) -> impl Iterator<Item = usize> + '_ {
        self.input_groups
            .iter()
            .enumerate()
            .filter(move |(_, &g)| g == agent)
            .map(|(i, _)| i)
    }

    pub fn states_of(&self, agent: usize) -> impl Iterator<Item = usize> + '_ {
        self.state_groups
            .iter()
            .enumerate()
            .filter(move |(_, &g)| g == agent)
            .map(|(j, _)| j)
    }

    pub fn check_gain(&self, k: &Matrix) -> Result<()> {
        k.check_shape("gain vs block structure", self.m(), self.n())
    }

    /// Zeroes every off-block-diagonal entry.
    pub fn block_trim(&self, k: &Matrix) -> Matrix {
        Matrix::from_fn(k.rows(), k.cols(), |i, j| {
            if self.is_block_diagonal(i, j) {
                k[(i, j)]
            } else {
                0.0
            }
        })
    }

    /// Zeroes every block-diagonal entry.
    pub fn off_block(&self, k: &Matrix) -> Matrix {
        Matrix::from_fn(k.rows(), k.cols(), |i, j| {
            if self.is_block_diagonal(i, j) {
                0.0
            } else {
                k[(i, j)]
            }
        })
    }

    /// Positions `(input, state)` of all off-block-diagonal entries, row-major.
    pub fn off_block_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.m() {
            for j in 0..self.n() {
                if !self.is_block_diagonal(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_coordinate_trim() {
        let s = BlockStructure::uniform(2, 1, 1);
        let k = Matrix::from_rows(&[[2.0, 5.0], [7.0, 3.0]]);
        assert_eq!(s.block_trim(&k), Matrix::from_rows(&[[2.0, 0.0], [0.0, 3.0]]));
        assert_eq!(s.off_block(&k), Matrix::from_rows(&[[0.0, 5.0], [7.0, 0.0]]));
    }

    #[test]
    fn single_agent_trim_is_identity() {
        let s = BlockStructure::single_agent(2, 3);
        let k = Matrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]);
        assert_eq!(s.block_trim(&k), k);
        assert!(s.off_block_positions().is_empty());
    }

    #[test]
    fn two_states_per_agent() {
        let s = BlockStructure::uniform(3, 1, 2);
        assert_eq!(s.states_of(1).collect::<Vec<_>>(), [2, 3]);
        assert_eq!(s.inputs_of(2).collect::<Vec<_>>(), [2]);
        assert!(s.is_block_diagonal(1, 3));
        assert!(!s.is_block_diagonal(1, 4));
        assert_eq!(s.off_block_positions().len(), 3 * 6 - 3 * 2);
    }

    #[test]
    fn rejects_bad_groups() {
        assert!(BlockStructure::new(vec![0, 2], vec![0, 1], 2).is_err());
        assert!(BlockStructure::new(vec![0, 0], vec![0, 0], 2).is_err());
    }
}
